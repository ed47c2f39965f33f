#include "brwlab/law.hpp"

#include <cmath>

namespace brw {

double count_law_mean(const CountLaw& law) {
  if (const auto* f = std::get_if<FiniteCountLaw>(&law)) {
    double m = 0.0;
    for (const auto& [k, p] : f->pmf) m += static_cast<double>(k) * p;
    return m;
  }
  return std::get<GeometricCountLaw>(law).mean;
}

double count_law_pgf(const CountLaw& law, double s) {
  if (const auto* f = std::get_if<FiniteCountLaw>(&law)) {
    double g = 0.0;
    for (const auto& [k, p] : f->pmf) {
      double t = 1.0;
      if (k > 0) t = (s == 0.0) ? 0.0 : std::pow(s, static_cast<double>(k));
      g += p * t;
    }
    return g;
  }
  double m = std::get<GeometricCountLaw>(law).mean;
  // sum_k (1/(1+m)) (m/(1+m))^k s^k = 1 / (1 + m (1 - s))
  return 1.0 / (1.0 + m * (1.0 - s));
}

double count_law_mass_at_zero(const CountLaw& law) {
  if (const auto* f = std::get_if<FiniteCountLaw>(&law)) {
    double p0 = 0.0;
    for (const auto& [k, p] : f->pmf)
      if (k == 0) p0 += p;
    return p0;
  }
  double m = std::get<GeometricCountLaw>(law).mean;
  return 1.0 / (1.0 + m);
}

double SiteLaw::mean_total() const {
  if (const auto* e = as_explicit()) {
    double m = 0.0;
    for (const auto& [cfg, p] : e->outcomes) m += p * static_cast<double>(cfg.total());
    return m;
  }
  const auto& d = std::get<DiffusionSiteLaw>(law);
  return d.mean_children;
}

double SiteLaw::mass_no_children() const {
  if (const auto* e = as_explicit()) {
    double p0 = 0.0;
    for (const auto& [cfg, p] : e->outcomes)
      if (cfg.counts.empty()) p0 += p;
    return p0;
  }
  const auto& d = std::get<DiffusionSiteLaw>(law);
  return count_law_mass_at_zero(d.count);
}

}  // namespace brw
