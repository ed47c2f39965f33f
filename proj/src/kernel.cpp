#include "brwlab/kernel.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace brw {

MomentKernel::MomentKernel(std::shared_ptr<const BRWModel> model) : model_(std::move(model)) {}

const MomentKernel::Row& MomentKernel::row(VertexId v) const {
  {
    std::shared_lock lock(mu_);
    if (static_cast<std::size_t>(v) < rows_.size() && rows_[static_cast<std::size_t>(v)])
      return *rows_[static_cast<std::size_t>(v)];
  }
  const SiteLaw& law = model_->law(v);  // outside the row lock; may generate
  auto fresh = std::make_unique<Row>();
  if (const auto* e = law.as_explicit()) {
    std::map<VertexId, double> acc;
    for (const auto& [cfg, p] : e->outcomes)
      for (const auto& [child, c] : cfg.counts) acc[child] += p * static_cast<double>(c);
    for (const auto& [child, m] : acc)
      if (m != 0.0) fresh->entries.emplace_back(child, m);
  } else if (const auto* d = law.as_diffusion()) {
    if (d->from_rates) {
      double lambda = model_->lambda();
      for (const auto& [child, k] : d->rates) fresh->entries.emplace_back(child, lambda * k);
    } else {
      for (const auto& [child, p] : d->placement)
        fresh->entries.emplace_back(child, p * d->mean_children);
    }
  }
  for (const auto& [child, m] : fresh->entries) {
    (void)child;
    fresh->sum += m;
  }
  std::unique_lock lock(mu_);
  if (rows_.size() <= static_cast<std::size_t>(v)) rows_.resize(static_cast<std::size_t>(v) + 1);
  if (!rows_[static_cast<std::size_t>(v)]) rows_[static_cast<std::size_t>(v)] = std::move(fresh);
  return *rows_[static_cast<std::size_t>(v)];
}

double MomentKernel::entry(VertexId x, VertexId y) const {
  for (const auto& [child, m] : row(x).entries)
    if (child == y) return m;
  return 0.0;
}

namespace {
// Labels may contain commas (lattice coordinates), so quote when needed.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}
}  // namespace

std::string MomentKernel::to_csv(const Window& w) const {
  std::vector<std::pair<std::pair<std::string, std::string>, double>> lines;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.dist[i] >= w.radius && !model_->is_finite()) continue;  // frontier rows unknown
    VertexId x = w.verts[i];
    for (const auto& [y, m] : row(x).entries)
      lines.push_back({{model_->label(x), model_->label(y)}, m});
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream out;
  out << "src,dst,value\n";
  char buf[64];
  for (const auto& [key, m] : lines) {
    std::snprintf(buf, sizeof(buf), "%.17g", m);
    out << csv_field(key.first) << "," << csv_field(key.second) << "," << buf << "\n";
  }
  return out.str();
}

std::shared_ptr<MomentKernel> make_kernel(std::shared_ptr<const BRWModel> model) {
  return std::make_shared<MomentKernel>(std::move(model));
}

}  // namespace brw
