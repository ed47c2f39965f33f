#pragma once

#include <string>
#include <vector>

#include "brwlab/kernel.hpp"
#include "brwlab/model.hpp"

namespace brw {

// How to fill values for vertices outside the truncation window when applying
// the offspring generating function. PinZero treats emigrants as surviving
// forever (lower bound on extinction quantities); PinOne discards their
// progeny (upper bound).
enum class BoundaryPolicy { PinZero, PinOne };

inline double boundary_value(BoundaryPolicy p) { return p == BoundaryPolicy::PinZero ? 0.0 : 1.0; }
inline const char* boundary_name(BoundaryPolicy p) { return p == BoundaryPolicy::PinZero ? "pin-0" : "pin-1"; }

struct IterOptions {
  double tol = defaults::fixed_point_tol;
  long max_iters = defaults::max_fixed_point_iters;
};

struct FixedPointResult {
  std::vector<double> values;  // parallel to window.verts
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
};

// One evaluation of the offspring generating function G(z | x). Values for
// vertices missing from the window come from `outside`.
double eval_G(const BRWModel& model, VertexId x, const Window& w, const std::vector<double>& z,
              double outside);

// Alternative fixed-point form for geometric-count sites:
//   H(z | x) = z(x) * (M z)(x) / (1 + mean(x)) + 1 / (1 + mean(x)).
// It has the same fixed points as G there; exposed as a cross-check.
double eval_H(const MomentKernel& kernel, VertexId x, const Window& w, const std::vector<double>& z,
              double outside);

// Extinction-type vector with certified truncation bracket: `lower` iterates
// with pin-0 outside, `upper` with pin-1. Both runs ascend from zero (or
// descend from one, for never-hit) and are monotone sweep by sweep.
struct ExtinctionBracket {
  Window window;
  std::vector<VertexId> A;  // empty: plain global extinction
  FixedPointResult lower, upper;
  std::string quantity;  // "global-extinction", "never-hit", "local-extinction"
};

// Probability that the whole population eventually dies out; bracket by
// boundary policy.
ExtinctionBracket global_extinction_bracket(std::shared_ptr<const BRWModel> model, int radius,
                                            const IterOptions& opt = {});

// Probability that no particle ever occupies A at any generation >= 1.
// Coordinates on A are reported with the same reading (no return to A), the
// masked iteration pins them to zero internally.
ExtinctionBracket never_hit_bracket(std::shared_ptr<const BRWModel> model,
                                    const std::vector<VertexId>& A, int radius,
                                    const IterOptions& opt = {});

// Probability that A is eventually free of particles forever (extinction in
// A). Initialized from the never-hit vector of matching policy so the
// ascending recursion targets the right fixed point. `from_zero` repeats the
// upper run started from the all-zero vector as a cross-check (it converges to
// plain global extinction instead).
struct LocalExtinctionResult {
  ExtinctionBracket q;            // quantity "local-extinction"
  ExtinctionBracket never_hit;    // the initializer
  FixedPointResult from_zero;     // diagnostic, upper policy
};
LocalExtinctionResult local_extinction_vector(std::shared_ptr<const BRWModel> model,
                                              const std::vector<VertexId>& A, int radius,
                                              const IterOptions& opt = {});

// Conjugated generating function of the process conditioned on dying out
// being impossible: Ghat(z|x) = (G(qbar + z (1 - qbar) | x) - qbar(x)) / (1 - qbar(x)).
struct NoDeathTransform {
  Window window;
  std::vector<double> qbar;    // vector used for the conjugation
  double qbar_outside = 1.0;   // boundary-policy value beyond the window
  std::vector<char> defined;   // false where qbar is 1 within tolerance
  std::shared_ptr<const BRWModel> model;

  // zhat lives on the window; outside_hat fills the rest.
  double eval(VertexId x, const std::vector<double>& zhat, double outside_hat) const;
};
NoDeathTransform nodeath_generating_function(std::shared_ptr<const BRWModel> model, int radius,
                                             BoundaryPolicy policy = BoundaryPolicy::PinOne,
                                             const IterOptions& opt = {});

// For z >= qbar with G(z) >= z, the conjugated values (z - qbar)/(1 - qbar)
// cannot have a strict local maximum: at every vertex with a nonempty
// neighborhood they are either constant on the neighborhood or exceeded by
// some neighbor. Checks interior vertices of the window.
struct MaxPrincipleResult {
  bool precondition_ok = false;
  std::string precondition_msg;
  bool holds = false;
  struct Violation {
    VertexId x;
    double value, max_neighbor, min_neighbor;
  };
  std::vector<Violation> violations;
};
MaxPrincipleResult maximum_principle_check(const std::shared_ptr<const BRWModel>& model,
                                           const Window& w, const std::vector<double>& z,
                                           const std::vector<double>& qbar, double tol = 1e-9);

// Certificate that local survival at A is never strong: v must dominate the
// global extinction vector, satisfy G(v) >= v away from A, and be strictly
// larger (after conjugation) somewhere than everywhere on A. The domain test
// compares against the lower extinction bound and the separation test uses
// the conservative side of the bracket, so a Verified answer is backed by the
// computed bounds rather than by point estimates.
enum class CertificateStatus { Verified, FailedDomain, FailedGrowth, FailedSeparation };

struct MVCertificateResult {
  CertificateStatus status = CertificateStatus::FailedDomain;
  std::string detail;
  double min_growth_slack = 0.0;  // min over interior non-A of G(v|x) - v(x)
  double separation = 0.0;        // best tau(v)(x0) - max over A of tau(v)
  VertexId witness = kNoVertex;   // x0 achieving the separation
  VertexId failing = kNoVertex;   // coordinate responsible for a failure
  bool verified() const { return status == CertificateStatus::Verified; }
};
MVCertificateResult mv_certificate_check(const std::shared_ptr<const BRWModel>& model,
                                         const Window& w, const std::vector<VertexId>& A,
                                         const std::vector<double>& v,
                                         const std::vector<double>& qbar_lower,
                                         const std::vector<double>& qbar_upper,
                                         double growth_tol = 1e-8, double domain_tol = 1e-6);

// Interior positions of a window: law generated and every possible child
// inside the window.
std::vector<char> interior_mask(const BRWModel& model, const Window& w);

// Serialization used by the command line tool and tests.
std::string extinction_to_json(const ExtinctionBracket& b);
std::string extinction_to_csv(const ExtinctionBracket& b);

}  // namespace brw
