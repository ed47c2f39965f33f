#pragma once

#include <vector>

#include "brwlab/digraph.hpp"
#include "brwlab/kernel.hpp"

namespace brw {

// Spectral radius of a nonnegative irreducible matrix by power iteration on
// the period-th power, with the ratio sandwich min_i (Bx)_i / x_i <= rho(B)
// <= max_i as a certified stopping rule. lower/upper hold at every iterate,
// not only in the limit.
struct PerronResult {
  double value = 0.0;
  double lower = 0.0, upper = 0.0;  // certified bracket for value
  std::vector<double> vec;          // positive right vector, sup norm 1
  std::vector<VertexId> members;    // submatrix order (empty for dense input)
  int period = 1;
  long iterations = 0;
  bool converged = false;
};

// Perron root of one strongly connected class from a digraph analysis. The
// class may touch the window boundary; the result is then the root of the
// visible part, a certified lower bound for the full operator.
PerronResult class_perron(const MomentKernel& kernel, const DigraphAnalysis& a, int cls,
                          double tol = defaults::perron_tol, long max_iters = 200000);

// Dense variant for small explicit matrices. Throws DomainError when the
// matrix has a negative entry or its support digraph is not strongly
// connected.
PerronResult dense_perron(const std::vector<std::vector<double>>& A,
                          double tol = defaults::perron_tol, long max_iters = 200000);

}  // namespace brw
