// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_NORMS_HPP
#define DEGENLAB_NORMS_HPP

#include <vector>

#include "degenlab/coefficients.hpp"
#include "degenlab/grid.hpp"

namespace degenlab {

/// Exponents of the weighted L_p (space) and mixed L_(p0,p) (time x space)
/// norms. Both must be finite; p = infinity is rejected.
struct NormSpec {
  double spatial_p = 2.0;
  double temporal_p0 = 2.0;

  void validate() const;
};

/// Pairwise (cascade) summation; the fixed reduction order keeps norm
/// values reproducible regardless of threading.
double pairwise_sum(const std::vector<double>& terms);

/// Quadrature node weights realizing the trapezoid rule for integrals
/// over the x domain: per axis, uniform-tau trapezoid weights times the
/// Jacobian x^alpha evaluated from the stored x nodes.
std::vector<double> quadrature_weights(const GridSpec& grid);

/// Same weights written through the tau nodes, ((1-alpha) tau)^(alpha/(1-alpha));
/// algebraically the same sum as quadrature_weights.
std::vector<double> quadrature_weights_tau(const GridSpec& grid);

/// ( integral ||u(x)||^p dx )^(1/p) by quadrature on the graded grid,
/// Euclidean norm on C^m.
double lp_norm(const GridFunction& u, const NormSpec& spec);

/// The same norm computed through the weighted tau-coordinate sum; the two
/// code paths agree to roundoff.
double lp_norm_tau(const GridFunction& u, const NormSpec& spec);

/// Per-component integral of u over the domain (signed, not a norm).
Eigen::VectorXcd integral(const GridFunction& u);

/// Degenerate Sobolev norm surrogate
///   ||u||_p + ||A u||_p + sum_k ||D^[2]_k u||_p,
/// with A the run's matrix field (pass nullptr for A = 0).
double sobolev_norm(const GridFunction& u, const NormSpec& spec, const CoefficientField* coeffs = nullptr);

/// Mixed norm ( sum_t dt ||u(t)||_p^{p0} )^{1/p0}, rectangle rule over the
/// given snapshots.
double mixed_norm(const std::vector<GridFunction>& series, const NormSpec& spec, double dt);

} // namespace degenlab

#endif
