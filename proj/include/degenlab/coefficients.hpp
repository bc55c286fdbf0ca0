// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_COEFFICIENTS_HPP
#define DEGENLAB_COEFFICIENTS_HPP

#include <vector>

#include <Eigen/Dense>

#include "degenlab/grid.hpp"

namespace degenlab {

/// Coefficient data of the elliptic operator
///   sum_k a_k(x_k) D^[2]_k u + A(x) u + lambda u + sum_k A_k(x) D^[1]_k u.
///
/// a[k] holds the per-axis second-order coefficients sampled at the axis
/// nodes, one column per component (a diagonal coefficient in C^m; systems
/// with species-dependent diffusion use distinct columns). A0, when present,
/// holds one m x m matrix per grid node; A1[k] likewise for the optional
/// first-order terms.
struct CoefficientField {
  int m = 1;
  std::vector<Eigen::MatrixXcd> a;                // a[k]: points(k) x m
  std::vector<Eigen::MatrixXcd> A0;               // per node, m x m; empty = zero
  std::vector<std::vector<Eigen::MatrixXcd>> A1;  // A1[k] per node, m x m; empty = none

  bool has_A0() const noexcept { return !A0.empty(); }
  bool has_A1() const noexcept { return !A1.empty(); }

  /// Constant coefficients: one a value per axis broadcast over nodes and
  /// components, plus an optional constant matrix A.
  static CoefficientField constant(const GridSpec& grid, int m, const std::vector<Complex>& a_axis,
                                   const Eigen::MatrixXcd& A = Eigen::MatrixXcd());

  /// Per-axis sampled scalar coefficient broadcast over the m components.
  void set_axis_coefficient(const GridSpec& grid, int axis, const std::vector<Complex>& samples);

  /// A * u pointwise; returns u unchanged scaled by zero if A is absent.
  GridFunction apply_A0(const GridFunction& u) const;
};

} // namespace degenlab

#endif
