// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_BC_HPP
#define DEGENLAB_BC_HPP

#include <string>
#include <utility>
#include <vector>

#include "degenlab/coefficients.hpp"
#include "degenlab/grid.hpp"

namespace degenlab {

/// One two-point functional
///   L u = sum_{i=0..order} alpha[i] u^[i](0) + beta[i] u^[i](b)
/// with traces taken as tau-derivatives at the interval ends.
struct BoundaryFunctional {
  int order = 0;                // m_kj in {0, 1}
  std::vector<Complex> alpha;   // size order + 1
  std::vector<Complex> beta;    // size order + 1
};

struct AxisBC {
  BoundaryFunctional first;   // j = 1, anchored at the x = 0 node
  BoundaryFunctional second;  // j = 2, anchored at the x = b node
};

/// The pair of nonlocal conditions per axis. Construction validates the
/// shape rules: orders in {0,1}, coefficient lists of length order+1,
/// alpha_{k1,m_k1} != 0, beta_{k2,m_k2} != 0, and |alpha_top| + |beta_top| > 0
/// for each condition. Violations raise InvalidBoundaryCondition.
class NonlocalBC {
public:
  explicit NonlocalBC(std::vector<AxisBC> per_axis);

  int n_axes() const noexcept { return static_cast<int>(per_axis_.size()); }
  const AxisBC& axis(int k) const { return per_axis_.at(k); }

  static AxisBC dirichlet();
  static AxisBC neumann();
  static AxisBC periodic();
  /// Same condition pair replicated over `dim` axes.
  static NonlocalBC uniform(int dim, const AxisBC& axis_bc);

private:
  std::vector<AxisBC> per_axis_;
};

/// eta_k = (-1)^{m_k1} alpha_{k1} beta_{k2} - (-1)^{m_k2} alpha_{k2} beta_{k1}
/// over the top-order coefficients; the problem on axis k is regular iff
/// eta_k != 0.
Complex eta_determinant(const NonlocalBC& bc, int axis_index);

/// Degeneracy tolerance scale for eta on one axis (the sum of the two
/// top-coefficient product magnitudes).
double eta_scale(const NonlocalBC& bc, int axis_index);

inline constexpr double kEtaRelTolerance = 1e-10;

/// Sparse rows over the axis-local nodes realizing the two functionals with
/// endpoint values and second-order one-sided tau-derivative stencils.
/// Throws EtaDegenerate when |eta_k| is below tolerance.
struct BCRows {
  std::vector<std::pair<int, Complex>> first;
  std::vector<std::pair<int, Complex>> second;
};
BCRows bc_rows(const NonlocalBC& bc, const GridSpec& grid, int axis_index);

struct ValidationMessage {
  enum class Severity { Warning, Error };
  Severity severity;
  std::string code;
  std::string text;
};

struct BCReport {
  std::vector<Complex> eta;  // per axis
  bool satisfied = false;    // all |eta_k| above tolerance
  std::vector<ValidationMessage> messages;

  bool has_errors() const {
    for (const auto& msg : messages)
      if (msg.severity == ValidationMessage::Severity::Error) return true;
    return false;
  }
};

/// Checks the discrete counterparts of the solvability conditions:
/// alpha_k < 1 - 1/p (warning), Re a_k < 0 at every node (error),
/// endpoint compatibility of a_k and A when a condition couples both ends
/// (warning), numerical range of A (warning), eta_k != 0 (error).
/// Findings are collected, never thrown.
BCReport validate_conditions(const CoefficientField& coeffs, const NonlocalBC& bc, const GridSpec& grid,
                             double spatial_p = 2.0);

} // namespace degenlab

#endif
