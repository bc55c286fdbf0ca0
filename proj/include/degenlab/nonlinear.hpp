// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_NONLINEAR_HPP
#define DEGENLAB_NONLINEAR_HPP

#include <functional>
#include <limits>
#include <utility>

#include "degenlab/parabolic.hpp"

namespace degenlab {

/// Callbacks receive the time, the node position, the state u in C^m, and
/// the first degenerate derivatives Du as an m x dim matrix (column k holds
/// D^[1]_k u). One-sided stencils feed the boundary nodes, so the arguments
/// are always defined. Callbacks must be reentrant and side-effect free.
using MatrixCallback = std::function<Eigen::MatrixXcd(
    double t, const std::array<double, kMaxDim>& x, const Eigen::VectorXcd& u, const Eigen::MatrixXcd& du)>;
using VectorCallback = std::function<Eigen::VectorXcd(
    double t, const std::array<double, kMaxDim>& x, const Eigen::VectorXcd& u, const Eigen::MatrixXcd& du)>;

/// du/dt + sum_k a_k D^[2]_k u + B(t,x,u,Du) u = F(t,x,u,Du), u(0) = 0.
/// `linear` carries the per-axis a coefficients and optional first-order
/// fields; its matrix field slot is ignored, the frozen matrix is
/// A(x) = B(0,x,0,0).
struct NonlinearModel {
  int m = 1;
  CoefficientField linear;
  MatrixCallback B;
  VectorCallback F;
  double declared_r_max = std::numeric_limits<double>::infinity();
  std::function<double(double)> lipschitz_L;  // declared estimate, informational
};

struct NonlinearControls {
  double r = 1.0;        // contraction ball radius
  double T = 1.0;        // horizon
  int n_steps = 16;
  int max_outer = 25;
  double tol = 1e-10;
  double d = 0.0;        // nonnegative shift folded into the frozen operator
  Scheme scheme = Scheme::ImplicitEuler;

  void validate() const;
};

struct IterationReport {
  std::vector<double> increments;  // ||u^{s+1} - u^s||_Y
  double eta_hat = 0.0;            // max ratio of successive increments
  bool converged = false;
  int ball_violations = 0;
  double C0_hat = 0.0;  // ||w||_Y / ||f||  of the base solve
  double C1_hat = 0.0;  // trace_sup_norm(u) / ||u||_Y
  double delta_b = 0.0; // sup_x ||B(t,x,W) - B(t,0,W)|| on the final iterate
};

class NoContractionError : public std::runtime_error {
public:
  NoContractionError(const std::string& what, IterationReport report)
      : std::runtime_error(what), report(std::move(report)) {}
  IterationReport report;
};

class BallExitError : public std::runtime_error {
public:
  BallExitError(const std::string& what, IterationReport report)
      : std::runtime_error(what), report(std::move(report)) {}
  IterationReport report;
};

/// Discrete solution-space norm:
///   mixed(du/dt) + sum_k mixed(D^[2]_k u) + mixed(A u) + mixed(u)
/// over snapshots 0..S with backward-difference time derivatives.
double y_norm(const std::vector<GridFunction>& snapshots, double dt, const CoefficientField& coeffs,
              const NormSpec& spec);

/// Frozen linear problem: A(x) = B(0,x,0,0), forcing f = F(.,0,0).
ParabolicSolution base_solution(const NonlinearModel& model, const NonlinearControls& controls,
                                const GridSpec& grid, const NonlocalBC& bc);

/// One application of the contraction map Q: solve the linearized problem
/// with forcing F(t,x,V) + [A(x) - B(t,x,V)] v. Throws CallbackFailure when
/// a callback produces non-finite values.
ParabolicSolution picard_step(const ParabolicSolution& v, const NonlinearModel& model,
                              const NonlinearControls& controls, const GridSpec& grid, const NonlocalBC& bc);

/// Iterate u^{(0)} = w, u^{(s+1)} = Q u^{(s)} until the Y-norm increment
/// drops below tol. Raises NoContractionError when increments grow three
/// times in a row (shrink T or the axis lengths), BallExitError when an
/// iterate leaves the ball around the base solution.
std::pair<ParabolicSolution, IterationReport> solve_nonlinear(const NonlinearModel& model,
                                                              const NonlinearControls& controls,
                                                              const GridSpec& grid, const NonlocalBC& bc,
                                                              const NormSpec& spec = {});

/// sup over nodes and steps of sum_k ( ||u|| + ||D^[1]_k u|| ) in C^m, the
/// discrete surrogate for the interpolation-space trace bound.
double trace_sup_norm(const ParabolicSolution& u);

/// Mixed norm of the discrete residual of the (d-shifted) nonlinear
/// equation at the interior nodes, with backward-difference du/dt.
double nonlinear_residual(const ParabolicSolution& u, const NonlinearModel& model,
                          const NonlinearControls& controls, const NormSpec& spec = {});

} // namespace degenlab

#endif
