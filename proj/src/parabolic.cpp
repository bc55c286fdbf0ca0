// SPDX-License-Identifier: Apache-2.0

#include "degenlab/parabolic.hpp"

#include <cmath>
#include <stdexcept>

#include "degenlab/errors.hpp"

namespace degenlab {

std::string scheme_name(Scheme s) {
  return s == Scheme::ImplicitEuler ? "implicit-euler" : "crank-nicolson";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "implicit-euler") return Scheme::ImplicitEuler;
  if (name == "crank-nicolson") return Scheme::CrankNicolson;
  throw std::invalid_argument("unknown scheme: " + name);
}

namespace {

// Stepping matrix: identity + theta*dt*(O + d) on the equation rows, the bc
// rows verbatim (constraints are enforced at the new time level).
SparseMatrixXcd stepping_matrix(const DiscreteOperator& op, double theta_dt, double d) {
  SparseMatrixXcd mat = op.matrix;
  for (int outer = 0; outer < mat.outerSize(); ++outer) {
    for (SparseMatrixXcd::InnerIterator it(mat, outer); it; ++it) {
      if (op.is_bc_row[static_cast<std::size_t>(it.row())]) continue;
      it.valueRef() *= theta_dt;
      if (it.row() == it.col()) it.valueRef() += 1.0 + theta_dt * d;
    }
  }
  return mat;
}

// Apply the equation rows of (O + d) to a state (bc rows produce zero).
Eigen::VectorXcd apply_operator(const DiscreteOperator& op, double d, const Eigen::VectorXcd& u) {
  Eigen::VectorXcd y = op.matrix * u + d * u;
  for (Index r : op.bc_rows) y[r] = 0.0;
  return y;
}

// First-mode probe for the oscillation heuristic: quadrature inner product
// with the lowest tau-sine profile, averaged over components.
std::vector<double> first_mode_profile(const GridSpec& grid) {
  const auto weights = quadrature_weights(grid);
  std::vector<double> probe(weights.size());
  for (Index node = 0; node < grid.node_count(); ++node) {
    const auto j = grid.unflatten(node);
    double phi = 1.0;
    for (int k = 0; k < grid.dim(); ++k) {
      const double tau = grid.tau_nodes(k)[static_cast<std::size_t>(j[k])];
      phi *= std::sin(M_PI * tau / grid.axis(k).tau_b());
    }
    probe[static_cast<std::size_t>(node)] = phi * weights[static_cast<std::size_t>(node)];
  }
  return probe;
}

double probe_coefficient(const std::vector<double>& probe, const GridFunction& u) {
  double acc = 0.0;
  for (Index node = 0; node < u.grid().node_count(); ++node) {
    double mean = 0.0;
    for (int c = 0; c < u.components(); ++c) mean += u.at(node, c).real();
    acc += probe[static_cast<std::size_t>(node)] * mean / u.components();
  }
  return acc;
}

} // namespace

ParabolicStepper::ParabolicStepper(CoefficientField coeffs, NonlocalBC bc, GridSpec grid, double d, double T,
                                   int n_steps, Scheme scheme)
    : coeffs_(std::move(coeffs)),
      bc_(std::move(bc)),
      grid_(std::move(grid)),
      d_(d),
      dt_(T / n_steps),
      n_steps_(n_steps),
      scheme_(scheme),
      op_(assemble(coeffs_, bc_, grid_, Complex(0.0, 0.0))),
      step_op_(op_) {
  if (!(T > 0.0) || n_steps < 1) throw std::invalid_argument("stepper needs T > 0 and n_steps >= 1");
  if (d < 0.0) throw std::invalid_argument("shift d must be nonnegative");
  const double theta = scheme_ == Scheme::ImplicitEuler ? 1.0 : 0.5;
  step_op_.matrix = stepping_matrix(op_, theta * dt_, d_);
  solver_ = std::make_unique<LinearSolver>(step_op_);
}

ParabolicSolution ParabolicStepper::march(const std::function<GridFunction(double)>& forcing) const {
  if (!forcing) throw std::invalid_argument("march needs a forcing supplier");

  ParabolicSolution solution;
  solution.scheme = scheme_;
  solution.dt = dt_;
  solution.d = d_;
  solution.coeffs = coeffs_;
  solution.snapshots.reserve(static_cast<std::size_t>(n_steps_) + 1);
  solution.f_samples.reserve(static_cast<std::size_t>(n_steps_));
  solution.snapshots.emplace_back(grid_, coeffs_.m);  // u(0) = 0

  const auto probe = first_mode_profile(grid_);
  double prev_coeff = 0.0, prev_delta = 0.0, max_coeff = 0.0;
  int alternations = 0;
  bool warned = false;

  for (int s = 0; s < n_steps_; ++s) {
    const double t_next = (s + 1) * dt_;
    const Eigen::VectorXcd& u_prev = solution.snapshots.back().values();

    GridFunction f_next = forcing(t_next);
    if (!(f_next.grid() == grid_) || f_next.components() != coeffs_.m)
      throw std::invalid_argument("forcing supplier returned an incompatible grid function");

    Eigen::VectorXcd rhs;
    if (scheme_ == Scheme::ImplicitEuler) {
      rhs = u_prev + dt_ * f_next.values();
    } else {
      const GridFunction f_mid = forcing(t_next - 0.5 * dt_);
      rhs = u_prev - 0.5 * dt_ * apply_operator(op_, d_, u_prev) + dt_ * f_mid.values();
    }
    for (Index r : op_.bc_rows) rhs[r] = 0.0;

    solution.snapshots.emplace_back(grid_, coeffs_.m, solver_->solve(rhs));
    solution.f_samples.push_back(std::move(f_next));

    // oscillation heuristic on the first-mode coefficient
    const double coeff = probe_coefficient(probe, solution.snapshots.back());
    max_coeff = std::max(max_coeff, std::abs(coeff));
    const double delta = coeff - prev_coeff;
    if (s >= 1 && !warned) {
      const double guard = 1e-12 * std::max(max_coeff, 1e-300);
      if (std::abs(delta) > guard && std::abs(prev_delta) > guard && delta * prev_delta < 0.0) {
        if (++alternations >= 3) {
          solution.warnings.push_back(
              "stability: first-mode coefficient alternates sign, time step too large for " +
              scheme_name(scheme_));
          warned = true;
        }
      } else {
        alternations = 0;
      }
    }
    prev_delta = delta;
    prev_coeff = coeff;
  }
  return solution;
}

ParabolicSolution step_scheme(const ParabolicProblem& problem, Scheme scheme) {
  if (!(problem.T > 0.0) || problem.n_steps < 1)
    throw std::invalid_argument("parabolic problem needs T > 0 and n_steps >= 1");
  ParabolicStepper stepper(problem.coeffs, problem.bc, problem.grid, problem.d, problem.T, problem.n_steps,
                           scheme);
  return stepper.march(problem.forcing);
}

RegularityDiagnostics regularity_diagnostics(const ParabolicSolution& solution, const NormSpec& spec) {
  if (solution.steps() < 4)
    throw std::invalid_argument("regularity diagnostics need at least 4 time steps");
  const double dt = solution.dt;
  const int S = solution.steps();
  const GridSpec& grid = solution.snapshots.front().grid();
  const int m = solution.snapshots.front().components();

  std::vector<GridFunction> dudt, au;
  dudt.reserve(static_cast<std::size_t>(S));
  au.reserve(static_cast<std::size_t>(S));
  const std::vector<GridFunction> body(solution.snapshots.begin() + 1, solution.snapshots.end());
  for (int s = 1; s <= S; ++s) {
    GridFunction diff(grid, m,
                      (solution.snapshots[static_cast<std::size_t>(s)].values() -
                       solution.snapshots[static_cast<std::size_t>(s - 1)].values()) /
                          dt);
    dudt.push_back(std::move(diff));
    au.push_back(solution.coeffs.apply_A0(solution.snapshots[static_cast<std::size_t>(s)]));
  }

  RegularityDiagnostics diag;
  diag.dudt_norm = mixed_norm(dudt, spec, dt);
  for (int k = 0; k < grid.dim(); ++k) {
    std::vector<GridFunction> d2;
    d2.reserve(body.size());
    for (const auto& u : body) d2.push_back(degen_derivative(u, k, 2));
    diag.d2_norm += mixed_norm(d2, spec, dt);
  }
  diag.Au_norm = solution.coeffs.has_A0() ? mixed_norm(au, spec, dt) : 0.0;
  diag.f_norm = mixed_norm(solution.f_samples, spec, dt);
  if (diag.f_norm == 0.0) throw DivisionByZero("maximal regularity ratio undefined for zero forcing");
  diag.ratio = (diag.dudt_norm + diag.d2_norm + diag.Au_norm) / diag.f_norm;
  return diag;
}

double maximal_regularity_ratio(const ParabolicSolution& solution, const NormSpec& spec) {
  return regularity_diagnostics(solution, spec).ratio;
}

} // namespace degenlab
