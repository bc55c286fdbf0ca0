// SPDX-License-Identifier: Apache-2.0

#include "degenlab/nonlinear.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "degenlab/errors.hpp"

namespace degenlab {

void NonlinearControls::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("ball radius r must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (n_steps < 1 || max_outer < 1) throw std::invalid_argument("step counts must be positive");
  if (!(tol >= 1e-12)) throw std::invalid_argument("tolerance must be at least 1e-12");
  if (d < 0.0) throw std::invalid_argument("shift d must be nonnegative");
}

namespace {

void check_finite(const Eigen::MatrixXcd& v, const char* what) {
  if (!v.allFinite()) throw CallbackFailure(std::string(what) + " returned non-finite values");
}

// First degenerate derivatives of one snapshot, one grid function per axis.
std::vector<GridFunction> first_derivatives(const GridFunction& u) {
  std::vector<GridFunction> du;
  du.reserve(static_cast<std::size_t>(u.grid().dim()));
  for (int k = 0; k < u.grid().dim(); ++k) du.push_back(degen_derivative(u, k, 1));
  return du;
}

Eigen::MatrixXcd derivative_matrix(const std::vector<GridFunction>& du, Index node, int m) {
  Eigen::MatrixXcd mat(m, static_cast<Index>(du.size()));
  for (std::size_t k = 0; k < du.size(); ++k)
    for (int c = 0; c < m; ++c) mat(c, static_cast<Index>(k)) = du[k].at(node, c);
  return mat;
}

// Frozen coefficient field: the model's a and A_k plus A(x) = B(0,x,0,0).
CoefficientField frozen_field(const NonlinearModel& model, const GridSpec& grid) {
  CoefficientField field = model.linear;
  field.m = model.m;
  field.A0.clear();
  field.A0.reserve(static_cast<std::size_t>(grid.node_count()));
  const Eigen::VectorXcd zero_u = Eigen::VectorXcd::Zero(model.m);
  const Eigen::MatrixXcd zero_du = Eigen::MatrixXcd::Zero(model.m, grid.dim());
  bool all_zero = true;
  for (Index node = 0; node < grid.node_count(); ++node) {
    Eigen::MatrixXcd A = model.B(0.0, grid.node_x(node), zero_u, zero_du);
    check_finite(A, "B callback");
    if (A.rows() != model.m || A.cols() != model.m)
      throw CallbackFailure("B callback returned a matrix of the wrong shape");
    all_zero = all_zero && A.isZero(0.0);
    field.A0.push_back(std::move(A));
  }
  if (all_zero) field.A0.clear();
  return field;
}

// Forcing table of the linearized problem at the step times 0..S:
//   G^s(x) = F(t_s, x, V^s) + [A(x) - B(t_s, x, V^s)] v^s(x).
std::vector<GridFunction> picard_forcing_table(const NonlinearModel& model, const CoefficientField& frozen,
                                               const std::vector<GridFunction>& v_snapshots, double dt,
                                               const GridSpec& grid) {
  const int m = model.m;
  std::vector<GridFunction> table;
  table.reserve(v_snapshots.size());
  for (std::size_t s = 0; s < v_snapshots.size(); ++s) {
    const double t = static_cast<double>(s) * dt;
    const GridFunction& v = v_snapshots[s];
    const auto dv = first_derivatives(v);
    GridFunction g(grid, m);
    for (Index node = 0; node < grid.node_count(); ++node) {
      const auto x = grid.node_x(node);
      const Eigen::VectorXcd u_node = v.node_values(node);
      const Eigen::MatrixXcd du_node = derivative_matrix(dv, node, m);
      Eigen::VectorXcd fv = model.F(t, x, u_node, du_node);
      check_finite(fv, "F callback");
      if (fv.size() != m) throw CallbackFailure("F callback returned a vector of the wrong shape");
      Eigen::MatrixXcd bv = model.B(t, x, u_node, du_node);
      check_finite(bv, "B callback");
      Eigen::VectorXcd g_node = fv;
      if (frozen.has_A0())
        g_node += (frozen.A0[static_cast<std::size_t>(node)] - bv) * u_node;
      else
        g_node += -bv * u_node;
      for (int c = 0; c < m; ++c) g.at(node, c) = g_node[c];
    }
    table.push_back(std::move(g));
  }
  return table;
}

std::function<GridFunction(double)> table_supplier(std::vector<GridFunction> table, double dt) {
  auto shared = std::make_shared<std::vector<GridFunction>>(std::move(table));
  return [shared, dt](double t) {
    const double pos = t / dt;
    const auto last = static_cast<double>(shared->size() - 1);
    const double clamped = std::min(std::max(pos, 0.0), last);
    const auto lo = static_cast<std::size_t>(std::floor(clamped));
    const double frac = clamped - static_cast<double>(lo);
    if (frac < 1e-9 || lo + 1 >= shared->size()) return (*shared)[lo];
    const GridFunction& a = (*shared)[lo];
    const GridFunction& b = (*shared)[lo + 1];
    return GridFunction(a.grid(), a.components(), (1.0 - frac) * a.values() + frac * b.values());
  };
}

std::vector<GridFunction> zero_series(const GridSpec& grid, int m, int n_steps) {
  return std::vector<GridFunction>(static_cast<std::size_t>(n_steps) + 1, GridFunction(grid, m));
}

ParabolicSolution run_picard(const ParabolicStepper& stepper, const NonlinearModel& model,
                             const CoefficientField& frozen, const std::vector<GridFunction>& v_snapshots) {
  auto table = picard_forcing_table(model, frozen, v_snapshots, stepper.dt(), stepper.grid());
  return stepper.march(table_supplier(std::move(table), stepper.dt()));
}

std::vector<GridFunction> difference_series(const std::vector<GridFunction>& a,
                                            const std::vector<GridFunction>& b) {
  std::vector<GridFunction> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.emplace_back(a[i].grid(), a[i].components(), a[i].values() - b[i].values());
  return out;
}

} // namespace

double y_norm(const std::vector<GridFunction>& snapshots, double dt, const CoefficientField& coeffs,
              const NormSpec& spec) {
  if (snapshots.size() < 2) throw std::invalid_argument("y_norm needs at least two snapshots");
  const GridSpec& grid = snapshots.front().grid();
  const int m = snapshots.front().components();
  const int S = static_cast<int>(snapshots.size()) - 1;

  std::vector<GridFunction> dudt, body, au;
  dudt.reserve(static_cast<std::size_t>(S));
  body.assign(snapshots.begin() + 1, snapshots.end());
  for (int s = 1; s <= S; ++s)
    dudt.emplace_back(grid, m,
                      (snapshots[static_cast<std::size_t>(s)].values() -
                       snapshots[static_cast<std::size_t>(s - 1)].values()) /
                          dt);
  double total = mixed_norm(dudt, spec, dt) + mixed_norm(body, spec, dt);
  for (int k = 0; k < grid.dim(); ++k) {
    std::vector<GridFunction> d2;
    d2.reserve(body.size());
    for (const auto& u : body) d2.push_back(degen_derivative(u, k, 2));
    total += mixed_norm(d2, spec, dt);
  }
  if (coeffs.has_A0()) {
    au.reserve(body.size());
    for (const auto& u : body) au.push_back(coeffs.apply_A0(u));
    total += mixed_norm(au, spec, dt);
  }
  return total;
}

ParabolicSolution base_solution(const NonlinearModel& model, const NonlinearControls& controls,
                                const GridSpec& grid, const NonlocalBC& bc) {
  controls.validate();
  const CoefficientField frozen = frozen_field(model, grid);
  ParabolicStepper stepper(frozen, bc, grid, controls.d, controls.T, controls.n_steps, controls.scheme);
  return run_picard(stepper, model, frozen, zero_series(grid, model.m, controls.n_steps));
}

ParabolicSolution picard_step(const ParabolicSolution& v, const NonlinearModel& model,
                              const NonlinearControls& controls, const GridSpec& grid, const NonlocalBC& bc) {
  controls.validate();
  const CoefficientField frozen = frozen_field(model, grid);
  ParabolicStepper stepper(frozen, bc, grid, controls.d, controls.T, controls.n_steps, controls.scheme);
  return run_picard(stepper, model, frozen, v.snapshots);
}

double trace_sup_norm(const ParabolicSolution& u) {
  double sup = 0.0;
  for (const auto& snap : u.snapshots) {
    const auto du = first_derivatives(snap);
    for (Index node = 0; node < snap.grid().node_count(); ++node) {
      const double u_mag = snap.node_values(node).norm();
      double total = 0.0;
      for (const auto& dk : du) total += u_mag + dk.node_values(node).norm();
      sup = std::max(sup, total);
    }
  }
  return sup;
}

std::pair<ParabolicSolution, IterationReport> solve_nonlinear(const NonlinearModel& model,
                                                              const NonlinearControls& controls,
                                                              const GridSpec& grid, const NonlocalBC& bc,
                                                              const NormSpec& spec) {
  controls.validate();
  const CoefficientField frozen = frozen_field(model, grid);
  ParabolicStepper stepper(frozen, bc, grid, controls.d, controls.T, controls.n_steps, controls.scheme);
  const double dt = stepper.dt();

  ParabolicSolution w = run_picard(stepper, model, frozen, zero_series(grid, model.m, controls.n_steps));

  IterationReport report;
  const double f_mixed = mixed_norm(w.f_samples, spec, dt);
  const double w_y = y_norm(w.snapshots, dt, frozen, spec);
  report.C0_hat = f_mixed > 0.0 ? w_y / f_mixed : 0.0;

  ParabolicSolution current = w;
  int grow_streak = 0;
  for (int iter = 0; iter < controls.max_outer; ++iter) {
    ParabolicSolution next = run_picard(stepper, model, frozen, current.snapshots);
    const double inc = y_norm(difference_series(next.snapshots, current.snapshots), dt, frozen, spec);
    report.increments.push_back(inc);
    const std::size_t n_inc = report.increments.size();
    if (n_inc >= 2 && report.increments[n_inc - 2] > 0.0)
      report.eta_hat = std::max(report.eta_hat, inc / report.increments[n_inc - 2]);

    const double dist = y_norm(difference_series(next.snapshots, w.snapshots), dt, frozen, spec);
    if (dist > controls.r) {
      report.ball_violations += 1;
      std::ostringstream msg;
      msg << "iterate left the contraction ball: ||u - w||_Y = " << dist << " > r = " << controls.r;
      throw BallExitError(msg.str(), report);
    }

    current = std::move(next);
    if (inc <= controls.tol) {
      report.converged = true;
      break;
    }
    const std::size_t n = report.increments.size();
    if (n >= 2 && report.increments[n - 1] > report.increments[n - 2]) {
      if (++grow_streak >= 3) {
        throw NoContractionError(
            "increments grew for 3 consecutive iterations; shrink T or the axis lengths", report);
      }
    } else {
      grow_streak = 0;
    }
  }

  const double u_y = y_norm(current.snapshots, dt, frozen, spec);
  report.C1_hat = u_y > 0.0 ? trace_sup_norm(current) / u_y : 0.0;

  // coefficient variation toward the degenerate corner on the final iterate
  {
    const std::array<double, kMaxDim> origin{0.0, 0.0, 0.0};
    double sup = 0.0;
    for (std::size_t s = 0; s < current.snapshots.size(); ++s) {
      const double t = static_cast<double>(s) * dt;
      const GridFunction& snap = current.snapshots[s];
      const auto du = first_derivatives(snap);
      for (Index node = 0; node < grid.node_count(); ++node) {
        const Eigen::VectorXcd u_node = snap.node_values(node);
        const Eigen::MatrixXcd du_node = derivative_matrix(du, node, model.m);
        const Eigen::MatrixXcd at_x = model.B(t, grid.node_x(node), u_node, du_node);
        const Eigen::MatrixXcd at_origin = model.B(t, origin, u_node, du_node);
        sup = std::max(sup, (at_x - at_origin).norm());
      }
    }
    report.delta_b = sup;
  }

  return {std::move(current), report};
}

double nonlinear_residual(const ParabolicSolution& u, const NonlinearModel& model,
                          const NonlinearControls& controls, const NormSpec& spec) {
  const GridSpec& grid = u.snapshots.front().grid();
  const int m = model.m;
  const double dt = u.dt;
  const int S = u.steps();

  const auto is_boundary_node = [&](Index node) {
    const auto j = grid.unflatten(node);
    for (int k = 0; k < grid.dim(); ++k)
      if (j[static_cast<std::size_t>(k)] == 0 || j[static_cast<std::size_t>(k)] == grid.points(k) - 1)
        return true;
    return false;
  };

  std::vector<GridFunction> residuals;
  residuals.reserve(static_cast<std::size_t>(S));
  for (int s = 1; s <= S; ++s) {
    const double t = s * dt;
    const GridFunction& us = u.snapshots[static_cast<std::size_t>(s)];
    const GridFunction& up = u.snapshots[static_cast<std::size_t>(s - 1)];
    const auto du = first_derivatives(us);
    std::vector<GridFunction> d2;
    d2.reserve(static_cast<std::size_t>(grid.dim()));
    for (int k = 0; k < grid.dim(); ++k) d2.push_back(degen_derivative(us, k, 2));

    GridFunction res(grid, m);
    for (Index node = 0; node < grid.node_count(); ++node) {
      if (is_boundary_node(node)) continue;
      const auto j = grid.unflatten(node);
      const auto x = grid.node_x(node);
      const Eigen::VectorXcd u_node = us.node_values(node);
      const Eigen::MatrixXcd du_node = derivative_matrix(du, node, m);
      Eigen::VectorXcd r = (u_node - up.node_values(node)) / dt;
      for (int k = 0; k < grid.dim(); ++k) {
        const auto& ak = model.linear.a[static_cast<std::size_t>(k)];
        for (int c = 0; c < m; ++c)
          r[c] += ak(j[static_cast<std::size_t>(k)], c) * d2[static_cast<std::size_t>(k)].at(node, c);
      }
      if (model.linear.has_A1()) {
        for (int k = 0; k < grid.dim(); ++k) {
          if (model.linear.A1[static_cast<std::size_t>(k)].empty()) continue;
          r += model.linear.A1[static_cast<std::size_t>(k)][static_cast<std::size_t>(node)] * du_node.col(k);
        }
      }
      r += model.B(t, x, u_node, du_node) * u_node + controls.d * u_node;
      r -= model.F(t, x, u_node, du_node);
      for (int c = 0; c < m; ++c) res.at(node, c) = r[c];
    }
    residuals.push_back(std::move(res));
  }
  return mixed_norm(residuals, spec, dt);
}

} // namespace degenlab
