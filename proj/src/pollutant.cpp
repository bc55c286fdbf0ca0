// SPDX-License-Identifier: Apache-2.0

#include "degenlab/pollutant.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "degenlab/errors.hpp"
#include "degenlab/io.hpp"

namespace degenlab {

double SourceSpec::value(const std::array<double, kMaxDim>& x) const {
  if (amplitude == 0.0) return 0.0;
  double q = 0.0;
  for (int k = 0; k < kMaxDim; ++k) {
    const double dx = x[static_cast<std::size_t>(k)] - center[static_cast<std::size_t>(k)];
    q += dx * dx;
  }
  return amplitude * std::exp(-q / (2.0 * width * width));
}

ReactionKind reaction_from_name(const std::string& name) {
  if (name == "none") return ReactionKind::None;
  if (name == "chapman-toy") return ReactionKind::ChapmanToy;
  if (name == "exchange-toy") return ReactionKind::ExchangeToy;
  throw std::invalid_argument("unknown reaction kind: " + name);
}

std::string reaction_name(ReactionKind kind) {
  switch (kind) {
    case ReactionKind::None: return "none";
    case ReactionKind::ChapmanToy: return "chapman-toy";
    case ReactionKind::ExchangeToy: return "exchange-toy";
  }
  return "none";
}

PollutantModel PollutantModel::make(GridSpec grid, NonlocalBC bc) {
  PollutantModel model{std::move(grid), std::move(bc)};
  for (int k = 0; k < kMaxDim; ++k)
    for (int i = 0; i < kSpecies; ++i) {
      model.diffusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = 1.0;
      model.advect_scale[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = 1.0;
    }
  return model;
}

namespace {

Eigen::VectorXcd reactions(ReactionKind kind, const std::array<double, 2>& rates, const Eigen::VectorXcd& u) {
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(kSpecies);
  const double k1 = rates[0], k2 = rates[1];
  const Complex pair = u[0] * u[1];
  switch (kind) {
    case ReactionKind::None:
      break;
    case ReactionKind::ChapmanToy:
      f[0] = -k1 * pair;
      f[1] = -k1 * pair + k2 * u[2];
      f[2] = k1 * pair - k2 * u[2];
      break;
    case ReactionKind::ExchangeToy:
      // zero-sum exchange: 1 + 2 <-> 3 counted with weight 2
      f[0] = -k1 * pair + k2 * u[2];
      f[1] = -k1 * pair + k2 * u[2];
      f[2] = 2.0 * (k1 * pair - k2 * u[2]);
      break;
  }
  return f;
}

} // namespace

NonlinearModel to_abstract(const PollutantModel& model) {
  const GridSpec& grid = model.grid;
  if (grid.dim() != kMaxDim) throw ConditionViolation("pollutant model needs a 3D grid");
  for (int k = 0; k < kMaxDim; ++k)
    for (int i = 0; i < kSpecies; ++i)
      if (!(model.diffusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] > 0.0))
        throw ConditionViolation("pollutant diffusivities must be positive (physical convention)");

  NonlinearModel abstract;
  abstract.m = kSpecies;
  abstract.linear.m = kSpecies;

  // second-order coefficients, negated to the elliptic convention
  abstract.linear.a.reserve(kMaxDim);
  for (int k = 0; k < kMaxDim; ++k) {
    Eigen::MatrixXcd ak(grid.points(k), kSpecies);
    for (int i = 0; i < kSpecies; ++i)
      ak.col(i).setConstant(-model.diffusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
    abstract.linear.a.push_back(std::move(ak));
  }

  // wind samples and their discrete divergence pieces
  const Index n_nodes = grid.node_count();
  bool any_wind = false;
  std::array<std::shared_ptr<GridFunction>, kMaxDim> wind_samples{};
  std::array<std::shared_ptr<GridFunction>, kMaxDim> wind_derivative{};
  for (int k = 0; k < kMaxDim; ++k) {
    if (!model.wind[static_cast<std::size_t>(k)]) continue;
    any_wind = true;
    auto omega = std::make_shared<GridFunction>(
        GridFunction::sample(grid, [&, k](const std::array<double, kMaxDim>& x) {
          return Complex(model.wind[static_cast<std::size_t>(k)](x), 0.0);
        }));
    wind_samples[static_cast<std::size_t>(k)] = omega;
    wind_derivative[static_cast<std::size_t>(k)] =
        std::make_shared<GridFunction>(degen_derivative(*omega, k, 1));
  }

  if (any_wind) {
    abstract.linear.A1.resize(kMaxDim);
    for (int k = 0; k < kMaxDim; ++k) {
      if (!wind_samples[static_cast<std::size_t>(k)]) continue;
      auto& field = abstract.linear.A1[static_cast<std::size_t>(k)];
      field.resize(static_cast<std::size_t>(n_nodes));
      for (Index node = 0; node < n_nodes; ++node) {
        Eigen::MatrixXcd Ak = Eigen::MatrixXcd::Zero(kSpecies, kSpecies);
        const Complex omega = wind_samples[static_cast<std::size_t>(k)]->at(node, 0);
        for (int i = 0; i < kSpecies; ++i)
          Ak(i, i) = -model.advect_scale[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * omega;
        field[static_cast<std::size_t>(node)] = std::move(Ak);
      }
    }
  }

  // frozen matrix pieces: linear coupling plus the wind-divergence
  // zero-order terms, both moved to the left-hand side
  Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Zero(kSpecies, kSpecies);
  for (int i = 0; i < kSpecies; ++i)
    for (int j = 0; j < kSpecies; ++j) coupling(i, j) = -model.coupling_d[static_cast<std::size_t>(j)];

  auto divergence_diag = std::make_shared<Eigen::MatrixXcd>(Eigen::MatrixXcd::Zero(n_nodes, kSpecies));
  if (any_wind) {
    for (Index node = 0; node < n_nodes; ++node)
      for (int i = 0; i < kSpecies; ++i) {
        Complex total = 0.0;
        for (int k = 0; k < kMaxDim; ++k) {
          if (!wind_derivative[static_cast<std::size_t>(k)]) continue;
          total -= model.advect_scale[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                   wind_derivative[static_cast<std::size_t>(k)]->at(node, 0);
        }
        (*divergence_diag)(node, i) = total;
      }
  }

  // node lookup from coordinates: the solver always calls back with exact
  // node positions, so inverting through tau is stable
  auto grid_copy = std::make_shared<GridSpec>(grid);
  auto node_of = [grid_copy](const std::array<double, kMaxDim>& x) -> Index {
    std::array<int, kMaxDim> j{0, 0, 0};
    for (int k = 0; k < grid_copy->dim(); ++k) {
      const auto& ax = grid_copy->axis(k);
      const double tau = ax.tau_map(std::min(std::max(x[static_cast<std::size_t>(k)], 0.0), ax.b()));
      j[static_cast<std::size_t>(k)] = static_cast<int>(std::lround(tau / ax.dtau()));
      j[static_cast<std::size_t>(k)] = std::min(std::max(j[static_cast<std::size_t>(k)], 0), ax.n_cells());
    }
    return grid_copy->flatten(j);
  };

  abstract.B = [coupling, divergence_diag, node_of](double, const std::array<double, kMaxDim>& x,
                                                    const Eigen::VectorXcd&, const Eigen::MatrixXcd&) {
    Eigen::MatrixXcd B = coupling;
    const Index node = node_of(x);
    for (int i = 0; i < kSpecies; ++i) B(i, i) += (*divergence_diag)(node, i);
    return B;
  };

  const ReactionKind reaction = model.reaction;
  const std::array<double, 2> rates = model.rates;
  const std::array<SourceSpec, kSpecies> sources = model.sources;
  abstract.F = [reaction, rates, sources](double, const std::array<double, kMaxDim>& x,
                                          const Eigen::VectorXcd& u, const Eigen::MatrixXcd&) {
    Eigen::VectorXcd f = reactions(reaction, rates, u);
    for (int i = 0; i < kSpecies; ++i) f[i] += sources[static_cast<std::size_t>(i)].value(x);
    return f;
  };

  return abstract;
}

PollutantRun run_demo_compute(const PollutantModel& model, const PollutantRunOptions& opts) {
  const NonlinearModel abstract = to_abstract(model);
  NonlinearControls controls;
  controls.r = opts.r;
  controls.T = opts.T;
  controls.n_steps = opts.n_steps;
  controls.max_outer = opts.max_outer;
  controls.tol = opts.tol;
  controls.d = 0.0;  // the demo solves the physical system unshifted
  controls.scheme = opts.scheme;

  PollutantRun run;
  auto [solution, report] = solve_nonlinear(abstract, controls, model.grid, model.bc, opts.norms);
  run.report = std::move(report);
  run.solution = std::move(solution);

  // conservation bookkeeping
  GridFunction g(model.grid, kSpecies);
  for (Index node = 0; node < model.grid.node_count(); ++node) {
    const auto x = model.grid.node_x(node);
    for (int i = 0; i < kSpecies; ++i) g.at(node, i) = model.sources[static_cast<std::size_t>(i)].value(x);
  }
  run.source_integral = integral(g).real().sum();

  double min_re = 0.0;
  for (const auto& snap : run.solution.snapshots) {
    const Eigen::VectorXcd mass = integral(snap);
    std::array<double, kSpecies> per_species{};
    for (int i = 0; i < kSpecies; ++i) per_species[static_cast<std::size_t>(i)] = mass[i].real();
    run.masses.push_back(per_species);
    min_re = std::min(min_re, snap.values().real().minCoeff());
  }
  run.min_real_concentration = min_re;
  if (min_re < -1e-8)
    run.warnings.push_back("concentrations dipped below zero (min Re u = " + fmt17(min_re) +
                           "); central advection has no positivity guarantee");

  const double dt = run.solution.dt;
  for (std::size_t s = 0; s + 1 < run.masses.size(); ++s) {
    double m_new = 0.0, m_old = 0.0;
    for (int i = 0; i < kSpecies; ++i) {
      m_new += run.masses[s + 1][static_cast<std::size_t>(i)];
      m_old += run.masses[s][static_cast<std::size_t>(i)];
    }
    run.budget_residuals.push_back(std::abs((m_new - m_old) / dt - run.source_integral));
  }
  for (const auto& w : run.solution.warnings) run.warnings.push_back(w);
  return run;
}

PollutantRun run_demo(const PollutantModel& model, const PollutantRunOptions& opts,
                      const std::filesystem::path& out_dir) {
  PollutantRun run = run_demo_compute(model, opts);
  std::filesystem::create_directories(out_dir);

  const int S = run.solution.steps();
  std::vector<int> selected;
  if (opts.snapshot_stride > 0) {
    for (int s = 0; s <= S; s += opts.snapshot_stride) selected.push_back(s);
    if (selected.empty() || selected.back() != S) selected.push_back(S);
  } else {
    selected.push_back(S);
  }

  for (int s : selected) {
    for (int i = 0; i < kSpecies; ++i) {
      std::ostringstream name;
      name << "species" << i + 1 << "_step" << s << ".csv";
      std::ostringstream body;
      write_snapshot_csv(body, run.solution.snapshots[static_cast<std::size_t>(s)], i);
      atomic_write_file(out_dir / name.str(), body.str());
      run.files.push_back(name.str());
    }
  }

  nlohmann::json summary;
  summary["iteration_report"] = {
      {"increments", run.report.increments}, {"eta_hat", run.report.eta_hat},
      {"converged", run.report.converged},   {"ball_violations", run.report.ball_violations},
      {"C0_hat", run.report.C0_hat},         {"C1_hat", run.report.C1_hat},
      {"delta_b", run.report.delta_b}};
  summary["masses"] = run.masses;
  summary["budget_residuals"] = run.budget_residuals;
  summary["source_integral"] = run.source_integral;
  summary["min_real_concentration"] = run.min_real_concentration;
  summary["warnings"] = run.warnings;
  atomic_write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  run.files.push_back("summary.json");
  return run;
}

} // namespace degenlab
