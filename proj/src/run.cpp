// SPDX-License-Identifier: Apache-2.0

#include "degenlab/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include <nlohmann/json.hpp>

#include "degenlab/errors.hpp"
#include "degenlab/io.hpp"
#include "degenlab/nonlinear.hpp"
#include "degenlab/parabolic.hpp"
#include "degenlab/pollutant.hpp"
#include "degenlab/sector.hpp"
#include "degenlab/version.hpp"

namespace degenlab {

using json = nlohmann::json;

Operation default_operation(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Elliptic: return Operation::EllipticSolve;
    case ProblemKind::ResolventScan: return Operation::ResolventScan;
    case ProblemKind::Parabolic: return Operation::ParabolicRun;
    case ProblemKind::Nonlinear: return Operation::NonlinearRun;
    case ProblemKind::PollutantDemo: return Operation::PollutantDemo;
  }
  return Operation::EllipticSolve;
}

std::string operation_name(Operation op) {
  switch (op) {
    case Operation::EllipticSolve: return "elliptic-solve";
    case Operation::ResolventScan: return "resolvent-scan";
    case Operation::CoercivityScan: return "coercivity-scan";
    case Operation::ParabolicRun: return "parabolic-run";
    case Operation::NonlinearRun: return "nonlinear-run";
    case Operation::PollutantDemo: return "pollutant-demo";
    case Operation::Validate: return "validate";
  }
  return "unknown";
}

GridSpec grid_from_config(const RunConfig& config) {
  std::vector<DegenerateAxis> axes;
  if (config.kind == ProblemKind::PollutantDemo) {
    const PollutantConfig& p = *config.pollutant;
    for (int k = 0; k < 3; ++k)
      axes.emplace_back(p.alpha[static_cast<std::size_t>(k)], p.lengths[static_cast<std::size_t>(k)],
                        p.cells[static_cast<std::size_t>(k)]);
  } else {
    for (const auto& ax : config.axes) axes.emplace_back(ax.alpha, ax.b, ax.cells);
  }
  return GridSpec(std::move(axes));
}

NonlocalBC bc_from_config(const std::vector<BCAxisConfig>& bc_list) {
  std::vector<AxisBC> axes;
  for (const auto& bc : bc_list) {
    if (bc.type == "dirichlet") {
      axes.push_back(NonlocalBC::dirichlet());
    } else if (bc.type == "neumann") {
      axes.push_back(NonlocalBC::neumann());
    } else if (bc.type == "periodic") {
      axes.push_back(NonlocalBC::periodic());
    } else {
      AxisBC axis;
      axis.first = BoundaryFunctional{bc.m[0], bc.alpha_coeffs[0], bc.beta_coeffs[0]};
      axis.second = BoundaryFunctional{bc.m[1], bc.alpha_coeffs[1], bc.beta_coeffs[1]};
      axes.push_back(axis);
    }
  }
  return NonlocalBC(std::move(axes));
}

namespace {

Eigen::MatrixXcd matrix_from_config(const MatrixConfig& mat, int m) {
  if (mat.type == "zero") return Eigen::MatrixXcd::Zero(m, m);
  if (mat.type == "identity") return mat.scale * Eigen::MatrixXcd::Identity(m, m);
  Eigen::MatrixXcd out(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      out(r, c) = mat.values[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return out;
}

} // namespace

CoefficientField coefficients_from_config(const RunConfig& config, const GridSpec& grid) {
  CoefficientField coeffs = CoefficientField::constant(grid, config.m, config.a,
                                                       matrix_from_config(config.A, config.m));
  if (!config.A_k.empty()) {
    coeffs.A1.resize(static_cast<std::size_t>(grid.dim()));
    for (int k = 0; k < grid.dim(); ++k) {
      const Eigen::MatrixXcd Ak = matrix_from_config(config.A_k[static_cast<std::size_t>(k)], config.m);
      if (Ak.isZero(0.0)) continue;
      coeffs.A1[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(grid.node_count()), Ak);
    }
    bool any = false;
    for (const auto& field : coeffs.A1) any = any || !field.empty();
    if (!any) coeffs.A1.clear();
  }
  return coeffs;
}

namespace {

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class ArtifactWriter {
public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    atomic_write_file(dir_ / name, content);
    files_.push_back(name);
  }

  void note(const std::string& name) { files_.push_back(name); }
  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

GridFunction build_spatial_profile(const GridSpec& grid, int m, const ForcingConfig& forcing,
                                   const DiscreteOperator* op, const NormSpec& norms, std::uint64_t seed) {
  if (forcing.type == "constant") {
    GridFunction f(grid, m);
    f.values().setConstant(forcing.value);
    return f;
  }
  if (forcing.type == "random") {
    if (op == nullptr) throw std::invalid_argument("random forcing needs an assembled operator");
    return random_unit_forcing(*op, norms, seed);
  }
  // tau-sine
  GridFunction f(grid, m);
  for (Index node = 0; node < grid.node_count(); ++node) {
    const auto j = grid.unflatten(node);
    double phi = forcing.amplitude;
    for (int k = 0; k < grid.dim(); ++k)
      phi *= std::sin(M_PI * grid.tau_nodes(k)[static_cast<std::size_t>(j[k])] / grid.axis(k).tau_b());
    for (int c = 0; c < m; ++c) f.at(node, c) = phi;
  }
  return f;
}

std::vector<int> selected_steps(const std::string& spec, int n_steps) {
  std::vector<int> out;
  if (spec == "all") {
    for (int s = 0; s <= n_steps; ++s) out.push_back(s);
  } else if (spec.rfind("every:", 0) == 0) {
    const int stride = std::max(1, std::atoi(spec.c_str() + 6));
    for (int s = 0; s <= n_steps; s += stride) out.push_back(s);
    if (out.back() != n_steps) out.push_back(n_steps);
  } else {
    out.push_back(n_steps);
  }
  return out;
}

json report_messages_json(const BCReport& report) {
  json messages = json::array();
  for (const auto& m : report.messages)
    messages.push_back({{"severity", m.severity == ValidationMessage::Severity::Error ? "error" : "warning"},
                        {"code", m.code},
                        {"text", m.text}});
  return messages;
}

void do_validate(const RunConfig& config, ArtifactWriter& out) {
  const GridSpec grid = grid_from_config(config);
  json doc;
  if (config.kind == ProblemKind::PollutantDemo) {
    const PollutantConfig& p = *config.pollutant;
    const NonlocalBC bc = bc_from_config(p.bc);
    // validate against the slowest species' coefficients; the demo adapter
    // re-checks signs per species
    std::vector<Complex> a;
    for (int k = 0; k < 3; ++k) a.emplace_back(-p.diffusion[static_cast<std::size_t>(k)][0], 0.0);
    const CoefficientField coeffs = CoefficientField::constant(grid, 1, a);
    const BCReport report = validate_conditions(coeffs, bc, grid, 2.0);
    doc["satisfied"] = report.satisfied;
    doc["messages"] = report_messages_json(report);
    json eta = json::array();
    for (const Complex& e : report.eta) eta.push_back({e.real(), e.imag()});
    doc["eta"] = eta;
    doc["has_errors"] = report.has_errors();
  } else {
    const NonlocalBC bc = bc_from_config(config.bc);
    CoefficientField coeffs = config.kind == ProblemKind::Nonlinear
                                  ? CoefficientField::constant(grid, 1, config.a)
                                  : coefficients_from_config(config, grid);
    const BCReport report = validate_conditions(coeffs, bc, grid, config.norms.spatial_p);
    doc["satisfied"] = report.satisfied;
    doc["messages"] = report_messages_json(report);
    json eta = json::array();
    for (const Complex& e : report.eta) eta.push_back({e.real(), e.imag()});
    doc["eta"] = eta;
    doc["has_errors"] = report.has_errors();
  }
  out.write("validation.json", doc.dump(2) + "\n");
  if (doc["has_errors"].get<bool>())
    throw ConditionViolation("validation found error-severity findings (see validation.json)");
}

void write_grid(const GridSpec& grid, ArtifactWriter& out) {
  std::ostringstream body;
  grid.write_csv(body);
  out.write("grid.csv", body.str());
}

void do_elliptic_solve(const RunConfig& config, ArtifactWriter& out) {
  const GridSpec grid = grid_from_config(config);
  const NonlocalBC bc = bc_from_config(config.bc);
  const CoefficientField coeffs = coefficients_from_config(config, grid);
  const DiscreteOperator op = assemble(coeffs, bc, grid, config.lambda);
  const GridFunction f = build_spatial_profile(grid, config.m, config.forcing, &op, config.norms, config.seed);
  const GridFunction u = solve(op, f);

  write_grid(grid, out);
  std::ostringstream body;
  write_snapshot_csv(body, u);
  out.write("solution.csv", body.str());

  Eigen::VectorXcd f_hat = f.values();
  for (Index r : op.bc_rows) f_hat[r] = 0.0;
  const double residual = (op.matrix * u.values() - f_hat).norm() / std::max(f_hat.norm(), 1e-300);
  json report{{"lambda", {config.lambda.real(), config.lambda.imag()}},
              {"residual", residual},
              {"solution_lp_norm", lp_norm(u, config.norms)},
              {"forcing_lp_norm", lp_norm(f, config.norms)}};
  out.write("report.json", report.dump(2) + "\n");
}

SectorSpec sector_from_config(const SectorConfig& s) {
  return SectorSpec::logspaced(s.phi, s.mod_min, s.mod_max, s.n_moduli, s.n_rays, s.include_zero);
}

void do_resolvent_scan(const RunConfig& config, ArtifactWriter& out, int threads) {
  const GridSpec grid = grid_from_config(config);
  const NonlocalBC bc = bc_from_config(config.bc);
  const CoefficientField coeffs = coefficients_from_config(config, grid);
  const SectorSpec sector = sector_from_config(config.sector.value_or(SectorConfig{}));
  const PositivityReport report =
      positivity_scan(coeffs, bc, grid, sector, config.resolvent_p, config.seed, threads);

  write_grid(grid, out);
  std::ostringstream csv;
  csv << "re_lambda,im_lambda,resolvent_norm,weighted_norm,status\n";
  for (const auto& s : report.samples)
    csv << fmt17(s.lambda.real()) << ',' << fmt17(s.lambda.imag()) << ',' << fmt17(s.resolvent_norm) << ','
        << fmt17(s.weighted_norm) << ',' << s.status << '\n';
  if (report.M_hat) csv << "M_hat=" << fmt17(*report.M_hat) << '\n';
  out.write("resolvent_scan.csv", csv.str());
}

void do_coercivity_scan(const RunConfig& config, ArtifactWriter& out, int threads) {
  const GridSpec grid = grid_from_config(config);
  const NonlocalBC bc = bc_from_config(config.bc);
  const CoefficientField coeffs = coefficients_from_config(config, grid);
  const SectorSpec sector = sector_from_config(config.sector.value_or(SectorConfig{}));
  const auto records =
      coercivity_scan(coeffs, bc, grid, sector, config.trials, config.norms, config.seed, threads);

  write_grid(grid, out);
  std::ostringstream csv;
  csv << "re_lambda,im_lambda,abs_lambda,arg_lambda,ratio,residual,status\n";
  for (const auto& rec : records)
    csv << fmt17(rec.lambda.real()) << ',' << fmt17(rec.lambda.imag()) << ',' << fmt17(std::abs(rec.lambda))
        << ',' << fmt17(std::arg(rec.lambda)) << ',' << fmt17(rec.ratio) << ',' << fmt17(rec.residual) << ','
        << rec.status << '\n';
  out.write("coercivity_scan.csv", csv.str());
}

void do_parabolic_run(const RunConfig& config, ArtifactWriter& out) {
  const GridSpec grid = grid_from_config(config);
  const NonlocalBC bc = bc_from_config(config.bc);
  const CoefficientField coeffs = coefficients_from_config(config, grid);
  const TimeConfig& time = *config.time;

  const GridFunction profile =
      build_spatial_profile(grid, config.m, config.forcing, nullptr, config.norms, config.seed);
  const double omega = config.forcing.type == "tau-sine" ? config.forcing.omega : 0.0;
  auto forcing = [profile, omega](double t) {
    if (omega == 0.0) return profile;
    return GridFunction(profile.grid(), profile.components(), profile.values() * std::sin(omega * t));
  };

  ParabolicProblem problem{coeffs, bc, grid, config.shift_d, time.T, time.steps, forcing};
  const ParabolicSolution solution = step_scheme(problem, scheme_from_name(time.scheme));

  write_grid(grid, out);
  for (int s : selected_steps(time.snapshots, solution.steps())) {
    std::ostringstream body;
    write_snapshot_csv(body, solution.snapshots[static_cast<std::size_t>(s)]);
    std::ostringstream name;
    name << "step_" << s << ".csv";
    out.write(name.str(), body.str());
  }

  const RegularityDiagnostics diag = regularity_diagnostics(solution, config.norms);
  json doc{{"dudt_mixed_norm", diag.dudt_norm},
           {"d2_mixed_norm", diag.d2_norm},
           {"Au_mixed_norm", diag.Au_norm},
           {"f_mixed_norm", diag.f_norm},
           {"ratio", diag.ratio},
           {"warnings", solution.warnings}};
  out.write("diagnostics.json", doc.dump(2) + "\n");
}

json iteration_report_json(const IterationReport& report) {
  return json{{"increments", report.increments}, {"eta_hat", report.eta_hat},
              {"converged", report.converged},   {"ball_violations", report.ball_violations},
              {"C0_hat", report.C0_hat},         {"C1_hat", report.C1_hat},
              {"delta_b", report.delta_b}};
}

NonlinearModel toy_model_from_config(const RunConfig& config, const GridSpec& grid) {
  const ToyModelConfig& toy = config.nonlinear->model;
  NonlinearModel model;
  model.m = 1;
  model.linear = CoefficientField::constant(grid, 1, config.a);
  const Complex a0 = toy.a0;
  const double epsilon = toy.epsilon;
  const Complex f0 = toy.f0;
  model.B = [a0, epsilon](double, const std::array<double, kMaxDim>&, const Eigen::VectorXcd& u,
                          const Eigen::MatrixXcd&) {
    Eigen::MatrixXcd B(1, 1);
    B(0, 0) = a0 + epsilon * u[0];
    return B;
  };
  model.F = [f0](double, const std::array<double, kMaxDim>&, const Eigen::VectorXcd&,
                 const Eigen::MatrixXcd&) {
    Eigen::VectorXcd f(1);
    f[0] = f0;
    return f;
  };
  return model;
}

void do_nonlinear_run(const RunConfig& config, ArtifactWriter& out) {
  const GridSpec grid = grid_from_config(config);
  const NonlocalBC bc = bc_from_config(config.bc);
  const NonlinearModel model = toy_model_from_config(config, grid);
  const TimeConfig& time = *config.time;
  const NonlinearConfig& nl = *config.nonlinear;

  NonlinearControls controls;
  controls.r = nl.r;
  controls.T = time.T;
  controls.n_steps = time.steps;
  controls.max_outer = nl.max_outer;
  controls.tol = nl.tol;
  controls.d = nl.d;
  controls.scheme = scheme_from_name(time.scheme);

  write_grid(grid, out);
  try {
    auto [solution, report] = solve_nonlinear(model, controls, grid, bc, config.norms);
    std::ostringstream body;
    write_snapshot_csv(body, solution.snapshots.back());
    out.write("final.csv", body.str());
    out.write("iteration_report.json", iteration_report_json(report).dump(2) + "\n");
  } catch (const NoContractionError& err) {
    out.write("iteration_report.json", iteration_report_json(err.report).dump(2) + "\n");
    throw;
  } catch (const BallExitError& err) {
    out.write("iteration_report.json", iteration_report_json(err.report).dump(2) + "\n");
    throw;
  }
}

void do_pollutant_demo(const RunConfig& config, ArtifactWriter& out) {
  const PollutantConfig& p = *config.pollutant;
  const GridSpec grid = grid_from_config(config);
  PollutantModel model = PollutantModel::make(grid, bc_from_config(p.bc));
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i)
      model.diffusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
          p.diffusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    const double w = p.wind[static_cast<std::size_t>(k)];
    if (w != 0.0)
      model.wind[static_cast<std::size_t>(k)] = [w](const std::array<double, kMaxDim>&) { return w; };
  }
  model.coupling_d = p.coupling_d;
  model.reaction = reaction_from_name(p.reactions.type);
  model.rates = p.reactions.rates;
  for (int i = 0; i < 3; ++i) {
    const SourceConfig& s = p.sources[static_cast<std::size_t>(i)];
    model.sources[static_cast<std::size_t>(i)] = SourceSpec{s.amplitude, s.center, s.width};
  }

  PollutantRunOptions opts;
  opts.T = p.time.T;
  opts.n_steps = p.time.steps;
  opts.scheme = scheme_from_name(p.time.scheme);
  opts.r = p.r;
  opts.tol = p.tol;
  opts.max_outer = p.max_outer;
  if (p.time.snapshots == "all")
    opts.snapshot_stride = 1;
  else if (p.time.snapshots.rfind("every:", 0) == 0)
    opts.snapshot_stride = std::max(1, std::atoi(p.time.snapshots.c_str() + 6));

  write_grid(grid, out);
  const PollutantRun run = run_demo(model, opts, out.dir());
  for (const auto& f : run.files) out.note(f);
}

} // namespace

RunManifest run(const RunConfig& config, Operation op, const std::filesystem::path& out_dir, int threads) {
  RunManifest manifest;
  manifest.config_hash = config_hash(config);
  manifest.version = kVersion;
  manifest.started_at = timestamp_now();

  ArtifactWriter out(out_dir);
  try {
    switch (op) {
      case Operation::Validate: do_validate(config, out); break;
      case Operation::EllipticSolve: do_elliptic_solve(config, out); break;
      case Operation::ResolventScan: do_resolvent_scan(config, out, threads); break;
      case Operation::CoercivityScan: do_coercivity_scan(config, out, threads); break;
      case Operation::ParabolicRun: do_parabolic_run(config, out); break;
      case Operation::NonlinearRun: do_nonlinear_run(config, out); break;
      case Operation::PollutantDemo: do_pollutant_demo(config, out); break;
    }
    manifest.exit_status = kExitOk;
  } catch (const SchemaError& err) {
    manifest.exit_status = kExitSchema;
    manifest.error = err.what();
  } catch (const ConditionViolation& err) {
    manifest.exit_status = kExitValidation;
    manifest.error = err.what();
  } catch (const InvalidBoundaryCondition& err) {
    manifest.exit_status = kExitValidation;
    manifest.error = err.what();
  } catch (const SingularSystem& err) {
    manifest.exit_status = kExitSingular;
    manifest.error = err.what();
  } catch (const NoContractionError& err) {
    manifest.exit_status = kExitNoContraction;
    manifest.error = err.what();
  } catch (const BallExitError& err) {
    manifest.exit_status = kExitNoContraction;
    manifest.error = err.what();
  } catch (const std::exception& err) {
    manifest.exit_status = 1;
    manifest.error = err.what();
  }

  manifest.files = out.files();
  manifest.finished_at = timestamp_now();

  json doc{{"config_hash", manifest.config_hash},
           {"version", manifest.version},
           {"operation", operation_name(op)},
           {"started_at", manifest.started_at},
           {"finished_at", manifest.finished_at},
           {"files", manifest.files},
           {"exit_status", manifest.exit_status}};
  if (!manifest.error.empty()) doc["error"] = manifest.error;
  atomic_write_file(out_dir / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

RunManifest run(const RunConfig& config, const std::filesystem::path& out_dir, int threads) {
  return run(config, default_operation(config.kind), out_dir, threads);
}

} // namespace degenlab
