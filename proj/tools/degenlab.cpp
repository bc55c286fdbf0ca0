// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "degenlab/config.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/run.hpp"
#include "degenlab/version.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, GlobalArgs& args) {
  cmd->add_option("--config", args.config_path, "run configuration (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--threads", args.threads, "internal parallelism cap")->check(CLI::PositiveNumber);
}

int execute(const GlobalArgs& args, degenlab::Operation op,
            std::optional<degenlab::ProblemKind> expected_kind) {
  degenlab::RunConfig config;
  try {
    config = degenlab::parse_config(std::filesystem::path(args.config_path));
  } catch (const degenlab::SchemaError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return degenlab::kExitSchema;
  }
  if (expected_kind && config.kind != *expected_kind) {
    std::cerr << "config error: kind: expected '" << degenlab::kind_name(*expected_kind) << "', got '"
              << degenlab::kind_name(config.kind) << "'\n";
    return degenlab::kExitSchema;
  }
  if (args.seed) config.seed = *args.seed;

  const degenlab::RunManifest manifest = degenlab::run(config, op, args.out_dir, args.threads);
  if (manifest.exit_status != 0)
    std::cerr << degenlab::operation_name(op) << " failed: " << manifest.error << "\n";
  else
    std::cout << degenlab::operation_name(op) << ": wrote " << manifest.files.size() << " artifact(s) to "
              << args.out_dir << "\n";
  return manifest.exit_status;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for degenerate elliptic and parabolic operator equations"};
  app.set_version_flag("--version", degenlab::kVersion);
  app.require_subcommand(1);

  using degenlab::Operation;
  using degenlab::ProblemKind;

  struct Entry {
    const char* name;
    const char* help;
    Operation op;
    std::optional<ProblemKind> kind;
    GlobalArgs args;
  };
  std::vector<Entry> entries = {
      {"elliptic-solve", "solve the discrete elliptic problem", Operation::EllipticSolve,
       ProblemKind::Elliptic, {}},
      {"resolvent-scan", "tabulate resolvent norms over the sector", Operation::ResolventScan,
       ProblemKind::ResolventScan, {}},
      {"coercivity-scan", "sample the coercivity ratio over the sector", Operation::CoercivityScan,
       ProblemKind::Elliptic, {}},
      {"parabolic-run", "march the abstract Cauchy problem", Operation::ParabolicRun,
       ProblemKind::Parabolic, {}},
      {"nonlinear-run", "run the contraction-mapping solver", Operation::NonlinearRun,
       ProblemKind::Nonlinear, {}},
      {"pollutant-demo", "run the 3-species reaction-advection-diffusion demo", Operation::PollutantDemo,
       ProblemKind::PollutantDemo, {}},
      {"validate", "check the solvability conditions and report findings", Operation::Validate,
       std::nullopt, {}},
  };

  for (auto& entry : entries) {
    CLI::App* cmd = app.add_subcommand(entry.name, entry.help);
    add_common(cmd, entry.args);
    cmd->callback([&entry]() {
      const int status = execute(entry.args, entry.op, entry.kind);
      if (status != 0) std::exit(status);
    });
  }

  CLI11_PARSE(app, argc, argv);
  return 0;
}
