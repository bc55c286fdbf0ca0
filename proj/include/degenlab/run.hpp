// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_RUN_HPP
#define DEGENLAB_RUN_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "degenlab/bc.hpp"
#include "degenlab/config.hpp"
#include "degenlab/elliptic.hpp"

namespace degenlab {

enum class Operation {
  EllipticSolve,
  ResolventScan,
  CoercivityScan,
  ParabolicRun,
  NonlinearRun,
  PollutantDemo,
  Validate,
};

Operation default_operation(ProblemKind kind);
std::string operation_name(Operation op);

/// Process exit codes: 0 success, 2 schema, 3 condition validation,
/// 4 singular system, 5 no contraction / ball exit, 1 other failures.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitSingular = 4;
inline constexpr int kExitNoContraction = 5;

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> files;
  int exit_status = 0;
  std::string error;  // empty on success
};

/// Dispatch a validated config to the matching module, write the artifacts
/// and the manifest into out_dir, and return the manifest. Failures are
/// reported through the manifest's exit status; nothing is thrown for
/// domain errors.
RunManifest run(const RunConfig& config, Operation op, const std::filesystem::path& out_dir,
                int threads = 1);
RunManifest run(const RunConfig& config, const std::filesystem::path& out_dir, int threads = 1);

/// Builders shared by the run dispatcher and the test suites.
GridSpec grid_from_config(const RunConfig& config);
NonlocalBC bc_from_config(const std::vector<BCAxisConfig>& bc_list);
CoefficientField coefficients_from_config(const RunConfig& config, const GridSpec& grid);

} // namespace degenlab

#endif
