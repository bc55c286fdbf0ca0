// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_CONFIG_HPP
#define DEGENLAB_CONFIG_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degenlab/grid.hpp"
#include "degenlab/norms.hpp"

namespace degenlab {

enum class ProblemKind { Elliptic, ResolventScan, Parabolic, Nonlinear, PollutantDemo };

std::string kind_name(ProblemKind kind);
ProblemKind kind_from_name(const std::string& name);

struct AxisConfig {
  double alpha = 0.0;
  double b = 1.0;
  int cells = 2;
};

/// Per-axis boundary conditions: a named pair or explicit coefficient
/// lists (complex entries as [re, im] pairs).
struct BCAxisConfig {
  std::string type = "dirichlet";  // dirichlet | neumann | periodic | custom
  std::array<int, 2> m{0, 0};
  std::array<std::vector<Complex>, 2> alpha_coeffs{};
  std::array<std::vector<Complex>, 2> beta_coeffs{};
};

struct MatrixConfig {
  std::string type = "zero";  // zero | identity | matrix
  Complex scale{1.0, 0.0};
  std::vector<std::vector<Complex>> values;  // matrix type only
};

struct ForcingConfig {
  std::string type = "constant";  // constant | random | tau-sine
  Complex value{1.0, 0.0};        // constant
  double amplitude = 1.0;         // tau-sine
  double omega = 0.0;             // temporal factor sin(omega t); 0 = steady
};

struct SectorConfig {
  double phi = 2.0 * M_PI / 3.0;
  double mod_min = 1.0;
  double mod_max = 1e4;
  int n_moduli = 5;
  int n_rays = 9;
  bool include_zero = false;
};

struct TimeConfig {
  double T = 1.0;
  int steps = 16;
  std::string scheme = "implicit-euler";
  std::string snapshots = "last";  // last | all | every:N
};

struct ToyModelConfig {
  std::string type = "toy-quadratic";
  Complex a0{1.0, 0.0};
  double epsilon = 0.0;
  Complex f0{1.0, 0.0};
};

struct NonlinearConfig {
  double r = 1.0;
  double tol = 1e-10;
  int max_outer = 25;
  double d = 0.0;
  ToyModelConfig model;
};

struct SourceConfig {
  double amplitude = 0.0;
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double width = 0.1;
};

struct ReactionConfig {
  std::string type = "none";
  std::array<double, 2> rates{0.0, 0.0};
};

struct PollutantConfig {
  int species = 3;
  std::array<int, 3> cells{8, 8, 8};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  std::array<double, 3> alpha{0.0, 0.0, 0.0};
  std::array<std::array<double, 3>, 3> diffusion{};  // [axis][species]
  std::array<double, 3> wind{0.0, 0.0, 0.0};
  std::array<double, 3> coupling_d{0.0, 0.0, 0.0};
  ReactionConfig reactions;
  std::array<SourceConfig, 3> sources{};
  std::vector<BCAxisConfig> bc;
  TimeConfig time;
  double r = 10.0;
  double tol = 1e-9;
  int max_outer = 25;
};

/// Fully validated run description; unknown keys are rejected during
/// parsing with the offending key path.
struct RunConfig {
  ProblemKind kind = ProblemKind::Elliptic;
  std::uint64_t seed = 0;
  int m = 1;
  std::vector<AxisConfig> axes;
  std::vector<BCAxisConfig> bc;
  std::vector<Complex> a;  // per axis second-order coefficient
  MatrixConfig A;
  std::vector<MatrixConfig> A_k;  // empty = no first-order terms
  NormSpec norms;
  Complex lambda{0.0, 0.0};
  ForcingConfig forcing;
  std::optional<SectorConfig> sector;
  int trials = 5;
  double resolvent_p = 2.0;
  std::optional<TimeConfig> time;
  double shift_d = 0.0;
  std::optional<NonlinearConfig> nonlinear;
  std::optional<PollutantConfig> pollutant;

  bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config(const std::filesystem::path& path);
nlohmann::json serialize(const RunConfig& config);

/// FNV-1a hash of the canonical serialized form, hex encoded.
std::string config_hash(const RunConfig& config);

} // namespace degenlab

#endif
