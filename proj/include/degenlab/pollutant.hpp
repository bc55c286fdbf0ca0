// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_POLLUTANT_HPP
#define DEGENLAB_POLLUTANT_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "degenlab/nonlinear.hpp"

namespace degenlab {

inline constexpr int kSpecies = 3;

/// Elevated point source: a Gaussian bump of the given amplitude, or
/// nothing when the amplitude is zero.
struct SourceSpec {
  double amplitude = 0.0;
  std::array<double, kSpecies> center{0.5, 0.5, 0.5};
  double width = 0.1;

  double value(const std::array<double, kMaxDim>& x) const;
};

/// Illustrative 3-species kinetics; the mechanism is a configuration choice,
/// not part of the transport model.
enum class ReactionKind {
  None,
  ChapmanToy,   // f1 = -k1 u1 u2, f2 = -k1 u1 u2 + k2 u3, f3 = k1 u1 u2 - k2 u3
  ExchangeToy,  // pairwise exchange with sum_i f_i = 0
};

ReactionKind reaction_from_name(const std::string& name);
std::string reaction_name(ReactionKind kind);

/// Reaction-advection-diffusion system for 3 species on a 3D grid, written
/// in the physical sign convention: du_i/dt equals diffusion plus advection
/// plus coupling plus reactions plus sources.
struct PollutantModel {
  GridSpec grid;  // 3 axes
  NonlocalBC bc;
  std::array<std::array<double, kSpecies>, kMaxDim> diffusion{};  // [axis][species], positive
  std::array<std::array<double, kSpecies>, kMaxDim> advect_scale{};  // b_ki, [axis][species]
  std::array<std::function<double(const std::array<double, kMaxDim>&)>, kMaxDim> wind{};  // null = 0
  std::array<double, kSpecies> coupling_d{};
  ReactionKind reaction = ReactionKind::None;
  std::array<double, 2> rates{};
  std::array<SourceSpec, kSpecies> sources{};

  static PollutantModel make(GridSpec grid, NonlocalBC bc);  // unit scales, zero couplings
};

/// Reduce the system to the abstract form: diffusion enters the per-axis
/// second-order coefficients (negated to the elliptic convention), the
/// advection derivative terms become first-order coefficient fields, the
/// wind-divergence and linear-coupling terms the frozen matrix, and
/// F = f(u) + g. Shape or sign violations raise ConditionViolation.
NonlinearModel to_abstract(const PollutantModel& model);

struct PollutantRunOptions {
  double T = 1.0;
  int n_steps = 8;
  Scheme scheme = Scheme::ImplicitEuler;
  double r = 10.0;
  double tol = 1e-9;
  int max_outer = 25;
  int snapshot_stride = 0;  // 0 = last step only
  NormSpec norms;
};

struct PollutantRun {
  IterationReport report;
  ParabolicSolution solution;
  std::vector<std::array<double, kSpecies>> masses;   // per step, Re integral of each species
  std::vector<double> budget_residuals;               // per step transition
  double source_integral = 0.0;                       // Re sum_i integral g_i
  double min_real_concentration = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> files;                     // written by run_demo
};

/// Solve without touching the filesystem.
PollutantRun run_demo_compute(const PollutantModel& model, const PollutantRunOptions& opts);

/// Solve and emit per-species snapshot CSVs plus a summary JSON into
/// `out_dir`.
PollutantRun run_demo(const PollutantModel& model, const PollutantRunOptions& opts,
                      const std::filesystem::path& out_dir);

} // namespace degenlab

#endif
