// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_SECTOR_HPP
#define DEGENLAB_SECTOR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "degenlab/elliptic.hpp"

namespace degenlab {

struct PositivitySample {
  Complex lambda;
  double resolvent_norm = 0.0;
  double weighted_norm = 0.0;  // (1 + |lambda|) * resolvent_norm
  std::string status;          // "ok" or "singular"
};

struct PositivityReport {
  std::vector<PositivitySample> samples;
  std::optional<double> M_hat;  // max weighted norm over successful samples
};

/// Norm of the discrete resolvent (O_h + lambda)^{-1}. For p = 2 this is
/// exact: the reciprocal of the smallest singular value of the shifted
/// equation rows restricted to the subspace satisfying the bc rows. For
/// p != 2 a seeded randomized probe returns a documented lower bound.
/// The operator must be assembled with lambda = 0.
double resolvent_norm(const DiscreteOperator& op_without_lambda, Complex lambda, double p = 2.0,
                      std::uint64_t seed = 0, int n_probes = 8);

/// Tabulates (1 + |lambda|) * resolvent_norm over the sector grid; M_hat is
/// the maximum. Per-sample failures are recorded and the scan continues.
PositivityReport positivity_scan(const CoefficientField& coeffs, const NonlocalBC& bc, const GridSpec& grid,
                                 const SectorSpec& sector, double p = 2.0, std::uint64_t seed = 0,
                                 int threads = 1);

} // namespace degenlab

#endif
