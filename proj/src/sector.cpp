// SPDX-License-Identifier: Apache-2.0

#include "degenlab/sector.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "degenlab/errors.hpp"
#include "degenlab/rng.hpp"

namespace degenlab {

namespace {

// Orthonormal basis of the subspace annihilated by the bc rows, via a full
// QR of the stacked adjoint constraints.
Eigen::MatrixXcd bc_kernel_basis(const DiscreteOperator& op) {
  const Index n = op.rows();
  const Index n_bc = static_cast<Index>(op.bc_rows.size());
  if (n_bc == 0) return Eigen::MatrixXcd::Identity(n, n);
  std::vector<Index> pos(static_cast<std::size_t>(n), -1);
  for (Index c = 0; c < n_bc; ++c) pos[static_cast<std::size_t>(op.bc_rows[static_cast<std::size_t>(c)])] = c;
  Eigen::MatrixXcd constraints = Eigen::MatrixXcd::Zero(n, n_bc);
  for (int outer = 0; outer < op.matrix.outerSize(); ++outer) {
    for (SparseMatrixXcd::InnerIterator it(op.matrix, outer); it; ++it) {
      const Index c = pos[static_cast<std::size_t>(it.row())];
      if (c >= 0) constraints(it.col(), c) = std::conj(it.value());
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(constraints);
  const Eigen::MatrixXcd q = qr.householderQ();
  return q.rightCols(n - n_bc);
}

double exact_l2_resolvent_norm(const DiscreteOperator& op, Complex lambda) {
  const DiscreteOperator shifted = op.with_lambda(lambda);
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(shifted.matrix);
  const Eigen::MatrixXcd kernel = bc_kernel_basis(op);

  const Index n = op.rows();
  const Index n_eq = n - static_cast<Index>(op.bc_rows.size());
  Eigen::MatrixXcd equation_rows(n_eq, n);
  Index r_out = 0;
  for (Index r = 0; r < n; ++r)
    if (!op.is_bc_row[static_cast<std::size_t>(r)]) equation_rows.row(r_out++) = dense.row(r);

  const Eigen::MatrixXcd restricted = equation_rows * kernel;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(restricted);
  const auto& sigma = svd.singularValues();
  const double sigma_min = sigma[sigma.size() - 1];
  if (!(sigma_min > sigma[0] * 1e-14) || !(sigma_min > 0.0))
    throw SingularSystem("lambda lies on the discrete spectrum (restricted operator singular)");
  return 1.0 / sigma_min;
}

double randomized_lp_resolvent_bound(const DiscreteOperator& op, Complex lambda, double p,
                                     std::uint64_t seed, int n_probes) {
  const DiscreteOperator shifted = op.with_lambda(lambda);
  LinearSolver solver(shifted);
  NormSpec spec;
  spec.spatial_p = p;
  double best = 0.0;
  for (int t = 0; t < n_probes; ++t) {
    const GridFunction f =
        random_unit_forcing(shifted, spec, GaussianStream::derive(seed, static_cast<std::uint64_t>(t)));
    const Eigen::VectorXcd u = solver.solve(f.values());
    best = std::max(best, lp_norm(GridFunction(op.grid, op.m, u), spec) / lp_norm(f, spec));
  }
  return best;
}

} // namespace

double resolvent_norm(const DiscreteOperator& op_without_lambda, Complex lambda, double p, std::uint64_t seed,
                      int n_probes) {
  if (p == 2.0) return exact_l2_resolvent_norm(op_without_lambda, lambda);
  return randomized_lp_resolvent_bound(op_without_lambda, lambda, p, seed, n_probes);
}

PositivityReport positivity_scan(const CoefficientField& coeffs, const NonlocalBC& bc, const GridSpec& grid,
                                 const SectorSpec& sector, double p, std::uint64_t seed, int threads) {
  (void)threads;  // samples are cheap relative to the dense decomposition; kept sequential and deterministic
  PositivityReport report;
  const std::vector<Complex> lambdas = sector.samples();
  if (lambdas.empty()) return report;
  const DiscreteOperator base = assemble(coeffs, bc, grid, Complex(0.0, 0.0));

  report.samples.resize(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    PositivitySample s;
    s.lambda = lambdas[i];
    try {
      s.resolvent_norm = resolvent_norm(base, s.lambda, p, GaussianStream::derive(seed, i));
      s.weighted_norm = (1.0 + std::abs(s.lambda)) * s.resolvent_norm;
      s.status = "ok";
      report.M_hat = std::max(report.M_hat.value_or(0.0), s.weighted_norm);
    } catch (const SingularSystem&) {
      s.status = "singular";
    }
    report.samples[i] = s;
  }
  return report;
}

} // namespace degenlab
