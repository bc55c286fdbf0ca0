// SPDX-License-Identifier: Apache-2.0

#include "degenlab/bc.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "degenlab/errors.hpp"

namespace degenlab {

namespace {

void check_functional(const BoundaryFunctional& f, int axis, int j) {
  std::ostringstream tag;
  tag << "axis " << axis << " condition " << j;
  if (f.order != 0 && f.order != 1)
    throw InvalidBoundaryCondition(tag.str() + ": order must be 0 or 1");
  if (f.alpha.size() != static_cast<std::size_t>(f.order + 1) ||
      f.beta.size() != static_cast<std::size_t>(f.order + 1))
    throw InvalidBoundaryCondition(tag.str() + ": coefficient list must have order+1 entries");
  if (std::abs(f.alpha.back()) + std::abs(f.beta.back()) == 0.0)
    throw InvalidBoundaryCondition(tag.str() + ": top-order coefficients both vanish");
}

} // namespace

NonlocalBC::NonlocalBC(std::vector<AxisBC> per_axis) : per_axis_(std::move(per_axis)) {
  if (per_axis_.empty() || per_axis_.size() > static_cast<std::size_t>(kMaxDim))
    throw InvalidBoundaryCondition("boundary conditions must cover 1 to 3 axes");
  for (int k = 0; k < n_axes(); ++k) {
    check_functional(per_axis_[k].first, k, 1);
    check_functional(per_axis_[k].second, k, 2);
    std::ostringstream tag;
    tag << "axis " << k;
    if (std::abs(per_axis_[k].first.alpha.back()) == 0.0)
      throw InvalidBoundaryCondition(tag.str() + ": alpha top coefficient of condition 1 vanishes");
    if (std::abs(per_axis_[k].second.beta.back()) == 0.0)
      throw InvalidBoundaryCondition(tag.str() + ": beta top coefficient of condition 2 vanishes");
  }
}

AxisBC NonlocalBC::dirichlet() {
  return AxisBC{BoundaryFunctional{0, {1.0}, {0.0}}, BoundaryFunctional{0, {0.0}, {1.0}}};
}

AxisBC NonlocalBC::neumann() {
  return AxisBC{BoundaryFunctional{1, {0.0, 1.0}, {0.0, 0.0}}, BoundaryFunctional{1, {0.0, 0.0}, {0.0, 1.0}}};
}

AxisBC NonlocalBC::periodic() {
  return AxisBC{BoundaryFunctional{0, {1.0}, {-1.0}}, BoundaryFunctional{1, {0.0, 1.0}, {0.0, -1.0}}};
}

NonlocalBC NonlocalBC::uniform(int dim, const AxisBC& axis_bc) {
  return NonlocalBC(std::vector<AxisBC>(static_cast<std::size_t>(dim), axis_bc));
}

Complex eta_determinant(const NonlocalBC& bc, int axis_index) {
  const AxisBC& ax = bc.axis(axis_index);
  const double s1 = ax.first.order % 2 == 0 ? 1.0 : -1.0;
  const double s2 = ax.second.order % 2 == 0 ? 1.0 : -1.0;
  return s1 * ax.first.alpha.back() * ax.second.beta.back() -
         s2 * ax.second.alpha.back() * ax.first.beta.back();
}

double eta_scale(const NonlocalBC& bc, int axis_index) {
  const AxisBC& ax = bc.axis(axis_index);
  return (std::abs(ax.first.alpha.back()) + std::abs(ax.first.beta.back())) *
         (std::abs(ax.second.alpha.back()) + std::abs(ax.second.beta.back()));
}

namespace {

// Trace stencils over axis-local nodes: value and one-sided second-order
// first tau-derivative at either end.
void add_trace(std::vector<std::pair<int, Complex>>& row, Complex weight, int order, bool left, int n_last,
               double dtau) {
  if (weight == 0.0) return;
  if (order == 0) {
    row.emplace_back(left ? 0 : n_last, weight);
    return;
  }
  const double inv2 = 1.0 / (2.0 * dtau);
  if (left) {
    row.emplace_back(0, weight * Complex(-3.0 * inv2));
    row.emplace_back(1, weight * Complex(4.0 * inv2));
    row.emplace_back(2, weight * Complex(-1.0 * inv2));
  } else {
    row.emplace_back(n_last, weight * Complex(3.0 * inv2));
    row.emplace_back(n_last - 1, weight * Complex(-4.0 * inv2));
    row.emplace_back(n_last - 2, weight * Complex(1.0 * inv2));
  }
}

std::vector<std::pair<int, Complex>> functional_row(const BoundaryFunctional& f, int n_last, double dtau) {
  std::vector<std::pair<int, Complex>> row;
  for (int i = 0; i <= f.order; ++i) {
    add_trace(row, f.alpha[static_cast<std::size_t>(i)], i, /*left=*/true, n_last, dtau);
    add_trace(row, f.beta[static_cast<std::size_t>(i)], i, /*left=*/false, n_last, dtau);
  }
  // merge duplicate node entries (periodic-type rows on coarse grids)
  std::vector<std::pair<int, Complex>> merged;
  for (const auto& [node, w] : row) {
    bool found = false;
    for (auto& [mn, mw] : merged) {
      if (mn == node) {
        mw += w;
        found = true;
        break;
      }
    }
    if (!found) merged.emplace_back(node, w);
  }
  return merged;
}

} // namespace

BCRows bc_rows(const NonlocalBC& bc, const GridSpec& grid, int axis_index) {
  const Complex eta = eta_determinant(bc, axis_index);
  if (std::abs(eta) <= kEtaRelTolerance * eta_scale(bc, axis_index)) {
    std::ostringstream msg;
    msg << "axis " << axis_index << ": |eta| = " << std::abs(eta)
        << " below tolerance, boundary-value problem is not regular";
    throw EtaDegenerate(msg.str());
  }
  const AxisBC& ax = bc.axis(axis_index);
  const int n_last = grid.points(axis_index) - 1;
  const double dtau = grid.axis(axis_index).dtau();
  return BCRows{functional_row(ax.first, n_last, dtau), functional_row(ax.second, n_last, dtau)};
}

namespace {

bool couples_both_ends(const AxisBC& ax) {
  for (const BoundaryFunctional* f : {&ax.first, &ax.second}) {
    bool has_alpha = false, has_beta = false;
    for (const Complex& c : f->alpha) has_alpha = has_alpha || std::abs(c) > 0.0;
    for (const Complex& c : f->beta) has_beta = has_beta || std::abs(c) > 0.0;
    if (has_alpha && has_beta) return true;
  }
  return false;
}

} // namespace

BCReport validate_conditions(const CoefficientField& coeffs, const NonlocalBC& bc, const GridSpec& grid,
                             double spatial_p) {
  BCReport report;
  using Severity = ValidationMessage::Severity;
  const int dim = grid.dim();

  for (int k = 0; k < dim; ++k) {
    const double alpha = grid.axis(k).alpha();
    const double limit = 1.0 - 1.0 / spatial_p;
    if (alpha >= limit) {
      std::ostringstream msg;
      msg << "axis " << k << ": trace condition alpha < 1 - 1/p violated (alpha = " << alpha
          << ", 1 - 1/p = " << limit << ")";
      report.messages.push_back({Severity::Warning, "trace-exponent", msg.str()});
    }
  }

  if (coeffs.a.size() != static_cast<std::size_t>(dim)) {
    report.messages.push_back({Severity::Error, "shape", "coefficient field covers wrong number of axes"});
  } else {
    for (int k = 0; k < dim; ++k) {
      const auto& ak = coeffs.a[static_cast<std::size_t>(k)];
      if (ak.rows() != grid.points(k) || ak.cols() != coeffs.m) {
        report.messages.push_back({Severity::Error, "shape", "a_k samples do not match the grid"});
        continue;
      }
      if ((ak.real().array() >= 0.0).any()) {
        std::ostringstream msg;
        msg << "axis " << k << ": sign condition violated, Re a_k must be negative at every node";
        report.messages.push_back({Severity::Error, "sign-condition", msg.str()});
      }
    }
  }

  // endpoint compatibility applies when some condition ties the two faces
  for (int k = 0; k < dim && coeffs.a.size() == static_cast<std::size_t>(dim); ++k) {
    if (k >= bc.n_axes() || !couples_both_ends(bc.axis(k))) continue;
    const auto& ak = coeffs.a[static_cast<std::size_t>(k)];
    if (ak.rows() != grid.points(k)) continue;
    const double scale = ak.cwiseAbs().maxCoeff() + 1e-300;
    if (((ak.row(0) - ak.row(ak.rows() - 1)).cwiseAbs().maxCoeff()) > 1e-8 * scale) {
      std::ostringstream msg;
      msg << "axis " << k << ": a_k differs at the two faces while a condition couples both ends";
      report.messages.push_back({Severity::Warning, "endpoint-compat", msg.str()});
    }
    if (coeffs.has_A0() && coeffs.A0.size() == static_cast<std::size_t>(grid.node_count())) {
      double max_diff = 0.0, max_norm = 0.0;
      const int pts = grid.points(k);
      for (Index node = 0; node < grid.node_count(); ++node) {
        const auto j = grid.unflatten(node);
        if (j[static_cast<std::size_t>(k)] != 0) continue;
        auto jb = j;
        jb[static_cast<std::size_t>(k)] = pts - 1;
        const Index other = grid.flatten(jb);
        max_diff = std::max(max_diff, (coeffs.A0[static_cast<std::size_t>(node)] -
                                       coeffs.A0[static_cast<std::size_t>(other)])
                                          .cwiseAbs()
                                          .maxCoeff());
        max_norm = std::max(max_norm, coeffs.A0[static_cast<std::size_t>(node)].cwiseAbs().maxCoeff());
      }
      if (max_diff > 1e-8 * (max_norm + 1e-300)) {
        std::ostringstream msg;
        msg << "axis " << k << ": matrix field A differs at the two faces while a condition couples both ends";
        report.messages.push_back({Severity::Warning, "endpoint-compat", msg.str()});
      }
    }
  }

  // numerical range of A: warn when the Hermitian part dips below zero
  if (coeffs.has_A0()) {
    if (coeffs.A0.size() != static_cast<std::size_t>(grid.node_count())) {
      report.messages.push_back({Severity::Error, "shape", "matrix field A does not match the grid"});
    } else {
      double min_eig = 0.0;
      for (const auto& A : coeffs.A0) {
        const Eigen::MatrixXcd herm = 0.5 * (A + A.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      }
      if (min_eig < -1e-12) {
        std::ostringstream msg;
        msg << "matrix field A has numerical range reaching Re z = " << min_eig << " < 0";
        report.messages.push_back({Severity::Warning, "positivity", msg.str()});
      }
    }
  }

  report.eta.resize(static_cast<std::size_t>(bc.n_axes()));
  report.satisfied = true;
  for (int k = 0; k < bc.n_axes(); ++k) {
    const Complex eta = eta_determinant(bc, k);
    report.eta[static_cast<std::size_t>(k)] = eta;
    if (std::abs(eta) <= kEtaRelTolerance * eta_scale(bc, k)) {
      report.satisfied = false;
      std::ostringstream msg;
      msg << "axis " << k << ": eta determinant vanishes, boundary-value problem is not regular";
      report.messages.push_back({Severity::Error, "eta-degenerate", msg.str()});
    }
  }
  return report;
}

} // namespace degenlab
