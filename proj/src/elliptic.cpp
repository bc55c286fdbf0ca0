// SPDX-License-Identifier: Apache-2.0

#include "degenlab/elliptic.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "degenlab/errors.hpp"
#include "degenlab/rng.hpp"

namespace degenlab {

DiscreteOperator DiscreteOperator::with_lambda(Complex new_lambda) const {
  DiscreteOperator shifted = *this;
  const Complex delta = new_lambda - lambda;
  if (delta != 0.0) {
    for (Index r = 0; r < rows(); ++r) {
      if (is_bc_row[static_cast<std::size_t>(r)]) continue;
      shifted.matrix.coeffRef(r, r) += delta;
    }
    shifted.matrix.makeCompressed();
  }
  shifted.lambda = new_lambda;
  return shifted;
}

namespace {

// Boundary ownership: the highest axis on whose face the node lies.
int owner_axis(const GridSpec& grid, const std::array<int, kMaxDim>& j) {
  int owner = -1;
  for (int k = 0; k < grid.dim(); ++k)
    if (j[static_cast<std::size_t>(k)] == 0 || j[static_cast<std::size_t>(k)] == grid.points(k) - 1) owner = k;
  return owner;
}

} // namespace

DiscreteOperator assemble(const CoefficientField& coeffs, const NonlocalBC& bc, const GridSpec& grid,
                          Complex lambda) {
  const BCReport report = validate_conditions(coeffs, bc, grid);
  if (report.has_errors()) {
    std::ostringstream msg;
    msg << "problem data failed validation:";
    for (const auto& m : report.messages)
      if (m.severity == ValidationMessage::Severity::Error) msg << " [" << m.code << "] " << m.text << ";";
    throw ConditionViolation(msg.str());
  }
  if (bc.n_axes() != grid.dim()) throw ConditionViolation("boundary conditions cover wrong number of axes");

  const int dim = grid.dim();
  const int m = coeffs.m;
  const Index n_nodes = grid.node_count();
  const Index n_rows = n_nodes * m;

  std::vector<BCRows> rows_per_axis;
  rows_per_axis.reserve(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) rows_per_axis.push_back(bc_rows(bc, grid, k));

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(2 * dim + m + 1));

  DiscreteOperator op{SparseMatrixXcd(n_rows, n_rows), {}, std::vector<char>(static_cast<std::size_t>(n_rows), 0),
                      grid, m, lambda};

  for (Index node = 0; node < n_nodes; ++node) {
    const auto j = grid.unflatten(node);
    const int owner = owner_axis(grid, j);

    if (owner >= 0) {
      // boundary-condition rows along the owning axis
      const bool at_zero = j[static_cast<std::size_t>(owner)] == 0;
      const auto& row = at_zero ? rows_per_axis[static_cast<std::size_t>(owner)].first
                                : rows_per_axis[static_cast<std::size_t>(owner)].second;
      for (int c = 0; c < m; ++c) {
        const Index r = node * m + c;
        op.is_bc_row[static_cast<std::size_t>(r)] = 1;
        op.bc_rows.push_back(r);
        for (const auto& [local, w] : row) {
          auto jj = j;
          jj[static_cast<std::size_t>(owner)] = local;
          triplets.emplace_back(r, grid.flatten(jj) * m + c, w);
        }
      }
      continue;
    }

    // interior equation rows
    for (int c = 0; c < m; ++c) {
      const Index r = node * m + c;
      Complex diag = lambda;
      for (int k = 0; k < dim; ++k) {
        const double dtau = grid.axis(k).dtau();
        const Complex ak = coeffs.a[static_cast<std::size_t>(k)](j[static_cast<std::size_t>(k)], c);
        const Complex scale = ak / (dtau * dtau);
        diag += -2.0 * scale;
        auto jm = j, jp = j;
        jm[static_cast<std::size_t>(k)] -= 1;
        jp[static_cast<std::size_t>(k)] += 1;
        triplets.emplace_back(r, grid.flatten(jm) * m + c, scale);
        triplets.emplace_back(r, grid.flatten(jp) * m + c, scale);
        if (coeffs.has_A1() && !coeffs.A1[static_cast<std::size_t>(k)].empty()) {
          const Eigen::MatrixXcd& Ak = coeffs.A1[static_cast<std::size_t>(k)][static_cast<std::size_t>(node)];
          const double inv2 = 1.0 / (2.0 * dtau);
          for (int c2 = 0; c2 < m; ++c2) {
            const Complex w = Ak(c, c2) * inv2;
            if (w != 0.0) {
              triplets.emplace_back(r, grid.flatten(jp) * m + c2, w);
              triplets.emplace_back(r, grid.flatten(jm) * m + c2, -w);
            }
          }
        }
      }
      triplets.emplace_back(r, r, diag);
      if (coeffs.has_A0()) {
        const Eigen::MatrixXcd& A = coeffs.A0[static_cast<std::size_t>(node)];
        for (int c2 = 0; c2 < m; ++c2)
          if (A(c, c2) != 0.0) triplets.emplace_back(r, node * m + c2, A(c, c2));
      }
    }
  }

  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

LinearSolver::LinearSolver(const DiscreteOperator& op) : op_(&op) {
  lu_.analyzePattern(op.matrix);
  lu_.factorize(op.matrix);
  if (lu_.info() != Eigen::Success)
    throw SingularSystem("sparse factorization failed (lambda on the discrete spectrum or degenerate constraints)");
}

Eigen::VectorXcd LinearSolver::solve(const Eigen::VectorXcd& rhs) const {
  Eigen::VectorXcd f_hat = rhs;
  for (Index r : op_->bc_rows) f_hat[r] = 0.0;
  const double f_norm = f_hat.norm();
  Eigen::VectorXcd u = lu_.solve(f_hat);
  if (lu_.info() != Eigen::Success) throw SingularSystem("sparse back-substitution failed");
  if (f_norm > 0.0) {
    const double residual = (op_->matrix * u - f_hat).norm();
    if (residual > 1e-10 * f_norm) {
      std::ostringstream msg;
      msg << "solution residual " << residual / f_norm << " exceeds 1e-10, system numerically singular";
      throw SingularSystem(msg.str());
    }
  }
  return u;
}

GridFunction solve(const DiscreteOperator& op, const GridFunction& f) {
  if (!(f.grid() == op.grid) || f.components() != op.m)
    throw std::invalid_argument("solve: load incompatible with the operator");
  LinearSolver solver(op);
  return GridFunction(op.grid, op.m, solver.solve(f.values()));
}

void SectorSpec::validate() const {
  if (!(phi > 0.0 && phi < M_PI)) throw std::invalid_argument("sector half-angle must lie in (0, pi)");
  double prev = 0.0;
  for (double m : moduli) {
    if (!(m > prev)) throw std::invalid_argument("sector moduli must be positive and strictly increasing");
    prev = m;
  }
  for (double theta : rays)
    if (std::abs(theta) > phi * (1.0 + 1e-12))
      throw std::invalid_argument("sector ray outside |theta| <= phi");
}

std::vector<Complex> SectorSpec::samples() const {
  validate();
  std::vector<Complex> out;
  if (include_zero) out.emplace_back(0.0, 0.0);
  out.reserve(out.size() + moduli.size() * rays.size());
  for (double r : moduli)
    for (double theta : rays) out.push_back(std::polar(r, theta));
  return out;
}

SectorSpec SectorSpec::logspaced(double phi, double mod_min, double mod_max, int n_moduli, int n_rays,
                                 bool include_zero) {
  SectorSpec spec;
  spec.phi = phi;
  spec.include_zero = include_zero;
  spec.moduli.resize(static_cast<std::size_t>(n_moduli));
  for (int i = 0; i < n_moduli; ++i) {
    const double t = n_moduli == 1 ? 0.0 : static_cast<double>(i) / (n_moduli - 1);
    spec.moduli[static_cast<std::size_t>(i)] = mod_min * std::pow(mod_max / mod_min, t);
  }
  spec.rays.resize(static_cast<std::size_t>(n_rays));
  for (int i = 0; i < n_rays; ++i) {
    const double t = n_rays == 1 ? 0.5 : static_cast<double>(i) / (n_rays - 1);
    spec.rays[static_cast<std::size_t>(i)] = -phi + 2.0 * phi * t;
  }
  spec.validate();
  return spec;
}

SectorSpec SectorSpec::default_grid(double phi) { return logspaced(phi, 1.0, 1e4, 5, 9); }

GridFunction random_unit_forcing(const DiscreteOperator& op, const NormSpec& spec, std::uint64_t seed) {
  GaussianStream stream(seed);
  GridFunction f(op.grid, op.m);
  for (Index i = 0; i < f.size(); ++i) f.values()[i] = stream.complex_normal();
  for (Index r : op.bc_rows) f.values()[r] = 0.0;
  const double norm = lp_norm(f, spec);
  if (norm > 0.0) f.values() /= norm;
  return f;
}

namespace {

void parallel_for(Index count, int threads, const std::function<void(Index)>& body) {
  if (threads <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<Index> next{0};
  const int n_workers = std::min<Index>(threads, count);
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) {
    pool.emplace_back([&]() {
      for (Index i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace

std::vector<CoercivityRecord> coercivity_scan(const CoefficientField& coeffs, const NonlocalBC& bc,
                                              const GridSpec& grid, const SectorSpec& sector, int trials,
                                              const NormSpec& spec, std::uint64_t seed, int threads) {
  if (trials <= 0) return {};
  const std::vector<Complex> lambdas = sector.samples();
  const DiscreteOperator base = assemble(coeffs, bc, grid, Complex(0.0, 0.0));
  std::vector<CoercivityRecord> records(lambdas.size());

  parallel_for(static_cast<Index>(lambdas.size()), threads, [&](Index li) {
    const Complex lambda = lambdas[static_cast<std::size_t>(li)];
    CoercivityRecord rec;
    rec.lambda = lambda;
    try {
      const DiscreteOperator op = base.with_lambda(lambda);
      LinearSolver solver(op);
      double max_ratio = 0.0, max_residual = 0.0;
      for (int t = 0; t < trials; ++t) {
        const GridFunction f =
            random_unit_forcing(op, spec, GaussianStream::derive(seed, static_cast<std::uint64_t>(li),
                                                                 static_cast<std::uint64_t>(t)));
        const Eigen::VectorXcd sol = solver.solve(f.values());
        GridFunction u(grid, op.m, sol);

        Eigen::VectorXcd f_hat = f.values();
        for (Index r : op.bc_rows) f_hat[r] = 0.0;
        const double res = (op.matrix * sol - f_hat).norm() / std::max(f_hat.norm(), 1e-300);

        const double f_norm = lp_norm(f, spec);
        double numer = coeffs.has_A0() ? lp_norm(coeffs.apply_A0(u), spec) : 0.0;
        const double abs_lambda = std::abs(lambda);
        for (int k = 0; k < grid.dim(); ++k) {
          for (int i = 0; i <= 2; ++i) {
            const double weight = std::pow(abs_lambda, 1.0 - 0.5 * i);
            if (weight == 0.0) continue;
            const GridFunction d = i == 0 ? u : degen_derivative(u, k, i);
            numer += weight * lp_norm(d, spec);
          }
        }
        max_ratio = std::max(max_ratio, numer / f_norm);
        max_residual = std::max(max_residual, res);
      }
      rec.ratio = max_ratio;
      rec.residual = max_residual;
      rec.status = "ok";
    } catch (const SingularSystem&) {
      rec.status = "singular";
    }
    records[static_cast<std::size_t>(li)] = rec;
  });
  return records;
}

} // namespace degenlab
