// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "degenlab/elliptic.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/rng.hpp"

using namespace degenlab;

namespace {

GridSpec grid_1d(double alpha, int cells, double b = 1.0) {
  return GridSpec({DegenerateAxis(alpha, b, cells)});
}

CoefficientField laplace_coeffs(const GridSpec& grid, int m = 1) {
  return CoefficientField::constant(grid, m, std::vector<Complex>(grid.dim(), Complex(-1.0, 0.0)));
}

} // namespace

TEST_CASE("hand-assembled 1D Dirichlet matrix, n_cells = 4") {
  GridSpec grid = grid_1d(0.0, 4);
  const double h = grid.axis(0).dtau();
  const DiscreteOperator op =
      assemble(laplace_coeffs(grid), NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, Complex(0, 0));
  const Eigen::MatrixXcd dense(op.matrix);

  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(5, 5);
  expected(0, 0) = 1.0;  // u(0) row
  expected(4, 4) = 1.0;  // u(b) row
  for (int j = 1; j <= 3; ++j) {
    expected(j, j - 1) = -1.0 / (h * h);
    expected(j, j) = 2.0 / (h * h);
    expected(j, j + 1) = -1.0 / (h * h);
  }
  CHECK((dense - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(op.bc_rows.size() == 2);
}

TEST_CASE("constant diagonal matrix field shifts the block diagonal") {
  GridSpec grid = grid_1d(0.0, 4);
  Eigen::MatrixXcd A(2, 2);
  A << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(2, 0);
  const CoefficientField coeffs = CoefficientField::constant(grid, 2, {Complex(-1.0, 0.0)}, A);
  const DiscreteOperator op =
      assemble(coeffs, NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, Complex(0, 0));
  const Eigen::MatrixXcd dense(op.matrix);
  const double h = grid.axis(0).dtau();
  // interior node 1, components 0 and 1
  CHECK(dense(2, 2).real() == doctest::Approx(2.0 / (h * h) + 1.0));
  CHECK(dense(3, 3).real() == doctest::Approx(2.0 / (h * h) + 2.0));
}

TEST_CASE("2D Kronecker-sum dimensions and interior sparsity") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 2), DegenerateAxis(0.0, 1.0, 2)});
  const int m = 2;
  CoefficientField coeffs = CoefficientField::constant(grid, m, {Complex(-1.0, 0.0), Complex(-1.0, 0.0)});
  const DiscreteOperator op =
      assemble(coeffs, NonlocalBC::uniform(2, NonlocalBC::dirichlet()), grid, Complex(1.0, 0.0));
  CHECK(op.matrix.rows() == 9 * m);
  // interior node (1,1): each component row touches 5 nodes
  const Eigen::MatrixXcd dense(op.matrix);
  const Index center = grid.flatten({1, 1, 0});
  for (int c = 0; c < m; ++c) {
    int nnz = 0;
    for (Index col = 0; col < dense.cols(); ++col)
      if (std::abs(dense(center * m + c, col)) > 0) ++nnz;
    CHECK(nnz <= 5);
  }
}

TEST_CASE("zero load gives the zero solution") {
  GridSpec grid = grid_1d(0.3, 16);
  const DiscreteOperator op =
      assemble(laplace_coeffs(grid), NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, Complex(2, 1));
  const GridFunction u = solve(op, GridFunction(grid, 1));
  CHECK(u.values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("manufactured solution, alpha = 0: -u'' = pi^2 sin(pi x)") {
  const auto l2_error = [](int cells) {
    GridSpec grid = grid_1d(0.0, cells);
    const DiscreteOperator op = assemble(
        laplace_coeffs(grid), NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, Complex(0, 0));
    const GridFunction f = GridFunction::sample(grid, [](const std::array<double, kMaxDim>& x) {
      return Complex(M_PI * M_PI * std::sin(M_PI * x[0]), 0.0);
    });
    const GridFunction u = solve(op, f);
    const GridFunction exact = GridFunction::sample(
        grid, [](const std::array<double, kMaxDim>& x) { return Complex(std::sin(M_PI * x[0]), 0.0); });
    NormSpec spec;
    GridFunction err(grid, 1, u.values() - exact.values());
    return lp_norm(err, spec) / lp_norm(exact, spec);
  };
  const double e64 = l2_error(64);
  const double e128 = l2_error(128);
  CHECK(e64 < 1e-3);
  const double order = std::log2(e64 / e128);
  CHECK(order == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("manufactured degenerate solution, alpha = 0.5, built in tau") {
  const double alpha = 0.5;
  const auto l2_error = [&](int cells) {
    GridSpec grid = grid_1d(alpha, cells);
    const double tau_b = grid.axis(0).tau_b();
    const DiscreteOperator op = assemble(
        laplace_coeffs(grid), NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, Complex(0, 0));
    // u*(tau) = sin(pi tau / tau_b); f = -a d^2_tau u* with a = -1
    const GridFunction f = GridFunction::sample(grid, [&](const std::array<double, kMaxDim>& x) {
      const double tau = grid.axis(0).tau_map(x[0]);
      const double w = M_PI / tau_b;
      return Complex(w * w * std::sin(w * tau), 0.0);
    });
    const GridFunction u = solve(op, f);
    const GridFunction exact = GridFunction::sample(grid, [&](const std::array<double, kMaxDim>& x) {
      const double tau = grid.axis(0).tau_map(x[0]);
      return Complex(std::sin(M_PI * tau / tau_b), 0.0);
    });
    NormSpec spec;
    GridFunction err(grid, 1, u.values() - exact.values());
    return lp_norm(err, spec) / lp_norm(exact, spec);
  };
  const double e64 = l2_error(64);
  const double e128 = l2_error(128);
  CHECK(e128 < e64 / 3.0);
  CHECK(e128 < 1e-3);
}

TEST_CASE("solve rejects incompatible loads and surfaces singular systems") {
  GridSpec grid = grid_1d(0.0, 8);
  const DiscreteOperator op =
      assemble(laplace_coeffs(grid), NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, Complex(0, 0));
  CHECK_THROWS_AS(solve(op, GridFunction(grid, 2)), std::invalid_argument);

  // lambda exactly on the discrete spectrum of -d^2_tau with Dirichlet rows
  const double h = grid.axis(0).dtau();
  const double mu1 = 4.0 * std::pow(std::sin(M_PI / 16.0), 2) / (h * h);
  const DiscreteOperator shifted = op.with_lambda(Complex(-mu1, 0.0));
  GridFunction f(grid, 1);
  f.values().setConstant(Complex(1.0, 0.0));
  CHECK_THROWS_AS(solve(shifted, f), SingularSystem);
}

TEST_CASE("assemble rejects sign violations") {
  GridSpec grid = grid_1d(0.0, 8);
  const CoefficientField coeffs = CoefficientField::constant(grid, 1, {Complex(1.0, 0.0)});
  CHECK_THROWS_AS(assemble(coeffs, NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, Complex(0, 0)),
                  ConditionViolation);
}

TEST_CASE("conjugate symmetry for real coefficients") {
  GridSpec grid = grid_1d(0.5, 24);
  const CoefficientField coeffs =
      CoefficientField::constant(grid, 1, {Complex(-1.0, 0.0)}, Eigen::MatrixXcd::Identity(1, 1));
  const NonlocalBC bc = NonlocalBC::uniform(1, NonlocalBC::dirichlet());
  const Complex lambda(3.0, 2.0);

  GaussianStream stream(11);
  GridFunction f(grid, 1);
  for (Index i = 0; i < f.size(); ++i) f.values()[i] = stream.complex_normal();

  const GridFunction u = solve(assemble(coeffs, bc, grid, lambda), f);
  GridFunction f_conj(grid, 1, f.values().conjugate());
  const GridFunction u_conj = solve(assemble(coeffs, bc, grid, std::conj(lambda)), f_conj);
  CHECK((u_conj.values() - u.values().conjugate()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("first-order perturbation changes the solution by O(epsilon)") {
  GridSpec grid = grid_1d(0.0, 64);
  const NonlocalBC bc = NonlocalBC::uniform(1, NonlocalBC::dirichlet());
  const Complex lambda(5.0, 0.0);
  const GridFunction f = GridFunction::sample(grid, [](const std::array<double, kMaxDim>& x) {
    return Complex(std::sin(M_PI * x[0]) + 0.3, 0.0);
  });

  CoefficientField base = laplace_coeffs(grid);
  base.A0.assign(static_cast<std::size_t>(grid.node_count()), Eigen::MatrixXcd::Identity(1, 1));
  const GridFunction u0 = solve(assemble(base, bc, grid, lambda), f);
  NormSpec spec;
  const double u0_norm = lp_norm(u0, spec);

  std::vector<double> log_eps, log_diff;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    CoefficientField perturbed = base;
    perturbed.A1.resize(1);
    perturbed.A1[0].assign(static_cast<std::size_t>(grid.node_count()),
                           eps * Eigen::MatrixXcd::Identity(1, 1));
    const GridFunction u_eps = solve(assemble(perturbed, bc, grid, lambda), f);
    GridFunction diff(grid, 1, u_eps.values() - u0.values());
    const double rel = lp_norm(diff, spec) / u0_norm;
    CHECK(rel <= 10.0 * eps);
    log_eps.push_back(std::log10(eps));
    log_diff.push_back(std::log10(rel));
  }
  // least-squares slope in log-log
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    mx += log_eps[i] / 3;
    my += log_diff[i] / 3;
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    num += (log_eps[i] - mx) * (log_diff[i] - my);
    den += (log_eps[i] - mx) * (log_eps[i] - mx);
  }
  const double slope = num / den;
  CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("2D Kronecker solve agrees with a nested 1D-operator solve") {
  // separable coefficients on a 17x17 grid; the nested route treats axis 1
  // as the value space and assembles the outer problem by hand
  const int n = 16;
  GridSpec grid({DegenerateAxis(0.0, 1.0, n), DegenerateAxis(0.5, 1.0, n)});
  const int pts = n + 1;
  const Complex lambda(4.0, 1.0);

  std::vector<Complex> a1(static_cast<std::size_t>(pts)), a2(static_cast<std::size_t>(pts));
  for (int j = 0; j < pts; ++j) {
    a1[static_cast<std::size_t>(j)] =
        Complex(-1.0 - 0.5 * grid.x_nodes(0)[static_cast<std::size_t>(j)], 0.0);
    a2[static_cast<std::size_t>(j)] =
        Complex(-2.0 + grid.x_nodes(1)[static_cast<std::size_t>(j)] * 0.3, 0.0);
  }
  CoefficientField coeffs;
  coeffs.m = 1;
  coeffs.a.resize(2);
  coeffs.set_axis_coefficient(grid, 0, a1);
  coeffs.set_axis_coefficient(grid, 1, a2);
  coeffs.A0.assign(static_cast<std::size_t>(grid.node_count()), Eigen::MatrixXcd::Identity(1, 1));

  const NonlocalBC bc({NonlocalBC::dirichlet(), NonlocalBC::neumann()});
  const DiscreteOperator op2d = assemble(coeffs, bc, grid, lambda);

  GaussianStream stream(23);
  GridFunction f(grid, 1);
  for (Index i = 0; i < f.size(); ++i) f.values()[i] = stream.complex_normal();
  const GridFunction u2d = solve(op2d, f);

  // nested assembly: unknowns ordered exactly like flatten (axis 0 fast)
  const double h1 = grid.axis(0).dtau();
  const double h2 = grid.axis(1).dtau();
  const Index N = grid.node_count();
  Eigen::MatrixXcd nested = Eigen::MatrixXcd::Zero(N, N);
  const auto id = [&](int j1, int j2) { return static_cast<Index>(j1 + pts * j2); };
  const BCRows rows1 = bc_rows(bc, grid, 0);
  const BCRows rows2 = bc_rows(bc, grid, 1);

  for (int j2 = 0; j2 < pts; ++j2) {
    const bool outer_boundary = (j2 == 0) || (j2 == n);
    for (int j1 = 0; j1 < pts; ++j1) {
      const Index r = id(j1, j2);
      if (outer_boundary) {
        const auto& row = j2 == 0 ? rows2.first : rows2.second;
        for (const auto& [local, w] : row) nested(r, id(j1, local)) += w;
        continue;
      }
      if (j1 == 0 || j1 == n) {
        const auto& row = j1 == 0 ? rows1.first : rows1.second;
        for (const auto& [local, w] : row) nested(r, id(local, j2)) += w;
        continue;
      }
      // inner 1D operator block (value space) + outer second difference
      nested(r, id(j1 - 1, j2)) += a1[static_cast<std::size_t>(j1)] / (h1 * h1);
      nested(r, id(j1 + 1, j2)) += a1[static_cast<std::size_t>(j1)] / (h1 * h1);
      nested(r, r) += -2.0 * a1[static_cast<std::size_t>(j1)] / (h1 * h1) + 1.0 + lambda;
      nested(r, id(j1, j2 - 1)) += a2[static_cast<std::size_t>(j2)] / (h2 * h2);
      nested(r, id(j1, j2 + 1)) += a2[static_cast<std::size_t>(j2)] / (h2 * h2);
      nested(r, r) += -2.0 * a2[static_cast<std::size_t>(j2)] / (h2 * h2);
    }
  }
  Eigen::VectorXcd rhs = f.values();
  for (Index r = 0; r < N; ++r)
    if (op2d.is_bc_row[static_cast<std::size_t>(r)]) rhs[r] = 0.0;
  const Eigen::VectorXcd u_nested = nested.partialPivLu().solve(rhs);
  CHECK((u_nested - u2d.values()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("coercivity scan: trials = 0 gives an empty record list") {
  GridSpec grid = grid_1d(0.0, 8);
  const auto records = coercivity_scan(laplace_coeffs(grid), NonlocalBC::uniform(1, NonlocalBC::dirichlet()),
                                       grid, SectorSpec::default_grid(), 0);
  CHECK(records.empty());
}

TEST_CASE("coercivity scan includes lambda = 0 with the right weights") {
  GridSpec grid = grid_1d(0.0, 32);
  CoefficientField coeffs = laplace_coeffs(grid);
  coeffs.A0.assign(static_cast<std::size_t>(grid.node_count()), Eigen::MatrixXcd::Identity(1, 1));
  SectorSpec sector;
  sector.phi = M_PI / 3;
  sector.moduli = {1.0};
  sector.rays = {0.0};
  sector.include_zero = true;
  const auto records = coercivity_scan(coeffs, NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, sector,
                                       2, NormSpec{}, 42);
  REQUIRE(records.size() == 2);
  CHECK(records[0].lambda == Complex(0.0, 0.0));
  CHECK(records[0].status == "ok");
  CHECK(records[0].ratio > 0.0);
  CHECK(records[0].residual < 1e-10);

  // oracle for the lambda = 0 entry: only the i = 2 weight survives
  const DiscreteOperator op =
      assemble(coeffs, NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, Complex(0.0, 0.0));
  NormSpec spec;
  double expected = 0.0;
  for (int t = 0; t < 2; ++t) {
    const GridFunction f =
        random_unit_forcing(op, spec, GaussianStream::derive(42, 0, static_cast<std::uint64_t>(t)));
    const GridFunction u = solve(op, f);
    const double numer = lp_norm(degen_derivative(u, 0, 2), spec) + lp_norm(coeffs.apply_A0(u), spec);
    expected = std::max(expected, numer / lp_norm(f, spec));
  }
  CHECK(records[0].ratio == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("coercivity scan records singular samples and keeps going") {
  GridSpec grid = grid_1d(0.0, 8);
  const double h = grid.axis(0).dtau();
  const double mu1 = 4.0 * std::pow(std::sin(M_PI / 16.0), 2) / (h * h);
  SectorSpec sector;
  sector.phi = M_PI * (1.0 - 1e-13);
  sector.moduli = {mu1};
  sector.rays = {0.0, M_PI};  // the second ray lands numerically on -mu1
  const auto records = coercivity_scan(laplace_coeffs(grid), NonlocalBC::uniform(1, NonlocalBC::dirichlet()),
                                       grid, sector, 1);
  REQUIRE(records.size() == 2);
  CHECK(records[0].status == "ok");
  CHECK(records[1].status == "singular");
}

TEST_CASE("ratio stays bounded as |lambda| grows on the self-adjoint model") {
  GridSpec grid = grid_1d(0.0, 64);
  CoefficientField coeffs = laplace_coeffs(grid);
  coeffs.A0.assign(static_cast<std::size_t>(grid.node_count()), Eigen::MatrixXcd::Identity(1, 1));
  SectorSpec sector;
  sector.phi = M_PI / 4;
  sector.moduli = {1.0, 10.0, 100.0, 1000.0};
  sector.rays = {0.0};
  const auto records = coercivity_scan(coeffs, NonlocalBC::uniform(1, NonlocalBC::dirichlet()), grid, sector,
                                       3, NormSpec{}, 7);
  double lo = 1e300, hi = 0.0;
  for (const auto& rec : records) {
    REQUIRE(rec.status == "ok");
    lo = std::min(lo, rec.ratio);
    hi = std::max(hi, rec.ratio);
  }
  CHECK(hi / lo < 10.0);
}
