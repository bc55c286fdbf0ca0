// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "degenlab/bc.hpp"
#include "degenlab/elliptic.hpp"
#include "degenlab/errors.hpp"

using namespace degenlab;

namespace {

NonlocalBC make_1d(const AxisBC& axis) { return NonlocalBC({axis}); }

} // namespace

TEST_CASE("eta determinant for the named condition pairs") {
  CHECK(eta_determinant(make_1d(NonlocalBC::dirichlet()), 0) == Complex(1.0, 0.0));
  CHECK(eta_determinant(make_1d(NonlocalBC::neumann()), 0) == Complex(-1.0, 0.0));
  // hand evaluation: (-1)^0 * 1 * (-1) - (-1)^1 * 1 * (-1) = -2
  CHECK(eta_determinant(make_1d(NonlocalBC::periodic()), 0) == Complex(-2.0, 0.0));
}

TEST_CASE("bc shape validation") {
  // top coefficient of condition 1 must have a nonzero alpha part
  AxisBC bad = NonlocalBC::dirichlet();
  bad.first.alpha = {0.0};
  bad.first.beta = {1.0};
  CHECK_THROWS_AS(make_1d(bad), InvalidBoundaryCondition);

  AxisBC wrong_len = NonlocalBC::dirichlet();
  wrong_len.first.alpha = {1.0, 0.0};
  CHECK_THROWS_AS(make_1d(wrong_len), InvalidBoundaryCondition);

  AxisBC bad_order = NonlocalBC::dirichlet();
  bad_order.first.order = 2;
  bad_order.first.alpha = {1.0, 0.0, 0.0};
  bad_order.first.beta = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(make_1d(bad_order), InvalidBoundaryCondition);
}

TEST_CASE("dirichlet rows are unit point evaluations") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 4)});
  const BCRows rows = bc_rows(make_1d(NonlocalBC::dirichlet()), grid, 0);
  REQUIRE(rows.first.size() == 1);
  REQUIRE(rows.second.size() == 1);
  CHECK(rows.first[0].first == 0);
  CHECK(rows.first[0].second == Complex(1.0, 0.0));
  CHECK(rows.second[0].first == 4);
  CHECK(rows.second[0].second == Complex(1.0, 0.0));
}

TEST_CASE("neumann row matches the one-sided 3-point weights") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 4)});
  const double h = grid.axis(0).dtau();
  const BCRows rows = bc_rows(make_1d(NonlocalBC::neumann()), grid, 0);
  REQUIRE(rows.first.size() == 3);
  std::array<double, 5> weights{0, 0, 0, 0, 0};
  for (const auto& [node, w] : rows.first) weights[static_cast<std::size_t>(node)] = w.real();
  CHECK(weights[0] == doctest::Approx(-3.0 / (2 * h)));
  CHECK(weights[1] == doctest::Approx(2.0 / h));
  CHECK(weights[2] == doctest::Approx(-1.0 / (2 * h)));
  CHECK(weights[3] == 0.0);
  CHECK(weights[4] == 0.0);
}

TEST_CASE("periodic rows touch both endpoint stencils") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 8)});
  const BCRows rows = bc_rows(make_1d(NonlocalBC::periodic()), grid, 0);
  // value condition: u(0) - u(b)
  REQUIRE(rows.first.size() == 2);
  // derivative condition: one-sided stencils at both ends
  REQUIRE(rows.second.size() == 6);
  bool touches_left = false, touches_right = false;
  for (const auto& [node, w] : rows.second) {
    if (node <= 2) touches_left = true;
    if (node >= 6) touches_right = true;
  }
  CHECK(touches_left);
  CHECK(touches_right);
}

TEST_CASE("degenerate eta raises a named error from bc_rows") {
  // second condition duplicates the first up to epsilon
  AxisBC family;
  family.first = BoundaryFunctional{0, {1.0}, {0.0}};
  family.second = BoundaryFunctional{0, {1.0}, {1e-15}};
  GridSpec grid({DegenerateAxis(0.0, 1.0, 4)});
  CHECK_THROWS_AS(bc_rows(make_1d(family), grid, 0), EtaDegenerate);
}

TEST_CASE("validate_conditions on a clean problem") {
  GridSpec grid({DegenerateAxis(0.25, 1.0, 8)});
  const CoefficientField coeffs = CoefficientField::constant(grid, 1, {Complex(-1.0, 0.0)});
  const BCReport report = validate_conditions(coeffs, make_1d(NonlocalBC::dirichlet()), grid, 2.0);
  CHECK(report.satisfied);
  CHECK(report.messages.empty());
  CHECK(report.eta[0] == Complex(1.0, 0.0));
}

TEST_CASE("validate_conditions flags the sign condition") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 8)});
  const CoefficientField coeffs = CoefficientField::constant(grid, 1, {Complex(1.0, 0.0)});
  const BCReport report = validate_conditions(coeffs, make_1d(NonlocalBC::dirichlet()), grid, 2.0);
  CHECK(report.has_errors());
  bool found = false;
  for (const auto& m : report.messages)
    found = found || (m.code == "sign-condition" && m.text.find("sign condition violated") != std::string::npos);
  CHECK(found);
}

TEST_CASE("validate_conditions warns on the trace exponent") {
  GridSpec grid({DegenerateAxis(0.9, 1.0, 8)});
  const CoefficientField coeffs = CoefficientField::constant(grid, 1, {Complex(-1.0, 0.0)});
  const BCReport report = validate_conditions(coeffs, make_1d(NonlocalBC::dirichlet()), grid, 2.0);
  CHECK(!report.has_errors());
  bool found = false;
  for (const auto& m : report.messages)
    found = found || (m.code == "trace-exponent" &&
                      m.severity == ValidationMessage::Severity::Warning &&
                      m.text.find("alpha < 1 - 1/p") != std::string::npos);
  CHECK(found);
}

TEST_CASE("endpoint compatibility warning only when a condition couples both ends") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 8)});
  CoefficientField coeffs = CoefficientField::constant(grid, 1, {Complex(-1.0, 0.0)});
  std::vector<Complex> samples(9);
  for (int j = 0; j <= 8; ++j) samples[static_cast<std::size_t>(j)] = Complex(-1.0 - 0.5 * j / 8.0, 0.0);
  coeffs.set_axis_coefficient(grid, 0, samples);

  const BCReport local = validate_conditions(coeffs, make_1d(NonlocalBC::dirichlet()), grid, 2.0);
  for (const auto& m : local.messages) CHECK(m.code != "endpoint-compat");

  const BCReport coupled = validate_conditions(coeffs, make_1d(NonlocalBC::periodic()), grid, 2.0);
  bool found = false;
  for (const auto& m : coupled.messages) found = found || m.code == "endpoint-compat";
  CHECK(found);
}

TEST_CASE("eta degeneracy reported as error") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 8)});
  const CoefficientField coeffs = CoefficientField::constant(grid, 1, {Complex(-1.0, 0.0)});
  AxisBC family;
  family.first = BoundaryFunctional{0, {1.0}, {0.0}};
  family.second = BoundaryFunctional{0, {1.0}, {1e-14}};
  const BCReport report = validate_conditions(coeffs, make_1d(family), grid, 2.0);
  CHECK(!report.satisfied);
  CHECK(report.has_errors());
}

TEST_CASE("scaling a condition scales eta and leaves the solution unchanged") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 16)});
  const CoefficientField coeffs = CoefficientField::constant(grid, 1, {Complex(-1.0, 0.0)});

  AxisBC scaled = NonlocalBC::dirichlet();
  const Complex c(2.5, -1.0);
  scaled.first.alpha = {c};
  scaled.first.beta = {Complex(0.0, 0.0)};
  const NonlocalBC bc_plain = make_1d(NonlocalBC::dirichlet());
  const NonlocalBC bc_scaled = make_1d(scaled);

  CHECK(eta_determinant(bc_scaled, 0) == c * eta_determinant(bc_plain, 0));

  GridFunction f(grid, 1);
  for (Index node = 0; node < grid.node_count(); ++node)
    f.at(node, 0) = Complex(std::sin(2.0 * node), std::cos(3.0 * node));
  const GridFunction u1 = solve(assemble(coeffs, bc_plain, grid, Complex(0.0, 0.0)), f);
  const GridFunction u2 = solve(assemble(coeffs, bc_scaled, grid, Complex(0.0, 0.0)), f);
  CHECK((u1.values() - u2.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("condition number diverges as eta tends to zero") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 32)});
  const CoefficientField coeffs = CoefficientField::constant(grid, 1, {Complex(-1.0, 0.0)});

  const auto cond_for = [&](double eps) {
    AxisBC family;
    family.first = BoundaryFunctional{0, {1.0}, {0.0}};
    family.second = BoundaryFunctional{0, {1.0}, {Complex(eps, 0.0)}};
    const DiscreteOperator op = assemble(coeffs, make_1d(family), grid, Complex(0.0, 0.0));
    const Eigen::MatrixXcd dense(op.matrix);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense);
    const auto& sigma = svd.singularValues();
    return sigma[0] / sigma[sigma.size() - 1];
  };

  const double cond_regular = cond_for(1.0);
  const double cond_degenerate = cond_for(1e-6);
  CHECK(cond_degenerate / cond_regular >= 1e3);
}
