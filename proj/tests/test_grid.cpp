// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "degenlab/grid.hpp"

using namespace degenlab;

TEST_CASE("tau map values") {
  CHECK(DegenerateAxis(0.0, 1.0, 4).tau_map(1.0) == doctest::Approx(1.0));
  CHECK(DegenerateAxis(0.5, 1.0, 4).tau_map(1.0) == doctest::Approx(2.0));
  CHECK(DegenerateAxis(0.5, 1.0, 4).tau_map(0.25) == doctest::Approx(1.0));
}

TEST_CASE("inverse map values") {
  CHECK(DegenerateAxis(0.0, 1.0, 4).inverse_map(1.0) == doctest::Approx(1.0));
  CHECK(DegenerateAxis(0.5, 1.0, 4).inverse_map(2.0) == doctest::Approx(1.0));
  CHECK(DegenerateAxis(0.5, 1.0, 4).inverse_map(1.0) == doctest::Approx(0.25));
}

TEST_CASE("map domain errors and construction guards") {
  DegenerateAxis axis(0.5, 1.0, 4);
  CHECK_THROWS_AS(axis.tau_map(-0.1), std::domain_error);
  CHECK_THROWS_AS(axis.tau_map(1.1), std::domain_error);
  CHECK_THROWS_AS(axis.inverse_map(-0.1), std::domain_error);
  CHECK_THROWS_AS(axis.inverse_map(2.5), std::domain_error);
  CHECK_THROWS_AS(DegenerateAxis(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(DegenerateAxis(-0.1, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(DegenerateAxis(0.5, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(DegenerateAxis(0.5, 1.0, 1), std::invalid_argument);
}

TEST_CASE("tau_map hits tau_b at the right end and inverts") {
  for (double alpha : {0.0, 0.3, 0.5, 0.7, 0.9}) {
    DegenerateAxis axis(alpha, 2.5, 16);
    CHECK(axis.tau_map(axis.b()) == doctest::Approx(axis.tau_b()).epsilon(1e-15));
    // monotone in x
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
      const double tau = axis.tau_map(axis.b() * i / 20.0);
      CHECK(tau > prev);
      prev = tau;
    }
    // left inverse to relative tolerance 1e-12 on (0, b]
    for (int i = 1; i <= 20; ++i) {
      const double x = axis.b() * i / 20.0;
      CHECK(axis.inverse_map(axis.tau_map(x)) == doctest::Approx(x).epsilon(1e-12));
    }
  }
}

TEST_CASE("grid nodes are uniform in tau and pinned at the ends") {
  GridSpec grid({DegenerateAxis(0.5, 1.0, 8), DegenerateAxis(0.0, 2.0, 4)});
  CHECK(grid.node_count() == 9 * 5);
  for (int k = 0; k < 2; ++k) {
    const auto& tau = grid.tau_nodes(k);
    const auto& x = grid.x_nodes(k);
    const double dtau = grid.axis(k).dtau();
    for (std::size_t j = 0; j < tau.size(); ++j)
      CHECK(tau[j] == doctest::Approx(j * dtau).epsilon(1e-15));
    CHECK(x.front() == 0.0);
    CHECK(x.back() == grid.axis(k).b());
    for (std::size_t j = 1; j < x.size(); ++j) CHECK(x[j] > x[j - 1]);
  }
}

TEST_CASE("mesh grading is monotone for alpha > 0") {
  GridSpec grid({DegenerateAxis(0.6, 1.0, 32)});
  const auto& x = grid.x_nodes(0);
  for (std::size_t j = 2; j < x.size(); ++j) {
    const double left = x[j - 1] - x[j - 2];
    const double right = x[j] - x[j - 1];
    CHECK(right > left);
  }
}

TEST_CASE("flatten and unflatten round trip") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 3), DegenerateAxis(0.2, 1.0, 4), DegenerateAxis(0.5, 1.0, 2)});
  for (Index node = 0; node < grid.node_count(); ++node) {
    CHECK(grid.flatten(grid.unflatten(node)) == node);
  }
}

TEST_CASE("derivative of a constant vanishes") {
  GridSpec grid({DegenerateAxis(0.4, 1.0, 16)});
  GridFunction u(grid, 1);
  u.values().setConstant(Complex(3.25, -1.0));
  const GridFunction d1 = degen_derivative(u, 0, 1);
  const GridFunction d2 = degen_derivative(u, 0, 2);
  CHECK(d1.values().cwiseAbs().maxCoeff() < 1e-13);
  CHECK(d2.values().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("first derivative of tau itself is one") {
  GridSpec grid({DegenerateAxis(0.5, 1.0, 32)});
  const GridFunction u = GridFunction::sample(grid, [&](const std::array<double, kMaxDim>& x) {
    return Complex(grid.axis(0).tau_map(x[0]), 0.0);
  });
  const GridFunction d1 = degen_derivative(u, 0, 1);
  for (Index node = 0; node < grid.node_count(); ++node)
    CHECK(d1.at(node, 0).real() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("degenerate derivative of u = x matches x^alpha at x = 0.25") {
  // oracle: D^[1] x = x^alpha * 1, so the value at x = 0.25 with alpha = 0.5
  // is sqrt(0.25) = 0.5
  GridSpec grid({DegenerateAxis(0.5, 1.0, 256)});
  const GridFunction u =
      GridFunction::sample(grid, [](const std::array<double, kMaxDim>& x) { return Complex(x[0], 0.0); });
  const GridFunction d1 = degen_derivative(u, 0, 1);
  // x = 0.25 corresponds to tau = 1.0, node index tau / dtau = 128
  const Index node = 128;
  CHECK(grid.x_nodes(0)[node] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d1.at(node, 0).real() == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("tau-quadratics are differentiated exactly at interior nodes") {
  for (double alpha : {0.0, 0.3, 0.7}) {
    GridSpec grid({DegenerateAxis(alpha, 1.5, 7)});
    const double a = 1.7, b = -0.4, c = 2.1;
    const GridFunction u = GridFunction::sample(grid, [&](const std::array<double, kMaxDim>& x) {
      const double tau = grid.axis(0).tau_map(x[0]);
      return Complex(a * tau * tau + b * tau + c, 0.0);
    });
    const GridFunction d1 = degen_derivative(u, 0, 1);
    const GridFunction d2 = degen_derivative(u, 0, 2);
    for (Index node = 1; node + 1 < grid.node_count(); ++node) {
      const double tau = grid.tau_nodes(0)[static_cast<std::size_t>(node)];
      CHECK(d1.at(node, 0).real() == doctest::Approx(2 * a * tau + b).epsilon(1e-12));
      CHECK(d2.at(node, 0).real() == doctest::Approx(2 * a).epsilon(1e-12));
    }
  }
}

TEST_CASE("composition D2 = D1 D1 is exact on tau-quadratics") {
  for (double alpha : {0.0, 0.3, 0.7}) {
    GridSpec grid({DegenerateAxis(alpha, 1.0, 9)});
    const GridFunction u = GridFunction::sample(grid, [&](const std::array<double, kMaxDim>& x) {
      const double tau = grid.axis(0).tau_map(x[0]);
      return Complex(0.5 * tau * tau - tau + 3.0, 0.0);
    });
    const GridFunction d2 = degen_derivative(u, 0, 2);
    const GridFunction d11 = degen_derivative(degen_derivative(u, 0, 1), 0, 1);
    CHECK((d2.values() - d11.values()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("composition defect is first order on tau-smooth functions") {
  for (double alpha : {0.0, 0.3, 0.7}) {
    double prev_err = 0.0;
    for (int idx = 0; idx < 2; ++idx) {
      const int n = idx == 0 ? 64 : 128;
      GridSpec grid({DegenerateAxis(alpha, 1.0, n)});
      const GridFunction u = GridFunction::sample(grid, [&](const std::array<double, kMaxDim>& x) {
        const double tau = grid.axis(0).tau_map(x[0]);
        return Complex(std::exp(std::sin(2.0 * tau)), 0.0);
      });
      const GridFunction d2 = degen_derivative(u, 0, 2);
      const GridFunction d11 = degen_derivative(degen_derivative(u, 0, 1), 0, 1);
      const double err = (d2.values() - d11.values()).cwiseAbs().maxCoeff();
      if (idx == 1) {
        // at least O(dtau)
        CHECK(err < 0.75 * prev_err);
      }
      prev_err = err;
    }
  }
}

TEST_CASE("multi-axis derivatives act independently") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 12), DegenerateAxis(0.5, 1.0, 12)});
  const GridFunction u = GridFunction::sample(grid, [&](const std::array<double, kMaxDim>& x) {
    const double t0 = grid.axis(0).tau_map(x[0]);
    const double t1 = grid.axis(1).tau_map(x[1]);
    return Complex(t0 * t0 * t1, 0.0);
  });
  const GridFunction d0 = degen_derivative(u, 0, 1);
  const GridFunction d1 = degen_derivative(u, 1, 1);
  for (Index node = 0; node < grid.node_count(); ++node) {
    const auto j = grid.unflatten(node);
    if (j[0] == 0 || j[0] == 12 || j[1] == 0 || j[1] == 12) continue;
    const double t0 = grid.tau_nodes(0)[static_cast<std::size_t>(j[0])];
    const double t1 = grid.tau_nodes(1)[static_cast<std::size_t>(j[1])];
    CHECK(d0.at(node, 0).real() == doctest::Approx(2 * t0 * t1).epsilon(1e-12));
    CHECK(d1.at(node, 0).real() == doctest::Approx(t0 * t0).epsilon(1e-12));
  }
}

TEST_CASE("derivative argument guards") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 4)});
  GridFunction u(grid, 1);
  CHECK_THROWS_AS(degen_derivative(u, 1, 1), std::out_of_range);
  CHECK_THROWS_AS(degen_derivative(u, 0, 3), std::invalid_argument);
}

TEST_CASE("grid csv dump") {
  GridSpec grid({DegenerateAxis(0.5, 1.0, 2)});
  std::ostringstream os;
  grid.write_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("axis,j,tau,x\n", 0) == 0);
  CHECK(text.find("0,0,0,0\n") != std::string::npos);
}

TEST_CASE("grid function shape validation") {
  GridSpec grid({DegenerateAxis(0.0, 1.0, 4)});
  CHECK_THROWS_AS(GridFunction(grid, 2, Eigen::VectorXcd::Zero(7)), std::invalid_argument);
  GridFunction ok(grid, 2, Eigen::VectorXcd::Zero(10));
  CHECK(ok.size() == 10);
}
