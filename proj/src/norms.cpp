// SPDX-License-Identifier: Apache-2.0

#include "degenlab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace degenlab {

void NormSpec::validate() const {
  if (!(spatial_p >= 1.0) || !std::isfinite(spatial_p))
    throw std::invalid_argument("spatial p must be finite and >= 1");
  if (!(temporal_p0 >= 1.0) || !std::isfinite(temporal_p0))
    throw std::invalid_argument("temporal p0 must be finite and >= 1");
}

double pairwise_sum(const std::vector<double>& terms) {
  struct Rec {
    static double sum(const double* data, std::size_t n) {
      if (n <= 32) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += data[i];
        return acc;
      }
      const std::size_t half = n / 2;
      return sum(data, half) + sum(data + half, n - half);
    }
  };
  return Rec::sum(terms.data(), terms.size());
}

namespace {

std::vector<double> tau_trapezoid(const GridSpec& grid, int k) {
  const int pts = grid.points(k);
  const double dtau = grid.axis(k).dtau();
  std::vector<double> w(static_cast<std::size_t>(pts), dtau);
  w.front() = 0.5 * dtau;
  w.back() = 0.5 * dtau;
  return w;
}

std::vector<double> axis_weights_x(const GridSpec& grid, int k) {
  auto w = tau_trapezoid(grid, k);
  const double alpha = grid.axis(k).alpha();
  if (alpha == 0.0) return w;
  const auto& x = grid.x_nodes(k);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] *= std::pow(x[j], alpha);
  return w;
}

std::vector<double> axis_weights_tau(const GridSpec& grid, int k) {
  auto w = tau_trapezoid(grid, k);
  const double alpha = grid.axis(k).alpha();
  if (alpha == 0.0) return w;
  const auto& tau = grid.tau_nodes(k);
  const double exponent = alpha / (1.0 - alpha);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] *= std::pow((1.0 - alpha) * tau[j], exponent);
  return w;
}

std::vector<double> tensor_weights(const GridSpec& grid,
                                   std::vector<double> (*axis_weights)(const GridSpec&, int)) {
  std::vector<std::vector<double>> per_axis;
  per_axis.reserve(static_cast<std::size_t>(grid.dim()));
  for (int k = 0; k < grid.dim(); ++k) per_axis.push_back(axis_weights(grid, k));
  std::vector<double> w(static_cast<std::size_t>(grid.node_count()));
  for (Index node = 0; node < grid.node_count(); ++node) {
    const auto j = grid.unflatten(node);
    double prod = 1.0;
    for (int k = 0; k < grid.dim(); ++k)
      prod *= per_axis[static_cast<std::size_t>(k)][static_cast<std::size_t>(j[k])];
    w[static_cast<std::size_t>(node)] = prod;
  }
  return w;
}

double lp_with_weights(const GridFunction& u, const NormSpec& spec, const std::vector<double>& w) {
  spec.validate();
  const double p = spec.spatial_p;
  const Index n = u.grid().node_count();
  const int m = u.components();
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (Index node = 0; node < n; ++node) {
    double sq = 0.0;
    for (int c = 0; c < m; ++c) sq += std::norm(u.at(node, c));
    const double mag = std::sqrt(sq);
    terms[static_cast<std::size_t>(node)] =
        w[static_cast<std::size_t>(node)] * (p == 2.0 ? sq : std::pow(mag, p));
  }
  const double total = pairwise_sum(terms);
  return p == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / p);
}

} // namespace

std::vector<double> quadrature_weights(const GridSpec& grid) { return tensor_weights(grid, axis_weights_x); }

std::vector<double> quadrature_weights_tau(const GridSpec& grid) {
  return tensor_weights(grid, axis_weights_tau);
}

double lp_norm(const GridFunction& u, const NormSpec& spec) {
  return lp_with_weights(u, spec, quadrature_weights(u.grid()));
}

double lp_norm_tau(const GridFunction& u, const NormSpec& spec) {
  return lp_with_weights(u, spec, quadrature_weights_tau(u.grid()));
}

Eigen::VectorXcd integral(const GridFunction& u) {
  const auto w = quadrature_weights(u.grid());
  const int m = u.components();
  Eigen::VectorXcd result = Eigen::VectorXcd::Zero(m);
  for (int c = 0; c < m; ++c) {
    std::vector<double> re(w.size()), im(w.size());
    for (Index node = 0; node < u.grid().node_count(); ++node) {
      const Complex v = u.at(node, c) * w[static_cast<std::size_t>(node)];
      re[static_cast<std::size_t>(node)] = v.real();
      im[static_cast<std::size_t>(node)] = v.imag();
    }
    result[c] = Complex(pairwise_sum(re), pairwise_sum(im));
  }
  return result;
}

double sobolev_norm(const GridFunction& u, const NormSpec& spec, const CoefficientField* coeffs) {
  double total = lp_norm(u, spec);
  if (coeffs != nullptr && coeffs->has_A0()) total += lp_norm(coeffs->apply_A0(u), spec);
  for (int k = 0; k < u.grid().dim(); ++k) total += lp_norm(degen_derivative(u, k, 2), spec);
  return total;
}

double mixed_norm(const std::vector<GridFunction>& series, const NormSpec& spec, double dt) {
  spec.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("mixed norm needs dt > 0");
  const double p0 = spec.temporal_p0;
  std::vector<double> terms;
  terms.reserve(series.size());
  for (const auto& u : series) terms.push_back(dt * std::pow(lp_norm(u, spec), p0));
  return std::pow(pairwise_sum(terms), 1.0 / p0);
}

} // namespace degenlab
