// SPDX-License-Identifier: Apache-2.0

#include "degenlab/grid.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "degenlab/errors.hpp"

namespace degenlab {

DegenerateAxis::DegenerateAxis(double alpha, double b, int n_cells)
    : alpha_(alpha), b_(b), n_cells_(n_cells) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("axis exponent alpha must lie in [0, 1), got " + std::to_string(alpha));
  if (!(b > 0.0)) throw std::invalid_argument("axis length b must be positive");
  if (n_cells < 2) throw std::invalid_argument("axis needs at least 2 cells");
  tau_b_ = std::pow(b_, 1.0 - alpha_) / (1.0 - alpha_);
}

double DegenerateAxis::tau_map(double x) const {
  if (x < 0.0 || x > b_) throw std::domain_error("tau_map: x outside [0, b]");
  if (alpha_ == 0.0) return x;
  return std::pow(x, 1.0 - alpha_) / (1.0 - alpha_);
}

double DegenerateAxis::inverse_map(double tau) const {
  if (tau < 0.0 || tau > tau_b_ * (1.0 + 1e-14) + 1e-300)
    throw std::domain_error("inverse_map: tau outside [0, tau_b]");
  if (alpha_ == 0.0) return tau;
  return std::pow((1.0 - alpha_) * tau, 1.0 / (1.0 - alpha_));
}

GridSpec::GridSpec(std::vector<DegenerateAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("grid supports 1 to 3 axes");
  node_count_ = 1;
  for (const auto& ax : axes_) {
    const int pts = ax.n_cells() + 1;
    std::vector<double> tau(pts), x(pts);
    const double dtau = ax.dtau();
    for (int j = 0; j < pts; ++j) {
      tau[j] = j * dtau;
      x[j] = ax.inverse_map(tau[j]);
    }
    // pin the endpoints so x_0 = 0 and x_n = b hold exactly
    tau.back() = ax.tau_b();
    x.front() = 0.0;
    x.back() = ax.b();
    tau_nodes_.push_back(std::move(tau));
    x_nodes_.push_back(std::move(x));
    node_count_ *= pts;
  }
}

bool GridSpec::operator==(const GridSpec& other) const {
  if (dim() != other.dim()) return false;
  for (int k = 0; k < dim(); ++k) {
    if (axes_[k].alpha() != other.axes_[k].alpha() || axes_[k].b() != other.axes_[k].b() ||
        axes_[k].n_cells() != other.axes_[k].n_cells())
      return false;
  }
  return true;
}

void GridSpec::write_csv(std::ostream& os) const {
  os << "axis,j,tau,x\n";
  char buf[64];
  for (int k = 0; k < dim(); ++k) {
    for (int j = 0; j < points(k); ++j) {
      os << k << ',' << j << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", tau_nodes_[k][static_cast<std::size_t>(j)]);
      os << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", x_nodes_[k][static_cast<std::size_t>(j)]);
      os << buf << '\n';
    }
  }
}

GridFunction::GridFunction(GridSpec grid, int m) : grid_(std::move(grid)), m_(m) {
  if (m_ < 1) throw std::invalid_argument("grid function needs m >= 1 components");
  values_ = Eigen::VectorXcd::Zero(grid_.node_count() * m_);
}

GridFunction::GridFunction(GridSpec grid, int m, Eigen::VectorXcd values)
    : grid_(std::move(grid)), m_(m), values_(std::move(values)) {
  if (m_ < 1) throw std::invalid_argument("grid function needs m >= 1 components");
  if (values_.size() != grid_.node_count() * m_)
    throw std::invalid_argument("grid function value array has wrong length");
}

GridFunction GridFunction::sample(const GridSpec& grid,
                                  const std::function<Complex(const std::array<double, kMaxDim>&)>& f) {
  GridFunction u(grid, 1);
  for (Index node = 0; node < grid.node_count(); ++node) u.at(node, 0) = f(grid.node_x(node));
  return u;
}

GridFunction GridFunction::sample(
    const GridSpec& grid, int m,
    const std::function<Eigen::VectorXcd(const std::array<double, kMaxDim>&)>& f) {
  GridFunction u(grid, m);
  for (Index node = 0; node < grid.node_count(); ++node) {
    const Eigen::VectorXcd v = f(grid.node_x(node));
    for (int c = 0; c < m; ++c) u.at(node, c) = v[c];
  }
  return u;
}

namespace {

// Apply a 1D tau-difference along `axis` to every line of the tensor grid.
template <typename LineOp>
void for_each_line(const GridSpec& grid, int axis, const LineOp& op) {
  const int pts = grid.points(axis);
  Index stride = 1;
  for (int k = 0; k < axis; ++k) stride *= grid.points(k);
  Index outer = 1;
  for (int k = axis + 1; k < grid.dim(); ++k) outer *= grid.points(k);
  const Index inner = stride;
  for (Index o = 0; o < outer; ++o) {
    for (Index i = 0; i < inner; ++i) {
      const Index base = o * inner * pts + i;
      op(base, stride, pts);
    }
  }
}

} // namespace

GridFunction degen_derivative(const GridFunction& u, int axis_index, int order) {
  const GridSpec& grid = u.grid();
  if (axis_index < 0 || axis_index >= grid.dim())
    throw std::out_of_range("degen_derivative: axis index out of range");
  if (order != 1 && order != 2) throw std::invalid_argument("degen_derivative: order must be 1 or 2");
  const int pts = grid.points(axis_index);
  if (pts < 3) throw std::invalid_argument("degen_derivative: grid too coarse along axis");

  const double dtau = grid.axis(axis_index).dtau();
  const int m = u.components();
  GridFunction result(grid, m);
  const Eigen::VectorXcd& v = u.values();
  Eigen::VectorXcd& out = result.values();

  const auto value = [&](Index base, Index stride, int j, int c) -> Complex {
    return v[(base + stride * j) * m + c];
  };

  if (order == 1) {
    const double inv2 = 1.0 / (2.0 * dtau);
    for_each_line(grid, axis_index, [&](Index base, Index stride, int n) {
      for (int c = 0; c < m; ++c) {
        out[base * m + c] =
            (-3.0 * value(base, stride, 0, c) + 4.0 * value(base, stride, 1, c) - value(base, stride, 2, c)) * inv2;
        for (int j = 1; j < n - 1; ++j)
          out[(base + stride * j) * m + c] = (value(base, stride, j + 1, c) - value(base, stride, j - 1, c)) * inv2;
        out[(base + stride * (n - 1)) * m + c] =
            (3.0 * value(base, stride, n - 1, c) - 4.0 * value(base, stride, n - 2, c) + value(base, stride, n - 3, c)) *
            inv2;
      }
    });
  } else {
    const double inv = 1.0 / (dtau * dtau);
    for_each_line(grid, axis_index, [&](Index base, Index stride, int n) {
      for (int c = 0; c < m; ++c) {
        if (n >= 4) {
          out[base * m + c] = (2.0 * value(base, stride, 0, c) - 5.0 * value(base, stride, 1, c) +
                               4.0 * value(base, stride, 2, c) - value(base, stride, 3, c)) *
                              inv;
          out[(base + stride * (n - 1)) * m + c] =
              (2.0 * value(base, stride, n - 1, c) - 5.0 * value(base, stride, n - 2, c) +
               4.0 * value(base, stride, n - 3, c) - value(base, stride, n - 4, c)) *
              inv;
        } else {
          // 3-node line: the centered stencil is the only second difference available
          const Complex d2 =
              (value(base, stride, 0, c) - 2.0 * value(base, stride, 1, c) + value(base, stride, 2, c)) * inv;
          out[base * m + c] = d2;
          out[(base + stride * (n - 1)) * m + c] = d2;
        }
        for (int j = 1; j < n - 1; ++j)
          out[(base + stride * j) * m + c] =
              (value(base, stride, j + 1, c) - 2.0 * value(base, stride, j, c) + value(base, stride, j - 1, c)) * inv;
      }
    });
  }
  return result;
}

} // namespace degenlab
