// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_GRID_HPP
#define DEGENLAB_GRID_HPP

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace degenlab {

using Complex = std::complex<double>;
using Index = Eigen::Index;

inline constexpr int kMaxDim = 3;

/// One spatial direction (0, b) carrying the degeneracy exponent alpha.
/// The regularizing substitution tau = x^(1-alpha)/(1-alpha) maps it onto
/// the uniform interval (0, tau_b); all stencils act in tau.
class DegenerateAxis {
public:
  DegenerateAxis(double alpha, double b, int n_cells);

  double alpha() const noexcept { return alpha_; }
  double b() const noexcept { return b_; }
  int n_cells() const noexcept { return n_cells_; }
  double tau_b() const noexcept { return tau_b_; }
  double dtau() const noexcept { return tau_b_ / n_cells_; }

  /// tau(x) = x^(1-alpha)/(1-alpha), strictly increasing on [0, b].
  double tau_map(double x) const;
  /// x(tau) = ((1-alpha) tau)^(1/(1-alpha)), the left inverse of tau_map.
  double inverse_map(double tau) const;

private:
  double alpha_;
  double b_;
  int n_cells_;
  double tau_b_;
};

/// Tensor-product grid, uniform in the tau coordinates. Node j of axis k
/// sits at tau = j * dtau_k; the x positions are graded toward the
/// degenerate face x = 0 when alpha_k > 0.
class GridSpec {
public:
  explicit GridSpec(std::vector<DegenerateAxis> axes);

  int dim() const noexcept { return static_cast<int>(axes_.size()); }
  const DegenerateAxis& axis(int k) const { return axes_.at(k); }
  const std::vector<double>& tau_nodes(int k) const { return tau_nodes_.at(k); }
  const std::vector<double>& x_nodes(int k) const { return x_nodes_.at(k); }

  /// Nodes along axis k, i.e. n_cells_k + 1.
  int points(int k) const { return axes_.at(k).n_cells() + 1; }
  /// Total node count, the product of points(k) over all axes.
  Index node_count() const noexcept { return node_count_; }

  Index flatten(const std::array<int, kMaxDim>& j) const noexcept {
    Index idx = 0;
    for (int k = dim() - 1; k >= 0; --k) idx = idx * (axes_[k].n_cells() + 1) + j[k];
    return idx;
  }
  std::array<int, kMaxDim> unflatten(Index node) const noexcept {
    std::array<int, kMaxDim> j{0, 0, 0};
    for (int k = 0; k < dim(); ++k) {
      const Index pts = axes_[k].n_cells() + 1;
      j[k] = static_cast<int>(node % pts);
      node /= pts;
    }
    return j;
  }

  /// Physical coordinates of a node; unused directions read 0.
  std::array<double, kMaxDim> node_x(Index node) const noexcept {
    const auto j = unflatten(node);
    std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
    for (int k = 0; k < dim(); ++k) x[k] = x_nodes_[k][static_cast<std::size_t>(j[k])];
    return x;
  }

  bool operator==(const GridSpec& other) const;

  /// CSV dump, columns axis,j,tau,x.
  void write_csv(std::ostream& os) const;

private:
  std::vector<DegenerateAxis> axes_;
  std::vector<std::vector<double>> tau_nodes_;
  std::vector<std::vector<double>> x_nodes_;
  Index node_count_ = 0;
};

/// Values in C^m attached to every grid node, node-major storage
/// (node * m + component).
class GridFunction {
public:
  GridFunction(GridSpec grid, int m);
  GridFunction(GridSpec grid, int m, Eigen::VectorXcd values);

  const GridSpec& grid() const noexcept { return grid_; }
  int components() const noexcept { return m_; }
  Index size() const noexcept { return values_.size(); }

  const Eigen::VectorXcd& values() const noexcept { return values_; }
  Eigen::VectorXcd& values() noexcept { return values_; }

  Complex& at(Index node, int comp) { return values_[node * m_ + comp]; }
  Complex at(Index node, int comp) const { return values_[node * m_ + comp]; }

  Eigen::VectorXcd node_values(Index node) const { return values_.segment(node * m_, m_); }

  /// Sample a scalar field (m = 1).
  static GridFunction sample(const GridSpec& grid,
                             const std::function<Complex(const std::array<double, kMaxDim>&)>& f);
  /// Sample a vector field into m components.
  static GridFunction sample(const GridSpec& grid, int m,
                             const std::function<Eigen::VectorXcd(const std::array<double, kMaxDim>&)>& f);

private:
  GridSpec grid_;
  int m_;
  Eigen::VectorXcd values_;
};

/// Discrete degenerate derivative D^[order] along one axis, realized as the
/// plain order-th finite difference in tau (central in the interior,
/// second-order one-sided at the endpoints). order must be 1 or 2.
GridFunction degen_derivative(const GridFunction& u, int axis_index, int order);

} // namespace degenlab

#endif
