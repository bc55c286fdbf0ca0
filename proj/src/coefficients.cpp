// SPDX-License-Identifier: Apache-2.0

#include "degenlab/coefficients.hpp"

#include <stdexcept>

namespace degenlab {

CoefficientField CoefficientField::constant(const GridSpec& grid, int m, const std::vector<Complex>& a_axis,
                                            const Eigen::MatrixXcd& A) {
  if (a_axis.size() != static_cast<std::size_t>(grid.dim()))
    throw std::invalid_argument("constant coefficient field needs one a value per axis");
  CoefficientField field;
  field.m = m;
  field.a.reserve(a_axis.size());
  for (int k = 0; k < grid.dim(); ++k)
    field.a.push_back(Eigen::MatrixXcd::Constant(grid.points(k), m, a_axis[static_cast<std::size_t>(k)]));
  if (A.size() != 0) {
    if (A.rows() != m || A.cols() != m) throw std::invalid_argument("matrix field A must be m x m");
    if (!A.isZero(0.0))
      field.A0.assign(static_cast<std::size_t>(grid.node_count()), A);
  }
  return field;
}

void CoefficientField::set_axis_coefficient(const GridSpec& grid, int axis, const std::vector<Complex>& samples) {
  if (samples.size() != static_cast<std::size_t>(grid.points(axis)))
    throw std::invalid_argument("axis coefficient samples do not match the grid");
  if (a.size() != static_cast<std::size_t>(grid.dim())) a.resize(static_cast<std::size_t>(grid.dim()));
  Eigen::MatrixXcd mat(grid.points(axis), m);
  for (int j = 0; j < grid.points(axis); ++j) mat.row(j).setConstant(samples[static_cast<std::size_t>(j)]);
  a[static_cast<std::size_t>(axis)] = mat;
}

GridFunction CoefficientField::apply_A0(const GridFunction& u) const {
  GridFunction result(u.grid(), u.components());
  if (!has_A0()) return result;
  const Index n = u.grid().node_count();
  for (Index node = 0; node < n; ++node) {
    const Eigen::VectorXcd v = A0[static_cast<std::size_t>(node)] * u.node_values(node);
    for (int c = 0; c < u.components(); ++c) result.at(node, c) = v[c];
  }
  return result;
}

} // namespace degenlab
