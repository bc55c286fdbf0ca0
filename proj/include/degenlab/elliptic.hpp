// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_ELLIPTIC_HPP
#define DEGENLAB_ELLIPTIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "degenlab/bc.hpp"
#include "degenlab/coefficients.hpp"
#include "degenlab/grid.hpp"
#include "degenlab/norms.hpp"

namespace degenlab {

using SparseMatrixXcd = Eigen::SparseMatrix<Complex>;

/// Discrete realization of the elliptic operator with its boundary rows.
/// Row layout follows the grid functions: node * m + component. Boundary
/// nodes host boundary-condition rows instead of equation rows; when a node
/// lies on several faces the highest axis owns it, which matches the
/// dimension-by-dimension construction (the outermost axis carries its
/// conditions across the whole transverse section).
struct DiscreteOperator {
  SparseMatrixXcd matrix;
  std::vector<Index> bc_rows;      // sorted
  std::vector<char> is_bc_row;     // size rows()
  GridSpec grid;
  int m = 1;
  Complex lambda{0.0, 0.0};

  Index rows() const noexcept { return matrix.rows(); }

  /// Copy of the operator with the spectral parameter moved to new_lambda
  /// (diagonal shift on the equation rows only).
  DiscreteOperator with_lambda(Complex new_lambda) const;
};

/// Kronecker-sum assembly of
///   sum_k a_k D^[2]_k u + A(x) u + lambda u + sum_k A_k(x) D^[1]_k u
/// with bc rows replacing the boundary-node equations. Validation errors
/// (sign condition, degenerate eta) raise ConditionViolation.
DiscreteOperator assemble(const CoefficientField& coeffs, const NonlocalBC& bc, const GridSpec& grid,
                          Complex lambda);

/// Reusable sparse LU factorization of a DiscreteOperator.
class LinearSolver {
public:
  explicit LinearSolver(const DiscreteOperator& op);

  /// Direct solve against a right-hand side given at the equation rows;
  /// entries at bc rows are forced to zero (homogeneous constraints).
  /// Checks the residual contract ||M u - f_hat|| <= 1e-10 ||f_hat||.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

private:
  const DiscreteOperator* op_;
  Eigen::SparseLU<SparseMatrixXcd, Eigen::COLAMDOrdering<int>> lu_;
};

/// One-shot convenience: factorize and solve for a grid-function load.
GridFunction solve(const DiscreteOperator& op, const GridFunction& f);

/// Sector sampling description shared by the scans: moduli x rays, with
/// lambda = 0 only when explicitly requested.
struct SectorSpec {
  double phi = 2.0 * M_PI / 3.0;  // sector half-angle, in (0, pi)
  std::vector<double> moduli;     // strictly increasing, positive
  std::vector<double> rays;       // angles, |theta| <= phi
  bool include_zero = false;

  void validate() const;
  std::vector<Complex> samples() const;

  /// Log-spaced moduli over [mod_min, mod_max] and rays spread over
  /// [-phi, phi].
  static SectorSpec logspaced(double phi, double mod_min, double mod_max, int n_moduli, int n_rays,
                              bool include_zero = false);
  /// 5 decades |lambda| in [1, 1e4], 9 rays.
  static SectorSpec default_grid(double phi = 2.0 * M_PI / 3.0);
};

struct CoercivityRecord {
  Complex lambda;
  double ratio = 0.0;     // max over trials
  double residual = 0.0;  // max relative solve residual over trials
  std::string status;     // "ok" or "singular"
};

/// For every sector sample and `trials` random unit-norm forcings, solves
/// the problem and records the coercivity ratio
///   [ sum_k sum_i |lambda|^{1-i/2} ||D^[i]_k u||_p + ||A u||_p ] / ||f||_p.
/// Singular samples are recorded and the scan continues.
std::vector<CoercivityRecord> coercivity_scan(const CoefficientField& coeffs, const NonlocalBC& bc,
                                              const GridSpec& grid, const SectorSpec& sector, int trials,
                                              const NormSpec& spec = {}, std::uint64_t seed = 0,
                                              int threads = 1);

/// Componentwise standard complex Gaussian load, zeroed at the bc rows and
/// normalized to unit L_p norm.
GridFunction random_unit_forcing(const DiscreteOperator& op, const NormSpec& spec, std::uint64_t seed);

} // namespace degenlab

#endif
