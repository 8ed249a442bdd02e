#pragma once

#include "kleinkit/algebra.hpp"

#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kleinkit {

/// Local factor of a truncated Fock space. Bosons keep occupations
/// 0..dim-1; fermions always have dim 2.
struct FockMode {
  std::string name;
  Statistics statistics = Statistics::boson;
  std::size_t dim = 2;
};

/// Tensor product of truncated single-mode spaces. Basis states are
/// occupation tuples in row-major order, last mode fastest; the vacuum is
/// index 0.
class FockSpace {
public:
  static constexpr std::size_t max_dimension = 4096;

  explicit FockSpace(std::vector<FockMode> modes);
  /// One factor per spec mode: bosons at cutoff `boson_dim`, fermions at 2.
  static FockSpace for_spec(const AlgebraSpec& spec, std::size_t boson_dim);

  std::size_t size() const { return modes_.size(); }
  std::size_t dimension() const { return dimension_; }
  const FockMode& mode(std::size_t k) const { return modes_.at(k); }
  const std::vector<FockMode>& modes() const { return modes_; }
  std::size_t index_of(std::string_view name) const;

  std::size_t stride(std::size_t mode) const { return strides_.at(mode); }
  std::vector<std::size_t> occupations(std::size_t index) const;
  std::size_t index(std::span<const std::size_t> occupations) const;
  std::size_t occupation(std::size_t index, std::size_t mode) const {
    return (index / strides_[mode]) % modes_[mode].dim;
  }
  /// Every boson occupation at most dim-2 (fermions unrestricted).
  bool is_interior(std::size_t index) const;

private:
  std::vector<FockMode> modes_;
  std::vector<std::size_t> strides_;
  std::size_t dimension_ = 1;
};

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

class MatrixOperator {
public:
  MatrixOperator() = default;
  MatrixOperator(SparseMatrix m) : matrix_(std::move(m)) { matrix_.makeCompressed(); }

  static MatrixOperator identity(std::size_t dim);
  static MatrixOperator zero(std::size_t dim);

  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  const SparseMatrix& matrix() const { return matrix_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }
  Complex coeff(std::size_t row, std::size_t col) const;

  MatrixOperator adjoint() const;

  friend MatrixOperator operator+(const MatrixOperator& a, const MatrixOperator& b);
  friend MatrixOperator operator-(const MatrixOperator& a, const MatrixOperator& b);
  friend MatrixOperator operator*(const MatrixOperator& a, const MatrixOperator& b);
  friend MatrixOperator operator*(Complex s, const MatrixOperator& a);

private:
  SparseMatrix matrix_;
};

enum class LadderKind { annihilate, create };

/// Bare single-mode operator tensored with identities: a|n> = sqrt(n)|n-1>,
/// the creator annihilates the top boson level. Bare operators of different
/// modes commute.
MatrixOperator ladder_matrix(const FockSpace& space, std::size_t mode, LadderKind kind);

/// diag(e^{i theta sum_k m_k n_k}); m is indexed by space modes.
MatrixOperator phase_matrix(const FockSpace& space, const PhaseVector& m, double theta);

/// Symbolic mode i is realized by space mode assignment[i].
using ModeAssignment = std::vector<std::size_t>;

/// Assigns symbolic modes to space modes by name.
ModeAssignment assign_by_name(const AlgebraSpec& spec, const FockSpace& space);

/// Matrix of e at q = e^{i theta}. Cross-mode exchange factors of the spec
/// are realized by dressing the bare ladder operators with diagonal string
/// phases, a_j -> prod_{i<j} Q_ij(theta)^{N_i} a_j. When q is specialized in
/// the spec, its own angle is used and `theta` is ignored.
MatrixOperator evaluate(const OpExpr& e, const AlgebraSpec& spec, const FockSpace& space, double theta,
                        const ModeAssignment& assignment);
MatrixOperator evaluate(const OpExpr& e, const AlgebraSpec& spec, const FockSpace& space, double theta);

struct Defect {
  std::vector<std::size_t> occupations;
  Complex diagonal;
  double column_norm = 0.0;
};

struct CheckReport {
  std::string norm = "frobenius";
  double full_residual = 0.0;
  double interior_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Non-interior basis columns carrying residual weight above tolerance.
  std::vector<Defect> defects;
};

/// Residual norms of X on the full space and on the interior block P X P.
CheckReport check_zero(const MatrixOperator& x, const FockSpace& space, double tol);

struct NormResult {
  double norm2 = 0.0;
  bool truncated = false;
};

/// ||a+_{k1} ... a+_{kn} |0>||^2 for the creators listed in written order.
NormResult state_norm2(const FockSpace& space, std::span<const std::size_t> creators);

} // namespace kleinkit
