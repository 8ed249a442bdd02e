#include "kleinkit/fock.hpp"

#include <cmath>
#include <set>

namespace kleinkit {

FockSpace::FockSpace(std::vector<FockMode> modes) : modes_(std::move(modes)) {
  strides_.assign(modes_.size(), 1);
  for (std::size_t k = modes_.size(); k-- > 0;) {
    auto& m = modes_[k];
    if (m.statistics == Statistics::fermion) {
      m.dim = 2;
    } else if (m.dim < 2) {
      throw SpecError("boson cutoff must be at least 2 for mode '" + m.name + "'");
    }
    strides_[k] = dimension_;
    dimension_ *= m.dim;
    if (dimension_ > max_dimension) {
      throw SpecError("Fock space dimension exceeds " + std::to_string(max_dimension));
    }
  }
}

FockSpace FockSpace::for_spec(const AlgebraSpec& spec, std::size_t boson_dim) {
  std::vector<FockMode> modes;
  for (const auto& m : spec.modes()) {
    modes.push_back({m.name, m.statistics, m.statistics == Statistics::fermion ? 2 : boson_dim});
  }
  return FockSpace(std::move(modes));
}

std::size_t FockSpace::index_of(std::string_view name) const {
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (modes_[k].name == name) {
      return k;
    }
  }
  throw SpecError("unknown Fock mode '" + std::string(name) + "'");
}

std::vector<std::size_t> FockSpace::occupations(std::size_t index) const {
  std::vector<std::size_t> occ(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    occ[k] = occupation(index, k);
  }
  return occ;
}

std::size_t FockSpace::index(std::span<const std::size_t> occ) const {
  if (occ.size() != modes_.size()) {
    throw SpecError("occupation tuple has the wrong length");
  }
  std::size_t idx = 0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (occ[k] >= modes_[k].dim) {
      throw SpecError("occupation out of range for mode '" + modes_[k].name + "'");
    }
    idx += occ[k] * strides_[k];
  }
  return idx;
}

bool FockSpace::is_interior(std::size_t index) const {
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (modes_[k].statistics == Statistics::boson && occupation(index, k) + 2 > modes_[k].dim) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

MatrixOperator MatrixOperator::identity(std::size_t dim) {
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setIdentity();
  return m;
}

MatrixOperator MatrixOperator::zero(std::size_t dim) {
  return SparseMatrix(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Complex MatrixOperator::coeff(std::size_t row, std::size_t col) const {
  return matrix_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

MatrixOperator MatrixOperator::adjoint() const {
  return SparseMatrix(matrix_.adjoint());
}

MatrixOperator operator+(const MatrixOperator& a, const MatrixOperator& b) {
  return SparseMatrix(a.matrix_ + b.matrix_);
}

MatrixOperator operator-(const MatrixOperator& a, const MatrixOperator& b) {
  return SparseMatrix(a.matrix_ - b.matrix_);
}

MatrixOperator operator*(const MatrixOperator& a, const MatrixOperator& b) {
  return SparseMatrix(a.matrix_ * b.matrix_);
}

MatrixOperator operator*(Complex s, const MatrixOperator& a) {
  return SparseMatrix(s * a.matrix_);
}

// ---------------------------------------------------------------------------

namespace {

using Triplet = Eigen::Triplet<Complex>;

MatrixOperator diagonal(const FockSpace& space, auto&& entry) {
  const auto n = static_cast<Eigen::Index>(space.dimension());
  std::vector<Triplet> t;
  t.reserve(space.dimension());
  for (Eigen::Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, entry(static_cast<std::size_t>(i)));
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// c^n for |c| = 1, exact for c in {1, -1, i, -i}
Complex unit_power(const GaussRational& c, std::int64_t n) {
  GaussRational base = n < 0 ? c.conj() : c;
  GaussRational acc(1);
  for (std::int64_t k = 0; k < std::abs(n); ++k) {
    acc *= base;
  }
  return acc.to_complex();
}

} // namespace

MatrixOperator ladder_matrix(const FockSpace& space, std::size_t mode, LadderKind kind) {
  if (mode >= space.size()) {
    throw SpecError("unknown Fock mode index " + std::to_string(mode));
  }
  const auto& m = space.mode(mode);
  const std::size_t stride = space.stride(mode);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const std::size_t n = space.occupation(i, mode);
    const bool fermion = m.statistics == Statistics::fermion;
    if (kind == LadderKind::annihilate && n > 0) {
      const double v = fermion ? 1.0 : std::sqrt(static_cast<double>(n));
      t.emplace_back(static_cast<Eigen::Index>(i - stride), static_cast<Eigen::Index>(i), v);
    } else if (kind == LadderKind::create && n + 1 < m.dim) {
      const double v = fermion ? 1.0 : std::sqrt(static_cast<double>(n + 1));
      t.emplace_back(static_cast<Eigen::Index>(i + stride), static_cast<Eigen::Index>(i), v);
    }
  }
  const auto d = static_cast<Eigen::Index>(space.dimension());
  SparseMatrix out(d, d);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

MatrixOperator phase_matrix(const FockSpace& space, const PhaseVector& m, double theta) {
  if (m.size() != space.size()) {
    throw SpecError("phase vector length does not match the Fock space");
  }
  if (!std::isfinite(theta)) {
    throw SpecError("theta must be finite");
  }
  return diagonal(space, [&](std::size_t i) {
    std::int64_t total = 0;
    for (std::size_t k = 0; k < space.size(); ++k) {
      total = checked_add(total, checked_mul(m[k], static_cast<std::int64_t>(space.occupation(i, k))));
    }
    return unit_phase(theta, total);
  });
}

ModeAssignment assign_by_name(const AlgebraSpec& spec, const FockSpace& space) {
  ModeAssignment a;
  for (const auto& m : spec.modes()) {
    a.push_back(space.index_of(m.name));
  }
  return a;
}

MatrixOperator evaluate(const OpExpr& e, const AlgebraSpec& spec, const FockSpace& space, double theta,
                        const ModeAssignment& assignment) {
  if (!spec.qmode().is_formal()) {
    theta = spec.qmode().theta();
  }
  if (!std::isfinite(theta)) {
    throw SpecError("theta must be finite");
  }
  if (assignment.size() != spec.size()) {
    throw SpecError("mode assignment does not cover the algebra");
  }
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const std::size_t k = assignment[i];
    if (k >= space.size()) {
      throw SpecError("mode '" + spec.mode(i).name + "' assigned outside the Fock space");
    }
    if (space.mode(k).statistics != spec.mode(i).statistics) {
      throw SpecError("statistics mismatch for mode '" + spec.mode(i).name + "'");
    }
    if (!seen.insert(k).second) {
      throw SpecError("two modes assigned to the same Fock factor");
    }
  }

  // a_j -> D_j a_j with D_j = prod_{i<j} Q_ij^{N_i}
  const std::size_t n = spec.size();
  std::vector<MatrixOperator> ann(n), cre(n);
  for (std::size_t j = 0; j < n; ++j) {
    MatrixOperator string_phase = diagonal(space, [&](std::size_t idx) {
      Complex v = 1.0;
      std::int64_t qpower = 0;
      for (std::size_t i = 0; i < j; ++i) {
        const UnitScalar qij = spec.exchange(i, j);
        const auto& [k, c] = *qij.terms().begin();
        const auto occ = static_cast<std::int64_t>(space.occupation(idx, assignment[i]));
        v *= unit_power(c, occ);
        qpower = checked_add(qpower, checked_mul(k, occ));
      }
      return v * unit_phase(theta, qpower);
    });
    ann[j] = string_phase * ladder_matrix(space, assignment[j], LadderKind::annihilate);
    cre[j] = ann[j].adjoint();
  }

  MatrixOperator result = MatrixOperator::zero(space.dimension());
  for (const auto& [w, c] : e.terms()) {
    MatrixOperator term = MatrixOperator::identity(space.dimension());
    for (const auto& l : w) {
      switch (l.kind) {
      case LetterKind::annihilate: term = term * ann.at(l.mode); break;
      case LetterKind::create: term = term * cre.at(l.mode); break;
      case LetterKind::phase: {
        if (l.phase.size() != n) {
          throw SpecError("phase vector length does not match the algebra");
        }
        PhaseVector m(space.size());
        for (std::size_t i = 0; i < n; ++i) {
          m[assignment[i]] = l.phase[i];
        }
        term = term * phase_matrix(space, m, theta);
        break;
      }
      }
    }
    result = result + eval(c, theta) * term;
  }
  return result;
}

MatrixOperator evaluate(const OpExpr& e, const AlgebraSpec& spec, const FockSpace& space, double theta) {
  return evaluate(e, spec, space, theta, assign_by_name(spec, space));
}

CheckReport check_zero(const MatrixOperator& x, const FockSpace& space, double tol) {
  if (!(tol > 0.0)) {
    throw SpecError("tolerance must be positive");
  }
  if (x.dimension() != space.dimension()) {
    throw SpecError("matrix dimension does not match the Fock space");
  }
  CheckReport r;
  r.tolerance = tol;
  const auto& m = x.matrix();
  double full = 0.0;
  double interior = 0.0;
  for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
    const auto c = static_cast<std::size_t>(col);
    const bool col_interior = space.is_interior(c);
    double column = 0.0;
    Complex diag = 0.0;
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      const double a2 = std::norm(it.value());
      full += a2;
      column += a2;
      const auto row = static_cast<std::size_t>(it.row());
      if (col_interior && space.is_interior(row)) {
        interior += a2;
      }
      if (row == c) {
        diag = it.value();
      }
    }
    if (!col_interior && std::sqrt(column) > tol) {
      r.defects.push_back({space.occupations(c), diag, std::sqrt(column)});
    }
  }
  r.full_residual = std::sqrt(full);
  r.interior_residual = std::sqrt(interior);
  r.pass = r.interior_residual <= tol;
  return r;
}

NormResult state_norm2(const FockSpace& space, std::span<const std::size_t> creators) {
  NormResult out;
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension()));
  state(0) = 1.0;
  std::vector<std::size_t> count(space.size(), 0);
  for (auto it = creators.rbegin(); it != creators.rend(); ++it) {
    const std::size_t k = *it;
    if (k >= space.size()) {
      throw SpecError("unknown Fock mode index " + std::to_string(k));
    }
    if (space.mode(k).statistics == Statistics::boson && ++count[k] >= space.mode(k).dim) {
      out.truncated = true;
    }
    state = ladder_matrix(space, k, LadderKind::create).matrix() * state;
  }
  out.norm2 = state.squaredNorm();
  return out;
}

} // namespace kleinkit
