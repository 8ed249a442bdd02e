#pragma once

#include "kleinkit/qscalar.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kleinkit {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed algebra specification or a reference to a mode it does not declare.
class SpecError : public Error {
public:
  using Error::Error;
};

class SubstitutionError : public Error {
public:
  using Error::Error;
};

enum class Statistics { boson, fermion };

std::string_view to_string(Statistics s);

struct Mode {
  std::string name;
  Statistics statistics = Statistics::boson;

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Treatment of the deformation parameter: a formal symbol, or specialized to
/// one of the roots of unity 1, i, -1, -i (q = e^{i pi k / 2}).
class QMode {
public:
  static QMode formal() { return {}; }
  static QMode root_of_unity(int quarter_turns);
  /// Accepts 1, -1, i, -i.
  static QMode from_value(const GaussRational& value);

  bool is_formal() const { return formal_; }
  /// Multiplicative order of q; 0 when formal.
  int order() const;
  /// Angle with q = e^{i theta}; only meaningful when specialized.
  double theta() const;
  GaussRational value() const;
  std::string str() const;

  friend bool operator==(const QMode&, const QMode&) = default;

private:
  bool formal_ = true;
  int quarter_turns_ = 0;
};

/// Exponent vector m of the diagonal phase Phi(m) = prod_k q^{m_k N_k}.
struct PhaseVector {
  std::vector<std::int64_t> exponents;

  PhaseVector() = default;
  explicit PhaseVector(std::size_t n) : exponents(n, 0) {}
  PhaseVector(std::initializer_list<std::int64_t> e) : exponents(e) {}
  explicit PhaseVector(std::vector<std::int64_t> e) : exponents(std::move(e)) {}

  std::size_t size() const { return exponents.size(); }
  bool is_zero() const;
  std::int64_t operator[](std::size_t i) const { return exponents[i]; }
  std::int64_t& operator[](std::size_t i) { return exponents[i]; }

  PhaseVector operator-() const;
  friend PhaseVector operator+(const PhaseVector& a, const PhaseVector& b);

  friend auto operator<=>(const PhaseVector&, const PhaseVector&) = default;
  friend bool operator==(const PhaseVector&, const PhaseVector&) = default;
};

/// Square matrix of unit monomials Q_ij with Q_ii = 1 and Q_ji = Q_ij^{-1}.
class ExchangeMatrix {
public:
  ExchangeMatrix() = default;
  explicit ExchangeMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  const UnitScalar& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  /// Sets Q_ij and Q_ji = Q_ij^{-1}; the value must be a unit monomial c q^k, |c| = 1.
  void set(std::size_t i, std::size_t j, const UnitScalar& value);
  /// Fills every off-diagonal pair i<j with the same value.
  void fill(const UnitScalar& value);

  friend bool operator==(const ExchangeMatrix&, const ExchangeMatrix&) = default;

private:
  std::size_t n_ = 0;
  std::vector<UnitScalar> entries_;
};

class AlgebraSpec {
public:
  AlgebraSpec() = default;
  explicit AlgebraSpec(std::vector<Mode> modes, QMode q = QMode::formal());

  std::size_t size() const { return modes_.size(); }
  const std::vector<Mode>& modes() const { return modes_; }
  const Mode& mode(std::size_t i) const { return modes_.at(i); }
  std::size_t index_of(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;
  bool is_fermion(std::size_t i) const { return modes_[i].statistics == Statistics::fermion; }

  const QMode& qmode() const { return q_; }
  /// Exchange factor Q_ij, already specialized when q is not formal.
  UnitScalar exchange(std::size_t i, std::size_t j) const { return normalize(exchange_(i, j)); }
  const ExchangeMatrix& exchange_matrix() const { return exchange_; }
  void set_exchange(std::size_t i, std::size_t j, const UnitScalar& value);
  void set_exchange(std::string_view a, std::string_view b, const UnitScalar& value);
  void set_exchange_matrix(const ExchangeMatrix& q);

  /// Substitutes the specialized value of q, if any.
  UnitScalar normalize(const UnitScalar& s) const;
  /// Reduces exponents modulo the order of q, if specialized.
  PhaseVector normalize(PhaseVector m) const;

  friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

private:
  std::vector<Mode> modes_;
  ExchangeMatrix exchange_;
  QMode q_;
};

enum class LetterKind : std::uint8_t { create, annihilate, phase };

/// One generator in a word: a_k^dagger, a_k, or a phase Phi(m).
struct Letter {
  LetterKind kind = LetterKind::create;
  std::size_t mode = 0;
  PhaseVector phase;

  static Letter cre(std::size_t k) { return {LetterKind::create, k, {}}; }
  static Letter ann(std::size_t k) { return {LetterKind::annihilate, k, {}}; }
  static Letter phase_of(PhaseVector m) { return {LetterKind::phase, 0, std::move(m)}; }

  bool is_phase() const { return kind == LetterKind::phase; }
  bool is_ladder() const { return kind != LetterKind::phase; }
  /// +1 for creators, -1 for annihilators.
  int charge() const { return kind == LetterKind::create ? 1 : -1; }

  friend auto operator<=>(const Letter&, const Letter&) = default;
  friend bool operator==(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

/// Shorter words first, then lexicographic.
struct WordOrder {
  bool operator()(const Word& a, const Word& b) const;
};

/// Finite linear combination of words with Laurent-polynomial coefficients.
///
/// Any expression is representable; after normal_order() every word is
/// canonical and the zero operator has no terms.
class OpExpr {
public:
  using TermMap = std::map<Word, UnitScalar, WordOrder>;

  OpExpr() = default;
  explicit OpExpr(const UnitScalar& scalar);

  static OpExpr identity() { return OpExpr(UnitScalar::one()); }
  static OpExpr word(Word w, const UnitScalar& c = UnitScalar::one());
  static OpExpr ann(std::size_t k) { return word({Letter::ann(k)}); }
  static OpExpr cre(std::size_t k) { return word({Letter::cre(k)}); }
  static OpExpr phase(PhaseVector m) { return word({Letter::phase_of(std::move(m))}); }
  /// N_k = a_k^dagger a_k
  static OpExpr number(std::size_t k) { return word({Letter::cre(k), Letter::ann(k)}); }

  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  void add_term(const Word& w, const UnitScalar& c);

  /// Value when the expression is a multiple of the identity.
  std::optional<UnitScalar> as_scalar() const;

  OpExpr& operator+=(const OpExpr& o);
  OpExpr& operator-=(const OpExpr& o);
  OpExpr& operator*=(const UnitScalar& s);

  friend OpExpr operator+(OpExpr a, const OpExpr& b) { return a += b; }
  friend OpExpr operator-(OpExpr a, const OpExpr& b) { return a -= b; }
  friend OpExpr operator-(const OpExpr& a);
  friend OpExpr operator*(OpExpr a, const UnitScalar& s) { return a *= s; }
  friend OpExpr operator*(const UnitScalar& s, OpExpr a) { return a *= s; }
  /// Formal product (word concatenation), not normal-ordered.
  friend OpExpr operator*(const OpExpr& a, const OpExpr& b);

  friend bool operator==(const OpExpr&, const OpExpr&) = default;

private:
  TermMap terms_;
};

/// Choice of redex when several rewrite rules apply to a word.
enum class Strategy { leftmost, rightmost };

/// Rewrites into the canonical basis: modes ascending, creators before
/// annihilators within a mode, at most one phase factor on the right.
/// Throws SpecError if a letter refers to a mode outside the spec.
OpExpr normal_order(const OpExpr& e, const AlgebraSpec& spec, Strategy strategy = Strategy::leftmost);

bool is_canonical(const Word& w, const AlgebraSpec& spec);
bool is_zero(const OpExpr& e, const AlgebraSpec& spec);

/// normal_order(x * y)
OpExpr multiply(const OpExpr& x, const OpExpr& y, const AlgebraSpec& spec);
/// Hermitian adjoint, normal-ordered.
OpExpr adjoint(const OpExpr& e, const AlgebraSpec& spec);
/// [x, y]_s = x y - s y x, normal-ordered.
OpExpr bracket(const OpExpr& x, const OpExpr& y, const UnitScalar& s, const AlgebraSpec& spec);

struct Generator {
  std::size_t mode = 0;
  bool creation = false;

  friend auto operator<=>(const Generator&, const Generator&) = default;
};

/// Images of ladder generators. Missing creator images are taken as the
/// adjoint of the annihilator image (and vice versa).
using Assignment = std::map<Generator, OpExpr>;

/// Algebra homomorphism defined by the assignment, normal-ordered in spec_out.
/// Phase letters are carried over unchanged, so spec_out must have as many
/// modes as the phase vectors in e. Throws SubstitutionError when a ladder
/// generator of e has no image.
OpExpr substitute(const OpExpr& e, const Assignment& assignment, const AlgebraSpec& spec_out);

/// <0| e |0>
UnitScalar vacuum_expectation(const OpExpr& e, const AlgebraSpec& spec);

/// Deterministic text form, e.g. "(-1)*ad[b]*phase[1,1]".
std::string render(const OpExpr& e, const AlgebraSpec& spec);

} // namespace kleinkit
