#pragma once

#include "kleinkit/algebra.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace kleinkit {

class MapError : public Error {
public:
  using Error::Error;
};

/// a_i -> scale * Phi(phase) * a_i
struct ModeDressing {
  UnitScalar scale = UnitScalar::one();
  PhaseVector phase;

  friend bool operator==(const ModeDressing&, const ModeDressing&) = default;
};

/// Klein-type redefinition of every annihilator by a left phase factor.
/// Creators follow by taking adjoints.
struct DressingMap {
  std::string name;
  std::vector<ModeDressing> modes;

  std::size_t size() const { return modes.size(); }
  /// Dressing with zero exponents and unit scales on n modes.
  static DressingMap identity(std::size_t n);
};

struct CatalogEntry {
  std::string name;
  std::string description;
};

const std::vector<CatalogEntry>& map_catalog();

/// Builds a named dressing for the given algebra. Two-mode maps need exactly
/// two modes, the cascades any number, and the Dirac-pair maps four
/// fermionic modes ordered (a, b, a', b').
DressingMap standard_map(std::string_view name, const AlgebraSpec& spec);

/// Dressed annihilator s_i Phi(m_i) a_i.
OpExpr dressed_annihilator(const DressingMap& map, std::size_t i);

/// Image of e under the dressing, normal-ordered in spec. Words are mapped
/// letter by letter as written: dressed generators obey different exchange
/// factors, so the image depends on how e is written, not only on its
/// normal form.
OpExpr apply_dressing(const DressingMap& map, const OpExpr& e, const AlgebraSpec& spec);

/// Dressing applied after `first`: exponents add, scales multiply.
DressingMap compose(const DressingMap& first, const DressingMap& second);

/// Exchange matrix satisfied by the dressed generators:
/// Q'_ij = Q_ij q^{m_j[i] - m_i[j]}. Entries are specialized according to q.
ExchangeMatrix induced_exchange(const DressingMap& map, const ExchangeMatrix& exchange,
                                const QMode& q = QMode::formal());

struct RelationCheck {
  std::string relation;
  std::size_t i = 0;
  std::size_t j = 0;
  OpExpr residual;
  bool pass = false;

  friend bool operator==(const RelationCheck&, const RelationCheck&) = default;
};

struct ExchangeReport {
  ExchangeMatrix expected;
  ExchangeMatrix induced;
  std::vector<RelationCheck> same_mode;
  std::vector<RelationCheck> pairs;

  bool all_pass() const;
  std::size_t failures() const;
  /// Equal verdicts and witnesses; map names are not part of a report.
  friend bool operator==(const ExchangeReport&, const ExchangeReport&) = default;
};

/// Certifies symbolically that the dressed generators obey the original
/// same-mode algebra and the `expected` cross-mode exchange relations, and
/// that dressed number operators commute. Failures are report entries.
ExchangeReport verify_klein(const DressingMap& map, const AlgebraSpec& spec_in,
                            const ExchangeMatrix& expected);

} // namespace kleinkit
