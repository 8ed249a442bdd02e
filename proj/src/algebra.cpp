#include "kleinkit/algebra.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace kleinkit {

std::string_view to_string(Statistics s) {
  return s == Statistics::boson ? "boson" : "fermion";
}

// ---------------------------------------------------------------------------
// QMode

QMode QMode::root_of_unity(int quarter_turns) {
  QMode q;
  q.formal_ = false;
  q.quarter_turns_ = ((quarter_turns % 4) + 4) % 4;
  return q;
}

QMode QMode::from_value(const GaussRational& value) {
  if (value == GaussRational(1)) {
    return root_of_unity(0);
  }
  if (value == GaussRational::imag_unit()) {
    return root_of_unity(1);
  }
  if (value == GaussRational(-1)) {
    return root_of_unity(2);
  }
  if (value == -GaussRational::imag_unit()) {
    return root_of_unity(3);
  }
  throw SpecError("q can only be specialized to 1, -1, i or -i, got " + value.str());
}

int QMode::order() const {
  if (formal_) {
    return 0;
  }
  switch (quarter_turns_) {
  case 0: return 1;
  case 2: return 2;
  default: return 4;
  }
}

double QMode::theta() const {
  return formal_ ? 0.0 : quarter_turns_ * std::numbers::pi / 2.0;
}

GaussRational QMode::value() const {
  switch (quarter_turns_) {
  case 0: return GaussRational(1);
  case 1: return GaussRational::imag_unit();
  case 2: return GaussRational(-1);
  default: return -GaussRational::imag_unit();
  }
}

std::string QMode::str() const {
  return formal_ ? "formal" : value().str();
}

// ---------------------------------------------------------------------------
// PhaseVector

bool PhaseVector::is_zero() const {
  return std::all_of(exponents.begin(), exponents.end(), [](std::int64_t e) { return e == 0; });
}

PhaseVector PhaseVector::operator-() const {
  PhaseVector out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i] = checked_mul(exponents[i], -1);
  }
  return out;
}

PhaseVector operator+(const PhaseVector& a, const PhaseVector& b) {
  if (a.size() != b.size()) {
    throw SpecError("phase vectors of different length");
  }
  PhaseVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = checked_add(a[i], b[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ExchangeMatrix

ExchangeMatrix::ExchangeMatrix(std::size_t n) : n_(n), entries_(n * n, UnitScalar::one()) {}

void ExchangeMatrix::set(std::size_t i, std::size_t j, const UnitScalar& value) {
  if (i >= n_ || j >= n_) {
    throw SpecError("exchange index out of range");
  }
  if (i == j) {
    if (!value.is_one()) {
      throw SpecError("diagonal exchange entries must be 1");
    }
    return;
  }
  if (!value.is_unit_monomial()) {
    throw SpecError("exchange factor must be a unit monomial c*q^k with |c| = 1, got " + value.str());
  }
  entries_[i * n_ + j] = value;
  entries_[j * n_ + i] = value.inverse();
}

void ExchangeMatrix::fill(const UnitScalar& value) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      set(i, j, value);
    }
  }
}

// ---------------------------------------------------------------------------
// AlgebraSpec

AlgebraSpec::AlgebraSpec(std::vector<Mode> modes, QMode q)
    : modes_(std::move(modes)), exchange_(modes_.size()), q_(q) {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].name.empty()) {
      throw SpecError("mode names must be non-empty");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (modes_[i].name == modes_[j].name) {
        throw SpecError("duplicate mode name '" + modes_[i].name + "'");
      }
    }
  }
}

std::optional<std::size_t> AlgebraSpec::find(std::string_view name) const {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].name == name) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t AlgebraSpec::index_of(std::string_view name) const {
  if (auto i = find(name)) {
    return *i;
  }
  throw SpecError("unknown mode '" + std::string(name) + "'");
}

void AlgebraSpec::set_exchange(std::size_t i, std::size_t j, const UnitScalar& value) {
  exchange_.set(i, j, value);
}

void AlgebraSpec::set_exchange(std::string_view a, std::string_view b, const UnitScalar& value) {
  set_exchange(index_of(a), index_of(b), value);
}

void AlgebraSpec::set_exchange_matrix(const ExchangeMatrix& q) {
  if (q.size() != size()) {
    throw SpecError("exchange matrix dimension does not match the mode count");
  }
  exchange_ = q;
}

UnitScalar AlgebraSpec::normalize(const UnitScalar& s) const {
  if (q_.is_formal()) {
    return s;
  }
  return s.substitute(q_.value());
}

PhaseVector AlgebraSpec::normalize(PhaseVector m) const {
  if (q_.is_formal()) {
    return m;
  }
  const std::int64_t n = q_.order();
  for (auto& e : m.exponents) {
    e = ((e % n) + n) % n;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Words and expressions

bool WordOrder::operator()(const Word& a, const Word& b) const {
  if (a.size() != b.size()) {
    return a.size() < b.size();
  }
  return a < b;
}

OpExpr::OpExpr(const UnitScalar& scalar) {
  add_term({}, scalar);
}

OpExpr OpExpr::word(Word w, const UnitScalar& c) {
  OpExpr out;
  out.add_term(w, c);
  return out;
}

void OpExpr::add_term(const Word& w, const UnitScalar& c) {
  if (c.is_zero()) {
    return;
  }
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) {
      terms_.erase(it);
    }
  }
}

std::optional<UnitScalar> OpExpr::as_scalar() const {
  if (terms_.empty()) {
    return UnitScalar::zero();
  }
  if (terms_.size() == 1 && terms_.begin()->first.empty()) {
    return terms_.begin()->second;
  }
  return std::nullopt;
}

OpExpr& OpExpr::operator+=(const OpExpr& o) {
  for (const auto& [w, c] : o.terms_) {
    add_term(w, c);
  }
  return *this;
}

OpExpr& OpExpr::operator-=(const OpExpr& o) {
  for (const auto& [w, c] : o.terms_) {
    add_term(w, -c);
  }
  return *this;
}

OpExpr& OpExpr::operator*=(const UnitScalar& s) {
  if (s.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) {
    c *= s;
  }
  return *this;
}

OpExpr operator-(const OpExpr& a) {
  return a * UnitScalar(-1);
}

OpExpr operator*(const OpExpr& a, const OpExpr& b) {
  OpExpr out;
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add_term(w, ca * cb);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

void validate(const Word& w, const AlgebraSpec& spec) {
  for (const auto& l : w) {
    if (l.is_phase()) {
      if (l.phase.size() != spec.size()) {
        throw SpecError("phase vector has " + std::to_string(l.phase.size()) +
                        " entries, algebra has " + std::to_string(spec.size()) + " modes");
      }
    } else if (l.mode >= spec.size()) {
      throw SpecError("unknown mode index " + std::to_string(l.mode));
    }
  }
}

// Ladder letters are out of order when the left one belongs to a later mode,
// or is an annihilator standing left of a creator of the same mode. A phase is
// out of order left of anything; two fermion letters of the same kind collapse.
bool out_of_order(const Letter& x, const Letter& y, const AlgebraSpec& spec) {
  if (x.is_phase()) {
    return true;
  }
  if (y.is_phase()) {
    return false;
  }
  if (x.mode != y.mode) {
    return x.mode > y.mode;
  }
  if (x.kind == LetterKind::annihilate && y.kind == LetterKind::create) {
    return true;
  }
  return spec.is_fermion(x.mode) && x.kind == y.kind;
}

std::optional<std::size_t> find_redex(const Word& w, const AlgebraSpec& spec, Strategy strategy) {
  if (w.size() < 2) {
    return std::nullopt;
  }
  if (strategy == Strategy::leftmost) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (out_of_order(w[i], w[i + 1], spec)) {
        return i;
      }
    }
  } else {
    for (std::size_t i = w.size() - 1; i-- > 0;) {
      if (out_of_order(w[i], w[i + 1], spec)) {
        return i;
      }
    }
  }
  return std::nullopt;
}

struct Replacement {
  UnitScalar factor;
  Word letters;
};

// Rewrites of the pair (x, y) at a redex.
std::vector<Replacement> rewrite(const Letter& x, const Letter& y, const AlgebraSpec& spec) {
  if (x.is_phase() && y.is_phase()) {
    PhaseVector m = spec.normalize(x.phase + y.phase);
    if (m.is_zero()) {
      return {{UnitScalar::one(), {}}};
    }
    return {{UnitScalar::one(), {Letter::phase_of(std::move(m))}}};
  }
  if (x.is_phase()) {
    // Phi(m) a_k = q^{-m_k} a_k Phi(m),  Phi(m) a_k^+ = q^{m_k} a_k^+ Phi(m)
    const std::int64_t mk = x.phase[y.mode];
    const std::int64_t power = y.kind == LetterKind::create ? mk : checked_mul(mk, -1);
    return {{spec.normalize(UnitScalar::q(power)), {y, x}}};
  }
  if (x.mode != y.mode) {
    // x_i y_j = Q_ij^{s(x) s(y)} y_j x_i for i != j
    UnitScalar f = spec.exchange(x.mode, y.mode);
    if (x.charge() * y.charge() < 0) {
      f = f.inverse();
    }
    return {{spec.normalize(f), {y, x}}};
  }
  if (x.kind == y.kind) {
    // fermion nilpotence
    return {};
  }
  // a a^+ = a^+ a + 1 (boson),  c c^+ = 1 - c^+ c (fermion)
  const UnitScalar sign = spec.is_fermion(x.mode) ? UnitScalar(-1) : UnitScalar(1);
  return {{sign, {y, x}}, {UnitScalar::one(), {}}};
}

void accumulate(OpExpr::TermMap& into, Word w, const UnitScalar& c, const AlgebraSpec& spec) {
  if (c.is_zero()) {
    return;
  }
  // phase letters are kept reduced, and Phi(0) = 1 is dropped
  Word cleaned;
  cleaned.reserve(w.size());
  for (auto& l : w) {
    if (l.is_phase()) {
      l.phase = spec.normalize(std::move(l.phase));
      if (l.phase.is_zero()) {
        continue;
      }
    }
    cleaned.push_back(std::move(l));
  }
  UnitScalar coeff = spec.normalize(c);
  if (coeff.is_zero()) {
    return;
  }
  auto [it, inserted] = into.try_emplace(std::move(cleaned), coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) {
      into.erase(it);
    }
  }
}

} // namespace

OpExpr normal_order(const OpExpr& e, const AlgebraSpec& spec, Strategy strategy) {
  OpExpr::TermMap pending;
  for (const auto& [w, c] : e.terms()) {
    validate(w, spec);
    accumulate(pending, w, c, spec);
  }

  OpExpr result;
  while (!pending.empty()) {
    OpExpr::TermMap next;
    for (const auto& [w, c] : pending) {
      auto pos = find_redex(w, spec, strategy);
      if (!pos) {
        result.add_term(w, c);
        continue;
      }
      for (auto& r : rewrite(w[*pos], w[*pos + 1], spec)) {
        Word nw;
        nw.reserve(w.size() + r.letters.size());
        nw.insert(nw.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(*pos));
        nw.insert(nw.end(), r.letters.begin(), r.letters.end());
        nw.insert(nw.end(), w.begin() + static_cast<std::ptrdiff_t>(*pos) + 2, w.end());
        accumulate(next, std::move(nw), c * r.factor, spec);
      }
    }
    pending = std::move(next);
  }
  return result;
}

bool is_canonical(const Word& w, const AlgebraSpec& spec) {
  validate(w, spec);
  for (const auto& l : w) {
    if (l.is_phase() && spec.normalize(l.phase).is_zero()) {
      return false;
    }
  }
  return !find_redex(w, spec, Strategy::leftmost).has_value();
}

bool is_zero(const OpExpr& e, const AlgebraSpec& spec) {
  return normal_order(e, spec).empty();
}

OpExpr multiply(const OpExpr& x, const OpExpr& y, const AlgebraSpec& spec) {
  return normal_order(x * y, spec);
}

OpExpr adjoint(const OpExpr& e, const AlgebraSpec& spec) {
  OpExpr out;
  for (const auto& [w, c] : e.terms()) {
    Word r;
    r.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      switch (it->kind) {
      case LetterKind::create: r.push_back(Letter::ann(it->mode)); break;
      case LetterKind::annihilate: r.push_back(Letter::cre(it->mode)); break;
      case LetterKind::phase: r.push_back(Letter::phase_of(-it->phase)); break;
      }
    }
    out.add_term(r, conj(c));
  }
  return normal_order(out, spec);
}

OpExpr bracket(const OpExpr& x, const OpExpr& y, const UnitScalar& s, const AlgebraSpec& spec) {
  return normal_order(x * y - s * (y * x), spec);
}

OpExpr substitute(const OpExpr& e, const Assignment& assignment, const AlgebraSpec& spec_out) {
  Assignment images = assignment;
  for (const auto& [g, image] : assignment) {
    Generator partner{g.mode, !g.creation};
    if (!images.contains(partner)) {
      images.emplace(partner, adjoint(image, spec_out));
    }
  }

  OpExpr result;
  for (const auto& [w, c] : e.terms()) {
    OpExpr acc(c);
    for (const auto& l : w) {
      if (l.is_phase()) {
        if (l.phase.size() != spec_out.size()) {
          throw SubstitutionError("phase factor does not fit the target algebra");
        }
        acc = multiply(acc, OpExpr::phase(l.phase), spec_out);
        continue;
      }
      auto it = images.find(Generator{l.mode, l.kind == LetterKind::create});
      if (it == images.end()) {
        throw SubstitutionError("no image for generator " +
                                std::string(l.kind == LetterKind::create ? "cre(" : "ann(") +
                                std::to_string(l.mode) + ")");
      }
      acc = multiply(acc, it->second, spec_out);
    }
    result += acc;
  }
  return normal_order(result, spec_out);
}

UnitScalar vacuum_expectation(const OpExpr& e, const AlgebraSpec& spec) {
  UnitScalar sum;
  const OpExpr nf = normal_order(e, spec);
  for (const auto& [w, c] : nf.terms()) {
    if (std::all_of(w.begin(), w.end(), [](const Letter& l) { return l.is_phase(); })) {
      sum += c;
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string render_letter(const Letter& l, const AlgebraSpec& spec) {
  if (l.is_phase()) {
    std::string s = "phase[";
    for (std::size_t i = 0; i < l.phase.size(); ++i) {
      if (i) {
        s += ",";
      }
      s += std::to_string(l.phase[i]);
    }
    return s + "]";
  }
  const std::string& name = l.mode < spec.size() ? spec.mode(l.mode).name : std::to_string(l.mode);
  return (l.kind == LetterKind::create ? "ad[" : "a[") + name + "]";
}

std::string render_word(const Word& w, const AlgebraSpec& spec) {
  std::string out;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t run = 1;
    while (i + run < w.size() && w[i + run] == w[i]) {
      ++run;
    }
    if (!out.empty()) {
      out += "*";
    }
    out += render_letter(w[i], spec);
    if (run > 1) {
      out += "^" + std::to_string(run);
    }
    i += run;
  }
  return out;
}

} // namespace

std::string render(const OpExpr& e, const AlgebraSpec& spec) {
  if (e.empty()) {
    return "0";
  }
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : e.terms()) {
    if (!first) {
      os << " + ";
    }
    first = false;
    if (w.empty()) {
      os << c.str();
    } else if (c.is_one()) {
      os << render_word(w, spec);
    } else {
      os << "(" << c.str() << ")*" << render_word(w, spec);
    }
  }
  return os.str();
}

} // namespace kleinkit
