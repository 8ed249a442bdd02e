#include "kleinkit/qscalar.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kleinkit {

GaussRational GaussRational::inverse() const {
  Rational n = norm2();
  if (sgn(n) == 0) {
    throw std::domain_error("division by zero scalar");
  }
  return {re / n, -im / n};
}

GaussRational& GaussRational::operator+=(const GaussRational& o) {
  re += o.re;
  im += o.im;
  return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

std::string GaussRational::str() const {
  if (sgn(im) == 0) {
    return re.get_str();
  }
  return "(" + re.get_str() + "," + im.get_str() + ")";
}

std::complex<double> unit_phase(double theta, std::int64_t k) {
  const double angle = theta * static_cast<double>(k);
  const double quarters = angle / (std::numbers::pi / 2.0);
  const double nearest = std::nearbyint(quarters);
  if (std::abs(quarters - nearest) <= 1e-12 * std::max(1.0, std::abs(quarters))) {
    auto q = static_cast<std::int64_t>(std::fmod(nearest, 4.0));
    q = ((q % 4) + 4) % 4;
    switch (q) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, angle);
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("exponent overflow");
  }
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("exponent overflow");
  }
  return out;
}

UnitScalar::UnitScalar(GaussRational c, std::int64_t exponent) {
  if (!c.is_zero()) {
    terms_.emplace(exponent, std::move(c));
  }
}

bool UnitScalar::is_one() const {
  return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_one();
}

bool UnitScalar::is_unit_monomial() const {
  return terms_.size() == 1 && terms_.begin()->second.norm2() == 1;
}

bool UnitScalar::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0);
}

GaussRational UnitScalar::constant_term() const {
  auto it = terms_.find(0);
  return it == terms_.end() ? GaussRational() : it->second;
}

void UnitScalar::add_term(std::int64_t k, const GaussRational& c) {
  if (c.is_zero()) {
    return;
  }
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) {
      terms_.erase(it);
    }
  }
}

UnitScalar& UnitScalar::operator+=(const UnitScalar& o) {
  for (const auto& [k, c] : o.terms_) {
    add_term(k, c);
  }
  return *this;
}

UnitScalar& UnitScalar::operator-=(const UnitScalar& o) {
  for (const auto& [k, c] : o.terms_) {
    add_term(k, -c);
  }
  return *this;
}

UnitScalar& UnitScalar::operator*=(const UnitScalar& o) {
  UnitScalar out;
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : o.terms_) {
      out.add_term(checked_add(ka, kb), ca * cb);
    }
  }
  *this = std::move(out);
  return *this;
}

UnitScalar operator-(const UnitScalar& a) {
  UnitScalar out;
  for (const auto& [k, c] : a.terms_) {
    out.terms_.emplace(k, -c);
  }
  return out;
}

UnitScalar UnitScalar::inverse() const {
  if (!is_monomial()) {
    throw std::domain_error("only monomials c*q^k are invertible, got " + str());
  }
  const auto& [k, c] = *terms_.begin();
  if (k == std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("exponent overflow");
  }
  return {c.inverse(), -k};
}

UnitScalar UnitScalar::pow(std::int64_t n) const {
  UnitScalar base = n < 0 ? inverse() : *this;
  if (n < 0) {
    if (n == std::numeric_limits<std::int64_t>::min()) {
      throw std::overflow_error("exponent overflow");
    }
    n = -n;
  }
  if (base.is_monomial()) {
    const auto& [k, c] = *base.terms_.begin();
    GaussRational acc(1);
    GaussRational b = c;
    for (std::int64_t e = n; e > 0; e >>= 1) {
      if (e & 1) {
        acc *= b;
      }
      if (e > 1) {
        b *= b;
      }
    }
    return {acc, checked_mul(k, n)};
  }
  UnitScalar acc = one();
  for (std::int64_t e = n; e > 0; e >>= 1) {
    if (e & 1) {
      acc *= base;
    }
    if (e > 1) {
      base *= base;
    }
  }
  return acc;
}

UnitScalar UnitScalar::substitute(const GaussRational& c) const {
  UnitScalar out;
  const UnitScalar base(c);
  for (const auto& [k, coeff] : terms_) {
    out += UnitScalar(coeff) * base.pow(k);
  }
  return out;
}

std::string UnitScalar::str() const {
  if (terms_.empty()) {
    return "0";
  }
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) {
      os << " + ";
    }
    first = false;
    if (k == 0) {
      os << c.str();
      continue;
    }
    if (!c.is_one()) {
      os << c.str() << "*";
    }
    os << "q";
    if (k != 1) {
      os << "^" << k;
    }
  }
  return os.str();
}

UnitScalar conj(const UnitScalar& x) {
  UnitScalar out;
  for (const auto& [k, c] : x.terms()) {
    if (k == std::numeric_limits<std::int64_t>::min()) {
      throw std::overflow_error("exponent overflow");
    }
    out += UnitScalar(c.conj(), -k);
  }
  return out;
}

std::complex<double> eval(const UnitScalar& x, double theta) {
  std::complex<double> sum = 0.0;
  for (const auto& [k, c] : x.terms()) {
    sum += c.to_complex() * unit_phase(theta, k);
  }
  return sum;
}

} // namespace kleinkit
