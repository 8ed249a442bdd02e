#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <string>

namespace kleinkit {

using Rational = mpq_class;

/// Complex number with exact rational real and imaginary parts.
struct GaussRational {
  Rational re;
  Rational im;

  GaussRational() = default;
  GaussRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {
    re.canonicalize();
    im.canonicalize();
  }
  GaussRational(long v) : re(v), im(0) {}
  GaussRational(int v) : re(v), im(0) {}

  static GaussRational imag_unit() { return {0, 1}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_one() const { return re == 1 && sgn(im) == 0; }
  Rational norm2() const { return re * re + im * im; }

  GaussRational conj() const { return {re, -im}; }
  GaussRational inverse() const;

  GaussRational& operator+=(const GaussRational& o);
  GaussRational& operator-=(const GaussRational& o);
  GaussRational& operator*=(const GaussRational& o);

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  /// "3/2" for real values, "(re,im)" otherwise.
  std::string str() const;
};

/// e^{i k theta}, exact when k*theta is a multiple of pi/2 up to rounding.
std::complex<double> unit_phase(double theta, std::int64_t k);

/// Laurent polynomial sum_k c_k q^k in a formal parameter q with |q| = 1.
///
/// Stored sparsely; zero coefficients are never kept, so the zero element
/// has no terms and equality is structural.
class UnitScalar {
public:
  using TermMap = std::map<std::int64_t, GaussRational>;

  UnitScalar() = default;
  UnitScalar(GaussRational c, std::int64_t exponent = 0);
  UnitScalar(long v) : UnitScalar(GaussRational(v)) {}
  UnitScalar(int v) : UnitScalar(GaussRational(v)) {}

  static UnitScalar zero() { return {}; }
  static UnitScalar one() { return {GaussRational(1)}; }
  /// q^k
  static UnitScalar q(std::int64_t k = 1) { return {GaussRational(1), k}; }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_one() const;
  /// Single term c q^k with c != 0.
  bool is_monomial() const { return terms_.size() == 1; }
  /// Single term c q^k with |c| = 1.
  bool is_unit_monomial() const;
  /// True when no power of q other than q^0 occurs.
  bool is_constant() const;
  /// Coefficient of q^0.
  GaussRational constant_term() const;

  UnitScalar& operator+=(const UnitScalar& o);
  UnitScalar& operator-=(const UnitScalar& o);
  UnitScalar& operator*=(const UnitScalar& o);

  friend UnitScalar operator+(UnitScalar a, const UnitScalar& b) { return a += b; }
  friend UnitScalar operator-(UnitScalar a, const UnitScalar& b) { return a -= b; }
  friend UnitScalar operator*(UnitScalar a, const UnitScalar& b) { return a *= b; }
  friend UnitScalar operator-(const UnitScalar& a);
  friend bool operator==(const UnitScalar& a, const UnitScalar& b) { return a.terms_ == b.terms_; }

  /// Multiplicative inverse; only monomials are invertible in the Laurent ring.
  UnitScalar inverse() const;
  /// Integer power; negative exponents require a monomial.
  UnitScalar pow(std::int64_t n) const;

  /// Substitute q -> c for a constant c (used to specialize q at a root of unity).
  UnitScalar substitute(const GaussRational& c) const;

  std::string str() const;

private:
  void add_term(std::int64_t k, const GaussRational& c);

  TermMap terms_;
};

/// Star structure: conjugates coefficients and sends q -> q^{-1}.
UnitScalar conj(const UnitScalar& x);

/// Numeric value at q = e^{i theta}.
std::complex<double> eval(const UnitScalar& x, double theta);

/// Overflow-checked exponent arithmetic; throws std::overflow_error.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

} // namespace kleinkit
