// SPDX-License-Identifier: Apache-2.0
//
// Arbitrary-precision binary floating point with explicit precision and
// rounding direction on every operation, plus the fixed 30-bit upper-bound
// magnitude type used for ball radii.

#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace legq {

using prec_t = mpfr_prec_t;

enum class Round { Down, Up, Nearest, Zero };

mpfr_rnd_t to_mpfr(Round r);

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Binary floating-point number (zero, finite, or +inf) owning an mpfr_t.
///
/// Values are canonical: two BigFloats compare equal iff they denote the
/// same real number, independent of their storage precision.
class BigFloat {
 public:
  BigFloat();
  BigFloat(long v);  // NOLINT(google-explicit-constructor): exact
  BigFloat(int v) : BigFloat(static_cast<long>(v)) {}  // NOLINT(google-explicit-constructor)
  explicit BigFloat(double v);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  /// Zero with storage for `prec` bits.
  static BigFloat with_prec(prec_t prec);
  static BigFloat from_mpz(const mpz_class& v);
  /// mantissa * 2^exp2, exact.
  static BigFloat from_mpz_2exp(const mpz_class& mantissa, long exp2);
  static BigFloat from_mpq(const mpq_class& q, prec_t prec, Round rnd);
  static BigFloat infinity();
  /// Parses a decimal or 0x-prefixed hexadecimal literal, rounding in the
  /// given direction. Throws std::invalid_argument on malformed input.
  static BigFloat parse(std::string_view text, prec_t prec, Round rnd);

  prec_t prec() const { return mpfr_get_prec(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_inf() const { return mpfr_inf_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// e such that 2^(e-1) <= |x| < 2^e; undefined for zero.
  long exponent() const { return static_cast<long>(mpfr_get_exp(v_)); }
  /// Number of significant bits of the exact value (0 for zero).
  long bits() const;
  bool is_integer() const { return mpfr_integer_p(v_) != 0; }

  double to_double(Round rnd = Round::Nearest) const;
  /// Odd mantissa and binary exponent of the value (mantissa 0 for zero).
  std::pair<mpz_class, long> to_mpz_2exp() const;
  mpz_class to_mpz(Round rnd) const;
  /// Exact literal of the form [-]0x<hex>p<exp>, "0", or "inf".
  std::string to_hex() const;
  std::string to_decimal(int digits) const;

  mpfr_srcptr raw() const { return v_; }
  mpfr_ptr raw() { return v_; }

  friend bool operator==(const BigFloat& a, const BigFloat& b) {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b);
  friend bool operator==(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const BigFloat& a, long b);

 private:
  mpfr_t v_;
};

BigFloat add(const BigFloat& a, const BigFloat& b, prec_t prec, Round rnd);
BigFloat sub(const BigFloat& a, const BigFloat& b, prec_t prec, Round rnd);
BigFloat mul(const BigFloat& a, const BigFloat& b, prec_t prec, Round rnd);
BigFloat div(const BigFloat& a, const BigFloat& b, prec_t prec, Round rnd);
BigFloat sqrt(const BigFloat& a, prec_t prec, Round rnd);
BigFloat round(const BigFloat& a, prec_t prec, Round rnd);

// Exact operations: the result carries whatever precision is needed.
BigFloat neg(const BigFloat& a);
BigFloat abs(const BigFloat& a);
BigFloat mul_2exp(const BigFloat& a, long e);
BigFloat add_exact(const BigFloat& a, const BigFloat& b);
BigFloat sub_exact(const BigFloat& a, const BigFloat& b);

/// Non-negative 30-bit upper (or, where named, lower) bound; may be +inf.
///
/// Storage lives inline, so copies never allocate.
class Mag {
 public:
  static constexpr prec_t kPrec = 30;

  Mag();
  Mag(const Mag& other);
  Mag& operator=(const Mag& other);
  ~Mag() = default;

  static Mag zero() { return Mag(); }
  static Mag inf();
  static Mag pow2(long e);
  static Mag from_ui(unsigned long v);
  /// Upper bound for |x|.
  static Mag upper(const BigFloat& x);
  static Mag upper(double x);
  static Mag upper(const mpz_class& x);
  static Mag upper(const mpq_class& x);
  /// Lower bound for |x|.
  static Mag lower(const BigFloat& x);
  static Mag lower(const mpz_class& x);

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_inf() const { return mpfr_inf_p(v_) != 0; }
  bool is_finite() const { return !is_inf(); }
  long exponent() const { return static_cast<long>(mpfr_get_exp(v_)); }
  /// Upper bound for log2 of the value (-inf for zero, +inf for inf).
  double log2_upper() const;
  double to_double() const;  // rounded up
  BigFloat to_bigfloat() const;
  mpfr_srcptr raw() const { return v_; }

  friend Mag operator+(const Mag& a, const Mag& b);
  friend Mag operator*(const Mag& a, const Mag& b);
  Mag& operator+=(const Mag& b) { return *this = *this + b; }
  Mag& operator*=(const Mag& b) { return *this = *this * b; }
  Mag mul_2exp(long e) const;
  Mag mul_ui(unsigned long c) const;

  friend bool operator==(const Mag& a, const Mag& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Mag& a, const Mag& b);

  friend Mag div_upper(const Mag& num, const Mag& den);
  friend Mag div_lower(const Mag& num, const Mag& den);
  friend Mag mul_lower(const Mag& a, const Mag& b);
  friend Mag add_lower(const Mag& a, const Mag& b);
  /// max(0, a - b) rounded down.
  friend Mag sub_lower(const Mag& a, const Mag& b);
  friend Mag sqrt_upper(const Mag& a);
  friend Mag sqrt_lower(const Mag& a);
  friend Mag max(const Mag& a, const Mag& b) { return a < b ? b : a; }
  friend Mag min(const Mag& a, const Mag& b) { return a < b ? a : b; }

 private:
  void rebind();
  mpfr_t v_;
  mp_limb_t limb_;
};

}  // namespace legq
