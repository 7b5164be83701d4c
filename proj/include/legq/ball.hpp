// SPDX-License-Identifier: Apache-2.0
//
// Midpoint-radius (ball) arithmetic. Every operation returns a ball that
// contains the exact image of every point of its inputs. The midpoint is
// rounded to nearest at the requested precision; the radius is a Mag that
// absorbs both the propagated input radii and the midpoint rounding error.

#pragma once

#include "legq/bigfloat.hpp"

#include <iosfwd>
#include <string>

namespace legq {

class Ball {
 public:
  Ball() = default;
  Ball(long v) : mid_(v) {}  // NOLINT(google-explicit-constructor): exact
  explicit Ball(BigFloat mid, Mag rad = Mag()) : mid_(std::move(mid)), rad_(rad) {}

  static Ball from_double(double v) { return Ball(BigFloat(v)); }
  static Ball from_mpz(const mpz_class& v) { return Ball(BigFloat::from_mpz(v)); }
  static Ball from_mpq(const mpq_class& q, prec_t prec);
  /// Smallest representable ball (at `prec` bits) containing [lo, hi].
  static Ball hull(const BigFloat& lo, const BigFloat& hi, prec_t prec);
  /// Ball containing the exact value of a decimal or hex literal.
  static Ball parse(std::string_view text, prec_t prec);
  /// Result of an undefined operation (for example division by a ball
  /// containing zero): midpoint 0, infinite radius.
  static Ball indeterminate();

  const BigFloat& mid() const { return mid_; }
  const Mag& rad() const { return rad_; }
  BigFloat& mid() { return mid_; }
  Mag& rad() { return rad_; }

  bool is_finite() const { return mid_.is_finite() && rad_.is_finite(); }
  bool is_exact() const { return rad_.is_zero(); }
  void add_error(const Mag& e) { rad_ += e; }

  /// mid - rad rounded down / mid + rad rounded up.
  BigFloat lower() const;
  BigFloat upper() const;
  /// Upper bound for max |x| over the ball.
  Mag mag_upper() const;
  /// Lower bound for min |x| over the ball.
  Mag mag_lower() const;

  bool contains(const BigFloat& x) const;
  bool contains(const Ball& inner) const;
  bool contains_zero() const { return contains(BigFloat()); }
  bool overlaps(const Ball& other) const;
  bool is_positive() const { return lower().sign() > 0; }
  bool is_negative() const { return upper().sign() < 0; }
  /// True if the closed ball lies strictly inside (lo, hi).
  bool strictly_inside(const BigFloat& lo, const BigFloat& hi) const;

  std::string to_string(int digits = 20) const;

 private:
  BigFloat mid_;
  Mag rad_;
};

std::ostream& operator<<(std::ostream& os, const Ball& b);

Ball operator-(const Ball& a);
Ball add(const Ball& a, const Ball& b, prec_t prec);
Ball sub(const Ball& a, const Ball& b, prec_t prec);
Ball mul(const Ball& a, const Ball& b, prec_t prec);
Ball div(const Ball& a, const Ball& b, prec_t prec);
Ball sqr(const Ball& a, prec_t prec);
Ball add_si(const Ball& a, long c, prec_t prec);
Ball mul_si(const Ball& a, long c, prec_t prec);
Ball div_si(const Ball& a, long c, prec_t prec);
Ball mul_z(const Ball& a, const mpz_class& c, prec_t prec);
Ball div_z(const Ball& a, const mpz_class& c, prec_t prec);
Ball mul_2exp(const Ball& a, long e);
Ball pow_ui(const Ball& a, unsigned long e, prec_t prec);
/// Rounds the midpoint to `prec` bits, widening the radius accordingly.
Ball round(const Ball& a, prec_t prec);
Ball abs(const Ball& a);
/// Ball containing both inputs.
Ball union_hull(const Ball& a, const Ball& b, prec_t prec);

/// Square root over a ∩ [0, inf). Throws DomainError if a < 0 entirely.
Ball sqrt(const Ball& a, prec_t prec);
/// Natural logarithm; requires a > 0.
Ball log(const Ball& a, prec_t prec);
Ball exp(const Ball& a, prec_t prec);

/// Enclosure of pi, cached per precision; radius <= 2^-prec.
Ball const_pi(prec_t prec);

/// Rectangular complex ball.
struct ComplexBall {
  Ball re;
  Ball im;

  ComplexBall() = default;
  ComplexBall(Ball r, Ball i = Ball()) : re(std::move(r)), im(std::move(i)) {}  // NOLINT
  ComplexBall(long v) : re(v) {}  // NOLINT

  bool contains(const ComplexBall& inner) const { return re.contains(inner.re) && im.contains(inner.im); }
  bool overlaps(const ComplexBall& o) const { return re.overlaps(o.re) && im.overlaps(o.im); }
  bool is_finite() const { return re.is_finite() && im.is_finite(); }
};

ComplexBall operator-(const ComplexBall& a);
ComplexBall conj(const ComplexBall& a);
ComplexBall add(const ComplexBall& a, const ComplexBall& b, prec_t prec);
ComplexBall sub(const ComplexBall& a, const ComplexBall& b, prec_t prec);
ComplexBall mul(const ComplexBall& a, const ComplexBall& b, prec_t prec);
ComplexBall mul(const ComplexBall& a, const Ball& b, prec_t prec);
ComplexBall sqr(const ComplexBall& a, prec_t prec);
ComplexBall mul_z(const ComplexBall& a, const mpz_class& c, prec_t prec);
ComplexBall div_z(const ComplexBall& a, const mpz_class& c, prec_t prec);
ComplexBall mul_2exp(const ComplexBall& a, long e);
ComplexBall pow_ui(const ComplexBall& a, unsigned long e, prec_t prec);
/// Principal square root. Throws DomainError if the rectangle meets the
/// closed negative real axis.
ComplexBall sqrt(const ComplexBall& z, prec_t prec);
/// Principal z^(m/2) for odd m, computed as z^((m-1)/2) * sqrt(z).
ComplexBall pow_half_odd(const ComplexBall& z, unsigned long m, prec_t prec);

}  // namespace legq
