// SPDX-License-Identifier: Apache-2.0

#include "legq/ball.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <ostream>
#include <shared_mutex>

namespace legq {

namespace {

// Bound on |computed - exact| for a round-to-nearest result with ternary flag t.
Mag rounding_error(const BigFloat& y, int ternary) {
  if (ternary == 0) return Mag();
  if (y.is_zero()) return Mag::pow2(static_cast<long>(mpfr_get_emin()));
  return Mag::pow2(y.exponent() - static_cast<long>(y.prec()) - 1);  // half ulp
}

constexpr prec_t kBoundPrec = 64;

BigFloat rad_as_bigfloat(const Mag& m) { return m.to_bigfloat(); }

}  // namespace

Ball Ball::from_mpq(const mpq_class& q, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_set_q(mid.raw(), q.get_mpq_t(), MPFR_RNDN);
  Mag err = rounding_error(mid, t);
  return Ball(std::move(mid), err);
}

Ball Ball::hull(const BigFloat& lo, const BigFloat& hi, prec_t prec) {
  if (hi < lo) return hull(hi, lo, prec);
  auto mid = BigFloat::with_prec(prec);
  mpfr_add(mid.raw(), lo.raw(), hi.raw(), MPFR_RNDN);
  mpfr_div_2ui(mid.raw(), mid.raw(), 1, MPFR_RNDN);
  Mag r1 = Mag::upper(sub(hi, mid, kBoundPrec, Round::Up));
  Mag r2 = Mag::upper(sub(mid, lo, kBoundPrec, Round::Up));
  return Ball(std::move(mid), max(r1, r2));
}

Ball Ball::parse(std::string_view text, prec_t prec) {
  auto lo = BigFloat::parse(text, prec, Round::Down);
  auto hi = BigFloat::parse(text, prec, Round::Up);
  if (lo == hi) return Ball(std::move(lo));
  return hull(lo, hi, prec);
}

Ball Ball::indeterminate() { return Ball(BigFloat(), Mag::inf()); }

BigFloat Ball::lower() const {
  if (rad_.is_zero()) return mid_;
  return sub(mid_, rad_as_bigfloat(rad_), std::max<prec_t>(mid_.prec(), kBoundPrec), Round::Down);
}

BigFloat Ball::upper() const {
  if (rad_.is_zero()) return mid_;
  return add(mid_, rad_as_bigfloat(rad_), std::max<prec_t>(mid_.prec(), kBoundPrec), Round::Up);
}

Mag Ball::mag_upper() const { return Mag::upper(mid_) + rad_; }

Mag Ball::mag_lower() const { return sub_lower(Mag::lower(mid_), rad_); }

bool Ball::contains(const BigFloat& x) const {
  if (rad_.is_inf()) return true;
  if (!x.is_finite()) return false;
  auto d = sub_exact(x, mid_);
  return mpfr_cmpabs(d.raw(), rad_.raw()) <= 0;
}

bool Ball::contains(const Ball& inner) const {
  if (rad_.is_inf()) return true;
  if (!inner.is_finite()) return false;
  auto d = abs(sub_exact(inner.mid_, mid_));
  d = add_exact(d, rad_as_bigfloat(inner.rad_));
  return mpfr_cmp(d.raw(), rad_.raw()) <= 0;
}

bool Ball::overlaps(const Ball& other) const {
  if (!is_finite() || !other.is_finite()) return true;
  auto d = abs(sub_exact(other.mid_, mid_));
  auto r = add_exact(rad_as_bigfloat(rad_), rad_as_bigfloat(other.rad_));
  return d <= r;
}

bool Ball::strictly_inside(const BigFloat& lo, const BigFloat& hi) const {
  if (!is_finite()) return false;
  return lower() > lo && upper() < hi;
}

std::string Ball::to_string(int digits) const {
  std::string out = "[" + mid_.to_decimal(digits) + " +/- ";
  if (rad_.is_inf()) {
    out += "inf";
  } else if (rad_.is_zero()) {
    out += "0";
  } else {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.1RUe", rad_.raw());
    out += buf;
    mpfr_free_str(buf);
  }
  return out + "]";
}

std::ostream& operator<<(std::ostream& os, const Ball& b) { return os << b.to_string(); }

Ball operator-(const Ball& a) { return Ball(neg(a.mid()), a.rad()); }

Ball add(const Ball& a, const Ball& b, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_add(mid.raw(), a.mid().raw(), b.mid().raw(), MPFR_RNDN);
  Mag rad = a.rad() + b.rad() + rounding_error(mid, t);
  return Ball(std::move(mid), rad);
}

Ball sub(const Ball& a, const Ball& b, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_sub(mid.raw(), a.mid().raw(), b.mid().raw(), MPFR_RNDN);
  Mag rad = a.rad() + b.rad() + rounding_error(mid, t);
  return Ball(std::move(mid), rad);
}

Ball mul(const Ball& a, const Ball& b, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_mul(mid.raw(), a.mid().raw(), b.mid().raw(), MPFR_RNDN);
  Mag rad = rounding_error(mid, t);
  if (!a.rad().is_zero()) rad += Mag::upper(b.mid()) * a.rad();
  if (!b.rad().is_zero()) rad += Mag::upper(a.mid()) * b.rad() + a.rad() * b.rad();
  return Ball(std::move(mid), rad);
}

Ball sqr(const Ball& a, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_sqr(mid.raw(), a.mid().raw(), MPFR_RNDN);
  Mag rad = rounding_error(mid, t);
  if (!a.rad().is_zero()) rad += (Mag::upper(a.mid()).mul_2exp(1) + a.rad()) * a.rad();
  return Ball(std::move(mid), rad);
}

Ball div(const Ball& a, const Ball& b, prec_t prec) {
  Mag bm = Mag::lower(b.mid());
  Mag den = sub_lower(bm, b.rad());
  if (den.is_zero() || !b.is_finite()) return Ball::indeterminate();
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_div(mid.raw(), a.mid().raw(), b.mid().raw(), MPFR_RNDN);
  Mag rad = rounding_error(mid, t);
  if (!a.rad().is_zero() || !b.rad().is_zero()) {
    Mag num = Mag::upper(a.mid()) * b.rad() + Mag::upper(b.mid()) * a.rad();
    rad += div_upper(num, mul_lower(bm, den));
  }
  return Ball(std::move(mid), rad);
}

Ball add_si(const Ball& a, long c, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_add_si(mid.raw(), a.mid().raw(), c, MPFR_RNDN);
  Mag rad = a.rad() + rounding_error(mid, t);
  return Ball(std::move(mid), rad);
}

Ball mul_si(const Ball& a, long c, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_mul_si(mid.raw(), a.mid().raw(), c, MPFR_RNDN);
  Mag rad = a.rad().mul_ui(static_cast<unsigned long>(c < 0 ? -c : c)) + rounding_error(mid, t);
  return Ball(std::move(mid), rad);
}

Ball div_si(const Ball& a, long c, prec_t prec) {
  if (c == 0) return Ball::indeterminate();
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_div_si(mid.raw(), a.mid().raw(), c, MPFR_RNDN);
  Mag rad = div_upper(a.rad(), Mag::from_ui(static_cast<unsigned long>(c < 0 ? -c : c)));
  rad += rounding_error(mid, t);
  return Ball(std::move(mid), rad);
}

Ball mul_z(const Ball& a, const mpz_class& c, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_mul_z(mid.raw(), a.mid().raw(), c.get_mpz_t(), MPFR_RNDN);
  Mag rad = rounding_error(mid, t);
  if (!a.rad().is_zero()) rad += a.rad() * Mag::upper(c);
  return Ball(std::move(mid), rad);
}

Ball div_z(const Ball& a, const mpz_class& c, prec_t prec) {
  if (sgn(c) == 0) return Ball::indeterminate();
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_div_z(mid.raw(), a.mid().raw(), c.get_mpz_t(), MPFR_RNDN);
  Mag rad = rounding_error(mid, t);
  if (!a.rad().is_zero()) rad += div_upper(a.rad(), Mag::lower(c));
  return Ball(std::move(mid), rad);
}

Ball mul_2exp(const Ball& a, long e) { return Ball(mul_2exp(a.mid(), e), a.rad().mul_2exp(e)); }

Ball pow_ui(const Ball& a, unsigned long e, prec_t prec) {
  if (e == 0) return Ball(1);
  if (e == 1) return round(a, prec);
  int top = 63 - __builtin_clzl(e);
  Ball r = a;
  for (int i = top - 1; i >= 0; --i) {
    r = sqr(r, prec);
    if ((e >> i) & 1UL) r = mul(r, a, prec);
  }
  return r;
}

Ball round(const Ball& a, prec_t prec) {
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_set(mid.raw(), a.mid().raw(), MPFR_RNDN);
  return Ball(std::move(mid), a.rad() + rounding_error(mid, t));
}

Ball abs(const Ball& a) { return a.mid().sign() < 0 ? -a : a; }

Ball union_hull(const Ball& a, const Ball& b, prec_t prec) {
  if (!a.is_finite() || !b.is_finite()) return Ball::indeterminate();
  auto lo = std::min(a.lower(), b.lower());
  auto hi = std::max(a.upper(), b.upper());
  return Ball::hull(lo, hi, prec);
}

Ball sqrt(const Ball& a, prec_t prec) {
  if (!a.is_finite()) return Ball::indeterminate();
  auto hi = a.upper();
  if (hi.sign() < 0) throw DomainError("sqrt of a negative ball");
  auto lo = a.lower();
  if (lo.sign() < 0) {
    // a straddles zero: the image of a ∩ [0, inf) is [0, sqrt(hi)].
    auto top = sqrt(hi, kBoundPrec, Round::Up);
    Mag half = Mag::upper(top).mul_2exp(-1);
    return Ball(mul_2exp(top, -1), half);
  }
  auto mid = BigFloat::with_prec(prec);
  int t = mpfr_sqrt(mid.raw(), a.mid().raw(), MPFR_RNDN);
  Mag rad = rounding_error(mid, t);
  if (!a.rad().is_zero()) {
    if (a.mid().is_zero()) {
      rad += sqrt_upper(a.rad());
    } else {
      // |sqrt(x) - sqrt(m)| = |x - m| / (sqrt(x) + sqrt(m)).
      Mag den = add_lower(sqrt_lower(Mag::lower(lo)), sqrt_lower(Mag::lower(a.mid())));
      rad += div_upper(a.rad(), den);
    }
  }
  return Ball(std::move(mid), rad);
}

namespace {

template <class Fn>
Ball monotone_increasing(const Ball& a, prec_t prec, Fn fn) {
  auto mid = BigFloat::with_prec(prec);
  int t = fn(mid.raw(), a.mid().raw(), MPFR_RNDN);
  Mag rad = rounding_error(mid, t);
  if (!a.rad().is_zero()) {
    auto lo = BigFloat::with_prec(prec);
    auto hi = BigFloat::with_prec(prec);
    fn(lo.raw(), a.lower().raw(), MPFR_RNDD);
    fn(hi.raw(), a.upper().raw(), MPFR_RNDU);
    Mag r1 = Mag::upper(sub(hi, mid, kBoundPrec, Round::Up));
    Mag r2 = Mag::upper(sub(mid, lo, kBoundPrec, Round::Up));
    rad = max(r1, r2);
  }
  return Ball(std::move(mid), rad);
}

}  // namespace

Ball log(const Ball& a, prec_t prec) {
  if (!a.is_finite() || a.lower().sign() <= 0) throw DomainError("log of a non-positive ball");
  return monotone_increasing(a, prec, [](mpfr_ptr r, mpfr_srcptr x, mpfr_rnd_t d) { return mpfr_log(r, x, d); });
}

Ball exp(const Ball& a, prec_t prec) {
  if (!a.is_finite()) return Ball::indeterminate();
  return monotone_increasing(a, prec, [](mpfr_ptr r, mpfr_srcptr x, mpfr_rnd_t d) { return mpfr_exp(r, x, d); });
}

namespace {

// arctan(1/q) = sum_k (-1)^k / ((2k+1) q^(2k+1)); the alternating tail after
// N terms is below 1/((2N+1) q^(2N+1)) <= 2^(-(2N+1) floor(log2 q)).
Ball atan_inv(long q, prec_t prec) {
  long fl = 63 - __builtin_clzl(static_cast<unsigned long>(q));
  long terms = (prec + 4) / (2 * fl) + 1;
  Ball power = div_si(Ball(1), q, prec);
  Ball sum;
  long q2 = q * q;
  for (long k = 0; k < terms; ++k) {
    Ball term = div_si(power, 2 * k + 1, prec);
    sum = (k % 2 == 0) ? add(sum, term, prec) : sub(sum, term, prec);
    power = div_si(power, q2, prec);
  }
  sum.add_error(Mag::pow2(-(2 * terms + 1) * fl));
  return sum;
}

Ball machin_pi(prec_t prec) {
  prec_t w = prec + 32;
  Ball a = mul_si(atan_inv(5, w), 16, w);
  Ball b = mul_si(atan_inv(239, w), 4, w);
  return sub(a, b, w);
}

}  // namespace

Ball const_pi(prec_t prec) {
  static std::shared_mutex mu;
  static std::map<prec_t, Ball> cache;
  {
    std::shared_lock lock(mu);
    if (auto it = cache.find(prec); it != cache.end()) return it->second;
  }
  Ball pi = machin_pi(prec);
  std::unique_lock lock(mu);
  return cache.try_emplace(prec, std::move(pi)).first->second;
}

// --- complex -----------------------------------------------------------------

ComplexBall operator-(const ComplexBall& a) { return {-a.re, -a.im}; }

ComplexBall conj(const ComplexBall& a) { return {a.re, -a.im}; }

ComplexBall add(const ComplexBall& a, const ComplexBall& b, prec_t prec) {
  return {add(a.re, b.re, prec), add(a.im, b.im, prec)};
}

ComplexBall sub(const ComplexBall& a, const ComplexBall& b, prec_t prec) {
  return {sub(a.re, b.re, prec), sub(a.im, b.im, prec)};
}

ComplexBall mul(const ComplexBall& a, const ComplexBall& b, prec_t prec) {
  if (b.im.is_exact() && b.im.mid().is_zero()) return mul(a, b.re, prec);
  if (a.im.is_exact() && a.im.mid().is_zero()) return mul(b, a.re, prec);
  Ball re = sub(mul(a.re, b.re, prec), mul(a.im, b.im, prec), prec);
  Ball im = add(mul(a.re, b.im, prec), mul(a.im, b.re, prec), prec);
  return {std::move(re), std::move(im)};
}

ComplexBall mul(const ComplexBall& a, const Ball& b, prec_t prec) {
  return {mul(a.re, b, prec), mul(a.im, b, prec)};
}

ComplexBall sqr(const ComplexBall& a, prec_t prec) {
  Ball re = sub(sqr(a.re, prec), sqr(a.im, prec), prec);
  Ball im = mul_2exp(mul(a.re, a.im, prec), 1);
  return {std::move(re), std::move(im)};
}

ComplexBall mul_z(const ComplexBall& a, const mpz_class& c, prec_t prec) {
  return {mul_z(a.re, c, prec), mul_z(a.im, c, prec)};
}

ComplexBall div_z(const ComplexBall& a, const mpz_class& c, prec_t prec) {
  return {div_z(a.re, c, prec), div_z(a.im, c, prec)};
}

ComplexBall mul_2exp(const ComplexBall& a, long e) { return {mul_2exp(a.re, e), mul_2exp(a.im, e)}; }

ComplexBall pow_ui(const ComplexBall& a, unsigned long e, prec_t prec) {
  if (e == 0) return ComplexBall(1);
  if (e == 1) return {round(a.re, prec), round(a.im, prec)};
  int top = 63 - __builtin_clzl(e);
  ComplexBall r = a;
  for (int i = top - 1; i >= 0; --i) {
    r = sqr(r, prec);
    if ((e >> i) & 1UL) r = mul(r, a, prec);
  }
  return r;
}

ComplexBall sqrt(const ComplexBall& z, prec_t prec) {
  if (z.re.is_exact() && z.im.is_exact() && z.re.mid().is_zero() && z.im.mid().is_zero()) return {};
  if (z.im.contains_zero() && z.re.lower().sign() <= 0)
    throw DomainError("complex sqrt: rectangle meets the branch cut");
  Ball modulus = sqrt(add(sqr(z.re, prec), sqr(z.im, prec), prec), prec);
  if (z.re.mid().sign() >= 0) {
    // t = sqrt((|z| + re) / 2), sqrt(z) = t + i im / (2t).
    Ball t = sqrt(mul_2exp(add(modulus, z.re, prec), -1), prec);
    return {t, div(z.im, mul_2exp(t, 1), prec)};
  }
  // s = sign(im) sqrt((|z| - re) / 2), sqrt(z) = im / (2s) + i s.
  Ball s = sqrt(mul_2exp(sub(modulus, z.re, prec), -1), prec);
  if (z.im.mid().sign() < 0) s = -s;
  return {div(z.im, mul_2exp(s, 1), prec), s};
}

ComplexBall pow_half_odd(const ComplexBall& z, unsigned long m, prec_t prec) {
  if (m % 2 == 0) throw std::invalid_argument("pow_half_odd: m must be odd");
  ComplexBall root = sqrt(z, prec);
  if (m == 1) return root;
  return mul(pow_ui(z, (m - 1) / 2, prec), root, prec);
}

}  // namespace legq
