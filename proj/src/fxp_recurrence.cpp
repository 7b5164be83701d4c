// SPDX-License-Identifier: Apache-2.0

#include "legq/fxp_recurrence.hpp"

#include <cmath>

namespace legq {

std::pair<mpz_class, mpz_class> legendre_pair_fixed(const mpz_class& xhat, unsigned long t, unsigned long n) {
  mpz_class p, q, tmp;
  mpz_set_ui(p.get_mpz_t(), 1);
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), t);
  q = xhat;
  unsigned long den = 1;
  for (unsigned long k = 1; k < n; ++k) {
    mpz_mul(tmp.get_mpz_t(), q.get_mpz_t(), xhat.get_mpz_t());
    mpz_tdiv_q_2exp(tmp.get_mpz_t(), tmp.get_mpz_t(), t);
    mpz_mul_ui(p.get_mpz_t(), p.get_mpz_t(), k * k);
    mpz_neg(p.get_mpz_t(), p.get_mpz_t());
    mpz_addmul_ui(p.get_mpz_t(), tmp.get_mpz_t(), 2 * k + 1);
    mpz_swap(p.get_mpz_t(), q.get_mpz_t());
    unsigned long next;
    if (__builtin_mul_overflow(den, k + 1, &next)) {
      mpz_tdiv_q_ui(p.get_mpz_t(), p.get_mpz_t(), den);
      mpz_tdiv_q_ui(q.get_mpz_t(), q.get_mpz_t(), den);
      den = k + 1;
    } else {
      den = next;
    }
  }
  mpz_tdiv_q_ui(p.get_mpz_t(), p.get_mpz_t(), den / n);
  mpz_tdiv_q_ui(q.get_mpz_t(), q.get_mpz_t(), den);
  return {p, q};
}

double fixed_error_units(unsigned long n) {
  double m = static_cast<double>(n);
  return 0.75 * (m + 1) * (m + 2) + 1;
}

std::pair<Ball, Ball> legendre_pair_rec_ball(const BigFloat& x, unsigned long n, prec_t p) {
  if (!x.is_finite() || x > 1 || x < -1) throw DomainError("recurrence: x outside [-1, 1]");
  if (n == 0) throw std::invalid_argument("recurrence: n must be positive");
  double units = fixed_error_units(n);
  long g = static_cast<long>(std::ceil(std::log2(units + 2))) + 2;
  unsigned long t = static_cast<unsigned long>(p + g);

  BigFloat scaled = mul_2exp(x, static_cast<long>(t));
  mpz_class xhat = scaled.to_mpz(Round::Zero);
  auto [ip, iq] = legendre_pair_fixed(xhat, t, n);

  // Integer part of the bound, then the effect of truncating x to t bits:
  // |P_k(x) - P_k(x_t)| <= |x - x_t| k(k+1)/2.
  Mag base = Mag::upper(units);
  Mag rp = base, rq = base;
  if (!scaled.is_integer()) {
    rp += Mag::from_ui((n - 1) * n / 2);
    rq += Mag::from_ui(n * (n + 1) / 2);
  }
  long e = -static_cast<long>(t);
  Ball bp(BigFloat::from_mpz_2exp(ip, e), rp.mul_2exp(e));
  Ball bq(BigFloat::from_mpz_2exp(iq, e), rq.mul_2exp(e));
  return {bp, bq};
}

}  // namespace legq
