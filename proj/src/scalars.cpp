// SPDX-License-Identifier: Apache-2.0

#include "legq/scalars.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <vector>

namespace legq {

namespace {

template <class V>
class Cache {
 public:
  template <class F>
  V get(std::pair<unsigned long, prec_t> key, F&& make) {
    {
      std::shared_lock lock(mu_);
      if (auto it = map_.find(key); it != map_.end()) return it->second;
    }
    V v = make();
    std::unique_lock lock(mu_);
    return map_.try_emplace(key, std::move(v)).first->second;
  }

 private:
  std::shared_mutex mu_;
  std::map<std::pair<unsigned long, prec_t>, V> map_;
};

Cache<Ball>& binomial_cache() {
  static Cache<Ball> c;
  return c;
}

Cache<Ball>& scaled_cache() {
  static Cache<Ball> c;
  return c;
}

mpz_class central_binomial_exact(unsigned long n) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), 2 * n, n);
  return r;
}

// Stirling series for ln Gamma(z) without the (z - 1/2) ln z - z + ln(2 pi)/2
// part: sum_{k=1}^{N} B_2k / (2k(2k-1) z^(2k-1)), with the first omitted term
// added to the radius.
Ball stirling_tail(unsigned long z, prec_t prec) {
  Ball s;
  Ball zb = Ball::from_mpz(mpz_class(z));
  Ball inv = div(Ball(1), zb, prec);
  Ball inv2 = sqr(inv, prec);
  Ball pw = inv;  // z^-(2k-1)
  const long target = -static_cast<long>(prec) - 10;
  for (unsigned long k = 1;; ++k) {
    const mpq_class& b = bernoulli(2 * k);
    mpq_class coef = b / (mpq_class(2 * k) * (2 * k - 1));
    Ball term = mul(pw, Ball::from_mpq(coef, prec), prec);
    // Bound for the next term, which is the remainder if we stop here.
    const mpq_class& bn = bernoulli(2 * k + 2);
    mpq_class cn = abs(bn) / (mpq_class(2 * k + 2) * (2 * k + 1));
    Mag next = Mag::upper(cn) * mul(pw, inv2, prec).mag_upper();
    s = add(s, term, prec);
    // The remainder is bounded by the first omitted term for every N, so any
    // stopping point is valid; stop once terms stop shrinking.
    if (next < Mag::pow2(target) || k >= 64 || next > term.mag_upper()) {
      s.add_error(next);
      return s;
    }
    pw = mul(pw, inv2, prec);
  }
}

// (z - 1/2) ln z - z, the leading part of ln Gamma(z).
Ball stirling_lead(unsigned long z, prec_t prec) {
  Ball zb = Ball::from_mpz(mpz_class(z));
  Ball l = log(zb, prec);
  Ball h = sub(zb, Ball(BigFloat(0.5)), prec);
  return sub(mul(h, l, prec), zb, prec);
}

std::array<double, 257> build_entropy_table() {
  std::array<double, 257> t{};
  for (int i = 1; i < 256; ++i) {
    double x = i / 256.0;
    double g = -x * std::log2(x) - (1 - x) * std::log2(1 - x);
    t[static_cast<size_t>(i)] = g * (1 + 1e-14) + 1e-300;
  }
  return t;
}

}  // namespace

unsigned long central_binomial_cutoff(prec_t prec) { return 6 * static_cast<unsigned long>(prec) + 200; }

const mpq_class& bernoulli(unsigned long k) {
  static std::shared_mutex mu;
  static std::vector<mpq_class> table;
  {
    std::shared_lock lock(mu);
    if (k < table.size()) return table[k];
  }
  std::unique_lock lock(mu);
  if (k < table.size()) return table[k];
  // Akiyama-Tanigawa; the algorithm yields B_1 = +1/2, replaced by -1/2.
  unsigned long want = std::max<unsigned long>(k + 1, 2 * table.size() + 16);
  std::vector<mpq_class> a(want), out(want);
  for (unsigned long m = 0; m < want; ++m) {
    a[m] = mpq_class(1, m + 1);
    for (unsigned long j = m; j >= 1; --j) {
      a[j - 1] = j * (a[j - 1] - a[j]);
    }
    out[m] = a[0];
  }
  out[1] = mpq_class(-1, 2);
  // Growing a vector of references would invalidate old ones; copy into a
  // fresh table and keep the old buffers alive.
  static std::vector<std::vector<mpq_class>> graveyard;
  graveyard.push_back(std::move(table));
  table = std::move(out);
  return table[k];
}

Ball log_central_binomial_scaled_stirling(unsigned long n, prec_t prec) {
  if (n == 0) return Ball();
  prec_t w = prec + 20;
  // ln C(2n,n) = lnG(2n+1) - 2 lnG(n+1); the ln(2 pi)/2 constants leave -ln(2 pi)/2.
  Ball a = add(stirling_lead(2 * n + 1, w), stirling_tail(2 * n + 1, w), w);
  Ball b = add(stirling_lead(n + 1, w), stirling_tail(n + 1, w), w);
  Ball two_pi = mul_2exp(const_pi(w), 1);
  Ball r = sub(a, mul_2exp(b, 1), w);
  r = sub(r, mul_2exp(log(two_pi, w), -1), w);
  Ball ln2 = log(Ball(2), w);
  return sub(r, mul_si(ln2, static_cast<long>(2 * n), w), w);
}

Ball central_binomial_ball(unsigned long n, prec_t prec) {
  return binomial_cache().get({n, prec}, [&] {
    if (n < central_binomial_cutoff(prec)) return round(Ball::from_mpz(central_binomial_exact(n)), prec);
    return mul_2exp(central_binomial_scaled(n, prec), static_cast<long>(2 * n));
  });
}

Ball central_binomial_scaled(unsigned long n, prec_t prec) {
  return scaled_cache().get({n, prec}, [&] {
    if (n < central_binomial_cutoff(prec)) {
      return mul_2exp(round(Ball::from_mpz(central_binomial_exact(n)), prec), -static_cast<long>(2 * n));
    }
    prec_t w = prec + 20;
    return round(exp(log_central_binomial_scaled_stirling(n, w), w), prec);
  });
}

double binom_log2_upper(double n, double k) {
  if (!(k >= 0 && k <= n)) throw DomainError("binom_log2_upper: k outside [0, n]");
  if (k == 0 || k == n) return 0;
  static const std::array<double, 257> table = build_entropy_table();
  double x = k / n * 256.0;
  auto i = static_cast<size_t>(std::floor(x));
  if (i >= 256) i = 255;
  // G is monotone on each cell, so the larger endpoint bounds the cell.
  double g = std::max(table[i], table[i + 1]);
  return n * g * (1 + 1e-12);
}

Mag binom_upper(unsigned long n, unsigned long k) {
  if (k > n) return Mag();
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return Mag::upper(r);
}

}  // namespace legq
