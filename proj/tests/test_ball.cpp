// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "oracles.hpp"

#include "legq/ball.hpp"

#include <functional>
#include <optional>
#include <thread>

using namespace legq;
using oracle::to_mpq;

TEST_CASE("exact integer addition") {
  Ball s = add(Ball(1), Ball(2), 64);
  CHECK(s.mid() == 3);
  CHECK(s.is_exact());
}

TEST_CASE("product of overlapping balls covers the interval product") {
  Ball a(BigFloat(1), Mag::upper(0.25));
  Ball p = mul(a, a, 64);
  CHECK(oracle::contains(p, mpq_class(9, 16)));
  CHECK(oracle::contains(p, mpq_class(25, 16)));
}

TEST_CASE("one third at 8 bits") {
  Ball q = div(Ball(1), Ball(3), 8);
  CHECK(q.mid().prec() == 8);
  CHECK(oracle::contains(q, mpq_class(1, 3)));
  CHECK(to_mpq(q.rad()) <= to_mpq(q.mid()) / 256);
}

TEST_CASE("division by a ball containing zero is indeterminate") {
  Ball z(BigFloat(0), Mag::upper(0.5));
  Ball r = div(Ball(1), z, 64);
  CHECK_FALSE(r.is_finite());
  CHECK(r.contains(BigFloat(12345)));
}

TEST_CASE("sqrt") {
  CHECK(sqrt(Ball(4), 64).mid() == 2);
  CHECK(sqrt(Ball(4), 64).is_exact());

  Ball r2 = sqrt(Ball(2), 16);
  CHECK(to_mpq(r2.rad()) <= mpq_class(1, 1 << 15));
  auto lo = to_mpq(r2.lower()), hi = to_mpq(r2.upper());
  CHECK(lo * lo <= 2);
  CHECK(hi * hi >= 2);

  Ball h = sqrt(Ball(BigFloat(0), Mag::from_ui(1)), 64);
  CHECK(oracle::contains(h, 0));
  CHECK(oracle::contains(h, 1));

  CHECK_THROWS_AS(sqrt(Ball(-1), 64), DomainError);
}

TEST_CASE("sqrt of ball inputs contains the image of the endpoints") {
  for (int i = 0; i < 500; ++i) {
    BigFloat m = oracle::random_dyadic(0.001, 4.0, 60);
    Mag r = Mag::upper(oracle::random_dyadic(0, 0.001, 40));
    Ball b(m, r);
    Ball s = sqrt(b, 80);
    for (const BigFloat& e : {b.lower(), b.upper()}) {
      mpq_class q = to_mpq(e);
      if (q < 0) continue;
      // sqrt(q) in s  <=>  lower^2 <= q <= upper^2 (both bounds non-negative here)
      mpq_class lo = to_mpq(s.lower()), hi = to_mpq(s.upper());
      if (lo > 0) CHECK(lo * lo <= q);
      CHECK(hi * hi >= q);
    }
  }
}

namespace {

struct Tree {
  // Returns the ball and, when exact arithmetic is defined, the exact value.
  std::function<std::pair<Ball, std::optional<mpq_class>>(prec_t)> eval;
};

std::pair<Ball, std::optional<mpq_class>> random_tree(int depth, prec_t prec, std::mt19937_64& gen,
                                                      std::vector<BigFloat>& leaves, size_t& next) {
  std::uniform_int_distribution<int> pick(0, 4);
  if (depth == 0 || pick(gen) == 0) {
    if (next >= leaves.size()) leaves.push_back(oracle::random_dyadic(-4, 4, 70));
    const BigFloat& v = leaves[next++];
    return {Ball(v), to_mpq(v)};
  }
  auto [a, qa] = random_tree(depth - 1, prec, gen, leaves, next);
  auto [b, qb] = random_tree(depth - 1, prec, gen, leaves, next);
  std::optional<mpq_class> q;
  switch (pick(gen) % 4) {
    case 0:
      if (qa && qb) q = *qa + *qb;
      return {add(a, b, prec), q};
    case 1:
      if (qa && qb) q = *qa - *qb;
      return {sub(a, b, prec), q};
    case 2:
      if (qa && qb) q = *qa * *qb;
      return {mul(a, b, prec), q};
    default:
      if (qa && qb && *qb != 0) q = *qa / *qb;
      return {div(a, b, prec), q};
  }
}

}  // namespace

TEST_CASE("containment under random expression trees") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> precs(2, 200);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<BigFloat> leaves;
    size_t next = 0;
    prec_t prec = precs(gen);
    auto seed = gen();
    std::mt19937_64 g1(seed);
    auto [b, q] = random_tree(6, prec, g1, leaves, next);
    if (!q || !b.is_finite()) continue;
    ++checked;
    REQUIRE(oracle::contains(b, *q));

    // Same expression at twice the precision is never wider for point inputs.
    if (i % 10 == 0) {
      next = 0;
      std::mt19937_64 g2(seed);
      auto [b2, q2] = random_tree(6, 2 * prec, g2, leaves, next);
      if (b2.is_finite()) CHECK(b2.rad() <= b.rad());
    }
  }
  CHECK(checked > 5000);
}

TEST_CASE("directed rounding brackets the exact result") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> precs(2, 80);
  for (int i = 0; i < 10000; ++i) {
    BigFloat a = oracle::random_dyadic(-100, 100, 60);
    BigFloat b = oracle::random_dyadic(-100, 100, 60);
    if (b.is_zero()) continue;
    prec_t p = precs(gen);
    mpq_class qa = to_mpq(a), qb = to_mpq(b);
    const mpq_class exact[] = {qa + qb, qa - qb, qa * qb, qa / qb};
    for (int op = 0; op < 4; ++op) {
      auto f = [&](Round r) {
        switch (op) {
          case 0: return add(a, b, p, r);
          case 1: return sub(a, b, p, r);
          case 2: return mul(a, b, p, r);
          default: return div(a, b, p, r);
        }
      };
      REQUIRE(to_mpq(f(Round::Down)) <= exact[op]);
      REQUIRE(to_mpq(f(Round::Up)) >= exact[op]);
    }
  }
}

TEST_CASE("principal half-odd powers") {
  ComplexBall one(Ball(1), Ball(0));
  ComplexBall r = pow_half_odd(one, 5, 64);
  CHECK(r.re.contains(BigFloat(1)));
  CHECK(r.im.contains(BigFloat(0)));

  ComplexBall i(Ball(0), Ball(1));
  oracle::Real h(256);
  mpfr_sqrt_ui(h.get(), 2, MPFR_RNDN);
  mpfr_div_2ui(h.get(), h.get(), 1, MPFR_RNDN);
  BigFloat half_sqrt2 = BigFloat::with_prec(256);
  mpfr_set(half_sqrt2.raw(), h.get(), MPFR_RNDN);

  ComplexBall s = pow_half_odd(i, 1, 128);
  CHECK(s.re.overlaps(Ball(half_sqrt2, Mag::pow2(-250))));
  CHECK(s.im.overlaps(Ball(half_sqrt2, Mag::pow2(-250))));
  CHECK(s.re.rad() < Mag::pow2(-120));

  ComplexBall c = pow_half_odd(i, 3, 128);
  CHECK(c.re.overlaps(Ball(neg(half_sqrt2), Mag::pow2(-250))));
  CHECK(c.im.overlaps(Ball(half_sqrt2, Mag::pow2(-250))));

  ComplexBall cut(Ball(BigFloat(-1), Mag()), Ball(BigFloat(0), Mag::pow2(-10)));
  CHECK_THROWS_AS(pow_half_odd(cut, 3, 64), DomainError);
}

TEST_CASE("pi") {
  Ball p8 = const_pi(8);
  oracle::Real ref(300);
  mpfr_const_pi(ref.get(), MPFR_RNDN);
  BigFloat pr = BigFloat::with_prec(300);
  mpfr_set(pr.raw(), ref.get(), MPFR_RNDN);
  CHECK(p8.overlaps(Ball(pr, Mag::pow2(-290))));
  CHECK(p8.rad() <= Mag::pow2(-7));

  Ball p64 = const_pi(64);
  CHECK(p64.rad() <= Mag::pow2(-63));
  CHECK(p64.overlaps(Ball(pr, Mag::pow2(-290))));
  BigFloat diff = abs(sub_exact(p64.mid(), pr));
  CHECK(Mag::upper(diff) < Mag::pow2(-62));

  Ball again = const_pi(64);
  CHECK(again.mid() == p64.mid());
  CHECK(again.rad() == p64.rad());
}

TEST_CASE("pi cache under concurrent access") {
  std::vector<std::thread> ts;
  std::vector<Ball> out(8);
  for (int i = 0; i < 8; ++i) ts.emplace_back([&, i] { out[i] = const_pi(1000 + (i % 2)); });
  for (auto& t : ts) t.join();
  for (int i = 2; i < 8; ++i) CHECK(out[i].mid() == out[i % 2].mid());
}

TEST_CASE("log and exp enclose the MPFR values") {
  Ball l = log(Ball(3), 200);
  oracle::Real r(400);
  mpfr_log_ui(r.get(), 3, MPFR_RNDN);
  BigFloat rb = BigFloat::with_prec(400);
  mpfr_set(rb.raw(), r.get(), MPFR_RNDN);
  CHECK(l.overlaps(Ball(rb, Mag::pow2(-390))));
  CHECK(l.rad() <= Mag::pow2(-198));
  Ball e = exp(Ball(BigFloat(1), Mag::pow2(-20)), 100);
  CHECK(e.contains(Ball::from_double(2.718281828459045)));
  CHECK_THROWS_AS(log(Ball(0), 64), DomainError);
}

TEST_CASE("parse encloses the decimal value") {
  Ball b = Ball::parse("0.1", 64);
  CHECK(oracle::contains(b, mpq_class(1, 10)));
  CHECK(b.rad() <= Mag::pow2(-66));
  Ball h = Ball::parse("0x1.8p-1", 64);
  CHECK(h.is_exact());
  CHECK(h.mid() == BigFloat(0.75));
}
