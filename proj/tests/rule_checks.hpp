// SPDX-License-Identifier: Apache-2.0
//
// Structural checks and closed-form references for quadrature rules, shared
// by the unit and acceptance tests.

#pragma once

#include "oracles.hpp"

#include "legq/quadrature.hpp"

#include <string>
#include <vector>

namespace oracle {

/// Empty string if the rule passes: nodes strictly increasing and inside
/// (-1, 1), exact mirror symmetry, positive weights, and the weight sum
/// within 2 +- (sum of radii + 2^(-p+4)).
inline std::string rule_structure_problem(const legq::QuadratureRule& r) {
  using namespace legq;
  const size_t n = r.nodes.size();
  if (n != r.n || r.weights.size() != n) return "size mismatch";
  for (size_t i = 0; i < n; ++i) {
    const Ball& x = r.nodes[i];
    if (!(x.lower() > -1 && x.upper() < 1)) return "node outside (-1, 1) at " + std::to_string(i);
    if (i + 1 < n && !(x.upper() < r.nodes[i + 1].lower())) return "nodes not disjoint/increasing at " + std::to_string(i);
    const Ball& y = r.nodes[n - 1 - i];
    if (!(x.mid() == neg(y.mid()) && x.rad() == y.rad())) return "node symmetry at " + std::to_string(i);
    const Ball& w = r.weights[i];
    if (!w.is_positive()) return "weight not positive at " + std::to_string(i);
    const Ball& v = r.weights[n - 1 - i];
    if (!(w.mid() == v.mid() && w.rad() == v.rad())) return "weight symmetry at " + std::to_string(i);
  }
  // Exact rational sum of the midpoints against the allowed band.
  mpq_class s = 0, radii = 0;
  for (const auto& w : r.weights) {
    s += to_mpq(w.mid());
    radii += to_mpq(w.rad());
  }
  mpq_class e = radii + to_mpq(Mag::pow2(-static_cast<long>(r.p) + 4));
  if (abs(s - 2) > e) return "weight sum outside 2 +- E";
  return "";
}

/// Closed-form positive nodes and weights for n <= 5, largest node first,
/// evaluated from radicals at `prec` bits.
inline std::vector<std::pair<Real, Real>> closed_form_rule(unsigned n, mpfr_prec_t prec) {
  std::vector<std::pair<Real, Real>> out;
  auto make = [&](auto fx, auto fw) {
    Real x(prec), w(prec);
    fx(x.get());
    fw(w.get());
    out.emplace_back(x, w);
  };
  auto sqrt_q = [&](mpfr_ptr r, long a, long b) {  // sqrt(a / b)
    mpfr_set_si(r, a, MPFR_RNDN);
    mpfr_div_si(r, r, b, MPFR_RNDN);
    mpfr_sqrt(r, r, MPFR_RNDN);
  };
  switch (n) {
    case 1:
      make([](mpfr_ptr x) { mpfr_set_ui(x, 0, MPFR_RNDN); }, [](mpfr_ptr w) { mpfr_set_ui(w, 2, MPFR_RNDN); });
      break;
    case 2:
      make([&](mpfr_ptr x) { sqrt_q(x, 1, 3); }, [](mpfr_ptr w) { mpfr_set_ui(w, 1, MPFR_RNDN); });
      break;
    case 3:
      make([&](mpfr_ptr x) { sqrt_q(x, 3, 5); }, [](mpfr_ptr w) { mpfr_set_ui(w, 5, MPFR_RNDN); mpfr_div_ui(w, w, 9, MPFR_RNDN); });
      make([](mpfr_ptr x) { mpfr_set_ui(x, 0, MPFR_RNDN); }, [](mpfr_ptr w) { mpfr_set_ui(w, 8, MPFR_RNDN); mpfr_div_ui(w, w, 9, MPFR_RNDN); });
      break;
    case 4:
      // x = sqrt(3/7 +- (2/7) sqrt(6/5)), w = (18 -+ sqrt 30) / 36
      for (int s : {1, -1}) {
        make(
            [&](mpfr_ptr x) {
              sqrt_q(x, 6, 5);
              mpfr_mul_si(x, x, 2 * s, MPFR_RNDN);
              mpfr_add_ui(x, x, 3, MPFR_RNDN);
              mpfr_div_ui(x, x, 7, MPFR_RNDN);
              mpfr_sqrt(x, x, MPFR_RNDN);
            },
            [&](mpfr_ptr w) {
              mpfr_sqrt_ui(w, 30, MPFR_RNDN);
              mpfr_mul_si(w, w, -s, MPFR_RNDN);
              mpfr_add_ui(w, w, 18, MPFR_RNDN);
              mpfr_div_ui(w, w, 36, MPFR_RNDN);
            });
      }
      break;
    case 5:
      // x = sqrt(5 +- 2 sqrt(10/7)) / 3, w = (322 -+ 13 sqrt 70) / 900
      for (int s : {1, -1}) {
        make(
            [&](mpfr_ptr x) {
              sqrt_q(x, 10, 7);
              mpfr_mul_si(x, x, 2 * s, MPFR_RNDN);
              mpfr_add_ui(x, x, 5, MPFR_RNDN);
              mpfr_sqrt(x, x, MPFR_RNDN);
              mpfr_div_ui(x, x, 3, MPFR_RNDN);
            },
            [&](mpfr_ptr w) {
              mpfr_sqrt_ui(w, 70, MPFR_RNDN);
              mpfr_mul_si(w, w, -13 * s, MPFR_RNDN);
              mpfr_add_ui(w, w, 322, MPFR_RNDN);
              mpfr_div_ui(w, w, 900, MPFR_RNDN);
            });
      }
      make([](mpfr_ptr x) { mpfr_set_ui(x, 0, MPFR_RNDN); },
           [](mpfr_ptr w) { mpfr_set_ui(w, 128, MPFR_RNDN); mpfr_div_ui(w, w, 225, MPFR_RNDN); });
      break;
    default:
      break;
  }
  return out;
}

/// |ball.mid - v| + ball.rad, rounded to double (for tolerance checks).
inline double distance_bound(const legq::Ball& b, const Real& v) {
  Real d(mpfr_get_prec(v.get()) + 64);
  mpfr_sub(d.get(), b.mid().raw(), v.get(), MPFR_RNDN);
  mpfr_abs(d.get(), d.get(), MPFR_RNDN);
  return mpfr_get_d(d.get(), MPFR_RNDU) + b.rad().to_double();
}

/// Same as distance_bound but as log2, to survive tiny values.
inline double log2_distance_bound(const legq::Ball& b, const Real& v) {
  Real d(mpfr_get_prec(v.get()) + 64);
  mpfr_sub(d.get(), b.mid().raw(), v.get(), MPFR_RNDN);
  mpfr_abs(d.get(), d.get(), MPFR_RNDN);
  Real r(64);
  mpfr_set(r.get(), b.rad().to_bigfloat().raw(), MPFR_RNDU);
  mpfr_add(d.get(), d.get(), r.get(), MPFR_RNDU);
  if (mpfr_zero_p(d.get())) return -1e9;
  mpfr_log2(d.get(), d.get(), MPFR_RNDU);
  return mpfr_get_d(d.get(), MPFR_RNDU);
}

}  // namespace oracle
