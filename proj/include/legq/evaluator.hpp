// SPDX-License-Identifier: Apache-2.0
//
// Certified evaluation of P_n and P'_n on balls in [-1, 1]. The midpoint is
// evaluated with whichever of the four methods is cheapest under a simple
// cost model; the input radius is then propagated with the global envelope
// bounds for |P'_n| and |P''_n|.

#pragma once

#include "legq/ball.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace legq {

enum class Method { Rec, Asym, Zero, One };
enum class DerivStrategy { PairMixed, DirectOne, None };
enum class Want { Value, ValueAndDeriv, Deriv };

const char* method_name(Method m);
/// Accepts "rec", "asym", "zero", "one". Throws std::invalid_argument.
Method parse_method(std::string_view s);
const char* deriv_strategy_name(DerivStrategy s);

struct MethodChoice {
  Method method = Method::Rec;
  std::optional<unsigned long> K;  // nullopt: inapplicable
  long p_A = 0;
  DerivStrategy deriv_strategy = DerivStrategy::None;
  double cost = 0;
};

/// Absolute target used for point evaluations at precision p.
prec_t eval_target_bits(unsigned long n, prec_t p);

/// Candidate methods with their cost estimates, cheapest first. Inside the
/// basecase box the recurrence comes first regardless of cost; elsewhere it
/// is kept only as the last resort. Inapplicable methods are omitted.
std::vector<MethodChoice> rank_methods(unsigned long n, double x, prec_t p, Want want = Want::Value);

/// Cheapest applicable method for 0 <= x <= 1.
MethodChoice select_method(unsigned long n, double x, prec_t p, Want want = Want::Value);

/// Upper bounds (B1, B2) for |P'_n| and |P''_n| over [lo, hi] ⊆ [-1, 1].
std::pair<BigFloat, BigFloat> deriv_envelope_bounds(unsigned long n, const BigFloat& lo, const BigFloat& hi);

struct EvalRequest {
  unsigned long n = 0;
  Ball x;
  prec_t p = 64;
  Want want = Want::Value;
  /// When set, point evaluations are repeated with more bits until the
  /// radius is small relative to the value (once more at 2p if the ball
  /// still contains zero). Otherwise the error is about 2^-p absolute.
  bool relative = true;
  /// Forces a method. A forced ASYM whose series cannot reach the target is
  /// cut at its smallest term and returns a wider ball; otherwise an
  /// inapplicable forced method throws Inapplicable.
  std::optional<Method> method;
  std::optional<DerivStrategy> deriv_strategy;
};

struct EvalResult {
  std::optional<Ball> value;
  std::optional<Ball> deriv;
  /// Method used at the midpoint; nullopt for closed forms (x = 0, x = ±1,
  /// n <= 1).
  std::optional<Method> method;
  DerivStrategy deriv_strategy = DerivStrategy::None;
};

/// Throws DomainError unless the ball lies in [-1, 1].
EvalResult legendre_eval(const EvalRequest& req);

/// Shorthands.
Ball legendre_p(unsigned long n, const Ball& x, prec_t p);
Ball legendre_dp(unsigned long n, const Ball& x, prec_t p);

}  // namespace legq
