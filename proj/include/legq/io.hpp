// SPDX-License-Identifier: Apache-2.0
//
// Serialization of balls and quadrature rules: exact hexadecimal literals
// for machines, decimal for people.

#pragma once

#include "legq/ball.hpp"
#include "legq/quadrature.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace legq {

inline constexpr const char* kGeneratorVersion = "legq 0.1.0";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the output of BigFloat::to_hex exactly. Throws ParseError.
BigFloat parse_hex_exact(std::string_view s);

/// Decimal digits printed for a p-bit result: ceil(0.30103 p) + 3.
int decimal_digits(prec_t p);

/// "mid +/- rad" in decimal. The printed radius (two significant digits,
/// rounded up) also covers the rounding of the printed midpoint, so the
/// printed ball contains the input ball.
std::string format_decimal(const Ball& b, prec_t p);

/// Inverse of format_decimal: the ball it describes.
Ball parse_decimal_ball(std::string_view s);

/// {"mid": "<hex>", "rad": "<hex>"} as a JSON fragment.
std::string ball_json(const Ball& b);

std::string rule_to_text(const QuadratureRule& r);
std::string rule_to_json(const QuadratureRule& r);

/// RuleFileV1: a header followed by one record per index,
///   legq-rule 1
///   n <n>
///   p <p>
///   generator <name version>
///   <index> <node mid> <node rad> <weight mid> <weight rad>
/// with every number an exact hexadecimal literal.
void write_rulefile(std::ostream& os, const QuadratureRule& r);
QuadratureRule read_rulefile(std::istream& is);

}  // namespace legq
