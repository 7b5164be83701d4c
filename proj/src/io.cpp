// SPDX-License-Identifier: Apache-2.0

#include "legq/io.hpp"

#include "json.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace legq {

namespace {

std::string mag_hex(const Mag& m) { return m.to_bigfloat().to_hex(); }

Mag parse_mag(std::string_view s) {
  if (s == "inf") return Mag::inf();
  BigFloat v = parse_hex_exact(s);
  if (v.sign() < 0) throw ParseError("negative radius");
  return Mag::upper(v);
}

std::string printed_radius(const Mag& m) {
  if (m.is_inf()) return "inf";
  if (m.is_zero()) return "0";
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.1RUe", m.raw());
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

nlohmann::ordered_json ball_obj(const Ball& b) {
  nlohmann::ordered_json j;
  j["mid"] = b.mid().to_hex();
  j["rad"] = mag_hex(b.rad());
  return j;
}

}  // namespace

BigFloat parse_hex_exact(std::string_view s) {
  if (s == "0") return BigFloat();
  std::string_view t = s;
  bool neg_sign = false;
  if (!t.empty() && t[0] == '-') {
    neg_sign = true;
    t.remove_prefix(1);
  }
  if (t.size() < 4 || t.substr(0, 2) != "0x") throw ParseError("not a hex literal: " + std::string(s));
  t.remove_prefix(2);
  size_t p = t.find('p');
  if (p == std::string_view::npos || p == 0) throw ParseError("not a hex literal: " + std::string(s));
  std::string mant(t.substr(0, p)), ex(t.substr(p + 1));
  mpz_class m;
  if (m.set_str(mant, 16) != 0 || m <= 0) throw ParseError("bad hex mantissa: " + std::string(s));
  long e = 0;
  try {
    size_t used = 0;
    e = std::stol(ex, &used);
    if (used != ex.size()) throw ParseError("bad exponent");
  } catch (const std::logic_error&) {
    throw ParseError("bad hex exponent: " + std::string(s));
  }
  if (neg_sign) m = -m;
  return BigFloat::from_mpz_2exp(m, e);
}

int decimal_digits(prec_t p) { return static_cast<int>(std::ceil(0.30103 * static_cast<double>(p))) + 3; }

std::string format_decimal(const Ball& b, prec_t p) {
  if (!b.mid().is_finite()) return "nan +/- inf";
  int digits = decimal_digits(p);
  std::string mid = b.mid().to_decimal(digits);
  Mag total = b.rad();
  if (!total.is_inf()) {
    // Distance from the binary midpoint to the printed decimal.
    Ball printed = Ball::parse(mid, b.mid().prec() + 4 * digits + 64);
    Ball diff = sub(printed, Ball(b.mid()), printed.mid().prec() + b.mid().prec() + 8);
    total += diff.mag_upper();
  }
  return mid + " +/- " + printed_radius(total);
}

Ball parse_decimal_ball(std::string_view s) {
  size_t k = s.find(" +/- ");
  if (k == std::string_view::npos) throw ParseError("expected 'mid +/- rad': " + std::string(s));
  std::string ms(s.substr(0, k)), rs(s.substr(k + 5));
  try {
    Ball mid = Ball::parse(ms, 4 * static_cast<prec_t>(ms.size()) + 64);
    if (rs == "inf") return Ball(mid.mid(), Mag::inf());
    mid.add_error(Mag::upper(BigFloat::parse(rs, 64, Round::Up)));
    return mid;
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

std::string ball_json(const Ball& b) { return ball_obj(b).dump(); }

std::string rule_to_text(const QuadratureRule& r) {
  std::ostringstream os;
  os << "# Gauss-Legendre rule n=" << r.n << " p=" << r.p << "\n";
  os << "# index node weight\n";
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    os << i << "  " << format_decimal(r.nodes[i], r.p) << "  " << format_decimal(r.weights[i], r.p) << "\n";
  }
  return os.str();
}

std::string rule_to_json(const QuadratureRule& r) {
  nlohmann::ordered_json j;
  j["format"] = "legq-rule";
  j["version"] = 1;
  j["n"] = r.n;
  j["p"] = r.p;
  j["generator"] = kGeneratorVersion;
  auto nodes = nlohmann::ordered_json::array(), weights = nlohmann::ordered_json::array();
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    nodes.push_back(ball_obj(r.nodes[i]));
    weights.push_back(ball_obj(r.weights[i]));
  }
  j["nodes"] = nodes;
  j["weights"] = weights;
  return j.dump(1) + "\n";
}

void write_rulefile(std::ostream& os, const QuadratureRule& r) {
  os << "legq-rule 1\n";
  os << "n " << r.n << "\n";
  os << "p " << r.p << "\n";
  os << "generator " << kGeneratorVersion << "\n";
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    os << i << ' ' << r.nodes[i].mid().to_hex() << ' ' << mag_hex(r.nodes[i].rad()) << ' '
       << r.weights[i].mid().to_hex() << ' ' << mag_hex(r.weights[i].rad()) << '\n';
  }
}

QuadratureRule read_rulefile(std::istream& is) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(is, line)) throw ParseError(std::string("rule file truncated before ") + what);
    return line;
  };
  if (next_line("header") != "legq-rule 1") throw ParseError("not a version 1 rule file");
  auto field = [&](const char* key) {
    std::string l = next_line(key);
    std::string prefix = std::string(key) + " ";
    if (l.rfind(prefix, 0) != 0) throw ParseError(std::string("expected field ") + key);
    return l.substr(prefix.size());
  };
  QuadratureRule r;
  try {
    r.n = std::stoul(field("n"));
    r.p = static_cast<prec_t>(std::stol(field("p")));
  } catch (const std::logic_error&) {
    throw ParseError("bad n or p in rule file");
  }
  field("generator");
  r.nodes.resize(r.n);
  r.weights.resize(r.n);
  for (size_t i = 0; i < r.n; ++i) {
    std::istringstream ls(next_line("record"));
    size_t idx;
    std::string nm, nr, wm, wr, extra;
    if (!(ls >> idx >> nm >> nr >> wm >> wr) || (ls >> extra) || idx != i) {
      throw ParseError("bad record " + std::to_string(i));
    }
    r.nodes[i] = Ball(parse_hex_exact(nm), parse_mag(nr));
    r.weights[i] = Ball(parse_hex_exact(wm), parse_mag(wr));
  }
  if (std::getline(is, line) && !line.empty()) throw ParseError("trailing data in rule file");
  return r;
}

}  // namespace legq
