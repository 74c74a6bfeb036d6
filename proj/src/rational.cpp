#include "tpfr/rational.hpp"

#include <cmath>

#include "tpfr/errors.hpp"

namespace tpfr {

std::string format_rational(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

mpq_class parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const auto parse_int = [&](std::string_view s) {
    if (s.empty()) throw Error("malformed rational '" + std::string(text) + "'");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw Error("malformed rational '" + std::string(text) + "'");
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw Error("malformed rational '" + std::string(text) + "'");
    }
    return mpz_class(std::string(s[0] == '+' ? s.substr(1) : s));
  };
  if (slash == std::string_view::npos) return mpq_class(parse_int(text));
  const mpz_class num = parse_int(text.substr(0, slash));
  const mpz_class den = parse_int(text.substr(slash + 1));
  if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

namespace {

// x = mantissa * 2^exp with mantissa in [0.5, 1).
struct Split {
  double mantissa;
  long exp;
};

Split split(const mpz_class& x) {
  long e = 0;
  const double m = mpz_get_d_2exp(&e, x.get_mpz_t());
  return {m, e};
}

}  // namespace

double log_ratio(const mpz_class& a, const mpz_class& b) {
  const Split sa = split(a);
  const Split sb = split(b);
  return std::log(sa.mantissa / sb.mantissa) + static_cast<double>(sa.exp - sb.exp) * std::log(2.0);
}

double ratio(const mpz_class& a, const mpz_class& b) {
  const Split sa = split(a);
  const Split sb = split(b);
  return std::ldexp(sa.mantissa / sb.mantissa, static_cast<int>(sa.exp - sb.exp));
}

}  // namespace tpfr
