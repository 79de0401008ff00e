#ifndef MHRES_RATIONAL_HPP
#define MHRES_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mhres/common.hpp"

namespace mhres {

// Probabilities and tree weights are kept as exact rationals so that weight
// conservation, partition closure and rescaling identities hold exactly, not
// just within floating-point tolerance.
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::rational<BigInt>;

inline double toDouble(const Rat& r) {
  return boost::rational_cast<double>(r);
}

// Exact conversion: every finite double is m * 2^e with integer m.
inline Rat ratFromDouble(double x) {
  if (!std::isfinite(x)) throw Error("ratFromDouble: non-finite value");
  if (x == 0.0) return Rat(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
  // 53 doublings make the mantissa integral
  std::int64_t mi = static_cast<std::int64_t>(std::ldexp(m, 53));
  exp -= 53;
  Rat r{BigInt(mi)};
  if (exp > 0) {
    r *= Rat(BigInt(1) << exp);
  } else if (exp < 0) {
    r /= Rat(BigInt(1) << (-exp));
  }
  return r;
}

// Accepts "p/q", integer, or decimal strings.
inline Rat ratFromString(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw Error("ratFromString: zero denominator in '" + s + "'");
    return Rat(num, den);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rat(BigInt(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  bool neg = false;
  if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
    neg = digits[0] == '-';
    digits = digits.substr(1);
  }
  if (digits.empty()) throw Error("ratFromString: bad number '" + s + "'");
  std::size_t firstNonZero = digits.find_first_not_of('0');
  digits = firstNonZero == std::string::npos ? "0" : digits.substr(firstNonZero);
  BigInt num(digits);
  BigInt den = 1;
  for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
  return Rat(neg ? -num : num, den);
}

inline std::string ratToString(const Rat& r) {
  std::string s = r.numerator().str();
  if (r.denominator() != 1) s += "/" + r.denominator().str();
  return s;
}

// Scales the entries to sum to one. The relative proportions are preserved
// exactly.
inline void normalizeToOne(std::vector<Rat>& v) {
  Rat total(0);
  for (const Rat& r : v) {
    if (r < Rat(0)) throw Error("normalizeToOne: negative weight");
    total += r;
  }
  if (total == Rat(0)) throw Error("normalizeToOne: weights sum to zero");
  for (Rat& r : v) r /= total;
}

}  // namespace mhres

#endif
