#pragma once
// Exact integer / rational arithmetic aliases and small helpers used
// throughout the library.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace toridn {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int den(const Rat& q) { return boost::multiprecision::denominator(q); }

inline int sgn(const Int& a) { return a.sign(); }
inline int sgn(const Rat& q) { return q.sign(); }

inline Int iabs(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int igcd(Int a, Int b) { return boost::multiprecision::gcd(a, b); }

inline Int ipow(Int base, unsigned e) {
  Int r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// Largest e with p^e | a (a != 0).
inline unsigned valuation(Int a, const Int& p) {
  if (a == 0) throw std::invalid_argument("valuation of zero");
  unsigned v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

// Valuation of a nonzero rational at p (can be negative).
inline long rat_valuation(const Rat& q, const Int& p) {
  if (q == 0) throw std::invalid_argument("valuation of zero");
  return (long)valuation(num(q), p) - (long)valuation(den(q), p);
}

inline Int powmod(Int base, Int e, const Int& m) {
  return boost::multiprecision::powm(base, e, m);
}

inline Int mod(Int a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  return r;
}

// Parses "n", "-n" or "p/q". Returns nullopt on malformed input.
std::optional<Rat> parse_rat(const std::string& s);
std::string rat_to_string(const Rat& q);

}  // namespace toridn
