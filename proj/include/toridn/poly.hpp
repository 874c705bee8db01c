#pragma once
// Dense univariate polynomials over Q: arithmetic, resultants, Sturm
// sequences and real root isolation.

#include <utility>
#include <vector>

#include "toridn/rat.hpp"

namespace toridn {

// Coefficients low-to-high; invariant: empty or nonzero leading coefficient.
struct QPoly {
  std::vector<Rat> c;

  QPoly() = default;
  explicit QPoly(std::vector<Rat> coeffs) : c(std::move(coeffs)) { trim(); }
  static QPoly constant(const Rat& a) { return QPoly({a}); }
  static QPoly x() { return QPoly({Rat(0), Rat(1)}); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return (int)c.size() - 1; }  // -1 for zero
  const Rat& lead() const { return c.back(); }
  Rat coeff(size_t i) const { return i < c.size() ? c[i] : Rat(0); }

  Rat eval(const Rat& x) const;
  QPoly derivative() const;
  QPoly monic() const;

  bool operator==(const QPoly& o) const { return c == o.c; }
};

QPoly operator+(const QPoly& a, const QPoly& b);
QPoly operator-(const QPoly& a, const QPoly& b);
QPoly operator*(const QPoly& a, const QPoly& b);
QPoly operator*(const Rat& s, const QPoly& a);

// Euclidean division over Q; b nonzero.
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
QPoly poly_gcd(QPoly a, QPoly b);  // monic gcd
QPoly poly_mod(const QPoly& a, const QPoly& m);

Int resultant_int(const QPoly& a, const QPoly& b);  // requires integer coeffs
Rat resultant(const QPoly& a, const QPoly& b);
Rat discriminant(const QPoly& f);

bool is_squarefree(const QPoly& f);
bool is_irreducible_over_q(const QPoly& f);  // degree <= 4 exact, else heuristic

// Number of distinct real roots (whole line).
int count_real_roots(const QPoly& f);
// Number of distinct real roots in (a, b].
int count_real_roots_in(const QPoly& f, const Rat& a, const Rat& b);

// Disjoint isolating intervals (lo, hi], one per distinct real root, ascending.
std::vector<std::pair<Rat, Rat>> isolate_real_roots(const QPoly& f);

// Sign of g at the unique root of squarefree f inside (lo, hi]; g(root) != 0
// is required unless g vanishes identically on the root (gcd test is applied).
// Returns 0 iff f's root is a root of g.
int sign_at_root(const QPoly& f, std::pair<Rat, Rat> iv, const QPoly& g);

// Monic integer polynomial with the same splitting behaviour: for f with
// rational coefficients returns (g, c) where g(x) = c^deg * f(x/c) is monic
// with integer coefficients.
std::pair<QPoly, Int> make_monic_integer(const QPoly& f);

}  // namespace toridn
