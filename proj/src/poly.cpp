#include "toridn/poly.hpp"

#include <algorithm>

#include "toridn/primes.hpp"

namespace toridn {

namespace {

Rat rpow(const Rat& b, unsigned e) {
  Rat r = 1, x = b;
  unsigned k = e;
  while (k) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

}  // namespace

Rat QPoly::eval(const Rat& x) const {
  Rat r = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

QPoly QPoly::derivative() const {
  std::vector<Rat> d;
  for (size_t i = 1; i < c.size(); ++i) d.push_back(Rat(i) * c[i]);
  return QPoly(std::move(d));
}

QPoly QPoly::monic() const {
  if (is_zero()) return *this;
  std::vector<Rat> d = c;
  for (auto& x : d) x /= c.back();
  return QPoly(std::move(d));
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
  for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
  return QPoly(std::move(r));
}

QPoly operator-(const QPoly& a, const QPoly& b) {
  std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
  for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
  return QPoly(std::move(r));
}

QPoly operator*(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return QPoly();
  std::vector<Rat> r(a.c.size() + b.c.size() - 1, Rat(0));
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
  return QPoly(std::move(r));
}

QPoly operator*(const Rat& s, const QPoly& a) {
  std::vector<Rat> r = a.c;
  for (auto& x : r) x *= s;
  return QPoly(std::move(r));
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw std::invalid_argument("poly division by zero");
  QPoly rem = a;
  std::vector<Rat> q(a.c.size() > b.c.size() ? a.c.size() - b.c.size() + 1 : 1,
                     Rat(0));
  while (!rem.is_zero() && rem.degree() >= b.degree()) {
    int k = rem.degree() - b.degree();
    Rat f = rem.lead() / b.lead();
    q[k] += f;
    for (size_t i = 0; i < b.c.size(); ++i) rem.c[i + k] -= f * b.c[i];
    rem.trim();
  }
  return {QPoly(std::move(q)), rem};
}

QPoly poly_gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = divmod(a, b).second;
    a = b;
    b = r;
  }
  return a.is_zero() ? a : a.monic();
}

QPoly poly_mod(const QPoly& a, const QPoly& m) { return divmod(a, m).second; }

Rat resultant(const QPoly& a0, const QPoly& b0) {
  QPoly a = a0, b = b0;
  if (a.is_zero() || b.is_zero()) return 0;
  Rat res = 1;
  while (b.degree() > 0) {
    QPoly r = divmod(a, b).second;
    if (r.is_zero()) return 0;
    if ((a.degree() % 2) && (b.degree() % 2)) res = -res;
    res *= rpow(b.lead(), a.degree() - r.degree());
    a = b;
    b = r;
  }
  res *= rpow(b.lead(), a.degree());
  return res;
}

Int resultant_int(const QPoly& a, const QPoly& b) {
  Rat r = resultant(a, b);
  if (den(r) != 1) throw std::logic_error("non-integer resultant");
  return num(r);
}

Rat discriminant(const QPoly& f) {
  int n = f.degree();
  if (n < 1) throw std::invalid_argument("discriminant of constant");
  if (n == 1) return 1;
  Rat r = resultant(f, f.derivative()) / f.lead();
  if (((n * (n - 1)) / 2) % 2) r = -r;
  return r;
}

bool is_squarefree(const QPoly& f) {
  return poly_gcd(f, f.derivative()).degree() <= 0;
}

int count_real_roots(const QPoly& f) {
  // A Cauchy bound works for the whole line.
  if (f.degree() <= 0) return 0;
  Rat m = 0;
  for (auto& a : f.c) {
    Rat t = a / f.lead();
    if (t < 0) t = -t;
    if (t > m) m = t;
  }
  Rat bound = m + 1;
  return count_real_roots_in(f, -bound, bound);
}

namespace {

std::vector<QPoly> sturm_sequence(const QPoly& f) {
  QPoly g = divmod(f, poly_gcd(f, f.derivative())).first;  // squarefree part
  std::vector<QPoly> s{g, g.derivative()};
  while (!s.back().is_zero() && s.back().degree() > 0) {
    QPoly r = divmod(s[s.size() - 2], s.back()).second;
    if (r.is_zero()) break;
    s.push_back(Rat(-1) * r);
  }
  return s;
}

int sign_variations(const std::vector<QPoly>& s, const Rat& x) {
  int var = 0, last = 0;
  for (auto& p : s) {
    int sg = sgn(p.eval(x));
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++var;
    last = sg;
  }
  return var;
}

}  // namespace

int count_real_roots_in(const QPoly& f, const Rat& a, const Rat& b) {
  if (f.degree() <= 0) return 0;
  auto s = sturm_sequence(f);
  return sign_variations(s, a) - sign_variations(s, b);
}

std::vector<std::pair<Rat, Rat>> isolate_real_roots(const QPoly& f) {
  std::vector<std::pair<Rat, Rat>> out;
  if (f.degree() <= 0) return out;
  Rat m = 0;
  for (auto& a : f.c) {
    Rat t = a / f.lead();
    if (t < 0) t = -t;
    if (t > m) m = t;
  }
  Rat lo = -(m + 1), hi = m + 1;
  auto s = sturm_sequence(f);
  auto count = [&](const Rat& a, const Rat& b) {
    return sign_variations(s, a) - sign_variations(s, b);
  };
  std::vector<std::pair<Rat, Rat>> stack{{lo, hi}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    int n = count(a, b);
    if (n == 0) continue;
    if (n == 1) {
      out.emplace_back(a, b);
      continue;
    }
    Rat mid = (a + b) / 2;
    stack.push_back({mid, b});
    stack.push_back({a, mid});
  }
  std::sort(out.begin(), out.end(),
            [](auto& x, auto& y) { return x.first < y.first; });
  return out;
}

int sign_at_root(const QPoly& f, std::pair<Rat, Rat> iv, const QPoly& g) {
  QPoly common = poly_gcd(f, g);
  if (common.degree() > 0 &&
      count_real_roots_in(common, iv.first, iv.second) > 0)
    return 0;
  auto [lo, hi] = iv;
  while (count_real_roots_in(g, lo, hi) > 0) {
    Rat mid = (lo + hi) / 2;
    if (count_real_roots_in(f, lo, mid) == 1)
      hi = mid;
    else
      lo = mid;
  }
  int sg = sgn(g.eval(hi));
  if (sg == 0) throw std::logic_error("sign_at_root: boundary hit");
  return sg;
}

std::pair<QPoly, Int> make_monic_integer(const QPoly& f) {
  if (f.is_zero()) throw std::invalid_argument("make_monic_integer(0)");
  Int l = 1;
  for (auto& a : f.c) l = l / igcd(l, den(a)) * den(a);
  std::vector<Rat> w = f.c;
  for (auto& a : w) a *= l;
  QPoly g(std::move(w));  // integer coefficients now
  Int an = num(g.lead());
  int n = g.degree();
  // h(x) = an^(n-1) g(x/an) is monic with integer coefficients.
  std::vector<Rat> h(n + 1);
  h[(size_t)n] = 1;
  for (int i = 0; i < n; ++i) h[i] = g.c[i] * rpow(Rat(an), (unsigned)(n - 1 - i));
  QPoly out(std::move(h));
  for (auto& a : out.c)
    if (den(a) != 1) throw std::logic_error("make_monic_integer: not integral");
  return {out, an};
}

bool is_irreducible_over_q(const QPoly& f0) {
  int n = f0.degree();
  if (n <= 0) return false;
  if (n == 1) return true;
  auto [f, scale] = make_monic_integer(f0);
  (void)scale;
  // Rational roots of a monic integer polynomial are integer divisors of f(0).
  Int c0 = num(f.coeff(0));
  if (c0 == 0) return false;
  for (auto& [p, e] : factorize(c0)) (void)p, (void)e;
  std::vector<Int> divs{1};
  for (auto& [p, e] : factorize(c0)) {
    std::vector<Int> next;
    Int pk = 1;
    for (unsigned i = 0; i <= e; ++i) {
      for (auto& d : divs) next.push_back(d * pk);
      pk *= p;
    }
    divs = next;
  }
  for (auto& d : divs)
    for (int s : {1, -1})
      if (f.eval(Rat(s * d)) == 0) return false;
  if (n <= 3) return true;
  if (n == 4) {
    // Check splittings into two monic integer quadratics.
    Rat a3 = f.coeff(3), a2 = f.coeff(2), a1 = f.coeff(1), a0 = f.coeff(0);
    for (auto& q : divs)
      for (int sq : {1, -1}) {
        Int qq = sq * q;
        if (qq == 0) continue;
        if (num(a0) % qq != 0) continue;
        Int ss = num(a0) / qq;
        // p+r = a3, pr = a2-q-s, p*s+q*r = a1
        Rat sum = a3, prod = a2 - Rat(qq) - Rat(ss);
        Rat disc = sum * sum - 4 * prod;
        if (disc < 0) continue;
        Int d2 = num(disc);
        if (den(disc) != 1) continue;
        Int rt = boost::multiprecision::sqrt(d2);
        if (rt * rt != d2) continue;
        for (int pm : {1, -1}) {
          Rat p = (sum + Rat(pm * rt)) / 2;
          Rat r = sum - p;
          if (den(p) != 1) continue;
          if (p * Rat(ss) + Rat(qq) * r == a1) return false;
        }
      }
    return true;
  }
  return true;  // higher degrees: callers supply declared structure
}

}  // namespace toridn
