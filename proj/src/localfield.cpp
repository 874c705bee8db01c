#include "toridn/localfield.hpp"

#include <algorithm>
#include <cassert>

#include "toridn/primes.hpp"

namespace toridn {

namespace {

// ----- polynomials over F_p (coefficients as cpp_int reduced mod p) -----

using FpPoly = std::vector<Int>;  // low to high, trimmed

FpPoly fp_trim(FpPoly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

FpPoly fp_mul(const FpPoly& a, const FpPoly& b, const Int& p) {
  if (a.empty() || b.empty()) return {};
  FpPoly c(a.size() + b.size() - 1, Int(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = mod(c[i + j] + a[i] * b[j], p);
  return fp_trim(c);
}

FpPoly fp_mod(FpPoly a, const FpPoly& m, const Int& p) {
  a = fp_trim(a);
  Int lead_inv = powmod(m.back(), p - 2, p);
  while (a.size() >= m.size()) {
    Int c = mod(a.back() * lead_inv, p);
    size_t shift = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i)
      a[shift + i] = mod(a[shift + i] - c * m[i], p);
    a = fp_trim(a);
  }
  return a;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, const Int& p) {
  a = fp_trim(a);
  b = fp_trim(b);
  while (!b.empty()) {
    FpPoly r = fp_mod(a, b, p);
    a = b;
    b = r;
  }
  if (!a.empty()) {
    Int inv = powmod(a.back(), p - 2, p);
    for (auto& c : a) c = mod(c * inv, p);
  }
  return a;
}

FpPoly fp_powmod(FpPoly base, Int e, const FpPoly& m, const Int& p) {
  FpPoly r{Int(1)};
  base = fp_mod(base, m, p);
  while (e > 0) {
    if (mod(e, 2) == 1) r = fp_mod(fp_mul(r, base, p), m, p);
    base = fp_mod(fp_mul(base, base, p), m, p);
    e /= 2;
  }
  return r;
}

FpPoly fp_from(const QPoly& g, const Int& p) {
  FpPoly a;
  for (auto& c : g.c) {
    if (den(c) % p == 0) throw std::logic_error("fp_from: denominator not prime to p");
    a.push_back(mod(num(c) * powmod(mod(den(c), p), p - 2, p), p));
  }
  return fp_trim(a);
}

// Degrees of the irreducible factors of a squarefree g mod p.
std::vector<int> ddf_degrees(const QPoly& g, const Int& p) {
  FpPoly f = fp_from(g, p);
  std::vector<int> out;
  FpPoly x{Int(0), Int(1)};
  FpPoly w = fp_mod(x, f, p);
  int d = 0;
  while ((int)f.size() - 1 > 0) {
    ++d;
    w = fp_powmod(w, p, f, p);
    FpPoly diff = w;
    diff.resize(std::max<size_t>(diff.size(), 2), Int(0));
    diff[1] = mod(diff[1] - 1, p);
    FpPoly h = fp_gcd(fp_trim(diff), f, p);
    if (!h.empty() && h.size() > 1) {
      int hdeg = (int)h.size() - 1;
      for (int i = 0; i < hdeg / d; ++i) out.push_back(d);
      // divide f by h
      FpPoly q;  // exact division
      {
        FpPoly rem = f;
        Int linv = powmod(h.back(), p - 2, p);
        q.assign(f.size() - h.size() + 1, Int(0));
        while (rem.size() >= h.size() && !(rem.size() == 1 && rem[0] == 0)) {
          Int c = mod(rem.back() * linv, p);
          size_t shift = rem.size() - h.size();
          q[shift] = c;
          for (size_t i = 0; i < h.size(); ++i)
            rem[shift + i] = mod(rem[shift + i] - c * h[i], p);
          rem = fp_trim(rem);
          if (rem.empty()) break;
        }
      }
      f = fp_trim(q);
      w = fp_mod(w, f, p);
    }
    if (2 * (d + 1) > (int)f.size() - 1 && (int)f.size() - 1 > 0) {
      out.push_back((int)f.size() - 1);  // remaining factor is irreducible
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool fp_irreducible(const FpPoly& f, const Int& p) {
  int n = (int)f.size() - 1;
  FpPoly x{Int(0), Int(1)};
  // x^(p^n) == x mod f, and x^(p^(n/l)) - x coprime to f for prime l | n.
  FpPoly w = x;
  for (int i = 0; i < n; ++i) w = fp_powmod(w, p, f, p);
  FpPoly diff = w;
  diff.resize(std::max<size_t>(diff.size(), 2), Int(0));
  diff[1] = mod(diff[1] - 1, p);
  if (!fp_trim(diff).empty()) return false;
  for (int l = 2; l <= n; ++l) {
    if (n % l) continue;
    bool lp = true;
    for (int q = 2; q * q <= l; ++q)
      if (l % q == 0) lp = false;
    if (!lp) continue;
    FpPoly v = x;
    for (int i = 0; i < n / l; ++i) v = fp_powmod(v, p, f, p);
    FpPoly d2 = v;
    d2.resize(std::max<size_t>(d2.size(), 2), Int(0));
    d2[1] = mod(d2[1] - 1, p);
    FpPoly gg = fp_gcd(fp_trim(d2), f, p);
    if (gg.size() > 1) return false;
  }
  return true;
}

// ----- finite-precision local ring models -----
//
// Elements are coordinate vectors mod p^K in Z_p[t]/(t^deg - red(t)) where
// red is the reduction rule.  Two kinds: unramified of residue degree deg
// (modpoly irreducible mod p), and ramified quadratic t^2 = d with either
// v_p(d) = 1 (Eisenstein) or p = 2, d = 3 mod 4.  In both quadratic cases
// the ring is the maximal order, so root counting in the model is root
// counting in the field.

struct Model {
  Int p;
  int K = 0;  // coordinate precision p^K
  Int pK;
  int deg = 1;
  int e = 1;                // ramification of the model field
  std::vector<Int> red;     // t^deg = red[0] + red[1] t + ...
  Int eis_d = 0;            // ramified case: t^2 = eis_d
  long vbig() const { return (long)e * K + 64; }
};

using Elem = std::vector<Int>;  // size deg, entries in [0, pK)

Elem e_zero(const Model& m) { return Elem(m.deg, Int(0)); }

Elem e_scalar(const Model& m, const Int& c) {
  Elem r = e_zero(m);
  r[0] = mod(c, m.pK);
  return r;
}

Elem e_add(const Model& m, const Elem& a, const Elem& b) {
  Elem r(m.deg);
  for (int i = 0; i < m.deg; ++i) r[i] = mod(a[i] + b[i], m.pK);
  return r;
}

Elem e_mul(const Model& m, const Elem& a, const Elem& b) {
  std::vector<Int> prod(2 * m.deg - 1, Int(0));
  for (int i = 0; i < m.deg; ++i)
    for (int j = 0; j < m.deg; ++j) prod[i + j] = mod(prod[i + j] + a[i] * b[j], m.pK);
  for (int d = 2 * m.deg - 2; d >= m.deg; --d) {
    Int c = prod[d];
    if (c == 0) continue;
    prod[d] = 0;
    for (int i = 0; i < m.deg; ++i)
      prod[d - m.deg + i] = mod(prod[d - m.deg + i] + c * m.red[i], m.pK);
  }
  prod.resize(m.deg);
  return prod;
}

// Valuation in the model field, normalized to the uniformizer (v(p) = e);
// values at or beyond working precision collapse to vbig().
long e_val(const Model& m, const Elem& a) {
  if (m.e == 1) {
    long v = m.vbig();
    for (auto& c : a)
      if (c != 0) v = std::min(v, (long)valuation(c, m.p));
    return v;  // nonzero coordinates in [1, p^K) have valuation < K
  }
  // ramified quadratic: v = v_p(norm), norm = a0^2 - d a1^2 computed exactly
  Int n = a[0] * a[0] - m.eis_d * a[1] * a[1];
  if (n == 0) return m.vbig();
  long v = (long)valuation(n, m.p);
  return v >= 2 * m.K - 1 ? m.vbig() : v;
}

// Evaluate a monic integer polynomial (given by Int coefficients) at x.
Elem e_eval(const Model& m, const std::vector<Int>& coef, const Elem& x) {
  Elem acc = e_scalar(m, coef.back());
  for (int i = (int)coef.size() - 2; i >= 0; --i)
    acc = e_add(m, e_mul(m, acc, x), e_scalar(m, coef[i]));
  return acc;
}

Model make_unram(const Int& p, int deg, int K) {
  Model m;
  m.p = p;
  m.K = K;
  m.pK = ipow(p, (unsigned)K);
  m.deg = deg;
  m.e = 1;
  if (deg == 1) {
    m.red = {Int(0)};
    return m;
  }
  // find monic irreducible t^deg + a t + b mod p
  for (Int b = 0; b < p; ++b)
    for (Int a = 0; a < p; ++a) {
      FpPoly f(deg + 1, Int(0));
      f[0] = b;
      f[1] = mod(a, p);
      f[deg] = 1;
      f = fp_trim(f);
      if ((int)f.size() - 1 != deg) continue;
      if (fp_irreducible(f, p)) {
        m.red.assign(deg, Int(0));
        m.red[0] = mod(-b, m.pK);
        m.red[1] = mod(-a, m.pK);
        return m;
      }
    }
  throw std::logic_error("make_unram: no irreducible polynomial found");
}

Model make_ramified_quad(const Int& p, const Int& d, int K) {
  Model m;
  m.p = p;
  m.K = K;
  m.pK = ipow(p, (unsigned)K);
  m.deg = 2;
  m.e = 2;
  m.eis_d = d;  // kept exact (small squarefree)
  m.red = {mod(d, m.pK), Int(0)};
  return m;
}

// Exact number of roots of a squarefree monic integer polynomial in the
// model field's ring of integers.  Digit DFS with ball pruning:
//   prune when the ultrametric viability bound fails: a root y = r mod p^j
//   forces v(g(r)) >= min_k [ v((g^(k)/k!)(r)) + k*e*j ];
//   certify one root when Hensel applies, the root provably lies in the
//   ball, and the ball is too small to hold two roots.
struct RootCounter {
  const Model& m;
  std::vector<std::vector<Int>> ders;  // scaled derivatives g^(k)/k!
  long vdisc;                          // v_K(disc g)

  int count(const Elem& r, long pj, int j) const {
    Elem gr = e_eval(m, ders[0], r);
    long v = e_val(m, gr);
    long viable = (long)m.e * (m.K + 4);
    for (size_t k = 1; k < ders.size(); ++k) {
      long t = e_val(m, e_eval(m, ders[k], r)) + (long)k * (long)m.e * j;
      viable = std::min(viable, t);
    }
    if (v < viable) return 0;
    long vd = e_val(m, e_eval(m, ders[1], r));
    if (v >= 2 * vd + 1 && v - vd >= (long)m.e * j && 2 * (long)m.e * j > vdisc)
      return 1;
    if (j >= m.K)
      throw std::logic_error("root counting: precision cap exceeded");
    // children: refine each coordinate by one base-p digit
    int total = 0;
    Int pjI = ipow(m.p, (unsigned)j);
    std::vector<Int> digit(m.deg, Int(0));
    while (true) {
      Elem child = r;
      for (int i = 0; i < m.deg; ++i) child[i] = mod(child[i] + pjI * digit[i], m.pK);
      total += count(child, pj + 1, j + 1);
      int pos = 0;
      while (pos < m.deg) {
        digit[pos] += 1;
        if (digit[pos] < m.p) break;
        digit[pos] = 0;
        ++pos;
      }
      if (pos == m.deg) break;
    }
    return total;
  }
};

std::vector<Int> int_coeffs(const QPoly& gm) {
  std::vector<Int> c;
  for (auto& q : gm.c) {
    assert(den(q) == 1);
    c.push_back(num(q));
  }
  return c;
}

int count_roots_model(const QPoly& f, const Model& m, long vdisc_p) {
  auto [g, scale] = make_monic_integer(f);
  (void)scale;
  std::vector<Int> gc = int_coeffs(g);
  RootCounter rc{m, {}, (long)m.e * vdisc_p};
  size_t deg = gc.size() - 1;
  for (size_t k = 0; k <= deg; ++k) {
    std::vector<Int> dk;
    for (size_t i = 0; i + k <= deg; ++i) {
      Int binom = 1;  // C(i + k, k)
      for (size_t t = 1; t <= k; ++t) binom = binom * (Int)(i + t) / (Int)t;
      dk.push_back(gc[i + k] * binom);
    }
    rc.ders.push_back(dk);
  }
  return rc.count(e_zero(m), 0, 0);
}

long vdisc_of(const QPoly& f, const Int& p) {
  auto [g, scale] = make_monic_integer(f);
  (void)scale;
  Rat d = discriminant(g);
  if (d == 0) throw std::invalid_argument("splitting: polynomial not squarefree");
  return rat_valuation(d, p);
}

int model_precision(long vdisc) { return (int)(2 * vdisc + 5); }

// exists a monic quadratic divisor of g over the unramified quadratic ring?
struct DivisorSearch {
  const Model& m;  // unramified, deg 2
  std::vector<Int> coef;
  long vdisc;  // v_p(disc g)
  mutable long nodes = 0;

  Elem negate(const Elem& a) const {
    Elem r(m.deg);
    for (int i = 0; i < m.deg; ++i) r[i] = mod(-a[i], m.pK);
    return r;
  }

  // remainder of g modulo x^2 + A x + B, as two model elements (hi*x + lo)
  std::pair<Elem, Elem> rem(const Elem& A, const Elem& B) const {
    Elem hi = e_zero(m), lo = e_zero(m);
    for (int i = (int)coef.size() - 1; i >= 0; --i) {
      // (hi*x + lo)*x + c = (lo - hi*A)*x + (c - hi*B), using x^2 = -Ax - B
      Elem nhi = e_add(m, lo, negate(e_mul(m, hi, A)));
      Elem nlo = e_add(m, e_scalar(m, coef[i]), negate(e_mul(m, hi, B)));
      hi = nhi;
      lo = nlo;
    }
    return {hi, lo};
  }

  bool search(const Elem& A, const Elem& B, int j) const {
    if (++nodes > 2000000)
      throw UnsupportedWildCase("splitting: quadratic divisor search blowup");
    auto [r1, r0] = rem(A, B);
    long v = std::min(e_val(m, r1), e_val(m, r0));
    if (v < j) return false;
    if (v >= vdisc + 3) return true;  // Hensel-liftable factorization found
    if (j >= m.K) return false;
    Int pjI = ipow(m.p, (unsigned)j);
    std::vector<Int> digit(2 * m.deg, Int(0));
    while (true) {
      Elem A2 = A, B2 = B;
      for (int i = 0; i < m.deg; ++i) {
        A2[i] = mod(A2[i] + pjI * digit[i], m.pK);
        B2[i] = mod(B2[i] + pjI * digit[m.deg + i], m.pK);
      }
      if (search(A2, B2, j + 1)) return true;
      int pos = 0;
      while (pos < 2 * m.deg) {
        digit[pos] += 1;
        if (digit[pos] < m.p) break;
        digit[pos] = 0;
        ++pos;
      }
      if (pos == 2 * m.deg) break;
    }
    return false;
  }
};

SplittingType quad_result(QuadExtType t) {
  switch (t) {
    case QuadExtType::Split:
      return {{1, 1}, {1, 1}};
    case QuadExtType::Unramified:
      return {{1, 2}};
    default:
      return {{2, 1}};
  }
}

}  // namespace

QuadExtType quad_ext_type(const SquareClass& d, const Place& v) {
  if (d.is_trivial()) return QuadExtType::Split;
  if (v.infinite)
    return d.rep() > 0 ? QuadExtType::Split : QuadExtType::Ramified;
  if (d.is_square_at(v)) return QuadExtType::Split;
  const Int& p = v.p;
  Int r = d.rep();
  unsigned val = mod(r, p) == 0 ? 1 : 0;  // rep squarefree
  if (p == 2) {
    Int odd = val ? r / 2 : r;
    return (val == 0 && mod(odd, 8) == 5) ? QuadExtType::Unramified
                                          : QuadExtType::Ramified;
  }
  return val == 0 ? QuadExtType::Unramified : QuadExtType::Ramified;
}

int count_roots_qp(const QPoly& g, const Int& p) {
  long v = vdisc_of(g, p);
  Model m = make_unram(p, 1, model_precision(v));
  return count_roots_model(g, m, v);
}

int count_roots_unram(const QPoly& g, const Int& p, int fdeg) {
  long v = vdisc_of(g, p);
  Model m = make_unram(p, fdeg, model_precision(v));
  return count_roots_model(g, m, v);
}

int count_roots_quadext(const QPoly& g, const Int& p, const SquareClass& d) {
  long v = vdisc_of(g, p);
  Place pl = Place::finite(p);
  QuadExtType t = quad_ext_type(d, pl);
  if (t == QuadExtType::Split) throw std::invalid_argument("quadext: split class");
  if (t == QuadExtType::Unramified) return count_roots_unram(g, p, 2);
  Model m = make_ramified_quad(p, d.rep(), model_precision(v) + 2);
  return count_roots_model(g, m, v);
}

SplittingType splitting_type(const QPoly& f, const Int& p,
                             const SplittingOverride* ovr) {
  int n = f.degree();
  if (ovr) {
    auto it = ovr->find(p);
    if (it != ovr->end()) {
      SplittingType t = it->second;
      unsigned total = 0;
      for (auto& ef : t) total += ef.e * ef.f;
      if ((int)total != n)
        throw std::invalid_argument(
            "splitting override: degrees do not sum to the polynomial degree");
      std::sort(t.begin(), t.end());
      return t;
    }
  }
  if (n < 1) throw std::invalid_argument("splitting_type: constant polynomial");
  if (n == 1) return {{1, 1}};
  auto [g, scale] = make_monic_integer(f);
  (void)scale;
  Rat drat = discriminant(g);
  if (drat == 0) throw std::invalid_argument("splitting_type: not squarefree");
  long vdisc = rat_valuation(drat, p);

  if (vdisc == 0) {
    SplittingType out;
    for (int d : ddf_degrees(g, p)) out.push_back({1, (unsigned)d});
    std::sort(out.begin(), out.end());
    return out;
  }

  SquareClass dclass(drat);
  Place pl = Place::finite(p);

  if (n == 2) return quad_result(quad_ext_type(dclass, pl));

  if (n == 3) {
    int k = count_roots_qp(g, p);
    if (k == 3) return {{1, 1}, {1, 1}, {1, 1}};
    if (k == 1) {
      // the quadratic cofactor has the same p-adic discriminant class
      SplittingType out = quad_result(quad_ext_type(dclass, pl));
      out.push_back({1, 1});
      std::sort(out.begin(), out.end());
      return out;
    }
    if (k != 0) throw std::logic_error("cubic root count");
    return count_roots_unram(g, p, 3) > 0 ? SplittingType{{1, 3}}
                                          : SplittingType{{3, 1}};
  }

  if (n == 4) {
    int k = count_roots_qp(g, p);
    if (k == 4) return {{1, 1}, {1, 1}, {1, 1}, {1, 1}};
    if (k == 2) {
      SplittingType out = quad_result(quad_ext_type(dclass, pl));
      out.push_back({1, 1});
      out.push_back({1, 1});
      std::sort(out.begin(), out.end());
      return out;
    }
    if (k == 1) {
      int c3 = count_roots_unram(g, p, 3);
      if (c3 == 4) return {{1, 1}, {1, 3}};
      if (c3 == 1) return {{1, 1}, {3, 1}};
      throw std::logic_error("quartic cubic-cofactor count");
    }
    if (k != 0) throw std::logic_error("quartic root count");
    // no linear factors: either two quadratic factors or irreducible
    std::vector<std::pair<SquareClass, int>> found;
    int total = 0;
    auto basis = local_square_basis(pl);
    for (unsigned mask = 1; mask < (1u << basis.size()); ++mask) {
      Rat rep(1);
      for (size_t i = 0; i < basis.size(); ++i)
        if (mask & (1u << i)) rep *= basis[i];
      SquareClass c(rep);
      int cnt = count_roots_quadext(g, p, c);
      if (cnt > 0) found.push_back({c, cnt});
      total += cnt;
    }
    if (total == 4) {
      SplittingType out;
      for (auto& [c, cnt] : found) {
        EFPair t = quad_result(quad_ext_type(c, pl))[0];
        for (int i = 0; i < cnt / 2; ++i) out.push_back(t);
      }
      std::sort(out.begin(), out.end());
      if (out.size() != 2) throw std::logic_error("quartic quadratic-split bookkeeping");
      return out;
    }
    if (total != 0) throw std::logic_error("quartic quadratic-root total");
    if (count_roots_unram(g, p, 4) > 0) return {{1, 4}};
    // residue degree 2 iff g acquires a quadratic divisor over the
    // unramified quadratic ring
    Model u2 = make_unram(p, 2, model_precision(vdisc));
    DivisorSearch ds{u2, int_coeffs(g), vdisc};
    Elem z = e_zero(u2);
    if (ds.search(z, z, 0)) return {{2, 2}};
    return {{4, 1}};
  }

  throw UnsupportedWildCase("splitting_type: ramified prime for degree > 4 needs a local_override");
}

}  // namespace toridn
