#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "etale_internal.hpp"
#include "etale_local_internal.hpp"
#include "toridn/etale.hpp"
#include "toridn/hilbert.hpp"
#include "toridn/primes.hpp"
#include "toridn/squareclass.hpp"

namespace toridn::local {

namespace {

Int inv_mod(const Int& a0, const Int& m) {
  Int r0 = m, r1 = mod(a0, m), s0 = 0, s1 = 1;
  while (r1 != 0) {
    Int q = r0 / r1;
    Int r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    Int s2 = s0 - q * s1;
    s0 = s1;
    s1 = s2;
  }
  if (r0 != 1) throw std::logic_error("inv_mod: not invertible");
  return mod(s0, m);
}

// ---- trimmed polynomials over F_p, for irreducibility tests ----

using FpPoly = std::vector<Int>;

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

bool fp_irreducible(const FpPoly& f, const Int& p) {
  int n = (int)f.size() - 1;
  FpPoly x{Int(0), Int(1)};
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

// ---- fixed-width vectors modulo M with reduction rule t^f = red ----

using Vec = std::vector<Int>;

Vec vred_mul(const Vec& a, const Vec& b, const Vec& red, const Int& M) {
  size_t f = red.size();
  std::vector<Int> prod(2 * f - 1, Int(0));
  for (size_t i = 0; i < f; ++i)
    for (size_t j = 0; j < f; ++j) prod[i + j] = mod(prod[i + j] + a[i] * b[j], M);
  for (size_t d = 2 * f - 2; d + 1 > f; --d) {
    Int c = prod[d];
    if (c == 0) continue;
    prod[d] = 0;
    for (size_t i = 0; i < f; ++i)
      prod[d - f + i] = mod(prod[d - f + i] + c * red[i], M);
  }
  prod.resize(f);
  return prod;
}

Vec vred_pow(Vec a, Int e, const Vec& red, const Int& M) {
  size_t f = red.size();
  Vec r(f, Int(0));
  r[0] = 1;
  while (e > 0) {
    if (mod(e, 2) == 1) r = vred_mul(r, a, red, M);
    a = vred_mul(a, a, red, M);
    e /= 2;
  }
  return r;
}

// ---- residue field F_q = F_p[t]/(t^f - red) ----

Vec rf_of(const LModel& m, const UElem& u) {
  Vec r(m.f);
  for (int i = 0; i < m.f; ++i) r[i] = mod(u[i], m.p);
  return r;
}

Vec rf_red(const LModel& m) {
  Vec r(m.f);
  for (int i = 0; i < m.f; ++i) r[i] = mod(m.red[i], m.p);
  return r;
}

bool rf_zero(const Vec& a) {
  for (auto& c : a)
    if (c != 0) return false;
  return true;
}

bool rf_is_one(const Vec& a) {
  if (a[0] != 1) return false;
  for (size_t i = 1; i < a.size(); ++i)
    if (a[i] != 0) return false;
  return true;
}

// quadratic-residue character of F_q^x as +-1 (p odd)
int rf_chi(const LModel& m, const Vec& a) {
  if (rf_zero(a)) throw std::logic_error("rf_chi: zero");
  Int q = ipow(m.p, (unsigned)m.f);
  Vec r = vred_pow(a, (q - 1) / 2, rf_red(m), m.p);
  return rf_is_one(r) ? 1 : -1;
}

// trace to F_2 (p = 2): sum of the Frobenius images, a scalar
int rf_trace2(const LModel& m, const Vec& a0) {
  Vec red = rf_red(m);
  Vec acc(m.f, Int(0));
  Vec a = a0;
  for (int i = 0; i < m.f; ++i) {
    for (int j = 0; j < m.f; ++j) acc[j] = mod(acc[j] + a[j], Int(2));
    a = vred_mul(a, a, red, Int(2));
  }
  for (int j = 1; j < m.f; ++j)
    if (acc[j] != 0) throw std::logic_error("rf_trace2: trace not scalar");
  return (int)acc[0].convert_to<long>();
}

// ---- U_f arithmetic ----

UElem u_zero(const LModel& m) { return UElem(m.f, Int(0)); }

UElem u_scalar(const LModel& m, const Int& c) {
  UElem r = u_zero(m);
  r[0] = mod(c, m.pK);
  return r;
}

UElem u_add(const LModel& m, const UElem& a, const UElem& b) {
  UElem r(m.f);
  for (int i = 0; i < m.f; ++i) r[i] = mod(a[i] + b[i], m.pK);
  return r;
}

UElem u_sub(const LModel& m, const UElem& a, const UElem& b) {
  UElem r(m.f);
  for (int i = 0; i < m.f; ++i) r[i] = mod(a[i] - b[i], m.pK);
  return r;
}

UElem u_mul(const LModel& m, const UElem& a, const UElem& b) {
  return vred_mul(a, b, m.red, m.pK);
}

// p-adic valuation of the coordinate vector; K means "at least K"
long u_val(const LModel& m, const UElem& a) {
  long v = m.K;
  for (auto& c : a)
    if (c != 0) v = std::min(v, (long)valuation(c, m.p));
  return v;
}

UElem u_divp(const LModel& m, const UElem& a) {
  UElem r(m.f);
  for (int i = 0; i < m.f; ++i) {
    if (mod(a[i], m.p) != 0) throw std::logic_error("u_divp: not divisible");
    r[i] = a[i] / m.p;
  }
  return r;
}

UElem u_inv(const LModel& m, const UElem& a) {
  Vec r = rf_of(m, a);
  if (rf_zero(r)) throw std::logic_error("u_inv: not a unit");
  Int q = ipow(m.p, (unsigned)m.f);
  Vec ri = vred_pow(r, q - 2, rf_red(m), m.p);
  UElem y(ri);
  y.resize(m.f, Int(0));
  int steps = 1;
  while ((1L << steps) < m.K + 1) ++steps;
  for (int s = 0; s <= steps; ++s) {
    UElem ay = u_mul(m, a, y);
    UElem two_minus = u_sub(m, u_scalar(m, 2), ay);
    y = u_mul(m, y, two_minus);
  }
  return y;
}

// Teichmueller representative with the residue of a (iterating x -> x^q)
UElem u_teichmuller(const LModel& m, const UElem& a) {
  Int q = ipow(m.p, (unsigned)m.f);
  UElem w = a;
  for (int i = 0; i < m.K + 2; ++i) w = vred_pow(w, q, m.red, m.pK);
  return w;
}

}  // namespace

// ---- model constructors ----

LModel model_unram(const Int& p, int f, int K) {
  LModel m;
  m.p = p;
  m.K = K;
  m.pK = ipow(p, (unsigned)K);
  m.f = f;
  m.e = 1;
  if (f == 1) {
    m.red = {Int(0)};
    return m;
  }
  for (Int b = 0; b < p; ++b)
    for (Int a = 0; a < p; ++a) {
      FpPoly g(f + 1, Int(0));
      g[0] = b;
      g[1] = a;
      g[f] = 1;
      if (fp_irreducible(g, p)) {
        m.red.assign(f, Int(0));
        m.red[0] = mod(-b, m.pK);
        m.red[1] = mod(-a, m.pK);
        return m;
      }
    }
  std::vector<Int> digs(f, Int(0));
  for (long tries = 0; tries < 200000; ++tries) {
    FpPoly g(f + 1, Int(0));
    for (int i = 0; i < f; ++i) g[i] = digs[i];
    g[f] = 1;
    if (fp_irreducible(g, p)) {
      m.red.assign(f, Int(0));
      for (int i = 0; i < f; ++i) m.red[i] = mod(-digs[i], m.pK);
      return m;
    }
    int pos = 0;
    while (pos < f) {
      digs[pos] += 1;
      if (digs[pos] < p) break;
      digs[pos] = 0;
      ++pos;
    }
    if (pos == f) break;
  }
  throw std::logic_error("model_unram: no irreducible polynomial found");
}

LModel model_ram(const Int& p, int f, int K, int e, const UElem& gen_pow,
                 bool gen_unif) {
  LModel m = model_unram(p, f, K);
  m.e = e;
  m.gen_pow = gen_pow;
  m.gen_unif = gen_unif;
  return m;
}

// ---- LElem arithmetic ----

LElem l_zero(const LModel& m) {
  LElem r;
  r.c.assign(m.e, u_zero(m));
  return r;
}

LElem l_scalar(const LModel& m, const Int& c) {
  LElem r = l_zero(m);
  r.c[0] = u_scalar(m, c);
  return r;
}

LElem l_from_unit(const LModel& m, const UElem& u) {
  LElem r = l_zero(m);
  r.c[0] = u;
  return r;
}

LElem l_gen(const LModel& m) {
  if (m.e < 2) throw std::logic_error("l_gen: unramified model");
  LElem r = l_zero(m);
  r.c[1] = u_scalar(m, 1);
  return r;
}

LElem l_add(const LModel& m, const LElem& a, const LElem& b) {
  LElem r = l_zero(m);
  for (int i = 0; i < m.e; ++i) r.c[i] = u_add(m, a.c[i], b.c[i]);
  return r;
}

LElem l_sub(const LModel& m, const LElem& a, const LElem& b) {
  LElem r = l_zero(m);
  for (int i = 0; i < m.e; ++i) r.c[i] = u_sub(m, a.c[i], b.c[i]);
  return r;
}

LElem l_neg(const LModel& m, const LElem& a) { return l_sub(m, l_zero(m), a); }

LElem l_mul(const LModel& m, const LElem& a, const LElem& b) {
  std::vector<UElem> prod(2 * m.e - 1, u_zero(m));
  for (int i = 0; i < m.e; ++i)
    for (int j = 0; j < m.e; ++j)
      prod[i + j] = u_add(m, prod[i + j], u_mul(m, a.c[i], b.c[j]));
  LElem r = l_zero(m);
  for (int i = 0; i < m.e; ++i) r.c[i] = prod[i];
  for (int d = m.e; d <= 2 * m.e - 2; ++d)
    r.c[d - m.e] = u_add(m, r.c[d - m.e], u_mul(m, prod[d], m.gen_pow));
  return r;
}

LElem l_scale_int(const LModel& m, const LElem& a, const Int& c) {
  LElem r = l_zero(m);
  for (int i = 0; i < m.e; ++i)
    for (int j = 0; j < m.f; ++j) r.c[i][j] = mod(a.c[i][j] * c, m.pK);
  return r;
}

bool l_is_zeroish(const LModel& m, const LElem& a) {
  (void)m;
  for (auto& u : a.c)
    for (auto& c : u)
      if (c != 0) return false;
  return true;
}

long l_val(const LModel& m, const LElem& a) {
  if (m.e == 1) {
    long v = u_val(m, a.c[0]);
    return v >= m.K ? m.vbig() : v;
  }
  UElem N;
  if (m.e == 2) {
    N = u_sub(m, u_mul(m, a.c[0], a.c[0]),
              u_mul(m, m.gen_pow, u_mul(m, a.c[1], a.c[1])));
  } else {  // e == 3, g^3 = D: N = a0^3 + D a1^3 + D^2 a2^3 - 3 D a0 a1 a2
    const UElem &a0 = a.c[0], &a1 = a.c[1], &a2 = a.c[2];
    const UElem& D = m.gen_pow;
    UElem D2 = u_mul(m, D, D);
    UElem t = u_mul(m, u_mul(m, a0, a0), a0);
    t = u_add(m, t, u_mul(m, D, u_mul(m, u_mul(m, a1, a1), a1)));
    t = u_add(m, t, u_mul(m, D2, u_mul(m, u_mul(m, a2, a2), a2)));
    UElem h = u_mul(m, u_scalar(m, 3), u_mul(m, D, u_mul(m, a0, u_mul(m, a1, a2))));
    N = u_sub(m, t, h);
  }
  long vN = u_val(m, N);
  return vN >= m.K - 1 ? m.vbig() : vN;
}

LElem l_uniformizer(const LModel& m) {
  if (m.e == 1) return l_scalar(m, m.p);
  if (m.gen_unif) return l_gen(m);
  return l_add(m, l_scalar(m, 1), l_gen(m));
}

LElem l_shift_down(const LModel& m, LElem a, long t) {
  for (long s = 0; s < t; ++s) {
    if (m.e == 1) {
      a.c[0] = u_divp(m, a.c[0]);
    } else if (m.gen_unif) {
      UElem gp1 = u_divp(m, m.gen_pow);  // gen_pow has valuation exactly 1
      UElem gpinv = u_inv(m, gp1);
      LElem r = l_zero(m);
      for (int i = 0; i + 1 < m.e; ++i) r.c[i] = a.c[i + 1];
      r.c[m.e - 1] = u_mul(m, u_divp(m, a.c[0]), gpinv);
      a = r;
    } else {  // p = 2, e = 2, pi = 1 + g: x/pi = x(1-g)/(1-delta)
      const UElem& d = m.gen_pow;
      UElem y0 = u_sub(m, a.c[0], u_mul(m, a.c[1], d));
      UElem y1 = u_sub(m, a.c[1], a.c[0]);
      UElem nd = u_divp(m, u_sub(m, u_scalar(m, 1), d));
      UElem ndi = u_inv(m, nd);
      a.c[0] = u_mul(m, u_divp(m, y0), ndi);
      a.c[1] = u_mul(m, u_divp(m, y1), ndi);
    }
  }
  return a;
}

LElem l_inv(const LModel& m, const LElem& a) {
  if (m.e == 1) return l_from_unit(m, u_inv(m, a.c[0]));
  // solve (multiplication-by-a matrix) y = e0 over U_f
  std::vector<LElem> col(m.e);
  col[0] = a;
  for (int j = 1; j < m.e; ++j) col[j] = l_mul(m, col[j - 1], l_gen(m));
  std::vector<std::vector<UElem>> M(m.e, std::vector<UElem>(m.e));
  for (int i = 0; i < m.e; ++i)
    for (int j = 0; j < m.e; ++j) M[i][j] = col[j].c[i];
  std::vector<UElem> rhs(m.e, u_zero(m));
  rhs[0] = u_scalar(m, 1);
  for (int cc = 0; cc < m.e; ++cc) {
    int piv = -1;
    for (int r = cc; r < m.e; ++r)
      if (u_val(m, M[r][cc]) == 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::logic_error("l_inv: no unit pivot");
    std::swap(M[piv], M[cc]);
    std::swap(rhs[piv], rhs[cc]);
    UElem pi = u_inv(m, M[cc][cc]);
    for (int j = 0; j < m.e; ++j) M[cc][j] = u_mul(m, M[cc][j], pi);
    rhs[cc] = u_mul(m, rhs[cc], pi);
    for (int r = 0; r < m.e; ++r) {
      if (r == cc) continue;
      UElem fct = M[r][cc];
      for (int j = 0; j < m.e; ++j)
        M[r][j] = u_sub(m, M[r][j], u_mul(m, fct, M[cc][j]));
      rhs[r] = u_sub(m, rhs[r], u_mul(m, fct, rhs[cc]));
    }
  }
  LElem y = l_zero(m);
  for (int i = 0; i < m.e; ++i) y.c[i] = rhs[i];
  return y;
}

LElem l_div(const LModel& m, const LElem& a, const LElem& b) {
  long vb = l_val(m, b);
  if (vb >= m.vbig()) throw std::logic_error("l_div: divisor too small");
  LElem an = l_shift_down(m, a, vb);
  LElem bn = l_shift_down(m, b, vb);
  return l_mul(m, an, l_inv(m, bn));
}

// ---- squares ----

namespace {

Vec residue_of(const LModel& m, const LElem& a) {
  return rf_of(m, a.c[0]);  // for ramified models, g == 0 in the residue field
}

// p = 2, e = 1: squareness of a unit by the closed form; unram_class is set
// to whether the unit is congruent to 1 mod 4 (square or unramified class)
bool unit_square_2unram(const LModel& m, const UElem& u, bool* unram_class) {
  Vec r = rf_of(m, u);
  Vec sbar = r;
  for (int i = 0; i + 1 < m.f; ++i) sbar = vred_mul(sbar, sbar, rf_red(m), Int(2));
  UElem s(sbar);
  s.resize(m.f, Int(0));
  UElem u1 = u_mul(m, u, u_inv(m, u_mul(m, s, s)));
  UElem h = u_divp(m, u_sub(m, u1, u_scalar(m, 1)));
  if (!rf_zero(rf_of(m, h))) {
    if (unram_class) *unram_class = false;
    return false;
  }
  UElem w = u_divp(m, h);
  if (unram_class) *unram_class = true;
  return rf_trace2(m, rf_of(m, w)) == 0;
}

// p = 2: does some y satisfy v(y^2 - z) >= r?  (z a unit)
struct SqrtSearch {
  const LModel& m;
  const LElem& z;
  long r;
  std::vector<LElem> pipow;
  std::vector<UElem> digits;
  long nodes = 0;

  bool go(const LElem& y, long j) {
    if (++nodes > 2000000) throw std::logic_error("sqrt search blowup");
    LElem diff = l_sub(m, l_mul(m, y, y), z);
    long v = l_val(m, diff);
    if (v >= r) return true;
    if (j > 0 && v < std::min<long>(m.e + j, 2 * j)) return false;
    if (j > r + 2 * m.e + 2) return false;
    for (auto& d : digits) {
      LElem child = l_add(m, y, l_mul(m, pipow[(size_t)j], l_from_unit(m, d)));
      if (go(child, j + 1)) return true;
    }
    return false;
  }
};

std::vector<UElem> residue_digits(const LModel& m) {
  std::vector<UElem> digits;
  for (unsigned mask = 0; mask < (1u << m.f); ++mask) {
    UElem d = u_zero(m);
    for (int i = 0; i < m.f; ++i)
      if (mask & (1u << i)) d[i] = 1;
    digits.push_back(d);
  }
  return digits;
}

bool sqrt_exists_mod(const LModel& m, const LElem& z, long r) {
  SqrtSearch ss{m, z, r, {}, residue_digits(m), 0};
  LElem pw = l_scalar(m, 1);
  for (long j = 0; j <= r + 2 * m.e + 3; ++j) {
    ss.pipow.push_back(pw);
    pw = l_mul(m, pw, l_uniformizer(m));
  }
  return ss.go(l_zero(m), 0);
}

}  // namespace

bool is_square(const LModel& m, const LElem& a) {
  long v = l_val(m, a);
  if (v >= m.vbig())
    throw std::logic_error("is_square: zero or insufficient precision");
  if (v & 1) return false;
  LElem u = l_shift_down(m, a, v);
  if (m.p != 2) return rf_chi(m, residue_of(m, u)) == 1;
  if (m.e == 1) return unit_square_2unram(m, u.c[0], nullptr);
  return sqrt_exists_mod(m, u, 2 * m.e + 1);
}

namespace {

// embed the U_f part into the unramified quadratic extension (f -> 2f)
struct Embedded {
  LModel m2;
  UElem rho;  // image of t
};

// Horner evaluation of an integer-coefficient polynomial at a UElem
UElem u_horner(const LModel& m, const std::vector<Int>& cs, const UElem& x) {
  UElem acc = u_scalar(m, cs.back());
  for (int i = (int)cs.size() - 2; i >= 0; --i)
    acc = u_add(m, u_mul(m, acc, x), u_scalar(m, cs[i]));
  return acc;
}

Embedded embed_double(const LModel& m) {
  Embedded E{model_unram(m.p, 2 * m.f, m.K), {}};
  std::vector<Int> qc(m.f + 1);
  for (int i = 0; i < m.f; ++i) qc[i] = -m.red[i];
  qc[m.f] = 1;
  std::vector<Int> dqc(m.f);
  for (int i = 1; i <= m.f; ++i) dqc[i - 1] = qc[i] * i;
  UElem rho;
  bool found = false;
  for (unsigned mask = 0; mask < (1u << (2 * m.f)) && !found; ++mask) {
    UElem x = u_zero(E.m2);
    for (int i = 0; i < 2 * m.f; ++i)
      if (mask & (1u << i)) x[i] = 1;
    if (rf_zero(rf_of(E.m2, u_horner(E.m2, qc, x)))) {
      rho = x;
      found = true;
    }
  }
  if (!found) throw std::logic_error("embed_double: no residue root");
  for (int it = 0; it < 64; ++it) {
    UElem qr = u_horner(E.m2, qc, rho);
    if (u_val(E.m2, qr) >= E.m2.K - 1) break;
    UElem corr = u_mul(E.m2, qr, u_inv(E.m2, u_horner(E.m2, dqc, rho)));
    rho = u_sub(E.m2, rho, corr);
  }
  E.rho = rho;
  return E;
}

UElem embed_u(const Embedded& E, const LModel& m, const UElem& a) {
  UElem acc = u_scalar(E.m2, a[m.f - 1]);
  for (int i = m.f - 2; i >= 0; --i)
    acc = u_add(E.m2, u_mul(E.m2, acc, E.rho), u_scalar(E.m2, a[i]));
  return acc;
}

// Frobenius lift on U_f: the root of T^f - red(T) congruent to t^p
UElem frob_root(const LModel& m) {
  std::vector<Int> qc(m.f + 1);
  for (int i = 0; i < m.f; ++i) qc[i] = -m.red[i];
  qc[m.f] = 1;
  std::vector<Int> dqc(m.f);
  for (int i = 1; i <= m.f; ++i) dqc[i - 1] = qc[i] * i;
  UElem t = u_zero(m);
  t[1] = 1;
  UElem rho = vred_pow(t, m.p, m.red, m.pK);
  for (int it = 0; it < 64; ++it) {
    UElem qr = u_horner(m, qc, rho);
    if (u_val(m, qr) >= m.K - 1) break;
    UElem corr = u_mul(m, qr, u_inv(m, u_horner(m, dqc, rho)));
    rho = u_sub(m, rho, corr);
  }
  return rho;
}

UElem apply_frob_u(const LModel& m, const UElem& rho, const UElem& a) {
  UElem acc = u_scalar(m, a[m.f - 1]);
  for (int i = m.f - 2; i >= 0; --i)
    acc = u_add(m, u_mul(m, acc, rho), u_scalar(m, a[i]));
  return acc;
}

}  // namespace

bool ext_unramified(const LModel& m, const LElem& d) {
  long v = l_val(m, d);
  if (v >= m.vbig())
    throw std::logic_error("ext_unramified: zero or insufficient precision");
  if (v & 1) return false;
  LElem u = l_shift_down(m, d, v);
  if (m.p != 2) return true;  // odd residue characteristic: unit class
  if (m.e == 1) {
    bool cls = false;
    unit_square_2unram(m, u.c[0], &cls);
    return cls;
  }
  Embedded E = embed_double(m);
  LModel m2 = E.m2;
  m2.e = m.e;
  m2.gen_unif = m.gen_unif;
  m2.gen_pow = embed_u(E, m, m.gen_pow);
  LElem ud = l_zero(m2);
  for (int i = 0; i < m.e; ++i) ud.c[i] = embed_u(E, m, u.c[i]);
  return is_square(m2, ud);
}

// ---- Hilbert symbol ----

namespace {

// p = 2 conic chart search: is c0 + c2 w^2 = B u^2 solvable mod pi^k?
struct Conic {
  const LModel& m;
  long k;
  std::vector<LElem> pipow;
  std::vector<UElem> digits;
  long nodes = 0;

  bool represented(const LElem& t, const LElem& B) {
    long vt = l_val(m, t);
    if (vt >= k) return true;
    long vB = l_val(m, B);
    if (vt < vB || ((vt - vB) & 1)) return false;
    LElem z = l_mul(m, l_shift_down(m, t, vt), l_shift_down(m, B, vB));
    long rem = k - vt;
    if (rem >= 2 * m.e + 1) return is_square(m, z);
    return sqrt_exists_mod(m, z, rem);
  }

  bool search(const LElem& c0, const LElem& c2, const LElem& B,
              const LElem& w0, long j) {
    if (++nodes > 2000000) throw std::logic_error("conic search blowup");
    LElem t = l_add(m, c0, l_mul(m, c2, l_mul(m, w0, w0)));
    if (j >= k) return represented(t, B);
    long v = std::min(l_val(m, t), (long)k);
    long vc2 = l_val(m, c2);
    long v2w = l_is_zeroish(m, w0) ? m.vbig() : m.e + l_val(m, w0);
    long delta = vc2 + std::min(j + v2w, 2 * j);
    long need = std::min<long>(2 * m.e + 1, k - v);
    if (delta >= k || (v < k && delta >= v + need)) return represented(t, B);
    for (auto& d : digits) {
      LElem w = l_add(m, w0, l_mul(m, pipow[(size_t)j], l_from_unit(m, d)));
      if (search(c0, c2, B, w, j + 1)) return true;
    }
    return false;
  }
};

}  // namespace

int hilbert(const LModel& m, const LElem& a, const LElem& b) {
  long va = l_val(m, a), vb = l_val(m, b);
  if (va >= m.vbig() || vb >= m.vbig())
    throw std::logic_error("hilbert: zero or insufficient precision");
  if (m.p != 2) {
    LElem ua = l_shift_down(m, a, va), ub = l_shift_down(m, b, vb);
    int ca = rf_chi(m, residue_of(m, ua));
    int cb = rf_chi(m, residue_of(m, ub));
    int cm1 = rf_chi(m, rf_of(m, u_scalar(m, -1)));
    int s = 1;
    if (vb & 1) s *= ca;
    if (va & 1) s *= cb;
    if (va & vb & 1) s *= cm1;
    return s;
  }
  LElem A = l_shift_down(m, a, 2 * (va / 2));
  LElem B = l_shift_down(m, b, 2 * (vb / 2));
  long k = 2 * (2 * m.e + (va % 2) + (vb % 2)) + 3;
  Conic cn{m, k, {}, residue_digits(m), 0};
  LElem pw = l_scalar(m, 1);
  for (long j = 0; j <= k; ++j) {
    cn.pipow.push_back(pw);
    pw = l_mul(m, pw, l_uniformizer(m));
  }
  LElem one = l_scalar(m, 1);
  LElem z = l_zero(m);
  if (cn.search(A, B, one, z, 0)) return 1;
  if (cn.search(B, A, one, z, 0)) return 1;
  if (cn.search(one, l_neg(m, A), B, z, 0)) return 1;
  return -1;
}

// ---- scaled elements ----

SElem s_from(const LModel& m, const LElem& x) {
  (void)m;
  return SElem{x, 0};
}

SElem s_from_rat(const LModel& m, const Rat& r) {
  Int n = num(r), d = den(r);
  long b = d == 1 ? 0 : (long)valuation(d, m.p);
  Int dp = d / ipow(m.p, (unsigned)b);
  Int c = mod(n * inv_mod(dp, m.pK), m.pK);
  return SElem{l_scalar(m, c), b};
}

SElem s_add(const LModel& m, const SElem& a, const SElem& b) {
  long s = std::max(a.shift, b.shift);
  LElem xa =
      a.shift == s ? a.x : l_scale_int(m, a.x, ipow(m.p, (unsigned)(s - a.shift)));
  LElem xb =
      b.shift == s ? b.x : l_scale_int(m, b.x, ipow(m.p, (unsigned)(s - b.shift)));
  return SElem{l_add(m, xa, xb), s};
}

SElem s_mul(const LModel& m, const SElem& a, const SElem& b) {
  return SElem{l_mul(m, a.x, b.x), a.shift + b.shift};
}

long s_val(const LModel& m, const SElem& a) {
  long v = l_val(m, a.x);
  if (v >= m.vbig()) return m.vbig();
  return v - (long)m.e * a.shift;
}

bool s_is_zeroish(const LModel& m, const SElem& a) {
  return l_val(m, a.x) >= m.vbig();
}

LElem s_descale(const LModel& m, const SElem& a) {
  if (a.shift % 2 == 0) return a.x;
  return l_scale_int(m, a.x, m.p);
}

bool s_is_square(const LModel& m, const SElem& a) {
  return is_square(m, s_descale(m, a));
}

int s_hilbert(const LModel& m, const SElem& a, const SElem& b) {
  return hilbert(m, s_descale(m, a), s_descale(m, b));
}

SElem eval_poly(const LModel& m, const QPoly& g, const SElem& x) {
  if (g.is_zero()) return SElem{l_zero(m), 0};
  SElem acc = s_from_rat(m, g.c.back());
  for (int i = (int)g.c.size() - 2; i >= 0; --i)
    acc = s_add(m, s_mul(m, acc, x), s_from_rat(m, g.c[i]));
  return acc;
}

// ---- completions ----

namespace {

// digit DFS with certification, collecting Hensel-refined roots
struct RootDFS {
  const LModel& m;
  std::vector<std::vector<LElem>> ders;  // scaled derivatives f^(k)/k!
  long vdisc;  // pi-valuation of the discriminant
  std::vector<LElem>* out;
  long nodes = 0;

  LElem eval(const std::vector<LElem>& cs, const LElem& x) const {
    LElem acc = cs.back();
    for (int i = (int)cs.size() - 2; i >= 0; --i)
      acc = l_add(m, l_mul(m, acc, x), cs[i]);
    return acc;
  }

  void refine_and_store(LElem x) {
    for (int it = 0; it < 64; ++it) {
      LElem gx = eval(ders[0], x);
      if (l_val(m, gx) >= (long)m.e * (m.K - 2)) break;
      x = l_sub(m, x, l_div(m, gx, eval(ders[1], x)));
    }
    out->push_back(x);
  }

  void run(const LElem& r, int j) {
    if (++nodes > 1500000)
      throw UnsupportedWildCase("root search: node budget exceeded");
    long v = l_val(m, eval(ders[0], r));
    // a root y = r mod p^j forces v(f(r)) >= min_k v((f^(k)/k!)(r)) + k e j
    long viable = m.vbig() + (long)m.e * m.K;
    for (size_t k = 1; k < ders.size(); ++k) {
      long t = l_val(m, eval(ders[k], r)) + (long)k * (long)m.e * j;
      viable = std::min(viable, t);
    }
    if (v < viable) return;
    long vd = l_val(m, eval(ders[1], r));
    if (v >= 2 * vd + 1 && v - vd >= (long)m.e * j && 2 * (long)m.e * j > vdisc) {
      refine_and_store(r);
      return;
    }
    if (j >= m.K - 2) throw UnsupportedWildCase("root search: precision cap");
    Int pj = ipow(m.p, (unsigned)j);
    std::vector<Int> digit(m.e * m.f, Int(0));
    while (true) {
      LElem child = r;
      for (int i = 0; i < m.e; ++i)
        for (int t = 0; t < m.f; ++t)
          child.c[i][t] = mod(child.c[i][t] + pj * digit[i * m.f + t], m.pK);
      run(child, j + 1);
      int pos = 0;
      while (pos < m.e * m.f) {
        digit[pos] += 1;
        if (digit[pos] < m.p) break;
        digit[pos] = 0;
        ++pos;
      }
      if (pos == m.e * m.f) break;
    }
  }
};

std::vector<LElem> roots_in_model(const LModel& m, const std::vector<Int>& gc,
                                  long vdisc_p) {
  std::vector<LElem> roots;
  RootDFS dfs{m, {}, (long)m.e * vdisc_p, &roots, 0};
  size_t deg = gc.size() - 1;
  for (size_t k = 0; k <= deg; ++k) {
    std::vector<LElem> dk;
    for (size_t i = 0; i + k <= deg; ++i) {
      Int binom = 1;  // C(i + k, k)
      for (size_t t = 1; t <= k; ++t) binom = binom * (Int)(i + t) / (Int)t;
      dk.push_back(l_scalar(m, gc[i + k] * binom));
    }
    dfs.ders.push_back(dk);
  }
  dfs.run(l_zero(m), 0);
  return roots;
}

// ---- tame unramified completions via mod-p factorization ----
// When p is odd and the discriminant of the (monic, integral) defining
// polynomial is a unit at p, every place above p is unramified and the
// places correspond to the irreducible factors mod p.  Each factor h
// defines an unramified model directly, and the class of t Newton-lifts to
// a root of the global polynomial.  This avoids the digit search, whose
// cost grows with p.

FpPoly fp_monic(FpPoly a, const Int& p) {
  a = fp_trim(a);
  if (a.empty()) return a;
  Int inv = powmod(a.back(), p - 2, p);
  for (auto& c : a) c = mod(c * inv, p);
  return a;
}

FpPoly fp_div(FpPoly a, const FpPoly& b, const Int& p) {
  a = fp_trim(a);
  Int lead_inv = powmod(b.back(), p - 2, p);
  FpPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Int(0));
  while (a.size() >= b.size()) {
    Int c = mod(a.back() * lead_inv, p);
    size_t shift = a.size() - b.size();
    q[shift] = c;
    for (size_t i = 0; i < b.size(); ++i)
      a[shift + i] = mod(a[shift + i] - c * b[i], p);
    a = fp_trim(a);
  }
  return fp_trim(q);
}

// distinct-degree plus Cantor-Zassenhaus equal-degree factorization of a
// monic squarefree polynomial, p odd; the result is sorted for determinism
std::vector<FpPoly> fp_factor_squarefree(FpPoly f, const Int& p) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull ^ (unsigned long)f.size());
  std::vector<FpPoly> out;
  FpPoly x{Int(0), Int(1)};
  FpPoly w = fp_mod(x, f, p);
  int d = 0;
  while ((int)f.size() - 1 > 0) {
    ++d;
    if (2 * d > (int)f.size() - 1) {
      out.push_back(f);
      break;
    }
    w = fp_powmod(w, p, f, p);
    FpPoly diff = w;
    diff.resize(std::max<size_t>(diff.size(), 2), Int(0));
    diff[1] = mod(diff[1] - 1, p);
    FpPoly hd = fp_monic(fp_gcd(fp_trim(diff), f, p), p);
    if (hd.size() <= 1) continue;
    std::vector<FpPoly> stack{hd};
    Int q = ipow(p, (unsigned)d);
    while (!stack.empty()) {
      FpPoly h = stack.back();
      stack.pop_back();
      if ((int)h.size() - 1 == d) {
        out.push_back(h);
        continue;
      }
      for (int tries = 0;; ++tries) {
        if (tries > 400)
          throw UnsupportedWildCase("mod-p factorization: splitting stalled");
        FpPoly a(h.size() - 1, Int(0));
        for (auto& c : a) c = mod(Int(rng()), p);
        a = fp_trim(a);
        if (a.empty()) continue;
        FpPoly t = fp_monic(fp_gcd(a, h, p), p);
        if (t.size() <= 1 || t.size() >= h.size()) {
          FpPoly s = fp_powmod(a, (q - 1) / 2, h, p);
          s.resize(std::max<size_t>(s.size(), 1), Int(0));
          s[0] = mod(s[0] - 1, p);
          t = fp_monic(fp_gcd(fp_trim(s), h, p), p);
        }
        if (t.size() > 1 && t.size() < h.size()) {
          stack.push_back(t);
          stack.push_back(fp_monic(fp_div(h, t, p), p));
          break;
        }
      }
    }
    f = fp_monic(fp_div(f, hd, p), p);
    w = fp_mod(w, f, p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

LModel model_from_irreducible(const Int& p, const FpPoly& h, int K) {
  LModel m;
  m.p = p;
  m.K = K;
  m.pK = ipow(p, (unsigned)K);
  m.f = (int)h.size() - 1;
  m.e = 1;
  if (m.f == 1) {
    m.red = {Int(0)};
  } else {
    m.red.assign(m.f, Int(0));
    for (int i = 0; i < m.f; ++i) m.red[i] = mod(-h[i], m.pK);
  }
  return m;
}

LElem newton_root_unram(const LModel& m, const std::vector<Int>& gc,
                        const FpPoly& h) {
  auto evalc = [&](const std::vector<LElem>& cs, const LElem& x) {
    LElem acc = cs.back();
    for (int i = (int)cs.size() - 2; i >= 0; --i)
      acc = l_add(m, l_mul(m, acc, x), cs[i]);
    return acc;
  };
  size_t deg = gc.size() - 1;
  std::vector<LElem> c0, c1;
  for (size_t i = 0; i <= deg; ++i) c0.push_back(l_scalar(m, gc[i]));
  for (size_t i = 1; i <= deg; ++i) c1.push_back(l_scalar(m, gc[i] * (Int)i));
  LElem x = l_zero(m);
  if (m.f == 1)
    x.c[0][0] = mod(-h[0], m.pK);
  else
    x.c[0][1] = 1;
  for (int it = 0; it < 64; ++it) {
    LElem gx = evalc(c0, x);
    if (l_val(m, gx) >= (long)(m.K - 2)) return x;
    LElem dx = evalc(c1, x);
    if (l_val(m, dx) != 0)
      throw UnsupportedWildCase("tame completion: non-simple root");
    x = l_sub(m, x, l_div(m, gx, dx));
  }
  throw UnsupportedWildCase("tame completion: Newton did not converge");
}

// candidate models for places with given (e, f); complete per square /
// cube class theory for the supported shapes
std::vector<LModel> candidate_models(const Int& p, unsigned e, unsigned f, int K) {
  std::vector<LModel> out;
  if (e == 1) {
    out.push_back(model_unram(p, (int)f, K));
    return out;
  }
  if (e == 2 && p != 2) {
    LModel base = model_unram(p, (int)f, K);
    UElem w;  // Teichmueller lift of a residue non-square
    {
      bool found = false;
      std::vector<Int> digs(f, Int(0));
      while (!found) {
        int pos = 0;
        while (pos < (int)f) {
          digs[pos] += 1;
          if (digs[pos] < p) break;
          digs[pos] = 0;
          ++pos;
        }
        if (pos == (int)f) throw std::logic_error("no residue non-square");
        Vec r(digs.begin(), digs.end());
        if (!rf_zero(r) && rf_chi(base, r) == -1) {
          UElem lift(digs.begin(), digs.end());
          lift.resize(f, Int(0));
          w = u_teichmuller(base, lift);
          found = true;
        }
      }
    }
    for (int which : {0, 1}) {
      UElem gp = which == 0 ? u_scalar(base, p) : u_mul(base, u_scalar(base, p), w);
      out.push_back(model_ram(p, (int)f, K, 2, gp, true));
    }
    return out;
  }
  if (e == 2 && p == 2) {
    LModel base = model_unram(p, (int)f, K);
    UElem w1 = u_zero(base);  // trace-one residue element
    {
      bool found = false;
      for (unsigned mask = 1; mask < (1u << f) && !found; ++mask) {
        UElem x = u_zero(base);
        for (unsigned i = 0; i < f; ++i)
          if (mask & (1u << i)) x[i] = 1;
        if (rf_trace2(base, rf_of(base, x)) == 1) {
          w1 = x;
          found = true;
        }
      }
      if (!found) throw std::logic_error("no trace-one element");
    }
    std::vector<UElem> unit_reps;  // representatives 1 + 2a + 4b
    for (unsigned mask = 0; mask < (1u << f); ++mask) {
      for (int useb : {0, 1}) {
        UElem u = u_scalar(base, 1);
        for (unsigned i = 0; i < f; ++i)
          if (mask & (1u << i)) u[i] = mod(u[i] + 2, base.pK);
        if (useb)
          for (unsigned i = 0; i < f; ++i) u[i] = mod(u[i] + 4 * w1[i], base.pK);
        unit_reps.push_back(u);
      }
    }
    auto same_class = [&](const UElem& x, const UElem& y) {
      return is_square(base, l_from_unit(base, u_mul(base, x, y)));
    };
    std::vector<UElem> ram_units;
    for (auto& u : unit_reps) {
      bool cls = false;
      if (unit_square_2unram(base, u, &cls)) continue;  // square
      if (cls) continue;                                // unramified class
      bool dup = false;
      for (auto& v : ram_units)
        if (same_class(u, v)) dup = true;
      if (!dup) ram_units.push_back(u);
    }
    for (auto& u : ram_units) out.push_back(model_ram(p, (int)f, K, 2, u, false));
    std::vector<UElem> eis;
    for (auto& u : unit_reps) {
      bool dup = false;
      for (auto& v : eis)
        if (same_class(u, v)) dup = true;
      if (!dup) eis.push_back(u);
    }
    for (auto& u : eis)
      out.push_back(
          model_ram(p, (int)f, K, 2, u_mul(base, u_scalar(base, 2), u), true));
    return out;
  }
  if (e == 3) {
    if (p == 3)
      throw UnsupportedWildCase(
          "completion: wildly ramified cubic place at 3 has no model");
    Int q = ipow(p, f);
    if (f > 1 && mod(q - 1, 3) == 0)
      throw UnsupportedWildCase(
          "completion: ramified cubic place over a large residue field");
    LModel base = model_unram(p, (int)f, K);
    std::vector<UElem> us{u_scalar(base, 1)};
    if (f == 1 && mod(p, 3) == 1) {
      Int c = 2;
      while (powmod(c, (p - 1) / 3, p) == 1) ++c;
      us.push_back(u_scalar(base, c));
      us.push_back(u_scalar(base, mod(c * c, p)));
    }
    for (auto& u : us)
      out.push_back(
          model_ram(p, (int)f, K, 3, u_mul(base, u_scalar(base, p), u), true));
    return out;
  }
  throw UnsupportedWildCase("completion: ramification index without a model");
}

// computable automorphisms of a candidate model over Q_p, and the orbit
// size an exact-shape root must have under them
struct ModelAut {
  std::vector<std::function<LElem(const LElem&)>> gens;
  long keep_size = 1;
};

ModelAut model_automorphisms(const LModel& m) {
  ModelAut A;
  bool need_frob = m.f > 1 && (m.e != 2 || m.p != 2);
  UElem rho;
  if (need_frob) rho = frob_root(m);
  if (m.e == 1) {
    A.keep_size = m.f;
    if (m.f > 1)
      A.gens.push_back([m, rho](const LElem& x) {
        LElem r = l_zero(m);
        r.c[0] = apply_frob_u(m, rho, x.c[0]);
        return r;
      });
    return A;
  }
  if (m.e == 2) {
    // conjugation g -> -g
    A.gens.push_back([m](const LElem& x) {
      LElem r = x;
      r.c[1] = u_sub(m, u_zero(m), r.c[1]);
      return r;
    });
    if (m.p == 2) {
      A.keep_size = 2;  // no Frobenius extension; ambiguities fail validation
      return A;
    }
    A.keep_size = 2 * m.f;
    if (m.f > 1) {
      // Frobenius extension g -> s g with s^2 = frob(delta)/delta, exact
      // because the unit part of delta is a Teichmueller representative
      UElem wpart = u_divp(m, m.gen_pow);
      UElem s = vred_pow(wpart, (m.p - 1) / 2, m.red, m.pK);
      A.gens.push_back([m, rho, s](const LElem& x) {
        LElem r = l_zero(m);
        r.c[0] = apply_frob_u(m, rho, x.c[0]);
        r.c[1] = u_mul(m, apply_frob_u(m, rho, x.c[1]), s);
        return r;
      });
    }
    return A;
  }
  // e == 3 (f == 1, or f > 1 with q not 1 mod 3)
  if (m.f == 1 && mod(m.p, 3) == 1) {
    Int z = 0;  // cube root of unity: residue root of T^2 + T + 1, lifted
    for (Int c = 1; c < m.p; ++c)
      if (mod(c * c + c + 1, m.p) == 0) {
        z = c;
        break;
      }
    for (int it = 0; it < 64; ++it) {
      Int val = mod(z * z + z + 1, m.pK);
      if (val == 0) break;
      z = mod(z - val * inv_mod(2 * z + 1, m.pK), m.pK);
    }
    Int z2 = mod(z * z, m.pK);
    A.keep_size = 3;
    A.gens.push_back([m, z, z2](const LElem& x) {
      LElem r = x;
      r.c[1][0] = mod(r.c[1][0] * z, m.pK);
      r.c[2][0] = mod(r.c[2][0] * z2, m.pK);
      return r;
    });
    return A;
  }
  A.keep_size = m.f;
  if (m.f > 1)
    A.gens.push_back([m, rho](const LElem& x) {
      LElem r = l_zero(m);
      for (int i = 0; i < m.e; ++i) r.c[i] = apply_frob_u(m, rho, x.c[i]);
      return r;
    });
  return A;
}

// partition roots into orbits under the generators; tol is a pi-valuation
std::vector<std::vector<int>> orbit_partition(const LModel& m,
                                              const std::vector<LElem>& roots,
                                              const ModelAut& A, long tol) {
  auto find_match = [&](const LElem& x) {
    for (size_t i = 0; i < roots.size(); ++i)
      if (l_val(m, l_sub(m, roots[i], x)) >= tol) return (int)i;
    throw UnsupportedWildCase("completion: conjugate root matching failed");
  };
  std::vector<int> comp(roots.size(), -1);
  std::vector<std::vector<int>> orbits;
  for (size_t i = 0; i < roots.size(); ++i) {
    if (comp[i] >= 0) continue;
    int id = (int)orbits.size();
    std::vector<int> todo{(int)i};
    comp[i] = id;
    orbits.push_back({(int)i});
    while (!todo.empty()) {
      int cur = todo.back();
      todo.pop_back();
      for (auto& g : A.gens) {
        int img = find_match(g(roots[(size_t)cur]));
        if (comp[img] < 0) {
          comp[img] = id;
          orbits[(size_t)id].push_back(img);
          todo.push_back(img);
        }
      }
    }
  }
  return orbits;
}

}  // namespace

std::vector<Completion> completions(const QPoly& f0, const Int& p, int extraK,
                                    const SplittingOverride* ovr) {
  int n = f0.degree();
  if (n < 1) throw std::invalid_argument("completions: constant polynomial");
  auto [g, scale] = make_monic_integer(f0);
  Rat drat = discriminant(g);
  if (drat == 0) throw std::invalid_argument("completions: not squarefree");
  long vd = rat_valuation(drat, p);
  // deeply wild dyadic polynomials of degree >= 4 make the digit search
  // intractable; callers fall back to Galois data or defer one place by
  // reciprocity, both of which stay exact
  if (p == 2 && n >= 4 && vd >= 10)
    throw UnsupportedWildCase("completion: deeply wild dyadic place");
  long vscale = scale == 0 ? 0 : (long)valuation(iabs(scale), p);
  // the norm-form valuation resolves pi-valuations only up to K - 2, so K
  // must absorb the worst ramified accuracy demand e*(tol + vd) with e <= 3
  int K = (int)(6 * vd + 20 + n * vscale + extraK);
  long tol = vd + 6;  // above root separation, below root accuracy

  std::vector<Int> gc;
  for (auto& c : g.c) gc.push_back(num(c));
  Int wsc = scale / ipow(p, (unsigned)vscale);

  if (p != 2 && vd == 0) {
    // tame and unramified everywhere above p: one completion per
    // irreducible factor mod p, each root obtained by Newton lifting
    std::vector<Completion> tame;
    FpPoly gbar;
    for (auto& ci : gc) gbar.push_back(mod(ci, p));
    for (auto& h : fp_factor_squarefree(fp_trim(gbar), p)) {
      LModel m = model_from_irreducible(p, h, K);
      LElem r = newton_root_unram(m, gc, h);
      Int winv = inv_mod(wsc, m.pK);
      tame.push_back(Completion{m, SElem{l_scale_int(m, r, winv), vscale}, 1u,
                                (unsigned)((int)h.size() - 1)});
    }
    unsigned tot = 0;
    for (auto& c : tame) tot += c.e * c.f;
    if ((int)tot != n)
      throw UnsupportedWildCase("completion: mod-p factors lost degree");
    return tame;
  }

  SplittingType st;
  bool have_st = true;
  try {
    st = splitting_type(f0, p, ovr);
  } catch (const UnsupportedWildCase&) {
    have_st = false;
  }
  std::vector<std::pair<unsigned, unsigned>> shapes;
  if (have_st) {
    std::set<std::pair<unsigned, unsigned>> s;
    for (auto& ef : st) s.insert({ef.e, ef.f});
    shapes.assign(s.begin(), s.end());
  } else {
    for (unsigned e : {1u, 2u, 3u})
      for (unsigned f = 1; e * f <= (unsigned)n; ++f) shapes.push_back({e, f});
  }

  std::vector<Completion> out;
  for (auto& [e, f] : shapes) {
    std::vector<LModel> models;
    try {
      models = candidate_models(p, e, f, K);
    } catch (const UnsupportedWildCase&) {
      if (have_st) throw;  // the shape genuinely occurs and has no model
      continue;
    }
    for (auto& m : models) {
      auto roots = roots_in_model(m, gc, vd);
      if (roots.empty()) continue;
      ModelAut A = model_automorphisms(m);
      auto orbits = orbit_partition(m, roots, A, (long)m.e * tol);
      for (auto& orb : orbits) {
        if ((long)orb.size() != A.keep_size) continue;  // proper subfield
        const LElem& r =
            roots[(size_t)*std::min_element(orb.begin(), orb.end())];
        if (e >= 2) {
          bool unram_sub = true;
          for (int i = 1; i < m.e; ++i)
            if (u_val(m, r.c[i]) < tol) unram_sub = false;
          if (unram_sub) continue;  // lives in the unramified part
        }
        Int winv = inv_mod(wsc, m.pK);
        out.push_back(
            Completion{m, SElem{l_scale_int(m, r, winv), vscale}, e, f});
      }
    }
  }

  unsigned total = 0;
  for (auto& c : out) total += c.e * c.f;
  if ((int)total != n)
    throw UnsupportedWildCase(
        "completion: could not resolve every place of the algebra");
  if (have_st) {
    SplittingType found;
    for (auto& c : out) found.push_back({c.e, c.f});
    std::sort(found.begin(), found.end());
    if (found != st)
      throw UnsupportedWildCase(
          "completion: place shapes disagree with the splitting data");
  }
  return out;
}

}  // namespace toridn::local

// ===========================================================================
// public entry points
// ===========================================================================

namespace toridn {

using namespace local;

namespace {

// overrides in a factor spec describe the factor polynomial; apply them to
// fixed-field computations only when the two polynomials coincide
const SplittingOverride* ovr_for_fixed(const Factor& F) {
  if (F.spec.local_override.empty()) return nullptr;
  if (F.fixed_poly.degree() != F.spec.poly.degree()) return nullptr;
  return &F.spec.local_override;
}

const SplittingOverride* ovr_for_poly(const Factor& F) {
  return F.spec.local_override.empty() ? nullptr : &F.spec.local_override;
}

// ramification index of the local multiquadratic extension cut out by a
// group G of square classes: the unramified part is at most quadratic
int mq_ram_index(const LocalSquareGroup& G, const Place& v) {
  int inert = 0, total = 0;
  for (auto& x : G.elements()) {
    ++total;
    SquareClass c(x);
    if (c.is_trivial() || quad_ext_type(c, v) == QuadExtType::Unramified) ++inert;
  }
  return total / inert;
}

// uniform split/ramified data for Galois factors where no completion model
// exists (wild places); S3 fixed fields have no uniform behaviour
std::pair<bool, bool> galois_fallback(const Factor& F, const Int& p) {
  Place v = Place::finite(p);
  switch (F.kind) {
    case FactorKind::Quadratic: {
      SquareClass d(discriminant(F.spec.poly));
      QuadExtType t = quad_ext_type(d, v);
      return {t == QuadExtType::Split, t == QuadExtType::Ramified};
    }
    case FactorKind::CyclicEven: {
      // the quadratic subfield is cut out by the discriminant class, and
      // square classes survive odd-degree completions of the fixed field
      SquareClass dq(discriminant(F.spec.poly));
      QuadExtType t = quad_ext_type(dq, v);
      return {t == QuadExtType::Split, t == QuadExtType::Ramified};
    }
    case FactorKind::MultiQuad: {
      std::vector<int> flips, keeps;
      for (size_t j = 0; j < F.mq.size(); ++j)
        (F.mq_sigma_flip[j] ? flips : keeps).push_back((int)j);
      if (flips.empty()) throw std::logic_error("galois_fallback: no flip");
      LocalSquareGroup G(v);
      for (int j : keeps) G.add(Rat(F.mq[(size_t)j]));
      for (size_t t = 1; t < flips.size(); ++t)
        G.add(Rat(F.mq[(size_t)flips[0]] * F.mq[(size_t)flips[t]]));
      Rat d(F.mq[(size_t)flips[0]]);
      if (G.contains(d)) return {true, false};
      int eF = mq_ram_index(G, v);
      LocalSquareGroup GE = G;
      GE.add(d);
      return {false, mq_ram_index(GE, v) == 2 * eF};
    }
    default:
      throw UnsupportedWildCase(
          "fixed places: wild place of a non-Galois fixed field");
  }
}

}  // namespace

std::vector<FixedPlace> fixed_places(const EtaleInvolution& E, const Int& p) {
  std::vector<FixedPlace> out;
  int fi = 0;
  for (auto& F : E.factors()) {
    if (F.spec.exchange || F.sigma_trivial) {
      auto st = splitting_type(F.spec.poly, p, ovr_for_poly(F));
      int idx = 0;
      for (auto& ef : st) out.push_back({fi, idx++, ef.e, ef.f, true, false});
      ++fi;
      continue;
    }
    QPoly drel(F.delta_rel);
    bool done = false;
    try {
      for (int extraK : {4, 16, 40}) {
        auto comps = completions(F.fixed_poly, p, extraK, ovr_for_fixed(F));
        bool short_precision = false;
        std::vector<FixedPlace> mine;
        int idx = 0;
        for (auto& w : comps) {
          SElem dv = eval_poly(w.m, drel, w.root);
          if (s_is_zeroish(w.m, dv)) {
            short_precision = true;
            break;
          }
          bool split = s_is_square(w.m, dv);
          bool ram = !split && !ext_unramified(w.m, s_descale(w.m, dv));
          mine.push_back({fi, idx++, w.e, w.f, split, ram});
        }
        if (!short_precision) {
          out.insert(out.end(), mine.begin(), mine.end());
          done = true;
          break;
        }
      }
      if (!done)
        throw std::logic_error("fixed_places: relative discriminant vanishes");
    } catch (const UnsupportedWildCase&) {
      auto st = splitting_type(F.fixed_poly, p, ovr_for_fixed(F));
      auto [split, ram] = galois_fallback(F, p);
      int idx = 0;
      for (auto& ef : st) out.push_back({fi, idx++, ef.e, ef.f, split, ram});
    }
    ++fi;
  }
  return out;
}

int corestriction_local_invariant(const EtaleInvolution& E,
                                  const std::vector<std::vector<Rat>>& a,
                                  const std::vector<std::vector<Rat>>& b,
                                  const Place& v) {
  const auto& fs = E.factors();
  if (a.size() != fs.size() || b.size() != fs.size())
    throw std::invalid_argument("corestriction: wrong number of blocks");
  int bit = 0;
  for (size_t fi = 0; fi < fs.size(); ++fi) {
    const Factor& F = fs[fi];
    if ((int)a[fi].size() != F.n() || (int)b[fi].size() != F.n())
      throw std::invalid_argument("corestriction: wrong block length");
    QPoly ap(std::vector<Rat>(a[fi]));
    QPoly bp(std::vector<Rat>(b[fi]));
    if (ap.is_zero() || bp.is_zero())
      throw std::invalid_argument("corestriction: zero argument");
    // projection formula: when one argument is rational the sum of the local
    // invariants over the places above v collapses to a single symbol over Q
    // against the field norm of the other argument
    if (ap.degree() == 0 || bp.degree() == 0) {
      const QPoly& cst = ap.degree() == 0 ? ap : bp;
      const QPoly& oth = ap.degree() == 0 ? bp : ap;
      Rat nrm = resultant(F.fixed_poly, oth);
      for (int i = 0; i < oth.degree(); ++i) nrm /= F.fixed_poly.lead();
      if (nrm == 0)
        throw std::invalid_argument("corestriction: argument not a unit");
      if (hilbert_symbol(cst.coeff(0), nrm, v) == -1) bit ^= 1;
      continue;
    }
    if (v.infinite) {
      for (auto& iv : isolate_real_roots(F.fixed_poly)) {
        int sa = sign_at_root(F.fixed_poly, iv, ap);
        int sb = sign_at_root(F.fixed_poly, iv, bp);
        if (sa == 0 || sb == 0)
          throw std::invalid_argument("corestriction: argument not a unit");
        if (sa < 0 && sb < 0) bit ^= 1;
      }
      continue;
    }
    if (F.fixed_poly.degree() == 1) {
      Rat root = -F.fixed_poly.coeff(0) / F.fixed_poly.coeff(1);
      Rat av = ap.eval(root), bv = bp.eval(root);
      if (av == 0 || bv == 0)
        throw std::invalid_argument("corestriction: argument not a unit");
      if (hilbert_symbol(av, bv, v) == -1) bit ^= 1;
      continue;
    }
    bool done = false;
    for (int extraK : {6, 18, 42}) {
      auto comps = completions(F.fixed_poly, v.p, extraK, ovr_for_fixed(F));
      bool short_precision = false;
      int local_bit = 0;
      for (auto& w : comps) {
        SElem av = eval_poly(w.m, ap, w.root);
        SElem bv = eval_poly(w.m, bp, w.root);
        if (s_is_zeroish(w.m, av) || s_is_zeroish(w.m, bv)) {
          short_precision = true;
          break;
        }
        if (s_hilbert(w.m, av, bv) == -1) local_bit ^= 1;
      }
      if (!short_precision) {
        bit ^= local_bit;
        done = true;
        break;
      }
    }
    if (!done)
      throw std::logic_error("corestriction: arguments vanish at a place");
  }
  return bit;
}

Brauer2Class corestriction_symbol(const EtaleInvolution& E,
                                  const std::vector<std::vector<Rat>>& a,
                                  const std::vector<std::vector<Rat>>& b) {
  const auto& fs = E.factors();
  if (a.size() != fs.size() || b.size() != fs.size())
    throw std::invalid_argument("corestriction: wrong number of blocks");
  std::set<Int> cand{Int(2)};
  auto add_primes = [&](const Rat& x) {
    if (x == 0) throw std::invalid_argument("corestriction: argument not a unit");
    for (auto& [q, e] : factorize(num(x) * den(x))) {
      (void)e;
      cand.insert(q);
    }
  };
  auto add_den_primes = [&](const QPoly& g) {
    for (auto& c : g.c)
      if (den(c) != 1)
        for (auto& [q, e] : factorize(den(c))) {
          (void)e;
          cand.insert(q);
        }
  };
  for (size_t fi = 0; fi < fs.size(); ++fi) {
    const Factor& F = fs[fi];
    QPoly fm = F.fixed_poly;
    Rat lc = fm.c.back();
    if (lc != 1)
      for (auto& c : fm.c) c /= lc;
    QPoly ap(std::vector<Rat>(a[fi]));
    QPoly bp(std::vector<Rat>(b[fi]));
    // a finite place can contribute only where an argument fails to be a
    // unit or the residue characteristic is 2; every such prime divides a
    // resultant, a coefficient denominator, or the discriminant
    add_den_primes(fm);
    add_den_primes(ap);
    add_den_primes(bp);
    add_primes(discriminant(fm));
    add_primes(resultant(fm, ap));
    add_primes(resultant(fm, bp));
  }
  std::map<Place, int> bits;
  bits[Place::real()] = corestriction_local_invariant(E, a, b, Place::real());
  std::vector<Int> deferred;
  for (auto& p : cand) {
    try {
      bits[Place::finite(p)] =
          corestriction_local_invariant(E, a, b, Place::finite(p));
    } catch (const UnsupportedWildCase&) {
      deferred.push_back(p);
      if (deferred.size() > 1) throw;
    }
  }
  if (!deferred.empty()) {
    // reciprocity: the undecidable place carries the parity of the others
    int parity = 0;
    for (auto& [pl, bt] : bits) parity ^= bt;
    bits[Place::finite(deferred[0])] = parity;
  }
  Brauer2Class out;
  int check = 0;
  for (auto& [pl, bt] : bits) {
    if (bt) out.flip(pl);
    check ^= bt;
  }
  if (check)
    throw std::logic_error("corestriction: local invariants violate reciprocity");
  return out;
}

std::vector<std::vector<int>> decomposition_group(
    const EtaleInvolution& E, const GaloisSetPresentation& pres,
    const Place& v) {
  auto sys = detail::build_slots(E);
  std::vector<std::vector<int>> slot_coords;
  for (auto& s : sys.slots)
    slot_coords.push_back(local_square_coords(Rat(s.cls), v));
  auto pats = detail::pattern_basis(sys, slot_coords);
  std::vector<std::vector<int>> gens;
  for (auto& pat : pats)
    gens.push_back(detail::pattern_perm(E, pres, sys, pat));
  if (!v.infinite) {
    std::map<std::string, int> key_rep;
    for (size_t fi = 0; fi < sys.core_keys.size(); ++fi)
      if (!sys.core_keys[fi].empty() && !key_rep.count(sys.core_keys[fi]))
        key_rep[sys.core_keys[fi]] = (int)fi;
    std::vector<std::string> live;
    for (auto& [key, fi] : key_rep) {
      const Factor& F = E.factors()[(size_t)fi];
      bool nontrivial = false;
      for (auto& ef : splitting_type(F.fixed_poly, v.p, ovr_for_fixed(F)))
        if ((ef.e * ef.f) % 3 == 0) nontrivial = true;
      if (nontrivial) live.push_back(key);
    }
    if (live.size() > 1)
      throw UnsupportedGaloisStructure(
          "decomposition group: correlated cubic parts at one place");
    if (live.size() == 1)
      gens.push_back(detail::core_perm(E, pres, sys, live[0]));
  }
  return permutation_closure(pres.npoints, gens);
}

}  // namespace toridn
