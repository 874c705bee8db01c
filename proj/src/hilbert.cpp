#include "toridn/hilbert.hpp"

#include <algorithm>
#include <stdexcept>

#include "toridn/primes.hpp"

namespace toridn {

namespace {

// Representative of a / p^{v(a)} with the same square class, prime to p.
Int unit_rep(const Rat& a, const Int& p) {
  long v = rat_valuation(a, p);
  Rat u = v >= 0 ? a / Rat(ipow(p, (unsigned)v)) : a * Rat(ipow(p, (unsigned)-v));
  return num(u) * den(u);
}

int eps2(const Int& u) { return (int)mod((u - 1) / 2, 2).convert_to<long>(); }
int omega2(const Int& u) { return (int)mod((u * u - 1) / 8, 2).convert_to<long>(); }

}  // namespace

int hilbert_symbol(const Rat& a, const Rat& b, const Place& v) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol: zero argument");
  if (v.infinite) return (a < 0 && b < 0) ? -1 : 1;
  const Int& p = v.p;
  long alpha = rat_valuation(a, p), beta = rat_valuation(b, p);
  Int u = unit_rep(a, p), w = unit_rep(b, p);
  if (p == 2) {
    long e = Int(eps2(u) * eps2(w)).convert_to<long>();
    if (alpha % 2) e += omega2(w);
    if (beta % 2) e += omega2(u);
    return e % 2 ? -1 : 1;
  }
  int sign = 1;
  if ((alpha % 2) && (beta % 2) && ((p - 1) / 2) % 2 == 1) sign = -sign;
  if ((beta % 2) && legendre(u, p) == -1) sign = -sign;
  if ((alpha % 2) && legendre(w, p) == -1) sign = -sign;
  return sign;
}

std::vector<Place> relevant_places(const Rat& a, const Rat& b) {
  std::set<Place> s{Place::real(), Place::finite(2)};
  for (const Rat& x : {a, b})
    for (auto& [p, e] : factorize(num(x) * den(x))) {
      (void)e;
      if (p != 2) s.insert(Place::finite(p));
    }
  return std::vector<Place>(s.begin(), s.end());
}

Brauer2Class quaternion_class(const Rat& a, const Rat& b) {
  Brauer2Class c;
  for (auto& v : relevant_places(a, b))
    if (hilbert_symbol(a, b, v) == -1) c.flip(v);
  return c;
}

// ---------------------------------------------------------------------------
// Brute-force conic solvability over Q_p, independent of the symbol formulas.
//
// z^2 = a x^2 + b y^2 has a nontrivial Q_p-zero iff it has a primitive
// solution mod p^k with k = 2 v_p(4ab) + 3.  A primitive triple has a unit
// coordinate which we scale to 1, giving three one-parameter searches
//   exists w mod p^k :  c0 + c2 w^2  is represented by  B u^2  (mod p^k)
// with (c0,c2,B) in {(a,b,1), (b,a,1), (1,-a,b)}.  The search walks base-p
// digits of w and prunes a ball as soon as the representability of
// c0 + c2 w^2 is constant on it.  All arithmetic is on machine words.
// ---------------------------------------------------------------------------

namespace {

struct ModCtx {
  long p;
  int k;
  long pk;  // p^k, fits well inside 63 bits
};

long val_capped(long t, const ModCtx& m) {
  if (t == 0) return m.k;
  long v = 0;
  while (t % m.p == 0) {
    t /= m.p;
    ++v;
  }
  return std::min(v, (long)m.k);
}

long modinv(long a, long mod) {
  long r0 = mod, r1 = a % mod, s0 = 0, s1 = 1;
  while (r1) {
    long q = r0 / r1;
    std::swap(r0 -= q * r1, r1);
    std::swap(s0 -= q * s1, s1);
  }
  if (r0 != 1) throw std::logic_error("modinv: not invertible");
  return ((s0 % mod) + mod) % mod;
}

int legendre_unit(long u, long p) {
  long r = 1, base = u % p, e = (p - 1) / 2;
  if (base < 0) base += p;
  while (e) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return r == 1 ? 1 : -1;
}

// exists y with B y^2 == t (mod p^k)?  B nonzero mod p^k.
bool represented(long t, long B, const ModCtx& m) {
  t %= m.pk;
  if (t < 0) t += m.pk;
  if (t == 0) return true;  // y = 0
  long v = val_capped(t, m);
  if (v >= m.k) return true;
  long vB = val_capped(B % m.pk, m);
  if (v < vB || (v - vB) % 2) return false;
  long ut = t, uB = B % m.pk;
  if (uB < 0) uB += m.pk;
  for (long i = 0; i < v; ++i) ut /= m.p;
  for (long i = 0; i < vB; ++i) uB /= m.p;
  int rem = m.k - (int)v;
  long prem = 1;
  for (int i = 0; i < rem && prem <= m.pk / m.p; ++i) prem *= m.p;
  long u = (__int128)ut * modinv(uB % prem, prem) % prem;
  if (m.p == 2) {
    int digits = std::min(rem, 3);
    return u % (1L << digits) == 1;
  }
  return legendre_unit(u, m.p) == 1;
}

// exists w == w0 (mod p^j) with c0 + c2 w^2 represented by B (mod p^k)?
bool search(long c0, long c2, long B, const ModCtx& m, long w0, long pj, int j) {
  long t = (c0 + (__int128)c2 * w0 % m.pk * w0) % m.pk;
  if (t < 0) t += m.pk;
  if (j >= m.k) return represented(t, B, m);
  long v = val_capped(t, m);
  long vc2 = val_capped(((c2 % m.pk) + m.pk) % m.pk, m);
  long v2w = w0 == 0 ? m.k : val_capped(2 * w0 % m.pk, m);
  long delta = vc2 + std::min((long)j + v2w, 2L * j);
  long need = m.p == 2 ? std::min(3L, (long)m.k - v) : 1;
  if (delta >= m.k || (v < m.k && delta >= v + need))
    return represented(t, B, m);
  for (long s = 0; s < m.p; ++s)
    if (search(c0, c2, B, m, (w0 + pj * s) % m.pk, pj * m.p, j + 1)) return true;
  return false;
}

}  // namespace

bool conic_solvable_bruteforce(const Rat& a, const Rat& b, const Place& v) {
  if (a == 0 || b == 0) throw std::invalid_argument("conic: zero coefficient");
  if (v.infinite) return a > 0 || b > 0;
  long p = v.p.convert_to<long>();
  // Same square class, integral, and with p-valuation at most 1.
  auto reduce = [&](const Rat& x) {
    Int t = num(x) * den(x);
    Int p2 = Int(p) * p;
    while (t % p2 == 0) t /= p2;
    return t;
  };
  Int A = reduce(a), B = reduce(b);
  int vab = (int)(p == 2 ? 2 : 0);
  if (A % p == 0) ++vab;
  if (B % p == 0) ++vab;
  int k = 2 * vab + 3;
  long pk = 1;
  for (int i = 0; i < k; ++i) pk *= p;  // <= 13^7 or 2^17
  ModCtx m{p, k, pk};
  long am = mod(A, Int(pk)).convert_to<long>();
  long bm = mod(B, Int(pk)).convert_to<long>();
  long charts[3][3] = {{am, bm, 1}, {bm, am, 1}, {1, (pk - am) % pk, bm}};
  for (auto& c : charts)
    if (search(c[0], c[1], c[2], m, 0, 1, 0)) return true;
  return false;
}

}  // namespace toridn
