#include "toridn/primes.hpp"

#include <algorithm>
#include <random>

namespace toridn {

std::optional<Rat> parse_rat(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      return Rat(Int(s));
    }
    Int n(s.substr(0, slash));
    Int d(s.substr(slash + 1));
    if (d == 0) return std::nullopt;
    return Rat(n) / Rat(d);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string rat_to_string(const Rat& q) {
  std::string s = num(q).str();
  if (den(q) != 1) s += "/" + den(q).str();
  return s;
}

namespace {

bool miller_rabin_witness(const Int& n, const Int& a, const Int& d, unsigned r) {
  Int x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned i = 1; i < r; ++i) {
    x = (x * x) % n;
    if (x == n - 1) return false;
  }
  return true;
}

Int pollard_rho(const Int& n, std::mt19937_64& rng) {
  if (n % 2 == 0) return 2;
  while (true) {
    Int x = Int(rng() % 1000000007) % n;
    Int c = Int(rng() % 1000000007) % n;
    if (c == 0) c = 1;
    Int y = x, d = 1;
    auto f = [&](const Int& v) { return (v * v + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      if (x == y) break;
      d = igcd(iabs(x - y), n);
    }
    if (d != 1 && d != n) return d;
  }
}

void factor_rec(Int n, std::map<Int, unsigned>& out, std::mt19937_64& rng) {
  if (n == 1) return;
  if (is_prime(n)) {
    out[n]++;
    return;
  }
  Int d = pollard_rho(n, rng);
  factor_rec(d, out, rng);
  factor_rec(n / d, out, rng);
}

}  // namespace

bool is_prime(const Int& n) {
  if (n < 2) return false;
  for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  Int d = n - 1;
  unsigned r = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++r;
  }
  // Deterministic witness set for n < 3.3e24.
  for (long a : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
    if (miller_rabin_witness(n, a, d, r)) return false;
  }
  return true;
}

std::map<Int, unsigned> factorize(Int n) {
  if (n == 0) throw std::invalid_argument("factorize(0)");
  n = iabs(n);
  std::map<Int, unsigned> out;
  for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L, 41L,
                 43L, 47L, 53L, 59L, 61L, 67L, 71L, 73L, 79L, 83L, 89L, 97L}) {
    while (n % p == 0) {
      out[p]++;
      n /= p;
    }
  }
  if (n == 1) return out;
  std::mt19937_64 rng(0x5eedF00dULL);
  factor_rec(n, out, rng);
  return out;
}

Int squarefree_part(const Rat& q) {
  if (q == 0) throw std::invalid_argument("squarefree_part(0)");
  Int m = num(q) * den(q);
  int sign = sgn(m);
  auto f = factorize(m);
  Int r = 1;
  for (auto& [p, e] : f)
    if (e % 2) r *= p;
  return sign * r;
}

int legendre(Int a, const Int& p) {
  a = mod(a, p);
  if (a == 0) return 0;
  Int r = powmod(a, (p - 1) / 2, p);
  return r == 1 ? 1 : -1;
}

std::vector<long> primes_up_to(long n) {
  std::vector<bool> sieve(std::max(n + 1, 2L), true);
  sieve[0] = sieve[1] = false;
  for (long i = 2; i * i <= n; ++i)
    if (sieve[i])
      for (long j = i * i; j <= n; j += i) sieve[j] = false;
  std::vector<long> out;
  for (long i = 2; i <= n; ++i)
    if (sieve[i]) out.push_back(i);
  return out;
}

}  // namespace toridn
