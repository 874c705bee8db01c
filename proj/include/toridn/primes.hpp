#pragma once
// Integer factorization (trial division + Miller-Rabin + Pollard rho),
// Legendre symbols and squarefree parts.

#include <map>
#include <vector>

#include "toridn/rat.hpp"

namespace toridn {

bool is_prime(const Int& n);

// Prime factorization of |n| for n != 0, as prime -> exponent.
std::map<Int, unsigned> factorize(Int n);

// Squarefree integer d with q = d * (square), sign preserved.
Int squarefree_part(const Rat& q);

// Legendre symbol (a|p) for odd prime p: -1, 0, +1.
int legendre(Int a, const Int& p);

// Primes up to n, ascending.
std::vector<long> primes_up_to(long n);

}  // namespace toridn
