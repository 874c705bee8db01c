#pragma once
// Hilbert symbols over Q_v and quaternion Brauer classes.

#include "toridn/squareclass.hpp"

namespace toridn {

// (a,b)_v as +-1; a, b nonzero.
int hilbert_symbol(const Rat& a, const Rat& b, const Place& v);

// Class of the quaternion algebra (a,b) over Q: set of ramified places.
Brauer2Class quaternion_class(const Rat& a, const Rat& b);

// Places where (a,b) could possibly ramify: real place, 2, odd primes of ab.
std::vector<Place> relevant_places(const Rat& a, const Rat& b);

// Brute-force check that z^2 = a x^2 + b y^2 has a nontrivial Q_p-point
// (finite v) or R-point (real v). Independent of the formula path; used by
// test oracles and exposed here so the self-test command can run it too.
bool conic_solvable_bruteforce(const Rat& a, const Rat& b, const Place& v);

}  // namespace toridn
