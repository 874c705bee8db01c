#pragma once

#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "toridn/poly.hpp"
#include "toridn/squareclass.hpp"

namespace toridn {

struct UnsupportedWildCase : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EFPair {
  unsigned e = 1, f = 1;
  bool operator<(const EFPair& o) const {
    return std::tie(e, f) < std::tie(o.e, o.f);
  }
  bool operator==(const EFPair& o) const { return e == o.e && f == o.f; }
};

// Splitting of Q_p ⊗ Q[x]/(f) into local fields, sorted ascending.
using SplittingType = std::vector<EFPair>;

// Optional user-supplied splitting data keyed by prime.
using SplittingOverride = std::map<Int, SplittingType>;

SplittingType splitting_type(const QPoly& f, const Int& p,
                             const SplittingOverride* ovr = nullptr);

enum class QuadExtType { Split, Unramified, Ramified };

// Behaviour of Q_v(sqrt d) for a nonzero square class d; at the real place
// Split means d > 0 and Ramified means complex.
QuadExtType quad_ext_type(const SquareClass& d, const Place& v);

// Certified exact root counts of a squarefree rational polynomial in Z_p,
// in the unramified extension of residue degree fdeg, and in the quadratic
// extension Q_p(sqrt d) for a nonsquare class d.
int count_roots_qp(const QPoly& g, const Int& p);
int count_roots_unram(const QPoly& g, const Int& p, int fdeg);
int count_roots_quadext(const QPoly& g, const Int& p, const SquareClass& d);

}  // namespace toridn
