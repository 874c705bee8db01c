#pragma once
// Shared helpers for the étale-algebra translation units: exact arithmetic
// in Q[x]/(f), linear solves over Q, and the square-class "slot" machinery
// that glues factor Galois coordinates into one permutation group.

#include <optional>
#include <string>
#include <vector>

#include "toridn/etale.hpp"

namespace toridn::detail {

// ---- arithmetic in K = Q[x]/(fmon), fmon monic; coords low-to-high ----

std::vector<Rat> kcoords(const QPoly& g, int n);
QPoly kpoly(const std::vector<Rat>& a);
std::vector<Rat> kmul(const std::vector<Rat>& a, const std::vector<Rat>& b,
                      const QPoly& fmon);
// evaluate the coordinate polynomial of a at the element s (Horner)
std::vector<Rat> ksubst(const std::vector<Rat>& a, const std::vector<Rat>& s,
                        const QPoly& fmon);
std::vector<Rat> kpow(std::vector<Rat> a, unsigned e, const QPoly& fmon);
bool kzero(const std::vector<Rat>& a);

// Tr(theta^i) for i < deg via Newton's identities.
std::vector<Rat> power_trace_table(const QPoly& fmon);
Rat ktrace(const std::vector<Rat>& a, const std::vector<Rat>& traces);

// Solve sum_j x_j * cols[j] = target exactly; empty optional if unsolvable.
std::optional<std::vector<Rat>> solve_linear(
    const std::vector<std::vector<Rat>>& cols,
    const std::vector<Rat>& target);

// Minimal polynomial of alpha in Q[x]/(fmon).
QPoly min_poly_in_field(const std::vector<Rat>& alpha, const QPoly& fmon);

// Coordinates of target in the power basis 1, beta, ..., beta^{n-1}.
std::optional<std::vector<Rat>> in_power_basis(const std::vector<Rat>& beta,
                                               const std::vector<Rat>& target,
                                               int n, const QPoly& fmon);

// ---- slot machinery: quadratic Galois coordinates across factors ----

struct SlotSystem {
  struct Slot {
    int factor;
    Int cls;  // squarefree class attached to this coordinate
  };
  std::vector<Slot> slots;
  // per factor, the slot indices in declared order (MultiQuad: one per class;
  // Quadratic / S3 / CyclicEven: a single slot; others: none)
  std::vector<std::vector<int>> factor_slots;
  // per factor, a key identifying its cubic 3-core ("" if none)
  std::vector<std::string> core_keys;
};

SlotSystem build_slots(const EtaleInvolution& E);

// F2 row space of the matrix whose column j is coords_of(slot j); each
// returned row is a slot bit-pattern.
std::vector<std::vector<int>> pattern_basis(
    const SlotSystem& sys,
    const std::vector<std::vector<int>>& slot_coords);

// Lift a slot sign-pattern to a permutation of the character set.
std::vector<int> pattern_perm(const EtaleInvolution& E,
                              const GaloisSetPresentation& pres,
                              const SlotSystem& sys,
                              const std::vector<int>& pattern);

// Order-3 generator acting simultaneously on every factor sharing the key.
std::vector<int> core_perm(const EtaleInvolution& E,
                           const GaloisSetPresentation& pres,
                           const SlotSystem& sys, const std::string& key);

// point offset of each factor inside the character set
std::vector<int> factor_offsets(const EtaleInvolution& E);

}  // namespace toridn::detail
