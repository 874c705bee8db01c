#pragma once
// Trace forms of etale algebras with involution, their invariants, and the
// local embedding criteria for maximal tori of orthogonal groups and of
// orthogonal/unitary groups of central simple algebras with involution.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toridn/etale.hpp"
#include "toridn/quadform.hpp"

namespace toridn {

// A trace-form instance: the algebra with involution together with a
// sigma-fixed unit lambda, given by its coordinates in the fixed subalgebra
// (one coordinate block per factor, in the power basis of the fixed field).
struct TraceFormSpec {
  const EtaleInvolution* E = nullptr;
  std::vector<std::vector<Rat>> lambda;  // fixed-field coords per factor
};

// Gram matrix of q(x) = 1/2 * Tr_{E/Q}(lambda * x * sigma(x)) on the
// standard basis of E.  Throws std::invalid_argument if lambda is not a
// sigma-fixed unit.
QuadFormQ trace_form(const EtaleInvolution& E,
                     const std::vector<std::vector<Rat>>& lambda);

// Invariants of the trace form computed from the closed formulas:
//   disc  = (-1)^n * delta_{E/Q}            (n = dim E / 2)
//   witt  = witt(q_{E,1}) + Cor_{F/Q}(delta_{E/F}, lambda)
//   sig   = (n + s - r, n - s + r)          (s, r from the real data)
// hasse is recovered from witt by the dimension correction.
FormInvariants invariants_via_formula(const EtaleInvolution& E,
                                      const std::vector<std::vector<Rat>>& lambda);

// ---------------------------------------------------------------------------
// Clifford data over an etale base.
//
// The even Clifford algebra of a (trace) form lives over a base F that is
// either Q x Q or a quadratic field; more generally an invariant package may
// carry 2-torsion Brauer classes over any etale Q-algebra F given by a list
// of defining polynomials (linear or irreducible).  Local classes are indexed
// by (place v of Q, local factor index); the local factors of F over v are the
// concatenation, over the field factors of F in order, of their places above
// v, each factor's places ordered by the sorted (e, f) splitting pattern (for
// finite v) or with real embeddings before complex ones (for v infinite).
// ---------------------------------------------------------------------------
struct EtaleBasePlaceMap {
  std::vector<QPoly> base;                    // defining polys of the factors
  std::map<std::pair<Place, int>, int> classes;  // (v, idx) -> Z/2, sparse

  // Number of local factors of the j-th base factor over v.
  static int local_factor_count(const QPoly& f, const Place& v);
  // Total local factors of F over v (sum over base factors).
  int total_local_factors(const Place& v) const;
  // Range [begin, end) of concatenated indices belonging to base factor j.
  std::pair<int, int> factor_index_range(int j, const Place& v) const;

  int at(const Place& v, int idx) const;  // 0 if absent
  void flip(const Place& v, int idx);     // toggle, erasing zeros
  bool is_trivial() const;

  // Places carrying at least one nonzero entry.
  std::vector<Place> support() const;

  // Checks index bounds and the per-field-factor even-parity law.
  // Returns an error message, or empty string if valid.
  std::string validate() const;

  bool operator==(const EtaleBasePlaceMap& o) const {
    return base == o.base && classes == o.classes;
  }
};

// Builds the base of the even Clifford algebra attached to a square class z:
// Q x Q when z is trivial, else the quadratic field with polynomial x^2 - z.
std::vector<QPoly> clifford_base_for(const SquareClass& z);

// Restriction of a 2-torsion Brauer class over Q to the quadratic etale
// algebra with the given base (doubling kills nothing at split places and
// kills the class at nonsplit ones).
EtaleBasePlaceMap restrict_to_base(const std::vector<QPoly>& base,
                                   const Brauer2Class& cls);

// ---------------------------------------------------------------------------
// Invariant package of a central simple algebra with orthogonal involution.
// ---------------------------------------------------------------------------
struct CSAInvData {
  int degree = 0;               // 2n
  Brauer2Class algebra_class;   // [A] in Br(Q)[2]
  SquareClass disc;             // discriminant of the involution
  EtaleBasePlaceMap clifford;   // even Clifford class over its center
  int real_index = 0;           // Witt-type index ell at the real place

  // Center of the even Clifford algebra as a square class: (-1)^n disc.
  SquareClass clifford_center_class() const;

  // Structural consistency (degree, center match, local Clifford structure
  // against the algebra class).  Returns error message or empty string.
  std::string validate() const;
};

// ---------------------------------------------------------------------------
// Embedding verdicts.
// ---------------------------------------------------------------------------
struct EmbeddingVerdict {
  // Every examined place appears; empty string = embeds locally there,
  // otherwise the first failing condition at that place:
  //   "discriminant" | "clifford" | "signature" | "embedding" | "index"
  std::map<Place, std::string> per_place;
  bool locally_everywhere = false;
  // Certificate that local-everywhere implies global, when one applies:
  //   "pairwise" | "field" | "CM" | "compositum" | "" (none)
  std::string local_global_certificate;

  std::vector<Place> failing_places() const;
};

// Decides, place by place, whether the torus attached to (E, sigma) embeds
// into the orthogonal group of q over every completion of Q.  dim q must be
// dim E or dim E + 1.
EmbeddingVerdict embed_check_orth(const EtaleInvolution& E, const QuadFormQ& q);

// Same decision for the twisted form: torus of (E, sigma) into the group of
// a central simple algebra with orthogonal involution given by its
// invariant package.  Throws std::invalid_argument("inconsistent CSA
// invariant data: ...") when the package fails validation.
EmbeddingVerdict embed_check_csa(const EtaleInvolution& E, const CSAInvData& A);

// Even Clifford class of the lambda-twisted involution from the class of the
// base involution: adds the restriction to the Clifford center of
// Cor_{F/Q}(delta_{E/F}, lambda).  The map's base must agree with the center
// determined by E (else std::invalid_argument("center mismatch")).
EtaleBasePlaceMap clifford_update(const EtaleBasePlaceMap& base_class,
                                  const EtaleInvolution& E,
                                  const std::vector<std::vector<Rat>>& lambda);

// Sufficient conditions under which local embedding everywhere implies a
// global embedding.  Returns "field", "CM", "compositum", "pairwise", or ""
// when none of the implemented criteria applies.
std::string local_global_sufficient(const EtaleInvolution& E);

// ---------------------------------------------------------------------------
// Local conjugacy classes of embedded tori (see classes.cpp).
//
// Over Q_v the classes of embeddings of the torus of (E, sigma) into the
// orthogonal group of a fixed form q are parametrized by lambda modulo norms
// and modulo the Weyl action; concretely by vectors in {0,1}^M indexed by
// the fixed-field places above v that are nonsplit in E (split places have
// surjective local norms and carry no coordinate), filtered by which twists
// realize the class of q over Q_v, modulo the induced action of Aut(E,sigma).
// ---------------------------------------------------------------------------
struct LambdaClassSet {
  Place v;
  int coordinate_count = 0;
  // Description of each coordinate: "factor#<i>[<j>]" with j the abstract
  // index of the nonsplit fixed place within factor i.
  std::vector<std::string> coordinates;
  // One lexicographically least representative per Weyl orbit of the
  // admissible twist vectors, with the orbit sizes alongside.
  std::vector<std::vector<int>> reps;
  std::vector<long> orbit_sizes;

  size_t count() const { return reps.size(); }
};

// Classes of local embeddings at v with target form class given by `target`
// (global invariants; only their localization at v is read).
LambdaClassSet conjugacy_classes_local(const EtaleInvolution& E, const Place& v,
                                       const FormInvariants& target);

// Number of distinct Q_v-equivalence classes of trace forms q_{E,lambda} as
// lambda ranges over sigma-fixed units: M+1 at a real place (signatures),
// min(M,1)+1 at a finite place (Hasse parity), with M the number of nonsplit
// fixed places.
int local_form_class_count(const EtaleInvolution& E, const Place& v);

// Number of nonsplit fixed places of E over v, computed from abelian
// decomposition data only (no completions).  Exposed for cross-checks.
int nonsplit_coordinate_count(const EtaleInvolution& E, const Place& v);

}  // namespace toridn
