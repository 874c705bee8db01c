#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toridn/localfield.hpp"
#include "toridn/poly.hpp"
#include "toridn/quadform.hpp"

namespace toridn {

struct UnsupportedGaloisStructure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Factors of an étale algebra with involution over Q.
//
// A factor is either a field K = Q[x]/(poly) carrying an automorphism of
// order <= 2 (sigma, given by the image of the generator), or an exchange
// pair K x K with the swap involution.  The constructor library recognizes
// Q, quadratic fields, multiquadratic fields (with declared or derived
// square classes), cubic fields (cyclic/S3 derived from the discriminant),
// and even-degree cyclic fields declared as such.
// ---------------------------------------------------------------------------

enum class FactorKind {
  Rational,     // deg 1
  Quadratic,    // deg 2
  MultiQuad,    // deg 4 or 8, classes d_1..d_k independent
  CyclicCubic,  // deg 3, square discriminant
  S3Cubic,      // deg 3, nonsquare discriminant
  CyclicEven,   // declared cyclic of even degree (deg 6 supported)
};

struct FactorSpec {
  QPoly poly;
  enum class Inv { Id, Conj, GenImage } inv = Inv::Id;
  QPoly gen_image;  // when inv == GenImage
  bool exchange = false;
  std::optional<std::vector<Int>> mq_classes;  // declared multiquadratic data
  bool declared_cyclic = false;
  SplittingOverride local_override;
};

struct Factor {
  FactorSpec spec;
  FactorKind kind = FactorKind::Rational;
  int deg = 1;           // degree of the field K
  int points = 1;        // characters contributed: deg, or 2*deg if exchange
  QPoly sigma;           // involution on K as generator image (x if trivial)
  bool sigma_trivial = true;

  // fixed subalgebra K^sigma = Q[beta], beta expressed in theta powers
  QPoly fixed_poly;              // minimal polynomial of beta
  std::vector<Rat> beta_theta;   // beta as coordinates in the theta basis
  std::vector<Rat> delta_rel;    // (theta - sigma theta)^2 in beta powers,
                                 // empty when sigma is trivial
  std::vector<Int> mq;           // multiquadratic classes (kind MultiQuad)
  std::vector<std::vector<Rat>> mq_sqrt_theta;  // sqrt(d_j) in theta powers
  std::vector<int> mq_sigma_flip;               // sigma sign pattern

  std::vector<Rat> power_traces;  // Tr(theta^i), i < deg

  int n() const { return spec.exchange ? deg : (sigma_trivial ? deg : deg / 2); }
  int dimE() const { return spec.exchange ? 2 * deg : deg; }
};

// Element of one factor: theta-power coordinates (two blocks if exchange).
using FactorElem = std::vector<Rat>;
// Element of the full algebra.
using AlgElem = std::vector<FactorElem>;

class EtaleInvolution {
 public:
  static EtaleInvolution build(const std::vector<FactorSpec>& specs,
                               bool require_involution = true);

  const std::vector<Factor>& factors() const { return fac_; }
  int dim() const { return dim_; }       // dim_Q E = 2n (when involution valid)
  int halfdim() const { return dim_ / 2; }
  bool involution_valid() const { return inv_valid_; }

  // --- algebra arithmetic ---
  AlgElem one() const;
  AlgElem from_rational(const Rat& c) const;
  AlgElem mul(const AlgElem& a, const AlgElem& b) const;
  AlgElem add(const AlgElem& a, const AlgElem& b) const;
  AlgElem apply_sigma(const AlgElem& a) const;
  Rat trace(const AlgElem& a) const;   // Tr_{E/Q}
  bool is_unit(const AlgElem& a) const;
  bool is_sigma_fixed(const AlgElem& a) const;

  // lambda given per factor in E^sigma coordinates (beta-power basis);
  // converts to a full algebra element.
  AlgElem lambda_from_fixed(const std::vector<std::vector<Rat>>& l) const;
  // express a sigma-fixed element per factor in beta powers
  std::vector<std::vector<Rat>> to_fixed_coords(const AlgElem& a) const;

  SquareClass discriminant() const;           // delta_{E/Q}
  SquareClass fixed_discriminant() const;     // delta_{E^sigma/Q}

  std::string describe() const;

 private:
  std::vector<Factor> fac_;
  int dim_ = 0;
  bool inv_valid_ = false;
};

// --- constructor helpers for the corpus ---
FactorSpec spec_rational();
FactorSpec spec_quadratic(const Int& d, bool conj);  // x^2 - d
FactorSpec spec_poly_involution(const QPoly& f, const QPoly& gen_image);
FactorSpec spec_exchange(const QPoly& f);
// multiquadratic field from independent classes with a sign-flip involution
FactorSpec spec_multiquadratic(const std::vector<Int>& classes,
                               const std::vector<int>& flip);
FactorSpec spec_cyclotomic7();  // Q(zeta_7) with complex conjugation

// ---------------------------------------------------------------------------
// Galois-set presentations (the character set X with its pairing iota).
// ---------------------------------------------------------------------------

struct GaloisSetPresentation {
  int npoints = 0;
  std::vector<std::vector<int>> gens;        // permutations of 0..npoints-1
  std::vector<int> iota;                     // fixed-point-free, commutes
  std::vector<std::pair<int, int>> labels;   // point -> (factor, embedding)

  void validate() const;
};

GaloisSetPresentation characters(const EtaleInvolution& E);

struct SigmaTypeSet {
  std::vector<std::vector<int>> types;        // sorted subsets, lex order
  std::vector<std::vector<int>> action;       // per generator, on type indices
  std::vector<int> complement;                // phi -> iota(phi)
  int index_of(const std::vector<int>& t) const;
};

SigmaTypeSet sigma_types(const GaloisSetPresentation& pres);

// points = sigma-types, pairing = complementation, labels = Galois orbits
GaloisSetPresentation reflex_algebra(const GaloisSetPresentation& pres);

struct PhiSplit {
  std::vector<int> plus, minus;  // type indices
  SquareClass center;
};

PhiSplit phi_split(const GaloisSetPresentation& pres, const SquareClass& deltaE);

SquareClass discriminant_etale(const EtaleInvolution& E);

// all elements of the subgroup of Sym(X) generated by gens
std::vector<std::vector<int>> permutation_closure(
    int npoints, const std::vector<std::vector<int>>& gens);

// orbits of a set of permutations acting on 0..npoints-1
std::vector<std::vector<int>> orbits_of(int npoints,
                                        const std::vector<std::vector<int>>& perms);

// ---------------------------------------------------------------------------
// Real-place data (defined in etale_real.cpp).
// ---------------------------------------------------------------------------

struct RealData {
  int s = 0;  // real places of E^sigma ramified in E with lambda > 0
  int r = 0;  // same with lambda < 0
  int u = 0;  // real places split in E
  int c = 0;  // complex places of E^sigma
};

RealData real_involution_data(const EtaleInvolution& E,
                              const std::vector<std::vector<Rat>>& lambda_fixed);

// ---------------------------------------------------------------------------
// Local data at a finite place (defined in etale_local.cpp).
// ---------------------------------------------------------------------------

// One place w of E^sigma over p: completion data of F_w and the behaviour
// of E over it.
struct FixedPlace {
  int factor = 0;
  int index = 0;       // which place of this factor
  unsigned e = 1, f = 1;
  bool split_in_E = true;      // E_w = F_w x F_w
  bool ramified_in_E = false;  // E_w/F_w ramified quadratic
};

std::vector<FixedPlace> fixed_places(const EtaleInvolution& E, const Int& p);

// Local Hilbert symbol of two sigma-fixed elements at every place of
// E^sigma over p, summed: the local invariant of Cor(a,b) at p.
int corestriction_local_invariant(const EtaleInvolution& E,
                                  const std::vector<std::vector<Rat>>& a,
                                  const std::vector<std::vector<Rat>>& b,
                                  const Place& v);

Brauer2Class corestriction_symbol(const EtaleInvolution& E,
                                  const std::vector<std::vector<Rat>>& a,
                                  const std::vector<std::vector<Rat>>& b);

// Decomposition group at v as permutations of the character set, exact for
// the supported constructions; throws UnsupportedGaloisStructure otherwise.
std::vector<std::vector<int>> decomposition_group(const EtaleInvolution& E,
                                                  const GaloisSetPresentation& pres,
                                                  const Place& v);

// Square-class group of local norms from (E tensor Q_p)^x to Q_p^x...
// declared here, defined with the spin-fiber machinery.

}  // namespace toridn
