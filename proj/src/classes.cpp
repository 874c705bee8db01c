// Local conjugacy classes of embedded tori: lambda-twist coordinates at the
// nonsplit fixed places over a place v, the induced Weyl action, and orbit
// enumeration filtered by the target form class.
//
// All supported non-exchange factors are abelian over Q, so the fixed places
// over v and the action of Aut(E, sigma) on them can be computed exactly as
// cosets of decomposition subgroups, with the automorphism group acting by
// translation.  Orbit counts do not depend on how coset representatives are
// labelled, so no identification with concrete completions is needed.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "toridn/localfield.hpp"
#include "toridn/torus.hpp"

namespace toridn {

namespace {

// Coordinates contributed by one factor at v, together with the permutations
// of those coordinates induced by the factor's automorphisms.
struct CoordBlock {
  int m = 0;
  std::vector<std::vector<int>> gens;  // permutations of 0..m-1
};

// Quadratic factor K = Q(sqrt d): one fixed place (F = Q), a coordinate iff
// K is nonsplit over v.  Aut(K) = {1, sigma} acts trivially on Q.
CoordBlock quadratic_block(const Factor& F, const Place& v) {
  CoordBlock b;
  SquareClass d{discriminant(F.spec.poly)};
  if (quad_ext_type(d, v) != QuadExtType::Split) b.m = 1;
  return b;
}

// Multiquadratic factor with Galois group G = F_2^k and sigma the flip
// pattern s.  The decomposition group D_v is the annihilator of the
// characters chi with prod d_j^{chi_j} a local square; fixed places over v
// are the cosets G/D_v, all nonsplit iff s lies in D_v (and all split
// otherwise).  G acts on the cosets by translation.
CoordBlock multiquad_block(const Factor& F, const Place& v) {
  int k = (int)F.mq.size();
  // subgroup D_v as the annihilator of the "locally square" character group
  std::vector<int> sqchars;
  for (int chi = 0; chi < (1 << k); ++chi) {
    Int prod(1);
    for (int j = 0; j < k; ++j)
      if ((chi >> j) & 1) prod *= F.mq[j];
    if (SquareClass(Rat(prod)).is_square_at(v)) sqchars.push_back(chi);
  }
  std::vector<char> inD(1 << k, 0);
  for (int g = 0; g < (1 << k); ++g) {
    bool ann = true;
    for (int chi : sqchars)
      if (__builtin_popcount(g & chi) % 2) {
        ann = false;
        break;
      }
    inD[g] = ann;
  }
  int s = 0;
  for (int j = 0; j < k; ++j)
    if (F.mq_sigma_flip[j]) s |= 1 << j;
  CoordBlock b;
  if (!inD[s]) return b;  // all fixed places split in K

  // cosets of D_v: label by the minimal element
  std::map<int, int> coset_index;
  std::vector<int> rep_of;
  auto coset_min = [&](int g) {
    int best = g;
    for (int h = 0; h < (1 << k); ++h)
      if (inD[h]) best = std::min(best, g ^ h);
    return best;
  };
  for (int g = 0; g < (1 << k); ++g) {
    int c = coset_min(g);
    if (!coset_index.count(c)) {
      coset_index[c] = (int)rep_of.size();
      rep_of.push_back(c);
    }
  }
  b.m = (int)rep_of.size();
  for (int t = 0; t < k; ++t) {
    std::vector<int> perm(b.m);
    for (int i = 0; i < b.m; ++i) perm[i] = coset_index[coset_min(rep_of[i] ^ (1 << t))];
    b.gens.push_back(perm);
  }
  return b;
}

// Cyclic factor of degree 6 with sigma the unique element of order 2.
// D_v is the subgroup of order e*f; fixed places over v are the cosets of
// <D_v, 3> in Z/6, nonsplit iff 3 lies in D_v.  Aut acts by translation.
CoordBlock cyclic_even_block(const Factor& F, const Place& v) {
  if (F.deg != 6)
    throw std::runtime_error("conjugacy classes: unsupported cyclic degree");
  CoordBlock b;
  int ord;  // |D_v|
  if (v.infinite) {
    ord = count_real_roots(F.spec.poly) == 0 ? 2 : 1;
  } else {
    const SplittingOverride* ovr =
        F.spec.local_override.empty() ? nullptr : &F.spec.local_override;
    try {
      SplittingType st = splitting_type(F.spec.poly, v.p, ovr);
      ord = (int)(st[0].e * st[0].f);
      for (auto& ef : st)
        if ((int)(ef.e * ef.f) != ord)
          throw std::runtime_error("conjugacy classes: non-Galois splitting of declared cyclic factor");
    } catch (const UnsupportedWildCase&) {
      // a cyclic sextic is determined by its two proper subfields: |D_v| is
      // the product of the common e*f of the fixed cubic and the local degree
      // of the quadratic subfield cut out by the discriminant class
      SplittingType stc = splitting_type(F.fixed_poly, v.p);
      ord = (int)(stc[0].e * stc[0].f);
      for (auto& ef : stc)
        if ((int)(ef.e * ef.f) != ord)
          throw std::runtime_error("conjugacy classes: non-Galois splitting of declared cyclic factor");
      SquareClass dq{discriminant(F.spec.poly)};
      if (quad_ext_type(dq, v) != QuadExtType::Split) ord *= 2;
    }
  }
  int d = 6 / ord;          // generator of D_v in Z/6
  if (3 % std::gcd(d, 6) != 0) return b;  // sigma not in D_v: split places
  int h = std::gcd(std::gcd(d, 3), 6);    // <D_v, sigma> = <h>
  b.m = h;                                // cosets of <h> in Z/6
  std::vector<int> perm(b.m);
  for (int i = 0; i < b.m; ++i) perm[i] = (i + 1) % b.m;
  if (b.m > 1) b.gens.push_back(perm);
  return b;
}

CoordBlock factor_block(const Factor& F, const Place& v) {
  if (F.spec.exchange) return {};
  switch (F.kind) {
    case FactorKind::Quadratic:
      return quadratic_block(F, v);
    case FactorKind::MultiQuad:
      return multiquad_block(F, v);
    case FactorKind::CyclicEven:
      return cyclic_even_block(F, v);
    default:
      throw std::runtime_error("conjugacy classes: unsupported factor kind");
  }
}

bool same_factor_data(const Factor& a, const Factor& b) {
  return a.kind == b.kind && a.spec.exchange == b.spec.exchange &&
         a.spec.poly == b.spec.poly && a.sigma == b.sigma && a.mq == b.mq &&
         a.mq_sigma_flip == b.mq_sigma_flip;
}

}  // namespace

int nonsplit_coordinate_count(const EtaleInvolution& E, const Place& v) {
  if (!E.involution_valid())
    throw std::invalid_argument("conjugacy classes: involution is not valid");
  int m = 0;
  for (auto& F : E.factors()) m += factor_block(F, v).m;
  return m;
}

int local_form_class_count(const EtaleInvolution& E, const Place& v) {
  int m = nonsplit_coordinate_count(E, v);
  if (v.infinite) return m + 1;  // distinct signatures
  return m ? 2 : 1;              // Hasse-symbol parity
}

LambdaClassSet conjugacy_classes_local(const EtaleInvolution& E, const Place& v,
                                       const FormInvariants& target) {
  if (!E.involution_valid())
    throw std::invalid_argument("conjugacy classes: involution is not valid");
  LambdaClassSet out;
  out.v = v;

  // Coordinate blocks and the block-local Weyl generators.
  std::vector<CoordBlock> blocks;
  std::vector<int> offset;
  int M = 0;
  for (size_t i = 0; i < E.factors().size(); ++i) {
    CoordBlock b = factor_block(E.factors()[i], v);
    offset.push_back(M);
    M += b.m;
    for (int j = 0; j < b.m; ++j)
      out.coordinates.push_back("factor#" + std::to_string(i) + "[" +
                                std::to_string(j) + "]");
    blocks.push_back(std::move(b));
  }
  out.coordinate_count = M;
  if (M > 20)
    throw std::runtime_error("conjugacy classes: too many coordinates");

  // Weyl generators as permutations of the M coordinates: the block-local
  // translations, plus swaps of textually identical factors.
  std::vector<std::vector<int>> gens;
  std::vector<int> id(M);
  for (int i = 0; i < M; ++i) id[i] = i;
  for (size_t i = 0; i < blocks.size(); ++i)
    for (auto& bp : blocks[i].gens) {
      std::vector<int> g = id;
      for (int j = 0; j < blocks[i].m; ++j) g[offset[i] + j] = offset[i] + bp[j];
      gens.push_back(std::move(g));
    }
  for (size_t i = 0; i < blocks.size(); ++i)
    for (size_t j = i + 1; j < blocks.size(); ++j) {
      if (!same_factor_data(E.factors()[i], E.factors()[j])) continue;
      if (blocks[i].m == 0) continue;
      std::vector<int> g = id;
      for (int t = 0; t < blocks[i].m; ++t) {
        g[offset[i] + t] = offset[j] + t;
        g[offset[j] + t] = offset[i] + t;
      }
      gens.push_back(std::move(g));
    }

  // Which twist vectors hit the target class over Q_v?  The localization at v
  // of the twisted form depends only on popcount (real v: the signature) or
  // its parity (finite v: the Hasse symbol).
  if (target.dim != E.dim()) return out;
  FormInvariants base =
      form_invariants(trace_form(E, E.to_fixed_coords(E.one())));
  int n = E.halfdim();
  std::vector<char> admissible_by_count(M + 1, 0);
  for (int r = 0; r <= M; ++r) {
    FormInvariants cand = base;
    if (v.infinite) {
      cand.signature = {n + (M - r) - r, n - (M - r) + r};
    } else if (r % 2) {
      cand.hasse.flip(v);
      cand.witt.flip(v);
    }
    admissible_by_count[r] = equivalent_at(cand, target, v);
  }

  // Orbits of the Weyl generators on the admissible vectors.
  std::vector<char> seen(std::size_t(1) << M, 0);
  for (long w = 0; w < (1L << M); ++w) {
    if (seen[w] || !admissible_by_count[__builtin_popcountl(w)]) continue;
    std::vector<long> orb{w};
    seen[w] = 1;
    for (size_t h = 0; h < orb.size(); ++h)
      for (auto& g : gens) {
        long y = 0;
        for (int i = 0; i < M; ++i)
          if ((orb[h] >> i) & 1) y |= 1L << g[i];
        if (!seen[y]) {
          seen[y] = 1;
          orb.push_back(y);
        }
      }
    long rep = *std::min_element(orb.begin(), orb.end());
    std::vector<int> bits(M);
    for (int i = 0; i < M; ++i) bits[i] = (int)((rep >> i) & 1);
    out.reps.push_back(std::move(bits));
    out.orbit_sizes.push_back((long)orb.size());
  }
  return out;
}

}  // namespace toridn
