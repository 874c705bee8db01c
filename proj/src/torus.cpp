#include "toridn/torus.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "toridn/localfield.hpp"
#include "toridn/primes.hpp"

namespace toridn {

namespace {

// Places where a nontrivial square class fails to be a local square:
// always among {infinity} and the primes dividing 2*rep.
std::vector<Place> nonsquare_places(const SquareClass& c) {
  std::vector<Place> out;
  if (c.is_trivial()) return out;
  for (auto& [p, e] : factorize(Int(2) * c.rep())) {
    Place v = Place::finite(p);
    if (!c.is_square_at(v)) out.push_back(v);
  }
  if (!c.is_square_at(Place::real())) out.push_back(Place::real());
  return out;
}

// Induced permutation on sigma-type indices from a permutation of characters.
std::vector<int> type_perm(const SigmaTypeSet& st, const std::vector<int>& g) {
  std::vector<int> tp(st.types.size());
  for (size_t i = 0; i < st.types.size(); ++i) {
    std::vector<int> img;
    img.reserve(st.types[i].size());
    for (int x : st.types[i]) img.push_back(g[x]);
    std::sort(img.begin(), img.end());
    tp[i] = st.index_of(img);
  }
  return tp;
}

std::vector<std::vector<Rat>> delta_rel_coords(const EtaleInvolution& E) {
  std::vector<std::vector<Rat>> out;
  for (auto& F : E.factors()) {
    if (F.delta_rel.empty())
      throw std::invalid_argument("relative discriminant unavailable: trivial involution factor");
    out.push_back(F.delta_rel);
  }
  return out;
}

AlgElem checked_lambda(const EtaleInvolution& E,
                       const std::vector<std::vector<Rat>>& lambda,
                       const char* who) {
  if (!E.involution_valid())
    throw std::invalid_argument(std::string(who) + ": involution is not valid");
  AlgElem lam = E.lambda_from_fixed(lambda);
  if (!E.is_sigma_fixed(lam))
    throw std::invalid_argument(std::string(who) + ": lambda is not sigma-fixed");
  if (!E.is_unit(lam))
    throw std::invalid_argument(std::string(who) + ": lambda is not a unit");
  return lam;
}

}  // namespace

QuadFormQ trace_form(const EtaleInvolution& E,
                     const std::vector<std::vector<Rat>>& lambda) {
  AlgElem lam = checked_lambda(E, lambda, "trace_form");
  int N = E.dim();
  // concatenated standard basis of E (theta powers, two blocks per exchange
  // factor)
  AlgElem zero = E.from_rational(Rat(0));
  std::vector<AlgElem> basis;
  basis.reserve(N);
  for (size_t f = 0; f < zero.size(); ++f)
    for (size_t j = 0; j < zero[f].size(); ++j) {
      AlgElem e = zero;
      e[f][j] = 1;
      basis.push_back(std::move(e));
    }
  if ((int)basis.size() != N) throw std::logic_error("trace_form: basis size");

  std::vector<AlgElem> ls(N);
  for (int b = 0; b < N; ++b) ls[b] = E.mul(lam, E.apply_sigma(basis[b]));
  std::vector<std::vector<Rat>> g(N, std::vector<Rat>(N));
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      Rat t = E.trace(E.mul(basis[a], ls[b])) / 2;
      g[a][b] = t;
      g[b][a] = t;
    }
  QuadFormQ q{g};
  if (q.det() == 0) throw std::logic_error("trace_form: degenerate Gram matrix");
  return q;
}

FormInvariants invariants_via_formula(const EtaleInvolution& E,
                                      const std::vector<std::vector<Rat>>& lambda) {
  checked_lambda(E, lambda, "invariants_via_formula");
  int n = E.halfdim();
  FormInvariants inv;
  inv.dim = E.dim();
  inv.disc = SquareClass(Rat(n % 2 ? -1 : 1)) * E.discriminant();

  RealData rd = real_involution_data(E, lambda);
  inv.signature = {n + rd.s - rd.r, n - rd.s + rd.r};

  // Witt class: base case at lambda = 1 twisted by Cor(delta_rel, lambda).
  std::vector<std::vector<Rat>> one = E.to_fixed_coords(E.one());
  Brauer2Class w1 = form_invariants(trace_form(E, one)).witt;
  inv.witt = w1 + corestriction_symbol(E, delta_rel_coords(E), lambda);
  inv.hasse = hasse_from_witt(inv.dim, inv.disc, inv.witt);
  return inv;
}

// ---------------------------------------------------------------------------
// EtaleBasePlaceMap
// ---------------------------------------------------------------------------

int EtaleBasePlaceMap::local_factor_count(const QPoly& f, const Place& v) {
  if (f.degree() == 1) return 1;
  if (v.infinite) {
    int r = count_real_roots(f);
    return r + (f.degree() - r) / 2;
  }
  return (int)splitting_type(f, v.p).size();
}

int EtaleBasePlaceMap::total_local_factors(const Place& v) const {
  int t = 0;
  for (auto& f : base) t += local_factor_count(f, v);
  return t;
}

std::pair<int, int> EtaleBasePlaceMap::factor_index_range(int j,
                                                          const Place& v) const {
  int lo = 0;
  for (int i = 0; i < j; ++i) lo += local_factor_count(base[i], v);
  return {lo, lo + local_factor_count(base[j], v)};
}

int EtaleBasePlaceMap::at(const Place& v, int idx) const {
  auto it = classes.find({v, idx});
  return it == classes.end() ? 0 : it->second;
}

void EtaleBasePlaceMap::flip(const Place& v, int idx) {
  auto key = std::make_pair(v, idx);
  auto it = classes.find(key);
  if (it == classes.end()) {
    classes[key] = 1;
  } else {
    classes.erase(it);
  }
}

bool EtaleBasePlaceMap::is_trivial() const {
  for (auto& [k, val] : classes)
    if (val) return false;
  return true;
}

std::vector<Place> EtaleBasePlaceMap::support() const {
  std::vector<Place> out;
  for (auto& [k, val] : classes)
    if (val && (out.empty() || !(out.back() == k.first))) out.push_back(k.first);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Place& a, const Place& b) { return a == b; }),
            out.end());
  return out;
}

std::string EtaleBasePlaceMap::validate() const {
  if (base.empty()) return "empty base";
  for (auto& f : base) {
    if (f.degree() < 1) return "base factor must have degree >= 1";
    if (f.degree() > 1 && !is_irreducible_over_q(f))
      return "base factor polynomial is reducible";
  }
  std::vector<int> sums(base.size(), 0);
  for (auto& [k, val] : classes) {
    if (val != 0 && val != 1) return "class values must be 0 or 1";
    const Place& v = k.first;
    int idx = k.second;
    if (idx < 0 || idx >= total_local_factors(v))
      return "local factor index out of range at " + v.str();
    if (!val) continue;
    for (size_t j = 0; j < base.size(); ++j) {
      auto [lo, hi] = factor_index_range((int)j, v);
      if (idx >= lo && idx < hi) {
        sums[j] ^= 1;
        break;
      }
    }
  }
  for (size_t j = 0; j < base.size(); ++j)
    if (sums[j]) return "odd total parity on base factor " + std::to_string(j);
  return "";
}

std::vector<QPoly> clifford_base_for(const SquareClass& z) {
  if (z.is_trivial()) {
    QPoly x({Rat(0), Rat(1)});
    return {x, x};
  }
  return {QPoly({Rat(-z.rep()), Rat(0), Rat(1)})};
}

EtaleBasePlaceMap restrict_to_base(const std::vector<QPoly>& base,
                                   const Brauer2Class& cls) {
  EtaleBasePlaceMap m;
  m.base = base;
  for (const Place& v : cls.support()) {
    int idx = 0;
    for (auto& f : base) {
      if (f.degree() == 1) {
        m.flip(v, idx);
        idx += 1;
      } else if (v.infinite) {
        int r = count_real_roots(f);
        for (int i = 0; i < r; ++i) m.flip(v, idx + i);  // real embeddings
        idx += r + (f.degree() - r) / 2;
      } else {
        SplittingType st = splitting_type(f, v.p);
        for (size_t i = 0; i < st.size(); ++i)
          if ((st[i].e * st[i].f) % 2) m.flip(v, idx + (int)i);
        idx += (int)st.size();
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// CSAInvData
// ---------------------------------------------------------------------------

SquareClass CSAInvData::clifford_center_class() const {
  int n = degree / 2;
  return SquareClass(Rat(n % 2 ? -1 : 1)) * disc;
}

std::string CSAInvData::validate() const {
  if (degree <= 0 || degree % 2) return "degree must be a positive even integer";
  if (!algebra_class.even_support()) return "algebra class has odd support";
  int n = degree / 2;

  std::string err = clifford.validate();
  if (!err.empty()) return "clifford map: " + err;

  // Center of the even Clifford algebra must match (-1)^n * disc.
  SquareClass z = clifford_center_class();
  if (z.is_trivial()) {
    if (clifford.base.size() != 2 || clifford.base[0].degree() != 1 ||
        clifford.base[1].degree() != 1)
      return "center mismatch: split center expects two rank-one factors";
  } else {
    if (clifford.base.size() != 1 || clifford.base[0].degree() != 2 ||
        !(SquareClass(discriminant(clifford.base[0])) == z))
      return "center mismatch: base does not define Q(sqrt((-1)^n disc))";
  }

  // Real index: a multiple of the local degree of [A], between 0 and n.
  int m = algebra_class.ramified_at(Place::real()) ? 2 : 1;
  if (real_index < 0 || real_index * m > n)
    return "real index out of range";

  // Local structure of the even Clifford class against the algebra class.
  std::set<Place> check{Place::real()};
  for (auto& v : algebra_class.support()) check.insert(v);
  for (auto& [k, val] : clifford.classes)
    if (val) check.insert(k.first);
  for (const Place& v : check) {
    bool dsq = z.is_square_at(v);
    bool asplit = !algebra_class.ramified_at(v);
    if (!dsq) {
      int forced = (n % 2 == 0 && !asplit) ? 1 : 0;
      if (clifford.at(v, 0) != forced)
        return "clifford class inconsistent with local structure at " + v.str();
    } else {
      int k0 = clifford.at(v, 0), k1 = clifford.at(v, 1);
      if (n % 2 == 0) {
        if ((k0 + k1) % 2 != (asplit ? 0 : 1))
          return "clifford component parity inconsistent at " + v.str();
      } else if (asplit) {
        if (k0 != k1)
          return "clifford components must be isomorphic at " + v.str();
      } else {
        // order-4 components; both marked nontrivial by convention
        if (k0 != 1 || k1 != 1)
          return "clifford components must be nontrivial of order 4 at " + v.str();
      }
    }
  }
  return "";
}

// ---------------------------------------------------------------------------
// Embedding checks
// ---------------------------------------------------------------------------

std::vector<Place> EmbeddingVerdict::failing_places() const {
  std::vector<Place> out;
  for (auto& [v, r] : per_place)
    if (!r.empty()) out.push_back(v);
  return out;
}

namespace {

struct VerdictBuilder {
  EmbeddingVerdict out;
  void examined(const Place& v) {
    out.per_place.emplace(v, "");  // keeps an existing reason
  }
  void fail(const Place& v, const char* code) {
    auto [it, fresh] = out.per_place.emplace(v, code);
    if (!fresh && it->second.empty()) it->second = code;
  }
  EmbeddingVerdict finish(const EtaleInvolution& E) {
    out.locally_everywhere = true;
    for (auto& [v, r] : out.per_place)
      if (!r.empty()) out.locally_everywhere = false;
    out.local_global_certificate = local_global_sufficient(E);
    return std::move(out);
  }
};

// All orbits of the decomposition group at v acting on the sigma-types have
// size divisible by `mod`, restricted to the given subset (empty = all).
bool type_orbits_divisible(const SigmaTypeSet& st,
                           const std::vector<std::vector<int>>& dec, int mod,
                           const std::vector<int>& subset) {
  std::vector<std::vector<int>> tperms;
  tperms.reserve(dec.size());
  for (auto& g : dec) tperms.push_back(type_perm(st, g));
  auto orbs = orbits_of((int)st.types.size(), tperms);
  std::vector<char> in(st.types.size(), subset.empty() ? 1 : 0);
  for (int i : subset) in[i] = 1;
  for (auto& o : orbs) {
    if (!in[o[0]]) continue;
    for (int x : o)
      if (!in[x])
        throw std::logic_error("type orbit crosses a phi-split component");
    if ((int)o.size() % mod) return false;
  }
  return true;
}

int ramified_real_count(const EtaleInvolution& E) {
  RealData rd = real_involution_data(E, E.to_fixed_coords(E.one()));
  return rd.s + rd.r;
}

}  // namespace

EmbeddingVerdict embed_check_orth(const EtaleInvolution& E, const QuadFormQ& q) {
  if (!E.involution_valid())
    throw std::invalid_argument("embed_check_orth: involution is not valid");
  int n = E.halfdim();
  int N = E.dim();
  if (q.dim() != N && q.dim() != N + 1)
    throw std::invalid_argument("embed_check_orth: dimension mismatch");
  bool even = q.dim() == N;
  FormInvariants inv = form_invariants(q);
  VerdictBuilder vb;

  // Center of the even Clifford algebra of q.
  SquareClass zq = SquareClass(Rat(n % 2 ? -1 : 1)) * inv.disc;

  // Condition: for every sigma-type phi, E^phi splits the even Clifford
  // algebra.  At places where the Witt class vanishes or (in the even case)
  // the center is locally a field there is nothing to check; otherwise every
  // orbit of the local decomposition group on sigma-types must be even.
  const auto& wsupp = inv.witt.support();
  if (!wsupp.empty()) {
    GaloisSetPresentation pres = characters(E);
    SigmaTypeSet st = sigma_types(pres);
    for (const Place& v : wsupp) {
      if (even && !zq.is_square_at(v)) continue;  // restriction to center dies
      vb.examined(v);
      auto dec = decomposition_group(E, pres, v);
      if (!type_orbits_divisible(st, dec, 2, {})) vb.fail(v, "clifford");
    }
  }

  // Condition: discriminant match (even dimension only).
  if (even) {
    SquareClass target = SquareClass(Rat(n % 2 ? -1 : 1)) * E.discriminant();
    if (!(inv.disc == target))
      for (const Place& v : nonsquare_places(inv.disc * target))
        vb.fail(v, "discriminant");
  }

  // Condition: signature at the real place.
  vb.examined(Place::real());
  {
    int S = ramified_real_count(E);
    int P = inv.signature.first;
    int Q;
    if (even) {
      Q = P;
    } else {
      // odd case: the extra basis vector lands on the side determined by the
      // sign of (-1)^n D(q) delta_E
      SquareClass eps = zq * E.discriminant();
      Q = (eps.rep() > 0) ? P - 1 : P;
    }
    if (Q < n - S || Q > n + S || (Q - (n - S)) % 2 != 0)
      vb.fail(Place::real(), "signature");
  }

  return vb.finish(E);
}

EmbeddingVerdict embed_check_csa(const EtaleInvolution& E, const CSAInvData& A) {
  if (!E.involution_valid())
    throw std::invalid_argument("embed_check_csa: involution is not valid");
  std::string err = A.validate();
  if (!err.empty())
    throw std::invalid_argument("inconsistent CSA invariant data: " + err);
  if (E.dim() != A.degree)
    throw std::invalid_argument("embed_check_csa: dimension mismatch");
  int n = A.degree / 2;
  VerdictBuilder vb;

  GaloisSetPresentation pres = characters(E);
  SquareClass zd = A.clifford_center_class();
  SquareClass dE = E.discriminant();

  // Condition 1: E embeds in A, i.e. at every place where [A] ramifies all
  // local degrees of E (x) Q_v are even.
  for (const Place& v : A.algebra_class.support()) {
    vb.examined(v);
    auto dec = decomposition_group(E, pres, v);
    for (auto& o : orbits_of(pres.npoints, dec))
      if (o.size() % 2) {
        vb.fail(v, "embedding");
        break;
      }
  }

  // Condition 2: delta_E = (-1)^n D(tau) as square classes.
  if (!(dE == zd))
    for (const Place& v : nonsquare_places(dE * zd)) vb.fail(v, "discriminant");

  // Condition 3: E^phi over the center splits the even Clifford algebra.
  // After validation, every place with nontrivial local class lies in the
  // support of the clifford map.
  {
    std::vector<Place> csupp = A.clifford.support();
    if (!csupp.empty()) {
      SigmaTypeSet st = sigma_types(pres);
      PhiSplit parts = phi_split(pres, dE);
      for (const Place& v : csupp) {
        vb.examined(v);
        auto dec = decomposition_group(E, pres, v);
        bool ok;
        if (!zd.is_square_at(v)) {
          // single component, nontrivial over the quadratic center:
          // [E^phi_P : Z_w] = |orbit| / 2 must be even
          ok = type_orbits_divisible(st, dec, 4, {});
        } else {
          // The plus/minus parts are stable under the decomposition group
          // whenever delta_E is locally a square; when the discriminant
          // condition already fails locally the split is not defined and the
          // component checks fall back to all types at once.
          bool parts_live = dE.is_square_at(v);
          const std::vector<int> all_types;
          const std::vector<int>& part0 = parts_live ? parts.plus : all_types;
          const std::vector<int>& part1 = parts_live ? parts.minus : all_types;
          if (n % 2 && A.algebra_class.ramified_at(v)) {
            // two components of order 4: degrees over Q_v divisible by 4
            ok = type_orbits_divisible(st, dec, 4, part0) &&
                 type_orbits_divisible(st, dec, 4, part1);
          } else {
            // 2-torsion components; component 0 <-> plus part by convention
            ok = true;
            if (A.clifford.at(v, 0))
              ok = ok && type_orbits_divisible(st, dec, 2, part0);
            if (A.clifford.at(v, 1))
              ok = ok && type_orbits_divisible(st, dec, 2, part1);
          }
        }
        if (!ok) vb.fail(v, "clifford");
      }
    }
  }

  // Condition 4: the index at the real place has the allowed size and parity.
  vb.examined(Place::real());
  {
    int S = ramified_real_count(E);
    int m = A.algebra_class.ramified_at(Place::real()) ? 2 : 1;
    int iota = A.real_index * m;
    if (iota < n - S || iota > n || (iota - (n - S)) % 2 != 0)
      vb.fail(Place::real(), "index");
  }

  return vb.finish(E);
}

EtaleBasePlaceMap clifford_update(const EtaleBasePlaceMap& base_class,
                                  const EtaleInvolution& E,
                                  const std::vector<std::vector<Rat>>& lambda) {
  checked_lambda(E, lambda, "clifford_update");
  int n = E.halfdim();
  SquareClass z = SquareClass(Rat(n % 2 ? -1 : 1)) * E.discriminant();
  std::vector<QPoly> want = clifford_base_for(z);
  // The base must present the center Z = Q(sqrt((-1)^n delta_E)).
  bool match;
  if (z.is_trivial()) {
    match = base_class.base.size() == 2 && base_class.base[0].degree() == 1 &&
            base_class.base[1].degree() == 1;
  } else {
    match = base_class.base.size() == 1 && base_class.base[0].degree() == 2 &&
            SquareClass(discriminant(base_class.base[0])) == z;
  }
  if (!match) throw std::invalid_argument("clifford_update: center mismatch");

  Brauer2Class cor = corestriction_symbol(E, delta_rel_coords(E), lambda);
  EtaleBasePlaceMap out = base_class;
  EtaleBasePlaceMap res = restrict_to_base(base_class.base, cor);
  for (auto& [k, val] : res.classes)
    if (val) out.flip(k.first, k.second);
  return out;
}

std::string local_global_sufficient(const EtaleInvolution& E) {
  if (!E.involution_valid()) return "";
  std::vector<int> fields;  // non-exchange factor indices
  for (size_t i = 0; i < E.factors().size(); ++i)
    if (!E.factors()[i].spec.exchange) fields.push_back((int)i);

  // Single field factor.
  if (fields.size() == 1 && E.factors().size() == 1) return "field";

  // CM algebra: every field factor totally imaginary over a totally real
  // fixed field.
  if (!fields.empty()) {
    bool cm = true;
    for (int i : fields) {
      const Factor& F = E.factors()[i];
      if (count_real_roots(F.spec.poly) != 0 ||
          count_real_roots(F.fixed_poly) != F.fixed_poly.degree()) {
        cm = false;
        break;
      }
    }
    if (cm) return "CM";
  }

  // Common involution on the compositum: trivially so when there are no field
  // factors (compositum Q), or when all field factors carry identical data.
  if (fields.empty()) return "compositum";
  {
    bool same = true;
    const Factor& F0 = E.factors()[fields[0]];
    for (int i : fields) {
      const Factor& F = E.factors()[i];
      if (!(F.spec.poly == F0.spec.poly) || !(F.sigma == F0.sigma)) {
        same = false;
        break;
      }
    }
    if (same) return "compositum";
  }

  // Pairwise witnesses: for each pair of field factors a prime p <= 200 with
  // a fixed place of each factor over p that is nonsplit in E.
  if (fields.size() >= 2) {
    std::set<std::pair<int, int>> missing;
    for (size_t a = 0; a < fields.size(); ++a)
      for (size_t b = a + 1; b < fields.size(); ++b)
        missing.insert({fields[a], fields[b]});
    for (long p : primes_up_to(200)) {
      if (missing.empty()) break;
      std::vector<char> nonsplit(E.factors().size(), 0);
      try {
        for (const FixedPlace& w : fixed_places(E, Int(p)))
          if (!w.split_in_E) nonsplit[w.factor] = 1;
      } catch (const std::exception&) {
        continue;  // place not supported by the local machinery; try the next
      }
      for (auto it = missing.begin(); it != missing.end();)
        if (nonsplit[it->first] && nonsplit[it->second])
          it = missing.erase(it);
        else
          ++it;
    }
    if (missing.empty()) return "pairwise";
  }
  return "";
}

}  // namespace toridn
