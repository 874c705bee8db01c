#include "toridn/etale.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "etale_internal.hpp"
#include "toridn/primes.hpp"

namespace toridn {
namespace detail {

std::vector<Rat> kcoords(const QPoly& g, int n) {
  std::vector<Rat> out(n, Rat(0));
  for (int i = 0; i <= g.degree() && i < n; ++i) out[i] = g.coeff(i);
  return out;
}

QPoly kpoly(const std::vector<Rat>& a) { return QPoly(a); }

std::vector<Rat> kmul(const std::vector<Rat>& a, const std::vector<Rat>& b,
                      const QPoly& fmon) {
  QPoly prod = kpoly(a) * kpoly(b);
  return kcoords(poly_mod(prod, fmon), fmon.degree());
}

std::vector<Rat> ksubst(const std::vector<Rat>& a, const std::vector<Rat>& s,
                        const QPoly& fmon) {
  int n = fmon.degree();
  std::vector<Rat> res(n, Rat(0));
  for (int j = (int)a.size() - 1; j >= 0; --j) {
    res = kmul(res, s, fmon);
    res[0] += a[j];
  }
  return res;
}

std::vector<Rat> kpow(std::vector<Rat> a, unsigned e, const QPoly& fmon) {
  int n = fmon.degree();
  std::vector<Rat> res(n, Rat(0));
  res[0] = 1;
  while (e) {
    if (e & 1) res = kmul(res, a, fmon);
    a = kmul(a, a, fmon);
    e >>= 1;
  }
  return res;
}

bool kzero(const std::vector<Rat>& a) {
  for (auto& x : a)
    if (x != 0) return false;
  return true;
}

std::vector<Rat> power_trace_table(const QPoly& fmon) {
  int m = fmon.degree();
  std::vector<Rat> p(m, Rat(0));
  p[0] = m;
  for (int k = 1; k < m; ++k) {
    Rat acc = Rat(k) * fmon.coeff(m - k);
    for (int i = 1; i < k; ++i) acc += fmon.coeff(m - i) * p[k - i];
    p[k] = -acc;
  }
  return p;
}

Rat ktrace(const std::vector<Rat>& a, const std::vector<Rat>& traces) {
  Rat t(0);
  for (size_t i = 0; i < a.size(); ++i) t += a[i] * traces[i];
  return t;
}

std::optional<std::vector<Rat>> solve_linear(
    const std::vector<std::vector<Rat>>& cols, const std::vector<Rat>& target) {
  size_t k = cols.size(), m = target.size();
  std::vector<std::vector<Rat>> M(m, std::vector<Rat>(k + 1, Rat(0)));
  for (size_t j = 0; j < k; ++j)
    for (size_t i = 0; i < m && i < cols[j].size(); ++i) M[i][j] = cols[j][i];
  for (size_t i = 0; i < m; ++i) M[i][k] = target[i];

  std::vector<int> pivot_row(k, -1);
  size_t row = 0;
  for (size_t col = 0; col < k && row < m; ++col) {
    size_t r = row;
    while (r < m && M[r][col] == 0) ++r;
    if (r == m) continue;
    std::swap(M[r], M[row]);
    Rat inv = Rat(1) / M[row][col];
    for (size_t j = col; j <= k; ++j) M[row][j] *= inv;
    for (size_t i = 0; i < m; ++i) {
      if (i == row || M[i][col] == 0) continue;
      Rat f = M[i][col];
      for (size_t j = col; j <= k; ++j) M[i][j] -= f * M[row][j];
    }
    pivot_row[col] = (int)row;
    ++row;
  }
  for (size_t i = row; i < m; ++i)
    if (M[i][k] != 0) return std::nullopt;
  std::vector<Rat> x(k, Rat(0));
  for (size_t col = 0; col < k; ++col)
    if (pivot_row[col] >= 0) x[col] = M[pivot_row[col]][k];
  return x;
}

QPoly min_poly_in_field(const std::vector<Rat>& alpha, const QPoly& fmon) {
  int n = fmon.degree();
  std::vector<std::vector<Rat>> pw;
  std::vector<Rat> cur(n, Rat(0));
  cur[0] = 1;
  pw.push_back(cur);
  for (int d = 1; d <= n; ++d) {
    cur = kmul(cur, alpha, fmon);
    auto sol = solve_linear(pw, cur);
    if (sol) {
      std::vector<Rat> mc(d + 1, Rat(0));
      mc[d] = 1;
      for (int i = 0; i < d; ++i) mc[i] = -(*sol)[i];
      return QPoly(mc);
    }
    pw.push_back(cur);
  }
  throw std::runtime_error("min_poly_in_field: no relation found");
}

std::optional<std::vector<Rat>> in_power_basis(const std::vector<Rat>& beta,
                                               const std::vector<Rat>& target,
                                               int n, const QPoly& fmon) {
  std::vector<std::vector<Rat>> pw;
  std::vector<Rat> cur(fmon.degree(), Rat(0));
  cur[0] = 1;
  for (int i = 0; i < n; ++i) {
    pw.push_back(cur);
    cur = kmul(cur, beta, fmon);
  }
  return solve_linear(pw, target);
}

// ---------------------------------------------------------------------------
// multiquadratic synthesis: elements of Q(sqrt d_1, ..., sqrt d_k) in the
// subset-product basis e_S = prod_{j in S} sqrt(d_j)
// ---------------------------------------------------------------------------

namespace {

using MqElem = std::vector<Rat>;  // size 2^k

MqElem mq_mul(const MqElem& a, const MqElem& b, const std::vector<Int>& cls) {
  size_t n = a.size();
  MqElem out(n, Rat(0));
  for (size_t S = 0; S < n; ++S) {
    if (a[S] == 0) continue;
    for (size_t T = 0; T < n; ++T) {
      if (b[T] == 0) continue;
      Rat c = a[S] * b[T];
      size_t inter = S & T;
      for (size_t j = 0; j < cls.size(); ++j)
        if (inter & (1u << j)) c *= Rat(cls[j]);
      out[S ^ T] += c;
    }
  }
  return out;
}

struct MqSynth {
  QPoly poly;                              // minimal polynomial of theta
  std::vector<std::vector<Rat>> theta_pw;  // theta^i in the subset basis
  std::vector<std::vector<Rat>> sqrt_theta;  // sqrt(d_j) in theta powers
};

MqSynth mq_synthesize(const std::vector<Int>& cls) {
  size_t k = cls.size(), n = 1u << k;
  for (size_t S = 1; S < n; ++S) {
    Int prod = 1;
    for (size_t j = 0; j < k; ++j)
      if (S & (1u << j)) prod *= cls[j];
    if (squarefree_part(Rat(prod)) == 1)
      throw UnsupportedGaloisStructure(
          "multiquadratic classes are not independent");
  }
  MqElem theta(n, Rat(0));
  for (size_t j = 0; j < k; ++j) theta[1u << j] = 1;

  MqSynth out;
  MqElem cur(n, Rat(0));
  cur[0] = 1;
  for (size_t i = 0; i < n; ++i) {
    out.theta_pw.push_back(cur);
    cur = mq_mul(cur, theta, cls);
  }
  auto rel = solve_linear(out.theta_pw, cur);
  if (!rel)
    throw std::runtime_error("mq_synthesize: primitive element relation");
  std::vector<Rat> mc(n + 1, Rat(0));
  mc[n] = 1;
  for (size_t i = 0; i < n; ++i) mc[i] = -(*rel)[i];
  out.poly = QPoly(mc);

  for (size_t j = 0; j < k; ++j) {
    MqElem target(n, Rat(0));
    target[1u << j] = 1;
    auto sol = solve_linear(out.theta_pw, target);
    if (!sol) throw std::runtime_error("mq_synthesize: sqrt expression");
    out.sqrt_theta.push_back(*sol);
  }
  return out;
}

}  // namespace

SlotSystem build_slots(const EtaleInvolution& E) {
  SlotSystem sys;
  auto poly_key = [](const QPoly& f) {
    std::ostringstream os;
    for (auto& c : f.monic().c) os << rat_to_string(c) << ",";
    return os.str();
  };
  int fi = 0;
  for (auto& F : E.factors()) {
    std::vector<int> mine;
    std::string key;
    switch (F.kind) {
      case FactorKind::Rational:
        break;
      case FactorKind::Quadratic: {
        Int d = squarefree_part(discriminant(F.spec.poly));
        mine.push_back((int)sys.slots.size());
        sys.slots.push_back({fi, d});
        break;
      }
      case FactorKind::MultiQuad:
        for (auto& d : F.mq) {
          mine.push_back((int)sys.slots.size());
          sys.slots.push_back({fi, d});
        }
        break;
      case FactorKind::CyclicCubic:
        key = "c3:" + poly_key(F.spec.poly);
        break;
      case FactorKind::S3Cubic: {
        Int d = squarefree_part(discriminant(F.spec.poly));
        mine.push_back((int)sys.slots.size());
        sys.slots.push_back({fi, d});
        key = "s3:" + poly_key(F.spec.poly);
        break;
      }
      case FactorKind::CyclicEven: {
        Int d = squarefree_part(discriminant(F.spec.poly));
        mine.push_back((int)sys.slots.size());
        sys.slots.push_back({fi, d});
        if (F.deg % 3 == 0) key = "c3:" + poly_key(F.fixed_poly);
        break;
      }
    }
    sys.factor_slots.push_back(mine);
    sys.core_keys.push_back(key);
    ++fi;
  }
  return sys;
}

std::vector<std::vector<int>> pattern_basis(
    const SlotSystem& sys, const std::vector<std::vector<int>>& slot_coords) {
  size_t ns = sys.slots.size();
  size_t width = 0;
  for (auto& c : slot_coords) width = std::max(width, c.size());
  // rows indexed by coordinate, columns by slot
  std::vector<std::vector<int>> rows(width, std::vector<int>(ns, 0));
  for (size_t j = 0; j < ns; ++j)
    for (size_t i = 0; i < slot_coords[j].size(); ++i)
      rows[i][j] = slot_coords[j][i] & 1;
  // F2 row reduction
  std::vector<std::vector<int>> basis;
  size_t lead = 0;
  for (size_t col = 0; col < ns; ++col) {
    size_t r = lead;
    while (r < rows.size() && rows[r][col] == 0) ++r;
    if (r == rows.size()) continue;
    std::swap(rows[r], rows[lead]);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i != lead && rows[i][col]) {
        for (size_t j = 0; j < ns; ++j) rows[i][j] ^= rows[lead][j];
      }
    }
    basis.push_back(rows[lead]);
    ++lead;
  }
  return basis;
}

std::vector<int> factor_offsets(const EtaleInvolution& E) {
  std::vector<int> off;
  int acc = 0;
  for (auto& F : E.factors()) {
    off.push_back(acc);
    acc += F.points;
  }
  return off;
}

namespace {

// apply an in-factor permutation description to one block of points
void apply_block(std::vector<int>& perm, int off, const Factor& F,
                 const std::vector<int>& bits,
                 const std::vector<int>& slot_of_bit, bool core) {
  int m = F.deg;
  auto shift = [&](int amount) {
    std::vector<int> img(m);
    for (int j = 0; j < m; ++j) img[j] = (j + amount) % m;
    return img;
  };
  std::vector<int> img(m);
  for (int j = 0; j < m; ++j) img[j] = j;
  switch (F.kind) {
    case FactorKind::Rational:
      break;
    case FactorKind::Quadratic:
      if (!core && bits[0]) img = {1, 0};
      break;
    case FactorKind::MultiQuad: {
      if (!core) {
        int code = 0;
        for (size_t j = 0; j < bits.size(); ++j)
          if (bits[j]) code |= 1 << j;
        for (int j = 0; j < m; ++j) img[j] = j ^ code;
      }
      break;
    }
    case FactorKind::CyclicCubic:
      if (core) img = shift(1);
      break;
    case FactorKind::S3Cubic:
      if (core)
        img = {1, 2, 0};
      else if (bits[0])
        img = {0, 2, 1};
      break;
    case FactorKind::CyclicEven:
      if (core)
        img = shift(2);
      else if (bits[0])
        img = shift(m / 2);
      break;
  }
  (void)slot_of_bit;
  int blocks = F.spec.exchange ? 2 : 1;
  for (int b = 0; b < blocks; ++b)
    for (int j = 0; j < m; ++j) perm[off + b * m + j] = off + b * m + img[j];
}

}  // namespace

std::vector<int> pattern_perm(const EtaleInvolution& E,
                              const GaloisSetPresentation& pres,
                              const SlotSystem& sys,
                              const std::vector<int>& pattern) {
  std::vector<int> perm(pres.npoints);
  for (int i = 0; i < pres.npoints; ++i) perm[i] = i;
  auto off = factor_offsets(E);
  for (size_t fi = 0; fi < E.factors().size(); ++fi) {
    auto& F = E.factors()[fi];
    std::vector<int> bits;
    for (int s : sys.factor_slots[fi]) bits.push_back(pattern[s]);
    if (bits.empty()) bits.push_back(0);
    apply_block(perm, off[fi], F, bits, {}, false);
  }
  return perm;
}

std::vector<int> core_perm(const EtaleInvolution& E,
                           const GaloisSetPresentation& pres,
                           const SlotSystem& sys, const std::string& key) {
  std::vector<int> perm(pres.npoints);
  for (int i = 0; i < pres.npoints; ++i) perm[i] = i;
  auto off = factor_offsets(E);
  for (size_t fi = 0; fi < E.factors().size(); ++fi) {
    if (sys.core_keys[fi] != key || key.empty()) continue;
    apply_block(perm, off[fi], E.factors()[fi], {0}, {}, true);
  }
  return perm;
}

}  // namespace detail

using namespace detail;

// ---------------------------------------------------------------------------
// factor analysis
// ---------------------------------------------------------------------------

namespace {

Factor analyze_factor(FactorSpec spec) {
  Factor F;
  if (spec.poly.degree() < 1)
    throw std::invalid_argument("factor polynomial must be nonconstant");
  QPoly f = spec.poly.monic();
  spec.poly = f;
  F.deg = f.degree();
  if (discriminant(f) == 0)
    throw std::invalid_argument("factor polynomial is not separable");

  // involution on the field
  switch (spec.inv) {
    case FactorSpec::Inv::Id:
      F.sigma = QPoly::x();
      break;
    case FactorSpec::Inv::Conj: {
      if (F.deg != 2)
        throw std::invalid_argument("'conj' involution requires degree 2");
      F.sigma = QPoly({-f.coeff(1), Rat(-1)});
      break;
    }
    case FactorSpec::Inv::GenImage: {
      F.sigma = poly_mod(spec.gen_image, f);
      auto st = kcoords(F.sigma, F.deg);
      auto twice = ksubst(kcoords(F.sigma, F.deg), st, f);
      std::vector<Rat> idv(F.deg, Rat(0));
      if (F.deg > 1) idv[1] = 1;
      if (twice != idv && !(F.deg == 1))
        throw std::invalid_argument("involution is not of order <= 2");
      break;
    }
  }
  F.sigma_trivial = (F.sigma == QPoly::x()) || F.deg == 1;
  if (spec.exchange) {
    if (!F.sigma_trivial)
      throw std::invalid_argument(
          "exchange factors carry the swap involution only");
  }
  if (F.deg % 2 == 1 && !F.sigma_trivial)
    throw std::invalid_argument(
        "odd-degree field factor cannot carry a nontrivial involution");

  // kind
  if (F.deg == 1) {
    F.kind = FactorKind::Rational;
  } else if (F.deg == 2) {
    if (!is_irreducible_over_q(f))
      throw std::invalid_argument("factor polynomial is reducible");
    F.kind = FactorKind::Quadratic;
  } else if (F.deg == 3) {
    if (!is_irreducible_over_q(f))
      throw std::invalid_argument("factor polynomial is reducible");
    Int d = squarefree_part(discriminant(f));
    F.kind = (d == 1) ? FactorKind::CyclicCubic : FactorKind::S3Cubic;
  } else {
    std::optional<std::vector<Int>> classes = spec.mq_classes;
    if (!classes && F.deg == 4 && f.coeff(3) == 0 && f.coeff(1) == 0) {
      // biquadratic x^4 + p x^2 + q with square q: multiquadratic
      Rat p = f.coeff(2), q = f.coeff(0);
      Int nq = num(q) * den(q);
      Int r = boost::multiprecision::sqrt(nq);
      if (nq > 0 && r * r == nq) {
        Rat s = Rat(r) / Rat(den(q));
        Int d1 = squarefree_part(-p + 2 * s);
        Int d2 = squarefree_part(-p - 2 * s);
        classes = std::vector<Int>{d1, d2};
      }
    }
    if (classes) {
      std::vector<Int> cls;
      for (auto& d : *classes) cls.push_back(squarefree_part(Rat(d)));
      if ((1u << cls.size()) != (unsigned)F.deg)
        throw UnsupportedGaloisStructure(
            "multiquadratic class count does not match the degree");
      auto synth = mq_synthesize(cls);
      if (!(synth.poly == f))
        throw UnsupportedGaloisStructure(
            "multiquadratic factor must be presented by the canonical "
            "primitive element sqrt(d_1)+...+sqrt(d_k)");
      F.kind = FactorKind::MultiQuad;
      F.mq = cls;
      F.mq_sqrt_theta = synth.sqrt_theta;
      // involution as a sign pattern on the class generators
      F.mq_sigma_flip.assign(cls.size(), 0);
      if (!F.sigma_trivial) {
        auto st = kcoords(F.sigma, F.deg);
        MqElem img(F.deg, Rat(0));
        for (int i = 0; i < F.deg; ++i)
          for (int j = 0; j < F.deg; ++j)
            img[j] += st[i] * synth.theta_pw[i][j];
        for (size_t S = 0; S < (size_t)F.deg; ++S) {
          bool single = (S != 0) && ((S & (S - 1)) == 0);
          if (!single) {
            if (img[S] != 0)
              throw std::invalid_argument(
                  "involution does not act by sign flips on the classes");
            continue;
          }
          size_t j = 0;
          while ((1u << j) != S) ++j;
          if (img[S] == 1)
            F.mq_sigma_flip[j] = 0;
          else if (img[S] == -1)
            F.mq_sigma_flip[j] = 1;
          else
            throw std::invalid_argument(
                "involution does not act by sign flips on the classes");
        }
      }
    } else if (spec.declared_cyclic && F.deg == 6) {
      F.kind = FactorKind::CyclicEven;
      if (F.sigma_trivial && !spec.exchange)
        throw UnsupportedGaloisStructure(
            "cyclic sextic factors need their order-2 automorphism");
    } else {
      throw UnsupportedGaloisStructure(
          "unrecognized factor: declare multiquadratic classes or a cyclic "
          "structure, or use a supported degree");
    }
  }

  // fixed subalgebra data
  F.points = spec.exchange ? 2 * F.deg : F.deg;
  if (spec.exchange || F.sigma_trivial) {
    F.fixed_poly = f;
    F.beta_theta = kcoords(QPoly::x(), F.deg);
    if (spec.exchange) {
      F.delta_rel.assign(F.deg, Rat(0));
      F.delta_rel[0] = 1;
    }
  } else {
    int n = F.deg / 2;
    auto theta = kcoords(QPoly::x(), F.deg);
    auto stheta = kcoords(F.sigma, F.deg);
    auto s1 = theta;
    for (int i = 0; i < F.deg; ++i) s1[i] += stheta[i];
    auto s2 = kmul(theta, stheta, f);
    bool found = false;
    for (int j = 0; j <= 60 && !found; ++j) {
      std::vector<Rat> beta = s1;
      for (int i = 0; i < F.deg; ++i) beta[i] += Rat(j) * s2[i];
      if (j == 60) beta = s2;  // last resort: the norm-type element
      QPoly mp = min_poly_in_field(beta, f);
      if (mp.degree() == n) {
        F.fixed_poly = mp;
        F.beta_theta = beta;
        found = true;
      }
    }
    if (!found)
      throw std::runtime_error(
          "failed to find a primitive element of the fixed field");
    std::vector<Rat> diff(F.deg);
    for (int i = 0; i < F.deg; ++i) diff[i] = theta[i] - stheta[i];
    auto d2 = kmul(diff, diff, f);
    auto rel = in_power_basis(F.beta_theta, d2, n, f);
    if (!rel)
      throw std::runtime_error("relative discriminant coordinates not found");
    F.delta_rel = *rel;
  }

  // sanity for declared cyclic sextics: the fixed cubic must be cyclic and
  // the quadratic subfield must be visible in the polynomial discriminant
  if (F.kind == FactorKind::CyclicEven && !F.sigma_trivial) {
    if (F.fixed_poly.degree() != 3 ||
        squarefree_part(discriminant(F.fixed_poly)) != 1)
      throw UnsupportedGaloisStructure(
          "cyclic sextic: fixed field is not a cyclic cubic");
    if (squarefree_part(discriminant(f)) == 1)
      throw UnsupportedGaloisStructure(
          "cyclic sextic: quadratic subfield class not recoverable");
  }

  F.power_traces = power_trace_table(f);
  F.spec = spec;
  return F;
}

}  // namespace

EtaleInvolution EtaleInvolution::build(const std::vector<FactorSpec>& specs,
                                       bool require_involution) {
  EtaleInvolution E;
  if (specs.empty()) throw std::invalid_argument("empty factor list");
  for (auto& s : specs) E.fac_.push_back(analyze_factor(s));
  E.dim_ = 0;
  E.inv_valid_ = true;
  for (auto& F : E.fac_) {
    E.dim_ += F.dimE();
    if (!F.spec.exchange && F.sigma_trivial) E.inv_valid_ = false;
  }
  if (require_involution) {
    if (!E.inv_valid_)
      throw std::invalid_argument(
          "every factor must carry a nontrivial involution or be an "
          "exchange pair");
    if (E.dim_ % 2 != 0)
      throw std::runtime_error("involution algebra of odd dimension");
  }
  return E;
}

AlgElem EtaleInvolution::one() const { return from_rational(Rat(1)); }

AlgElem EtaleInvolution::from_rational(const Rat& c) const {
  AlgElem out;
  for (auto& F : fac_) {
    FactorElem e(F.spec.exchange ? 2 * F.deg : F.deg, Rat(0));
    e[0] = c;
    if (F.spec.exchange) e[F.deg] = c;
    out.push_back(e);
  }
  return out;
}

AlgElem EtaleInvolution::mul(const AlgElem& a, const AlgElem& b) const {
  AlgElem out;
  for (size_t i = 0; i < fac_.size(); ++i) {
    auto& F = fac_[i];
    const QPoly& f = F.spec.poly;
    if (!F.spec.exchange) {
      out.push_back(kmul(a[i], b[i], f));
    } else {
      std::vector<Rat> a0(a[i].begin(), a[i].begin() + F.deg),
          a1(a[i].begin() + F.deg, a[i].end()),
          b0(b[i].begin(), b[i].begin() + F.deg),
          b1(b[i].begin() + F.deg, b[i].end());
      auto c0 = kmul(a0, b0, f), c1 = kmul(a1, b1, f);
      c0.insert(c0.end(), c1.begin(), c1.end());
      out.push_back(c0);
    }
  }
  return out;
}

AlgElem EtaleInvolution::add(const AlgElem& a, const AlgElem& b) const {
  AlgElem out = a;
  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = 0; j < out[i].size(); ++j) out[i][j] += b[i][j];
  return out;
}

AlgElem EtaleInvolution::apply_sigma(const AlgElem& a) const {
  AlgElem out;
  for (size_t i = 0; i < fac_.size(); ++i) {
    auto& F = fac_[i];
    if (F.spec.exchange) {
      FactorElem e(a[i].begin() + F.deg, a[i].end());
      e.insert(e.end(), a[i].begin(), a[i].begin() + F.deg);
      out.push_back(e);
    } else if (F.sigma_trivial) {
      out.push_back(a[i]);
    } else {
      out.push_back(ksubst(a[i], kcoords(F.sigma, F.deg), F.spec.poly));
    }
  }
  return out;
}

Rat EtaleInvolution::trace(const AlgElem& a) const {
  Rat t(0);
  for (size_t i = 0; i < fac_.size(); ++i) {
    auto& F = fac_[i];
    if (!F.spec.exchange) {
      t += ktrace(a[i], F.power_traces);
    } else {
      std::vector<Rat> a0(a[i].begin(), a[i].begin() + F.deg),
          a1(a[i].begin() + F.deg, a[i].end());
      t += ktrace(a0, F.power_traces) + ktrace(a1, F.power_traces);
    }
  }
  return t;
}

bool EtaleInvolution::is_unit(const AlgElem& a) const {
  for (size_t i = 0; i < fac_.size(); ++i) {
    auto& F = fac_[i];
    if (!F.spec.exchange) {
      if (kzero(a[i])) return false;
    } else {
      std::vector<Rat> a0(a[i].begin(), a[i].begin() + F.deg),
          a1(a[i].begin() + F.deg, a[i].end());
      if (kzero(a0) || kzero(a1)) return false;
    }
  }
  return true;
}

bool EtaleInvolution::is_sigma_fixed(const AlgElem& a) const {
  return apply_sigma(a) == a;
}

AlgElem EtaleInvolution::lambda_from_fixed(
    const std::vector<std::vector<Rat>>& l) const {
  if (l.size() != fac_.size())
    throw std::invalid_argument("lambda: one coordinate block per factor");
  AlgElem out;
  for (size_t i = 0; i < fac_.size(); ++i) {
    auto& F = fac_[i];
    int n = F.n();
    if ((int)l[i].size() != n)
      throw std::invalid_argument(
          "lambda: coordinate block has the wrong length");
    if (F.spec.exchange) {
      FactorElem e = l[i];
      e.insert(e.end(), l[i].begin(), l[i].end());
      out.push_back(e);
    } else if (F.sigma_trivial) {
      out.push_back(l[i]);
    } else {
      const QPoly& f = F.spec.poly;
      std::vector<Rat> acc(F.deg, Rat(0));
      std::vector<Rat> pw(F.deg, Rat(0));
      pw[0] = 1;
      for (int j = 0; j < n; ++j) {
        for (int t = 0; t < F.deg; ++t) acc[t] += l[i][j] * pw[t];
        pw = kmul(pw, F.beta_theta, f);
      }
      out.push_back(acc);
    }
  }
  return out;
}

std::vector<std::vector<Rat>> EtaleInvolution::to_fixed_coords(
    const AlgElem& a) const {
  if (!is_sigma_fixed(a))
    throw std::invalid_argument("element is not sigma-fixed");
  std::vector<std::vector<Rat>> out;
  for (size_t i = 0; i < fac_.size(); ++i) {
    auto& F = fac_[i];
    if (F.spec.exchange) {
      out.emplace_back(a[i].begin(), a[i].begin() + F.deg);
    } else if (F.sigma_trivial) {
      out.push_back(a[i]);
    } else {
      auto rel = in_power_basis(F.beta_theta, a[i], F.n(), F.spec.poly);
      if (!rel) throw std::runtime_error("fixed coordinates not found");
      out.push_back(*rel);
    }
  }
  return out;
}

SquareClass EtaleInvolution::discriminant() const {
  SquareClass d;
  for (auto& F : fac_) {
    if (F.spec.exchange) continue;  // disc(K x K) is a square
    d = d * SquareClass(toridn::discriminant(F.spec.poly));
  }
  return d;
}

SquareClass EtaleInvolution::fixed_discriminant() const {
  SquareClass d;
  for (auto& F : fac_)
    d = d * SquareClass(toridn::discriminant(F.fixed_poly));
  return d;
}

std::string EtaleInvolution::describe() const {
  std::ostringstream os;
  os << "etale algebra of dimension " << dim_ << " with " << fac_.size()
     << " factor(s)";
  return os.str();
}

// ---------------------------------------------------------------------------
// presentations and sigma-types
// ---------------------------------------------------------------------------

void GaloisSetPresentation::validate() const {
  auto is_perm = [&](const std::vector<int>& p) {
    if ((int)p.size() != npoints) return false;
    std::vector<char> seen(npoints, 0);
    for (int v : p) {
      if (v < 0 || v >= npoints || seen[v]) return false;
      seen[v] = 1;
    }
    return true;
  };
  if (!is_perm(iota)) throw std::runtime_error("presentation: bad pairing");
  for (int i = 0; i < npoints; ++i) {
    if (iota[i] == i) throw std::runtime_error("presentation: pairing fixes a point");
    if (iota[iota[i]] != i)
      throw std::runtime_error("presentation: pairing is not an involution");
  }
  for (auto& g : gens) {
    if (!is_perm(g)) throw std::runtime_error("presentation: bad generator");
    for (int i = 0; i < npoints; ++i)
      if (g[iota[i]] != iota[g[i]])
        throw std::runtime_error(
            "presentation: pairing does not commute with the action");
  }
}

GaloisSetPresentation characters(const EtaleInvolution& E) {
  GaloisSetPresentation pres;
  auto off = factor_offsets(E);
  pres.npoints = 0;
  for (auto& F : E.factors()) pres.npoints += F.points;
  pres.iota.assign(pres.npoints, 0);
  int fi = 0;
  for (auto& F : E.factors()) {
    int o = off[fi];
    for (int j = 0; j < F.points; ++j) pres.labels.push_back({fi, j});
    if (F.spec.exchange) {
      for (int j = 0; j < F.deg; ++j) {
        pres.iota[o + j] = o + F.deg + j;
        pres.iota[o + F.deg + j] = o + j;
      }
    } else if (F.sigma_trivial) {
      for (int j = 0; j < F.deg; ++j) pres.iota[o + j] = o + j;
    } else {
      switch (F.kind) {
        case FactorKind::Quadratic:
          pres.iota[o] = o + 1;
          pres.iota[o + 1] = o;
          break;
        case FactorKind::MultiQuad: {
          int code = 0;
          for (size_t j = 0; j < F.mq_sigma_flip.size(); ++j)
            if (F.mq_sigma_flip[j]) code |= 1 << j;
          for (int j = 0; j < F.deg; ++j) pres.iota[o + j] = o + (j ^ code);
          break;
        }
        case FactorKind::CyclicEven:
          for (int j = 0; j < F.deg; ++j)
            pres.iota[o + j] = o + (j + F.deg / 2) % F.deg;
          break;
        default:
          throw std::runtime_error("characters: unexpected involution");
      }
    }
    ++fi;
  }

  auto sys = detail::build_slots(E);
  std::vector<std::vector<int>> slot_coords;
  std::map<Int, int> prime_row;
  for (auto& s : sys.slots)
    for (auto& [p, e] : factorize(s.cls))
      if (prime_row.find(p) == prime_row.end()) {
        int id = (int)prime_row.size();
        prime_row[p] = id;
      }
  int width = (int)prime_row.size() + 1;
  for (auto& s : sys.slots) {
    std::vector<int> c(width, 0);
    if (s.cls < 0) c[width - 1] = 1;
    for (auto& [p, e] : factorize(s.cls)) c[prime_row[p]] = e & 1;
    slot_coords.push_back(c);
  }
  for (auto& pat : detail::pattern_basis(sys, slot_coords))
    pres.gens.push_back(detail::pattern_perm(E, pres, sys, pat));
  std::set<std::string> keys;
  for (auto& k : sys.core_keys)
    if (!k.empty()) keys.insert(k);
  for (auto& k : keys) pres.gens.push_back(detail::core_perm(E, pres, sys, k));

  if (E.involution_valid()) pres.validate();
  return pres;
}

SigmaTypeSet sigma_types(const GaloisSetPresentation& pres) {
  SigmaTypeSet out;
  std::vector<std::pair<int, int>> pairs;
  std::vector<char> seen(pres.npoints, 0);
  for (int i = 0; i < pres.npoints; ++i) {
    if (seen[i]) continue;
    int j = pres.iota[i];
    if (j == i) throw std::runtime_error("sigma_types: pairing fixes a point");
    seen[i] = seen[j] = 1;
    pairs.push_back({i, j});
  }
  int n = (int)pairs.size();
  if (n > 24) throw std::runtime_error("sigma_types: too many pairs");
  for (long mask = 0; mask < (1L << n); ++mask) {
    std::vector<int> t;
    for (int k = 0; k < n; ++k)
      t.push_back((mask >> k) & 1 ? pairs[k].second : pairs[k].first);
    std::sort(t.begin(), t.end());
    out.types.push_back(t);
  }
  std::sort(out.types.begin(), out.types.end());
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < out.types.size(); ++i) index[out.types[i]] = (int)i;

  auto image = [&](const std::vector<int>& t, const std::vector<int>& g) {
    std::vector<int> s;
    for (int x : t) s.push_back(g[x]);
    std::sort(s.begin(), s.end());
    auto it = index.find(s);
    if (it == index.end())
      throw std::runtime_error("sigma_types: action does not preserve types");
    return it->second;
  };
  for (auto& g : pres.gens) {
    std::vector<int> act;
    for (auto& t : out.types) act.push_back(image(t, g));
    out.action.push_back(act);
  }
  for (auto& t : out.types) out.complement.push_back(image(t, pres.iota));
  return out;
}

int SigmaTypeSet::index_of(const std::vector<int>& t) const {
  auto it = std::lower_bound(types.begin(), types.end(), t);
  if (it == types.end() || *it != t)
    throw std::runtime_error("sigma type not found");
  return (int)(it - types.begin());
}

GaloisSetPresentation reflex_algebra(const GaloisSetPresentation& pres) {
  auto st = sigma_types(pres);
  GaloisSetPresentation out;
  out.npoints = (int)st.types.size();
  out.gens = st.action;
  out.iota = st.complement;
  auto orb = orbits_of(out.npoints, out.gens);
  out.labels.assign(out.npoints, {0, 0});
  for (size_t oi = 0; oi < orb.size(); ++oi)
    for (size_t k = 0; k < orb[oi].size(); ++k)
      out.labels[orb[oi][k]] = {(int)oi, (int)k};
  out.validate();
  return out;
}

PhiSplit phi_split(const GaloisSetPresentation& pres,
                   const SquareClass& deltaE) {
  auto st = sigma_types(pres);
  PhiSplit out;
  out.center = deltaE;
  const auto& base = st.types[0];
  int n = (int)base.size();
  for (size_t i = 0; i < st.types.size(); ++i) {
    std::vector<int> inter;
    std::set_intersection(st.types[i].begin(), st.types[i].end(), base.begin(),
                          base.end(), std::back_inserter(inter));
    if (((int)inter.size() - n) % 2 == 0)
      out.plus.push_back((int)i);
    else
      out.minus.push_back((int)i);
  }
  return out;
}

SquareClass discriminant_etale(const EtaleInvolution& E) {
  return E.discriminant();
}

std::vector<std::vector<int>> permutation_closure(
    int npoints, const std::vector<std::vector<int>>& gens) {
  std::set<std::vector<int>> seen;
  std::vector<int> id(npoints);
  for (int i = 0; i < npoints; ++i) id[i] = i;
  seen.insert(id);
  std::vector<std::vector<int>> queue{id};
  for (size_t h = 0; h < queue.size(); ++h) {
    for (auto& g : gens) {
      std::vector<int> c(npoints);
      for (int i = 0; i < npoints; ++i) c[i] = g[queue[h][i]];
      if (seen.insert(c).second) {
        queue.push_back(c);
        if (queue.size() > 20000)
          throw std::runtime_error("permutation closure too large");
      }
    }
  }
  return queue;
}

std::vector<std::vector<int>> orbits_of(
    int npoints, const std::vector<std::vector<int>>& perms) {
  std::vector<char> seen(npoints, 0);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < npoints; ++s) {
    if (seen[s]) continue;
    std::vector<int> orb{s};
    seen[s] = 1;
    for (size_t h = 0; h < orb.size(); ++h)
      for (auto& g : perms) {
        int y = g[orb[h]];
        if (!seen[y]) {
          seen[y] = 1;
          orb.push_back(y);
        }
      }
    std::sort(orb.begin(), orb.end());
    out.push_back(orb);
  }
  return out;
}

// ---------------------------------------------------------------------------
// constructor helpers
// ---------------------------------------------------------------------------

FactorSpec spec_rational() {
  FactorSpec s;
  s.poly = QPoly::x();
  return s;
}

FactorSpec spec_quadratic(const Int& d, bool conj) {
  FactorSpec s;
  s.poly = QPoly({-Rat(d), Rat(0), Rat(1)});
  s.inv = conj ? FactorSpec::Inv::Conj : FactorSpec::Inv::Id;
  return s;
}

FactorSpec spec_poly_involution(const QPoly& f, const QPoly& gen_image) {
  FactorSpec s;
  s.poly = f;
  s.inv = FactorSpec::Inv::GenImage;
  s.gen_image = gen_image;
  return s;
}

FactorSpec spec_exchange(const QPoly& f) {
  FactorSpec s;
  s.poly = f;
  s.exchange = true;
  return s;
}

FactorSpec spec_multiquadratic(const std::vector<Int>& classes,
                               const std::vector<int>& flip) {
  std::vector<Int> cls;
  for (auto& d : classes) cls.push_back(squarefree_part(Rat(d)));
  auto synth = detail::mq_synthesize(cls);
  if (flip.size() != cls.size())
    throw std::invalid_argument("one flip entry per class");
  int n = synth.poly.degree();
  std::vector<Rat> img(n, Rat(0));
  for (size_t j = 0; j < cls.size(); ++j) {
    Rat sgn = flip[j] ? Rat(-1) : Rat(1);
    for (int i = 0; i < n; ++i) img[i] += sgn * synth.sqrt_theta[j][i];
  }
  FactorSpec s;
  s.poly = synth.poly;
  bool any = false;
  for (int fj : flip) any = any || fj;
  if (any) {
    s.inv = FactorSpec::Inv::GenImage;
    s.gen_image = QPoly(img);
  }
  s.mq_classes = cls;
  return s;
}

FactorSpec spec_cyclotomic7() {
  FactorSpec s;
  s.poly = QPoly({Rat(1), Rat(1), Rat(1), Rat(1), Rat(1), Rat(1), Rat(1)});
  s.inv = FactorSpec::Inv::GenImage;
  std::vector<Rat> g(7, Rat(0));
  g[6] = 1;
  s.gen_image = QPoly(g);
  s.declared_cyclic = true;
  return s;
}

}  // namespace toridn
