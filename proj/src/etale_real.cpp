#include "toridn/etale.hpp"

#include "etale_internal.hpp"

namespace toridn {

// Classify the archimedean places of E^sigma: for each real embedding rho of
// a fixed field F = Q[beta]/(f0), the fiber of E over it is C (when the
// relative discriminant is negative at rho) or R x R; complex embeddings of
// F are counted separately.  lambda signs at the ramified real places split
// them into s (positive) and r (negative).
RealData real_involution_data(const EtaleInvolution& E,
                              const std::vector<std::vector<Rat>>& lambda_fixed) {
  if (!E.involution_valid())
    throw std::invalid_argument("real data requires an involution");
  if (lambda_fixed.size() != E.factors().size())
    throw std::invalid_argument("lambda: one coordinate block per factor");

  RealData out;
  for (size_t i = 0; i < E.factors().size(); ++i) {
    const Factor& F = E.factors()[i];
    const QPoly& f0 = F.fixed_poly;
    int n = F.n();
    if ((int)lambda_fixed[i].size() != n)
      throw std::invalid_argument("lambda block has the wrong length");

    auto ivs = isolate_real_roots(f0);
    out.c += (n - (int)ivs.size()) / 2;

    if (F.spec.exchange) {
      out.u += (int)ivs.size();
      continue;
    }
    QPoly lam(lambda_fixed[i]);
    QPoly drel(F.delta_rel);
    for (auto& iv : ivs) {
      int sl = lam.is_zero() ? 0 : sign_at_root(f0, iv, lam);
      if (sl == 0)
        throw std::invalid_argument("lambda vanishes at a real place");
      int sd = sign_at_root(f0, iv, drel);
      if (sd == 0) throw std::runtime_error("relative discriminant vanishes");
      if (sd > 0) {
        out.u += 1;
      } else if (sl > 0) {
        out.s += 1;
      } else {
        out.r += 1;
      }
    }
  }
  return out;
}

}  // namespace toridn
