#pragma once

// Finite-precision models of the completions of number fields given by a
// defining polynomial, shared by the local machinery (symbols, square
// classes, norm groups).  Supported completions: unramified of any residue
// degree, ramified quadratic (Eisenstein or unit-type at p = 2), and tamely
// ramified cubic.  Everything else raises UnsupportedWildCase.
//
// An element of the model is a vector of length e of coordinates in the
// unramified part U_f = Z_p[t]/(t^f - red(t)), each coordinate a vector of
// f integers mod p^K.  For e >= 2 the generator g satisfies g^e = gen_pow.
// All model rings are the full rings of integers of their fields.

#include <vector>

#include "toridn/localfield.hpp"
#include "toridn/poly.hpp"
#include "toridn/rat.hpp"

namespace toridn::local {

using UElem = std::vector<Int>;  // length f, entries in [0, p^K)

struct LModel {
  Int p;
  int K = 0;  // coordinate precision p^K
  Int pK;
  int f = 1;
  int e = 1;
  std::vector<Int> red;   // reduction rule t^f = red(t), irreducible mod p
  UElem gen_pow;          // e >= 2: g^e = gen_pow
  bool gen_unif = true;   // v(g) == 1; false only for unit-type p = 2 quads
  long vbig() const { return (long)e * K + 64; }
};

struct LElem {
  std::vector<UElem> c;  // sum_i c[i] g^i, length e
};

// A model element divided by a power of p (for rational data with
// denominators at p and for roots of non-monic polynomials).
struct SElem {
  LElem x;
  long shift = 0;  // value = x / p^shift
};

LModel model_unram(const Int& p, int f, int K);
LModel model_ram(const Int& p, int f, int K, int e, const UElem& gen_pow,
                 bool gen_unif);

// ---- arithmetic ----
LElem l_zero(const LModel& m);
LElem l_scalar(const LModel& m, const Int& c);
LElem l_from_unit(const LModel& m, const UElem& u);
LElem l_gen(const LModel& m);  // g (e >= 2)
LElem l_add(const LModel& m, const LElem& a, const LElem& b);
LElem l_sub(const LModel& m, const LElem& a, const LElem& b);
LElem l_neg(const LModel& m, const LElem& a);
LElem l_mul(const LModel& m, const LElem& a, const LElem& b);
LElem l_scale_int(const LModel& m, const LElem& a, const Int& c);
bool l_is_zeroish(const LModel& m, const LElem& a);

// valuation normalized to the uniformizer (v(p) = e); >= ~precision
// collapses to vbig()
long l_val(const LModel& m, const LElem& a);
LElem l_uniformizer(const LModel& m);
// exact division by the uniformizer, t times (requires v(a) >= t)
LElem l_shift_down(const LModel& m, LElem a, long t);
LElem l_inv(const LModel& m, const LElem& a);            // a a unit
LElem l_div(const LModel& m, const LElem& a, const LElem& b);  // v(a) >= v(b)

bool is_square(const LModel& m, const LElem& a);  // a != 0
// For d with v(d) even: is M(sqrt d)/M split or unramified?  (d may be a
// square, in which case it reports unramified=true trivially; callers check
// squareness first.)
bool ext_unramified(const LModel& m, const LElem& d);
int hilbert(const LModel& m, const LElem& a, const LElem& b);  // +-1

// ---- scaled elements ----
SElem s_from_rat(const LModel& m, const Rat& r);
SElem s_from(const LModel& m, const LElem& x);
SElem s_add(const LModel& m, const SElem& a, const SElem& b);
SElem s_mul(const LModel& m, const SElem& a, const SElem& b);
long s_val(const LModel& m, const SElem& a);
bool s_is_zeroish(const LModel& m, const SElem& a);
// same square class with shift cleared (multiplies by p if shift is odd)
LElem s_descale(const LModel& m, const SElem& a);
bool s_is_square(const LModel& m, const SElem& a);
int s_hilbert(const LModel& m, const SElem& a, const SElem& b);
// evaluate a rational-coefficient polynomial at x
SElem eval_poly(const LModel& m, const QPoly& g, const SElem& x);

// ---- completions of Q[x]/(f0) above p ----
struct Completion {
  LModel m;
  SElem root;  // root of f0 in the model
  unsigned e = 1, f = 1;
};

// One entry per place of Q[x]/(f0) above p, in a deterministic order.
// Throws UnsupportedWildCase when some completion has no supported model.
std::vector<Completion> completions(const QPoly& f0, const Int& p,
                                    int extraK = 0,
                                    const SplittingOverride* ovr = nullptr);

}  // namespace toridn::local
