#include "toridn/quadform.hpp"

#include <algorithm>
#include <stdexcept>

namespace toridn {

QuadFormQ::QuadFormQ(std::vector<std::vector<Rat>> g) : gram(std::move(g)) {
  size_t n = gram.size();
  for (auto& row : gram)
    if (row.size() != n) throw std::invalid_argument("gram: not square");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (gram[i][j] != gram[j][i]) throw std::invalid_argument("gram: not symmetric");
}

QuadFormQ QuadFormQ::diag(const std::vector<Rat>& entries) {
  size_t n = entries.size();
  std::vector<std::vector<Rat>> g(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) g[i][i] = entries[i];
  return QuadFormQ(g);
}

Rat QuadFormQ::det() const {
  // fraction-free enough for our sizes: plain Gaussian elimination over Q
  auto a = gram;
  int n = dim();
  Rat d(1);
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (a[i][k] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return Rat(0);
    if (piv != k) {
      std::swap(a[piv], a[k]);
      d = -d;
    }
    d *= a[k][k];
    for (int i = k + 1; i < n; ++i) {
      Rat c = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= c * a[k][j];
    }
  }
  return d;
}

QuadFormQ QuadFormQ::direct_sum(const QuadFormQ& other) const {
  int n = dim(), m = other.dim();
  std::vector<std::vector<Rat>> g(n + m, std::vector<Rat>(n + m, Rat(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[i][j] = gram[i][j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g[n + i][n + j] = other.gram[i][j];
  return QuadFormQ(g);
}

QuadFormQ QuadFormQ::transformed(const std::vector<std::vector<Rat>>& P) const {
  int n = dim();
  std::vector<std::vector<Rat>> gp(n, std::vector<Rat>(n, Rat(0)));
  // gp = P^T G P
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Rat s(0);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += P[k][i] * gram[k][l] * P[l][j];
      gp[i][j] = s;
    }
  return QuadFormQ(gp);
}

namespace {

Int pivot_key(const Rat& a) { return iabs(num(a) * den(a)); }

}  // namespace

Diagonalization diagonalize_with_basis(const QuadFormQ& q) {
  int n = q.dim();
  auto g = q.gram;
  std::vector<std::vector<Rat>> B(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) B[i][i] = 1;

  auto add_col = [&](int dst, int src, const Rat& c) {
    // e_dst <- e_dst + c e_src ; update G rows/cols and basis columns
    for (int i = 0; i < n; ++i) g[dst][i] += c * g[src][i];
    for (int i = 0; i < n; ++i) g[i][dst] += c * g[i][src];
    for (int i = 0; i < n; ++i) B[i][dst] += c * B[i][src];
  };
  auto swap_cols = [&](int a, int b) {
    if (a == b) return;
    std::swap(g[a], g[b]);
    for (int i = 0; i < n; ++i) std::swap(g[i][a], g[i][b]);
    for (int i = 0; i < n; ++i) std::swap(B[i][a], B[i][b]);
  };

  Diagonalization out;
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    Int best;
    for (int i = k; i < n; ++i)
      if (g[i][i] != 0) {
        Int key = pivot_key(g[i][i]);
        if (piv < 0 || key < best) {
          piv = i;
          best = key;
        }
      }
    if (piv < 0) {
      bool fixed = false;
      for (int i = k; i < n && !fixed; ++i)
        for (int j = i + 1; j < n && !fixed; ++j)
          if (g[i][j] != 0) {
            add_col(i, j, Rat(1));
            piv = i;
            fixed = true;
          }
      if (!fixed) throw std::invalid_argument("diagonalize: degenerate form");
      // re-run pivot selection with the new nonzero diagonal
      best = pivot_key(g[piv][piv]);
      for (int i = k; i < n; ++i)
        if (g[i][i] != 0 && pivot_key(g[i][i]) < best) {
          piv = i;
          best = pivot_key(g[i][i]);
        }
    }
    swap_cols(piv, k);
    for (int i = k + 1; i < n; ++i)
      if (g[i][k] != 0) add_col(i, k, -g[i][k] / g[k][k]);
    out.entries.push_back(g[k][k]);
  }
  out.basis = std::move(B);
  return out;
}

std::vector<Rat> diagonalize(const QuadFormQ& q) {
  return diagonalize_with_basis(q).entries;
}

Brauer2Class witt_from_hasse(int dim, const SquareClass& disc,
                             const Brauer2Class& hasse) {
  Rat d(disc.rep());
  Brauer2Class w = hasse;
  switch (((dim % 8) + 8) % 8) {
    case 1:
    case 2:
      break;
    case 3:
    case 4:
      w = w + quaternion_class(Rat(-1), -d);
      break;
    case 5:
    case 6:
      w = w + quaternion_class(Rat(-1), Rat(-1));
      break;
    default:  // 7, 0
      w = w + quaternion_class(Rat(-1), d);
      break;
  }
  return w;
}

Brauer2Class hasse_from_witt(int dim, const SquareClass& disc,
                             const Brauer2Class& witt) {
  // the correction is its own inverse (2-torsion)
  return witt_from_hasse(dim, disc, witt);
}

FormInvariants invariants_of_diag(const std::vector<Rat>& d) {
  FormInvariants inv;
  inv.dim = (int)d.size();
  Rat prod(1);
  for (auto& a : d) {
    if (a == 0) throw std::invalid_argument("invariants: zero diagonal entry");
    prod *= a;
    if (a > 0)
      inv.signature.first++;
    else
      inv.signature.second++;
  }
  inv.disc = SquareClass(prod);
  for (size_t i = 0; i < d.size(); ++i)
    for (size_t j = i + 1; j < d.size(); ++j)
      inv.hasse = inv.hasse + quaternion_class(d[i], d[j]);
  inv.witt = witt_from_hasse(inv.dim, inv.disc, inv.hasse);
  return inv;
}

FormInvariants form_invariants(const QuadFormQ& q) {
  return invariants_of_diag(diagonalize(q));
}

std::string FormInvariants::str() const {
  return "dim=" + std::to_string(dim) + " disc=" + disc.str() +
         " hasse=" + hasse.str() + " witt=" + witt.str() + " sig=(" +
         std::to_string(signature.first) + "," +
         std::to_string(signature.second) + ")";
}

bool equivalent_global(const QuadFormQ& q1, const QuadFormQ& q2) {
  if (q1.dim() != q2.dim()) return false;
  FormInvariants a = form_invariants(q1), b = form_invariants(q2);
  return a.disc == b.disc && a.hasse == b.hasse && a.signature == b.signature;
}

bool equivalent_at(const FormInvariants& a, const FormInvariants& b,
                   const Place& v) {
  if (a.dim != b.dim) return false;
  if (v.infinite) return a.signature == b.signature;
  Rat ratio = Rat(a.disc.rep()) * Rat(b.disc.rep());  // quotient up to squares
  return SquareClass(ratio).is_square_at(v) &&
         a.hasse.ramified_at(v) == b.hasse.ramified_at(v);
}

}  // namespace toridn
