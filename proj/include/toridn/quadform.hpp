#pragma once

#include <string>
#include <utility>
#include <vector>

#include "toridn/hilbert.hpp"
#include "toridn/squareclass.hpp"

namespace toridn {

// Nondegenerate quadratic form over Q given by a symmetric Gram matrix.
struct QuadFormQ {
  std::vector<std::vector<Rat>> gram;

  QuadFormQ() = default;
  explicit QuadFormQ(std::vector<std::vector<Rat>> g);
  static QuadFormQ diag(const std::vector<Rat>& entries);

  int dim() const { return (int)gram.size(); }
  Rat det() const;
  QuadFormQ direct_sum(const QuadFormQ& other) const;
  // Congruent form P^T G P for an invertible P.
  QuadFormQ transformed(const std::vector<std::vector<Rat>>& P) const;
};

struct Diagonalization {
  std::vector<Rat> entries;
  std::vector<std::vector<Rat>> basis;  // columns diagonalize: B^T G B diagonal
};

Diagonalization diagonalize_with_basis(const QuadFormQ& q);
std::vector<Rat> diagonalize(const QuadFormQ& q);

struct FormInvariants {
  int dim = 0;
  SquareClass disc;
  Brauer2Class hasse;
  Brauer2Class witt;
  std::pair<int, int> signature{0, 0};

  bool operator==(const FormInvariants& o) const {
    return dim == o.dim && disc == o.disc && hasse == o.hasse &&
           witt == o.witt && signature == o.signature;
  }
  bool operator!=(const FormInvariants& o) const { return !(*this == o); }
  std::string str() const;
};

FormInvariants form_invariants(const QuadFormQ& q);
FormInvariants invariants_of_diag(const std::vector<Rat>& d);

// Witt class from Hasse class via the dimension-mod-8 correction.
Brauer2Class witt_from_hasse(int dim, const SquareClass& disc,
                             const Brauer2Class& hasse);
Brauer2Class hasse_from_witt(int dim, const SquareClass& disc,
                             const Brauer2Class& witt);

// Hasse-Minkowski: equality of dim, disc, Hasse support and signature.
bool equivalent_global(const QuadFormQ& q1, const QuadFormQ& q2);
bool equivalent_at(const FormInvariants& a, const FormInvariants& b,
                   const Place& v);

}  // namespace toridn
