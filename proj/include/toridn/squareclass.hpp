#pragma once
// Square classes of Q^x, places of Q, 2-torsion Brauer classes as ramification
// sets, and F2 coordinates on local square-class groups.

#include <array>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "toridn/rat.hpp"

namespace toridn {

// Element of Q^x/(Q^x)^2 stored as the signed squarefree representative.
class SquareClass {
 public:
  SquareClass() : d_(1) {}
  explicit SquareClass(const Rat& x);
  static SquareClass from_squarefree(const Int& d);

  const Int& rep() const { return d_; }
  bool is_trivial() const { return d_ == 1; }
  SquareClass operator*(const SquareClass& o) const;
  bool operator==(const SquareClass& o) const { return d_ == o.d_; }
  bool operator<(const SquareClass& o) const { return d_ < o.d_; }

  // Is this class a square in Q_v?
  bool is_square_at(const struct Place& v) const;

  std::string str() const { return d_.str(); }

 private:
  Int d_;
};

// A place of Q: a finite prime or the real place.
struct Place {
  bool infinite = false;
  Int p = 0;

  static Place real() { return Place{true, 0}; }
  static Place finite(const Int& p) { return Place{false, p}; }

  bool operator==(const Place& o) const {
    return infinite == o.infinite && p == o.p;
  }
  // Finite places ascending, the real place last.
  bool operator<(const Place& o) const {
    if (infinite != o.infinite) return !infinite;
    return p < o.p;
  }
  std::string str() const { return infinite ? "inf" : p.str(); }
};

// 2-torsion Brauer class over Q as the finite set of ramified places.
class Brauer2Class {
 public:
  Brauer2Class() = default;
  explicit Brauer2Class(std::set<Place> support) : s_(std::move(support)) {}

  void flip(const Place& v) {
    auto it = s_.find(v);
    if (it == s_.end())
      s_.insert(v);
    else
      s_.erase(it);
  }
  Brauer2Class operator+(const Brauer2Class& o) const;
  bool is_trivial() const { return s_.empty(); }
  bool ramified_at(const Place& v) const { return s_.count(v) > 0; }
  bool even_support() const { return s_.size() % 2 == 0; }
  const std::set<Place>& support() const { return s_; }
  bool operator==(const Brauer2Class& o) const { return s_ == o.s_; }
  std::string str() const;

 private:
  std::set<Place> s_;
};

// F2 coordinates of a class in Q_v^x/(Q_v^x)^2.
// Basis: odd p: (p, u) with u a fixed non-residue; p = 2: (2, -1, 5);
// real place: (-1). Width is 2, 3 or 1 accordingly.
std::vector<int> local_square_coords(const Rat& a, const Place& v);
int local_square_dim(const Place& v);
// Representative rationals for the basis elements, same order as coords.
std::vector<Rat> local_square_basis(const Place& v);

// F2 subgroup of the local square-class group, stored as a reduced basis.
class LocalSquareGroup {
 public:
  explicit LocalSquareGroup(const Place& v) : v_(v) {}
  const Place& place() const { return v_; }
  void add(const Rat& a);
  void add_coords(std::vector<int> c);
  bool contains(const Rat& a) const;
  bool contains_coords(std::vector<int> c) const;
  int dim() const { return (int)basis_.size(); }
  long size() const { return 1L << basis_.size(); }
  // All element representatives as products of basis representatives.
  std::vector<Rat> elements() const;
  const std::vector<std::vector<int>>& basis() const { return basis_; }

 private:
  Place v_;
  std::vector<std::vector<int>> basis_;  // row-reduced
  std::vector<Rat> reps_;
};

}  // namespace toridn
