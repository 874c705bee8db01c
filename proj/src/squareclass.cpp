#include "toridn/squareclass.hpp"

#include <algorithm>
#include <sstream>

#include "toridn/primes.hpp"

namespace toridn {

SquareClass::SquareClass(const Rat& x) {
  if (x == 0) throw std::invalid_argument("square class of 0");
  d_ = squarefree_part(x);
}

SquareClass SquareClass::from_squarefree(const Int& d) {
  SquareClass c;
  c.d_ = d;
  return c;
}

SquareClass SquareClass::operator*(const SquareClass& o) const {
  return SquareClass(Rat(d_) * Rat(o.d_));
}

bool SquareClass::is_square_at(const Place& v) const {
  if (v.infinite) return d_ > 0;
  if (v.p == 2) return d_ % 2 != 0 && mod(d_, 8) == 1;
  if (d_ % v.p == 0) return false;
  return legendre(d_, v.p) == 1;
}

Brauer2Class Brauer2Class::operator+(const Brauer2Class& o) const {
  Brauer2Class r = *this;
  for (auto& v : o.s_) r.flip(v);
  return r;
}

std::string Brauer2Class::str() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (auto& v : s_) {
    if (!first) os << ",";
    os << v.str();
    first = false;
  }
  os << "}";
  return os.str();
}

namespace {

Int smallest_nonresidue(const Int& p) {
  for (Int u = 2;; ++u)
    if (legendre(u, p) == -1) return u;
}

// Odd unit part of a at p represented by an integer with the same class.
Int unit_part_int(const Rat& a, const Int& p) {
  long v = rat_valuation(a, p);
  Rat u = a / Rat(ipow(p, (unsigned)std::abs(v)));
  if (v < 0) u = a * Rat(ipow(p, (unsigned)(-v)));
  // num*den has the same square class as num/den and is prime to p.
  return num(u) * den(u);
}

}  // namespace

int local_square_dim(const Place& v) {
  if (v.infinite) return 1;
  return v.p == 2 ? 3 : 2;
}

std::vector<Rat> local_square_basis(const Place& v) {
  if (v.infinite) return {Rat(-1)};
  if (v.p == 2) return {Rat(2), Rat(-1), Rat(5)};
  return {Rat(v.p), Rat(smallest_nonresidue(v.p))};
}

std::vector<int> local_square_coords(const Rat& a, const Place& v) {
  if (a == 0) throw std::invalid_argument("square coords of 0");
  if (v.infinite) return {a < 0 ? 1 : 0};
  if (v.p == 2) {
    long val = rat_valuation(a, 2);
    Int u = mod(unit_part_int(a, 2), 8);
    int c_minus = (u == 3 || u == 7) ? 1 : 0;
    int c5 = (u == 3 || u == 5) ? 1 : 0;
    return {(int)(((val % 2) + 2) % 2), c_minus, c5};
  }
  long val = rat_valuation(a, v.p);
  Int u = unit_part_int(a, v.p);
  return {(int)(((val % 2) + 2) % 2), legendre(u, v.p) == -1 ? 1 : 0};
}

void LocalSquareGroup::add(const Rat& a) {
  add_coords(local_square_coords(a, v_));
}

void LocalSquareGroup::add_coords(std::vector<int> c) {
  for (auto& b : basis_) {
    auto pivot = std::find(b.begin(), b.end(), 1) - b.begin();
    if (c[pivot]) {
      for (size_t i = 0; i < c.size(); ++i) c[i] ^= b[i];
    }
  }
  if (std::find(c.begin(), c.end(), 1) != c.end()) {
    basis_.push_back(c);
    std::sort(basis_.begin(), basis_.end(), std::greater<>());
  }
}

bool LocalSquareGroup::contains_coords(std::vector<int> c) const {
  for (auto& b : basis_) {
    auto pivot = std::find(b.begin(), b.end(), 1) - b.begin();
    if (c[pivot]) {
      for (size_t i = 0; i < c.size(); ++i) c[i] ^= b[i];
    }
  }
  return std::find(c.begin(), c.end(), 1) == c.end();
}

bool LocalSquareGroup::contains(const Rat& a) const {
  return contains_coords(local_square_coords(a, v_));
}

std::vector<Rat> LocalSquareGroup::elements() const {
  auto base = local_square_basis(v_);
  std::vector<Rat> out;
  for (long mask = 0; mask < size(); ++mask) {
    Rat x = 1;
    std::vector<int> acc(local_square_dim(v_), 0);
    long m = mask;
    for (size_t i = 0; i < basis_.size(); ++i, m >>= 1)
      if (m & 1)
        for (size_t j = 0; j < acc.size(); ++j) acc[j] ^= basis_[i][j];
    for (size_t j = 0; j < acc.size(); ++j)
      if (acc[j]) x *= base[j];
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace toridn
