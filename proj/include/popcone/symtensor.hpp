#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "popcone/polynomial.hpp"

namespace popcone {

// Symmetric tensor of a given order over R^dim, stored sparsely by exponent:
// the entry at index tuple (i_1..i_d) depends only on how often each index
// appears, so one value per degree-d exponent suffices. Storage is therefore
// bounded by C(dim+order-1, order).
class SymmetricTensor {
 public:
  SymmetricTensor(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  const std::map<Exponent, double>& entries() const { return entries_; }

  void set(const Exponent& e, double v);
  void add(const Exponent& e, double v);
  double at(const Exponent& e) const;  // 0 for absent entries

  // Debug dump as (exponent, position multiplicity, value) triples.
  std::string to_triples() const;

 private:
  void check(const Exponent& e) const;
  int dim_;
  int order_;
  std::map<Exponent, double> entries_;
};

// All exponents over `dim` variables with total degree exactly `deg`, in
// decreasing lexicographic order (so (deg,0,...,0) comes first); count is
// C(dim+deg-1, deg).
std::vector<Exponent> enumerate_exponents(int dim, int deg);

double binomial(int n, int k);
// Number of index tuples (i_1..i_d) realizing exponent e: d!/(e_1!...e_dim!).
double multiplicity(const Exponent& e);

// Rank-one moment tensor x^{tensor d}: entry at exponent a is x^a.
SymmetricTensor m_d(const std::vector<double>& x, int d);

// All-ones tensor E_{n,d}.
SymmetricTensor e_tensor(int dim, int d);

// Sum over all dim^d index tuples of the entrywise product:
// sum_a multiplicity(a) * T1_a * T2_a.
double inner_product(const SymmetricTensor& t1, const SymmetricTensor& t2);

// Coefficient tensor of p embedded at order d over dim p.n+1 (index 0 is the
// homogenizing coordinate): entry at (d-|b|, b) is ((d-|b|)! b_1!..b_n!/d!) p_b.
// Satisfies <t_d(p), m_d((1,x))> = p(x) and <t_d(p), m_d((0,x))> = top(p)(x).
// Requires d >= degree(p).
SymmetricTensor t_d(const Polynomial& p, int d);

// Slice of T with d-2 indices fixed to gamma (|gamma| = d-2): the dim x dim
// symmetric matrix S[j,k] = T at gamma + e_j + e_k.
Eigen::MatrixXd slice(const SymmetricTensor& t, const Exponent& gamma);

// A slice index is principal when every fixed index appears an even number
// of times, i.e. every component of gamma is even.
bool is_principal(const Exponent& gamma);

// All slice indices (|gamma| = d-2) over `dim` coordinates, optionally
// restricted to principal ones. Requires d >= 2.
std::vector<Exponent> enumerate_slices(int dim, int d, bool principal_only);

}  // namespace popcone
