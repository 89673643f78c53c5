#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "popcone/symtensor.hpp"

using namespace popcone;

namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

Polynomial random_poly(std::mt19937_64& rng, int n, int deg) {
  Polynomial p(n);
  for (int d = 0; d <= deg; ++d)
    for (const Exponent& e : enumerate_exponents(n, d))
      p.add_term(e, 6.0 * unit_draw(rng) - 3.0);
  return p;
}

// Dense inner product computed the slow way: walk every index tuple
// (i_1..i_d) in {0..dim-1}^d and multiply the corresponding entries.
double inner_product_by_tuples(const SymmetricTensor& a, const SymmetricTensor& b) {
  int dim = a.dim(), d = a.order();
  std::vector<int> idx(d, 0);
  double total = 0.0;
  for (;;) {
    Exponent e(dim, 0);
    for (int i : idx) ++e[i];
    total += a.at(e) * b.at(e);
    int i = 0;
    while (i < d && idx[i] == dim - 1) idx[i++] = 0;
    if (i == d) break;
    ++idx[i];
  }
  return total;
}

SymmetricTensor random_tensor(std::mt19937_64& rng, int dim, int order) {
  SymmetricTensor t(dim, order);
  for (const Exponent& e : enumerate_exponents(dim, order))
    t.set(e, 4.0 * unit_draw(rng) - 2.0);
  return t;
}

}  // namespace

TEST_CASE("combinatorial helpers") {
  CHECK(binomial(6, 2) == doctest::Approx(15.0));
  CHECK(binomial(4, 0) == doctest::Approx(1.0));
  CHECK(multiplicity({3}) == doctest::Approx(1.0));
  CHECK(multiplicity({1, 2}) == doctest::Approx(3.0));   // 3!/(1!2!)
  CHECK(multiplicity({2, 2}) == doctest::Approx(6.0));   // 4!/(2!2!)
  CHECK(multiplicity({1, 1, 2}) == doctest::Approx(12.0));
}

TEST_CASE("exponent enumeration is complete and ordered") {
  std::vector<Exponent> e24 = enumerate_exponents(2, 4);
  CHECK(e24.size() == 5);  // C(2+4-1, 4)
  std::vector<Exponent> e34 = enumerate_exponents(3, 4);
  CHECK(e34.size() == 15);  // C(3+4-1, 4)
  CHECK(e34.front() == Exponent{4, 0, 0});
  CHECK(e34.back() == Exponent{0, 0, 4});
  for (std::size_t i = 1; i < e34.size(); ++i) CHECK(e34[i] < e34[i - 1]);
  for (const Exponent& e : e34) CHECK(total_degree(e) == 4);
}

TEST_CASE("rank-one moment tensors hold monomial values") {
  SymmetricTensor t = m_d({1.0, 2.0}, 3);
  CHECK(t.at({1, 2}) == doctest::Approx(4.0));   // x1 * x2^2
  CHECK(t.at({3, 0}) == doctest::Approx(1.0));
  CHECK(t.at({0, 3}) == doctest::Approx(8.0));

  // Storage never exceeds the stars-and-bars count.
  CHECK(static_cast<double>(t.entries().size()) <= binomial(2 + 3 - 1, 3));
}

TEST_CASE("inner products against the all-ones tensor") {
  // <E, m_d(x)> = (sum_i x_i)^d.
  SymmetricTensor e = e_tensor(2, 2);
  CHECK(inner_product(e, m_d({1.0, 2.0}, 2)) == doctest::Approx(9.0));
  CHECK(inner_product(e, m_d({1.0, -1.0}, 2)) == doctest::Approx(0.0));
  CHECK(inner_product(e_tensor(2, 4), m_d({1.0, 2.0}, 4)) == doctest::Approx(81.0));
}

TEST_CASE("inner products of rank-one tensors multiply dot products") {
  // <m_d(x), m_d(y)> = <x,y>^d.
  CHECK(inner_product(m_d({1.0, 2.0}, 3), m_d({1.0, 2.0}, 3)) ==
        doctest::Approx(125.0));
  CHECK(inner_product(m_d({1.0, 0.0}, 3), m_d({0.0, 1.0}, 3)) ==
        doctest::Approx(0.0));
  CHECK(inner_product(m_d({1.0, 1.0}, 2), m_d({1.0, -1.0}, 2)) ==
        doctest::Approx(0.0));
}

TEST_CASE("sparse inner product equals the dense tuple sum") {
  std::mt19937_64 rng(5);
  for (int dim = 1; dim <= 3; ++dim) {
    for (int d = 1; d <= 4; ++d) {
      SymmetricTensor a = random_tensor(rng, dim, d);
      SymmetricTensor b = random_tensor(rng, dim, d);
      double dense = inner_product_by_tuples(a, b);
      CHECK(inner_product(a, b) == doctest::Approx(dense).epsilon(1e-10));
    }
  }
}

TEST_CASE("coefficient tensors pair with moment tensors to evaluate") {
  // Constant polynomial: all weight on the homogenizing coordinate.
  SymmetricTensor c = t_d(Polynomial::constant(1, 5.0), 2);
  CHECK(c.at({2, 0}) == doctest::Approx(5.0));
  CHECK(inner_product(c, m_d({1.0, 7.0}, 2)) == doctest::Approx(5.0));

  // x1*x2 at order 2 over dim 3: entry at (0,1,1) is (0!1!1!/2!) * 1 = 1/2.
  Polynomial xy(2);
  xy.add_term({1, 1}, 1.0);
  SymmetricTensor txy = t_d(xy, 2);
  CHECK(txy.at({0, 1, 1}) == doctest::Approx(0.5));

  Polynomial q(1);
  q.add_term({3}, 1.0);
  CHECK_THROWS_AS(t_d(q, 2), std::invalid_argument);  // d below the degree
}

TEST_CASE("coefficient pairing round-trips random polynomials") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    int n = 1 + static_cast<int>(rng() % 3);
    int deg = 1 + static_cast<int>(rng() % 3);
    Polynomial p = random_poly(rng, n, deg);
    int d = p.degree() + static_cast<int>(rng() % 2);  // also test d > degree
    if (d == 0) d = 1;
    std::vector<double> x(n);
    for (double& v : x) v = 4.0 * unit_draw(rng) - 2.0;
    std::vector<double> lifted(n + 1);
    lifted[0] = 1.0;
    for (int i = 0; i < n; ++i) lifted[i + 1] = x[i];
    double via_tensor = inner_product(t_d(p, d), m_d(lifted, d));
    double direct = p.eval(x);
    CHECK(via_tensor ==
          doctest::Approx(direct).epsilon(1e-9).scale(1 + std::fabs(direct)));
  }
}

TEST_CASE("pairing with a zero homogenizing coordinate picks the top") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    int n = 1 + static_cast<int>(rng() % 2);
    Polynomial p = random_poly(rng, n, 3);
    if (p.is_zero()) continue;
    int d = p.degree();
    std::vector<double> x(n);
    for (double& v : x) v = 4.0 * unit_draw(rng) - 2.0;
    std::vector<double> ray(n + 1);
    ray[0] = 0.0;
    for (int i = 0; i < n; ++i) ray[i + 1] = x[i];
    double via_tensor = inner_product(t_d(p, d), m_d(ray, d));
    double top = p.homogeneous_top().eval(x);
    CHECK(via_tensor == doctest::Approx(top).epsilon(1e-9).scale(1 + std::fabs(top)));
  }
}

TEST_CASE("slices read contiguous blocks of a tensor") {
  // Order-4 rank-one tensor of x = (1,2): slice at gamma = (2,0) is x x^T.
  SymmetricTensor t = m_d({1.0, 2.0}, 4);
  Eigen::MatrixXd s = slice(t, {2, 0});
  REQUIRE(s.rows() == 2);
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(0, 1) == doctest::Approx(2.0));
  CHECK(s(1, 0) == doctest::Approx(2.0));
  CHECK(s(1, 1) == doctest::Approx(4.0));

  // gamma = (1,1) scales the same rank-one block by x1*x2.
  Eigen::MatrixXd s11 = slice(t, {1, 1});
  CHECK(s11(0, 0) == doctest::Approx(2.0));
  CHECK(s11(1, 1) == doctest::Approx(8.0));

  CHECK_THROWS_AS(slice(t, {1, 0}), std::invalid_argument);  // |gamma| != d-2
}

TEST_CASE("principal slice indices have even components") {
  CHECK(is_principal({2, 2, 2}));
  CHECK(is_principal({0, 0, 0}));
  CHECK(is_principal({4, 0}));
  CHECK(!is_principal({3, 1, 2}));
  CHECK(!is_principal({1, 1}));
}

TEST_CASE("slice enumeration counts") {
  std::vector<Exponent> all_2_4 = enumerate_slices(2, 4, false);
  CHECK(all_2_4.size() == 3);  // (2,0), (1,1), (0,2)
  std::vector<Exponent> prin_2_4 = enumerate_slices(2, 4, true);
  CHECK(prin_2_4.size() == 2);  // (2,0), (0,2)

  // dim 4 (one homogenizer + three variables), order 4: C(4+2-1, 2) = 10.
  CHECK(enumerate_slices(4, 4, false).size() == 10);

  // Order 2 has a single empty slice index.
  std::vector<Exponent> d2 = enumerate_slices(3, 2, false);
  REQUIRE(d2.size() == 1);
  CHECK(total_degree(d2[0]) == 0);
}

TEST_CASE("moment tensors of nonnegative points have nonnegative PSD slices") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    int dim = 2 + static_cast<int>(rng() % 3);
    int d = 2 * (1 + static_cast<int>(rng() % 2));  // even order 2 or 4
    std::vector<double> x(dim);
    for (double& v : x) v = 2.0 * unit_draw(rng);  // nonnegative coordinates
    SymmetricTensor m = m_d(x, d);
    for (const Exponent& g : enumerate_slices(dim, d, false)) {
      Eigen::MatrixXd s = slice(m, g);
      CHECK(s.minCoeff() >= -1e-12);  // entrywise nonnegative
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9);  // rank-one PSD
    }
  }
}

TEST_CASE("principal slices stay PSD for sign-mixed points") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 50; ++t) {
    int dim = 2 + static_cast<int>(rng() % 3);
    std::vector<double> x(dim);
    for (double& v : x) v = 4.0 * unit_draw(rng) - 2.0;  // mixed signs
    SymmetricTensor m = m_d(x, 4);
    for (const Exponent& g : enumerate_slices(dim, 4, true)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(slice(m, g));
      CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
  }
}

TEST_CASE("non-principal slices can lose semidefiniteness off the orthant") {
  // x = (-1, 1): the slice at gamma = (1, 1) equals x1*x2 * x x^T = -x x^T,
  // which has a negative eigenvalue.
  SymmetricTensor m = m_d({-1.0, 1.0}, 4);
  REQUIRE(!is_principal({1, 1}));
  Eigen::MatrixXd s = slice(m, {1, 1});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  CHECK(es.eigenvalues().minCoeff() < -0.5);
}

TEST_CASE("tensor entry access validates exponents") {
  SymmetricTensor t(2, 3);
  CHECK_THROWS_AS(t.set({1, 1}, 1.0), std::invalid_argument);   // degree 2 != 3
  CHECK_THROWS_AS(t.at({1, 1, 1}), std::invalid_argument);      // wrong dim
  t.set({1, 2}, 2.0);
  t.add({1, 2}, 0.5);
  CHECK(t.at({1, 2}) == doctest::Approx(2.5));
  CHECK(t.at({3, 0}) == doctest::Approx(0.0));  // absent entries read as zero
}
