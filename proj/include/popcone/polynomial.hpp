#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace popcone {

// Exponent vector of a monomial: exp[i] is the power of variable i.
using Exponent = std::vector<int>;

int total_degree(const Exponent& e);

// Sparse multivariate polynomial over a fixed variable count n.
// Terms are kept in a canonically ordered map (lexicographic exponent order);
// zero coefficients are never stored.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("Polynomial: negative variable count");
  }

  int num_vars() const { return n_; }
  const std::map<Exponent, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Adds coef * x^e (merging with an existing term; exact zeros are erased).
  void add_term(const Exponent& e, double coef);
  double coef(const Exponent& e) const;

  int degree() const;           // max total degree; 0 for the zero polynomial
  double eval(const std::vector<double>& x) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(double a) const;

  // Sum of the terms of maximal total degree; error on the zero polynomial.
  Polynomial homogeneous_top() const;

  // d/dx_i, used by the sampling oracle's equality repair.
  Polynomial partial_derivative(int i) const;

  static Polynomial constant(int n, double c);
  static Polynomial monomial(int n, const Exponent& e, double coef = 1.0);

  std::string to_string() const;

 private:
  void check_exponent(const Exponent& e) const;
  int n_ = 0;
  std::map<Exponent, double> terms_;
};

enum class Sense { MIN, MAX };
enum class Domain { ORTHANT, FREE };
enum class Relation { LE, EQ };

struct Constraint {
  Polynomial poly;
  Relation rel = Relation::LE;
  double rhs = 0.0;
};

// Polynomial optimization problem: optimize objective over the domain
// subject to poly_i(x) <= rhs_i or poly_i(x) == rhs_i.
struct PopProblem {
  int n = 0;
  Sense sense = Sense::MIN;
  Domain domain = Domain::ORTHANT;
  Polynomial objective;
  std::vector<Constraint> constraints;

  // Max total degree over objective and constraint polynomials.
  int degree() const;
  // Throws std::invalid_argument on inconsistent variable counts or degree 0.
  void validate() const;
  bool is_feasible(const std::vector<double>& x, double tol) const;
};

// Appends x^mono * (poly_i - rhs_i) <= 0, a valid inequality on the orthant.
// Errors: FREE domain, equality constraint, index out of range.
void multiply_constraint(PopProblem& pop, int constraint_index, const Exponent& mono);

// FNV-1a hash of a canonical serialization; used to pair bounds with problems.
std::uint64_t problem_hash(const PopProblem& pop);

}  // namespace popcone
