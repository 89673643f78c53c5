#include "popcone/polynomial.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace popcone {

int total_degree(const Exponent& e) {
  int d = 0;
  for (int p : e) d += p;
  return d;
}

void Polynomial::check_exponent(const Exponent& e) const {
  if (static_cast<int>(e.size()) != n_)
    throw std::invalid_argument("Polynomial: exponent length != variable count");
  for (int p : e)
    if (p < 0) throw std::invalid_argument("Polynomial: negative exponent");
}

void Polynomial::add_term(const Exponent& e, double coef) {
  check_exponent(e);
  if (coef == 0.0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, coef);
  } else {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::coef(const Exponent& e) const {
  check_exponent(e);
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

double Polynomial::eval(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("Polynomial::eval: dimension mismatch");
  double v = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < e[i]; ++k) m *= x[i];
    v += m;
  }
  return v;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (n_ != o.n_) throw std::invalid_argument("Polynomial: variable count mismatch");
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + o.scaled(-1.0);
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (n_ != o.n_) throw std::invalid_argument("Polynomial: variable count mismatch");
  Polynomial r(n_);
  Exponent e(n_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (int i = 0; i < n_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  return r;
}

Polynomial Polynomial::scaled(double a) const {
  Polynomial r(n_);
  if (a == 0.0) return r;
  for (const auto& [e, c] : terms_) r.add_term(e, a * c);
  return r;
}

Polynomial Polynomial::homogeneous_top() const {
  if (terms_.empty())
    throw std::invalid_argument("homogeneous_top: zero polynomial");
  int d = degree();
  Polynomial r(n_);
  for (const auto& [e, c] : terms_)
    if (total_degree(e) == d) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::partial_derivative(int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("partial_derivative: bad index");
  Polynomial r(n_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponent d = e;
    d[i] -= 1;
    r.add_term(d, c * e[i]);
  }
  return r;
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial r(n);
  r.add_term(Exponent(n, 0), c);
  return r;
}

Polynomial Polynomial::monomial(int n, const Exponent& e, double coef) {
  Polynomial r(n);
  r.add_term(e, coef);
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    double a = std::fabs(c);
    bool coef_shown = false;
    if (a != 1.0 || total_degree(e) == 0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%g", a);
      os << buf;
      coef_shown = true;
    }
    bool any = false;
    for (int i = 0; i < n_; ++i) {
      if (e[i] == 0) continue;
      if (any || coef_shown) os << "*";
      os << "x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
      any = true;
    }
    (void)any;
  }
  return os.str();
}

int PopProblem::degree() const {
  int d = objective.degree();
  for (const auto& c : constraints) d = std::max(d, c.poly.degree());
  return d;
}

void PopProblem::validate() const {
  if (n <= 0) throw std::invalid_argument("PopProblem: need at least one variable");
  if (objective.num_vars() != n)
    throw std::invalid_argument("PopProblem: objective variable count mismatch");
  for (const auto& c : constraints)
    if (c.poly.num_vars() != n)
      throw std::invalid_argument("PopProblem: constraint variable count mismatch");
  if (degree() < 1)
    throw std::invalid_argument("PopProblem: total degree must be >= 1");
}

bool PopProblem::is_feasible(const std::vector<double>& x, double tol) const {
  if (domain == Domain::ORTHANT)
    for (double v : x)
      if (v < -tol) return false;
  for (const auto& c : constraints) {
    double v = c.poly.eval(x) - c.rhs;
    if (c.rel == Relation::LE ? v > tol : std::fabs(v) > tol) return false;
  }
  return true;
}

void multiply_constraint(PopProblem& pop, int constraint_index, const Exponent& mono) {
  if (pop.domain != Domain::ORTHANT)
    throw std::invalid_argument("multiply_constraint: requires an ORTHANT-domain problem");
  if (constraint_index < 0 || constraint_index >= static_cast<int>(pop.constraints.size()))
    throw std::invalid_argument("multiply_constraint: constraint index out of range");
  const Constraint& c = pop.constraints[constraint_index];
  if (c.rel != Relation::LE)
    throw std::invalid_argument("multiply_constraint: only inequality constraints can be multiplied");
  Polynomial shifted = c.poly - Polynomial::constant(pop.n, c.rhs);
  Constraint added;
  added.poly = Polynomial::monomial(pop.n, mono) * shifted;
  added.rel = Relation::LE;
  added.rhs = 0.0;
  pop.constraints.push_back(std::move(added));
}

namespace {
void hash_bytes(std::uint64_t& h, const void* p, size_t len) {
  const unsigned char* b = static_cast<const unsigned char*>(p);
  for (size_t i = 0; i < len; ++i) {
    h ^= b[i];
    h *= 1099511628211ULL;
  }
}
void hash_poly(std::uint64_t& h, const Polynomial& p) {
  for (const auto& [e, c] : p.terms()) {
    for (int v : e) hash_bytes(h, &v, sizeof v);
    hash_bytes(h, &c, sizeof c);
  }
}
}  // namespace

std::uint64_t problem_hash(const PopProblem& pop) {
  std::uint64_t h = 1469598103934665603ULL;
  hash_bytes(h, &pop.n, sizeof pop.n);
  int s = static_cast<int>(pop.sense), d = static_cast<int>(pop.domain);
  hash_bytes(h, &s, sizeof s);
  hash_bytes(h, &d, sizeof d);
  hash_poly(h, pop.objective);
  for (const auto& c : pop.constraints) {
    int r = static_cast<int>(c.rel);
    hash_bytes(h, &r, sizeof r);
    hash_bytes(h, &c.rhs, sizeof c.rhs);
    hash_poly(h, c.poly);
  }
  return h;
}

}  // namespace popcone
