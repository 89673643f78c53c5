#include "popcone/symtensor.hpp"

#include <cmath>
#include <sstream>

namespace popcone {

SymmetricTensor::SymmetricTensor(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1) throw std::invalid_argument("SymmetricTensor: dim must be >= 1");
  if (order < 1) throw std::invalid_argument("SymmetricTensor: order must be >= 1");
}

void SymmetricTensor::check(const Exponent& e) const {
  if (static_cast<int>(e.size()) != dim_)
    throw std::invalid_argument("SymmetricTensor: exponent length != dim");
  for (int p : e)
    if (p < 0) throw std::invalid_argument("SymmetricTensor: negative exponent");
  if (total_degree(e) != order_)
    throw std::invalid_argument("SymmetricTensor: exponent degree != order");
}

void SymmetricTensor::set(const Exponent& e, double v) {
  check(e);
  if (v == 0.0) entries_.erase(e);
  else entries_[e] = v;
}

void SymmetricTensor::add(const Exponent& e, double v) {
  check(e);
  auto it = entries_.find(e);
  if (it == entries_.end()) {
    if (v != 0.0) entries_.emplace(e, v);
  } else {
    it->second += v;
    if (it->second == 0.0) entries_.erase(it);
  }
}

double SymmetricTensor::at(const Exponent& e) const {
  check(e);
  auto it = entries_.find(e);
  return it == entries_.end() ? 0.0 : it->second;
}

std::string SymmetricTensor::to_triples() const {
  std::ostringstream os;
  for (const auto& [e, v] : entries_) {
    os << "(";
    for (size_t i = 0; i < e.size(); ++i) os << (i ? "," : "") << e[i];
    os << ") x" << multiplicity(e) << " = " << v << "\n";
  }
  return os.str();
}

std::vector<Exponent> enumerate_exponents(int dim, int deg) {
  if (dim < 1 || deg < 0) throw std::invalid_argument("enumerate_exponents: bad arguments");
  std::vector<Exponent> out;
  Exponent cur(dim, 0);
  // Recursive lexicographic enumeration of compositions of deg into dim parts.
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == dim - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int k = left; k >= 0; --k) {
      cur[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  rec(rec, 0, deg);
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double multiplicity(const Exponent& e) {
  int d = total_degree(e);
  double r = 1.0;
  // d!/(e_1!...e_k!) computed as a product of binomials to stay integral.
  int used = 0;
  for (int p : e) {
    used += p;
    r *= binomial(used, p);
  }
  (void)d;
  return r;
}

SymmetricTensor m_d(const std::vector<double>& x, int d) {
  int dim = static_cast<int>(x.size());
  SymmetricTensor t(dim, d);
  for (const Exponent& e : enumerate_exponents(dim, d)) {
    double v = 1.0;
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < e[i]; ++k) v *= x[i];
    t.set(e, v);
  }
  return t;
}

SymmetricTensor e_tensor(int dim, int d) {
  SymmetricTensor t(dim, d);
  for (const Exponent& e : enumerate_exponents(dim, d)) t.set(e, 1.0);
  return t;
}

double inner_product(const SymmetricTensor& t1, const SymmetricTensor& t2) {
  if (t1.dim() != t2.dim() || t1.order() != t2.order())
    throw std::invalid_argument("inner_product: shape mismatch");
  const auto& a = t1.entries();
  const auto& b = t2.entries();
  double s = 0.0;
  // Iterate the smaller support.
  if (a.size() <= b.size()) {
    for (const auto& [e, v] : a) {
      auto it = b.find(e);
      if (it != b.end()) s += multiplicity(e) * v * it->second;
    }
  } else {
    for (const auto& [e, v] : b) {
      auto it = a.find(e);
      if (it != a.end()) s += multiplicity(e) * v * it->second;
    }
  }
  return s;
}

SymmetricTensor t_d(const Polynomial& p, int d) {
  if (p.degree() > d)
    throw std::invalid_argument("t_d: order is smaller than the polynomial degree");
  int n = p.num_vars();
  SymmetricTensor t(n + 1, d);
  double dfact = 1.0;
  for (int i = 2; i <= d; ++i) dfact *= i;
  Exponent lifted(n + 1, 0);
  for (const auto& [b, c] : p.terms()) {
    int db = total_degree(b);
    lifted[0] = d - db;
    for (int i = 0; i < n; ++i) lifted[i + 1] = b[i];
    // ((d-|b|)! b_1!...b_n!/d!) * c  ==  c / multiplicity(lifted exponent)
    t.set(lifted, c / multiplicity(lifted));
  }
  (void)dfact;
  return t;
}

Eigen::MatrixXd slice(const SymmetricTensor& t, const Exponent& gamma) {
  if (t.order() < 2) throw std::invalid_argument("slice: order must be >= 2");
  if (static_cast<int>(gamma.size()) != t.dim())
    throw std::invalid_argument("slice: gamma length != dim");
  if (total_degree(gamma) != t.order() - 2)
    throw std::invalid_argument("slice: |gamma| must equal order-2");
  int p = t.dim();
  Eigen::MatrixXd m(p, p);
  Exponent e = gamma;
  for (int j = 0; j < p; ++j)
    for (int k = j; k < p; ++k) {
      e[j] += 1;
      e[k] += 1;
      double v = t.at(e);
      m(j, k) = v;
      m(k, j) = v;
      e[j] -= 1;
      e[k] -= 1;
    }
  return m;
}

bool is_principal(const Exponent& gamma) {
  for (int p : gamma)
    if (p % 2 != 0) return false;
  return true;
}

std::vector<Exponent> enumerate_slices(int dim, int d, bool principal_only) {
  if (d < 2) throw std::invalid_argument("enumerate_slices: d must be >= 2");
  std::vector<Exponent> out;
  for (Exponent& g : enumerate_exponents(dim, d - 2))
    if (!principal_only || is_principal(g)) out.push_back(std::move(g));
  return out;
}

}  // namespace popcone
