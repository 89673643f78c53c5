#include "popcone/instances.hpp"

#include <cstdint>

#include "popcone/oracle.hpp"
#include "popcone/solver.hpp"
#include "popcone/symtensor.hpp"

namespace popcone {

namespace {

Exponent unit(int n, int i, int power = 1) {
  Exponent e(n, 0);
  e[i] = power;
  return e;
}

Polynomial sum_of_vars(int n, int first, int last) {
  Polynomial s(n);
  for (int i = first; i < last; ++i) s.add_term(unit(n, i), 1.0);
  return s;
}

Polynomial sum_of_squares(int n, int first, int last) {
  Polynomial s(n);
  for (int i = first; i < last; ++i) s.add_term(unit(n, i, 2), 1.0);
  return s;
}

// Integer in [lo, hi] from the top bits of one rng draw. Avoids
// std::uniform_int_distribution, whose output is not pinned across standard
// library implementations; generated files must be byte-stable per seed.
int draw_int(std::mt19937_64& rng, int lo, int hi) {
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

// Homogeneous (exact_degree) or dense (degree <= deg) polynomial with
// integer coefficients in [lo, hi]; redrawn until some coefficient is
// nonzero so downstream builders never see an empty polynomial.
Polynomial random_poly(std::mt19937_64& rng, int n, int deg, bool exact_degree,
                       int lo, int hi) {
  for (;;) {
    Polynomial p(n);
    if (exact_degree) {
      for (const Exponent& e : enumerate_exponents(n, deg))
        p.add_term(e, draw_int(rng, lo, hi));
    } else {
      for (int d = 0; d <= deg; ++d)
        for (const Exponent& e : enumerate_exponents(n, d))
          p.add_term(e, draw_int(rng, lo, hi));
    }
    if (!p.is_zero()) return p;
  }
}

// True when some convex mixture of sampled orthant directions is feasible in
// the limit (every constraint's top-degree form stays below a slack
// threshold on average) while the objective's top form strictly decreases on
// average.  Such a mixture certifies an improving recession ray of the
// degree-4 lift -- a sum of rank-one moment tensors along those directions --
// so the instance has no finite bound worth tabulating.  Single improving
// directions are the mixtures supported on one sample; testing mixtures too
// matters because constraint tops can cancel across directions.  The search
// over mixture weights w is a linear program,
//   min sum_k w_k * obj_top(x_k)
//   s.t. sum_k w_k * (top_j(x_k) - slack) <= 0 for every constraint j,
//        sum_k w_k = 1, w >= 0,
// solved here in its dual form (one variable per constraint plus the bound
// variable, one row per sample), which is the cheap orientation for the
// interior-point method.  Primal infeasibility -- no tail-feasible mixture at
// all -- surfaces as an unbounded dual and keeps the instance.
bool has_improving_recession(const PopProblem& pop, std::mt19937_64& rng) {
  const double feas_slack = 5e-2;
  const double obj_drop = 1e-3;
  const int pool = 4096;
  std::vector<Polynomial> tops;
  for (const Constraint& c : pop.constraints)
    if (!c.poly.is_zero()) tops.push_back(c.poly.homogeneous_top());
  Polynomial obj_top = pop.objective.homogeneous_top();
  const int nj = static_cast<int>(tops.size());

  // Dual: max y0  s.t.  y0 - sum_j y_j * (top_j(x_k) - slack) <= obj_top(x_k)
  // per sample k, with y_j >= 0 and y0 free.
  ConicProgram lp;
  lp.num_vars = 1 + nj;
  lp.sense = Sense::MAX;
  lp.objective.push_back({0, 1.0});
  for (int j = 0; j < nj; ++j) lp.nonneg.push_back({{1 + j, 1.0}});
  std::vector<double> x(pop.n);
  for (int s = 0; s < pool; ++s) {
    double norm2 = 0;
    for (int i = 0; i < pop.n; ++i) {
      x[i] = static_cast<double>(rng() >> 11) * 0x1p-53;
      norm2 += x[i] * x[i];
    }
    if (norm2 < 1e-12) continue;  // vanishing draw carries no weight
    double inv = 1.0 / std::sqrt(norm2);
    for (double& v : x) v *= inv;
    LinearRow row;
    row.terms.push_back({0, 1.0});
    for (int j = 0; j < nj; ++j)
      row.terms.push_back({1 + j, feas_slack - tops[j].eval(x)});
    row.rel = Relation::LE;
    row.rhs = obj_top.eval(x);
    lp.rows.push_back(std::move(row));
  }
  SolveReport rep = lp_solve(lp);
  return rep.status == SolveStatus::OPTIMAL && rep.primal_value < -obj_drop;
}

}  // namespace

PopProblem make_example1(int n) {
  if (n < 1) throw std::invalid_argument("make_example1: n must be >= 1");
  PopProblem pop;
  pop.n = n;
  pop.sense = Sense::MIN;
  pop.domain = Domain::ORTHANT;
  Polynomial s = sum_of_vars(n, 0, n);
  Polynomial s2 = s * s;
  pop.objective = s2 * s2;
  pop.constraints.push_back({Polynomial::monomial(n, unit(n, 0, 4)), Relation::EQ, 1.0});
  return pop;
}

QcqpReformulation make_example1_qp(int n) {
  if (n < 1) throw std::invalid_argument("make_example1_qp: n must be >= 1");
  const int N = n + 2;  // z = (x_1..x_n, y_1, y_2)
  const int y1 = n, y2 = n + 1;
  PopProblem pop;
  pop.n = N;
  pop.sense = Sense::MIN;
  pop.domain = Domain::ORTHANT;
  pop.objective = Polynomial::monomial(N, unit(N, y1, 2));
  Polynomial s = sum_of_vars(N, 0, n);
  Polynomial link1 = Polynomial::monomial(N, unit(N, y1)) - s * s;
  pop.constraints.push_back({link1, Relation::EQ, 0.0});
  Polynomial link2 =
      Polynomial::monomial(N, unit(N, y2)) - Polynomial::monomial(N, unit(N, 0, 2));
  pop.constraints.push_back({link2, Relation::EQ, 0.0});
  pop.constraints.push_back({Polynomial::monomial(N, unit(N, y2, 2)), Relation::EQ, 1.0});
  QcqpReformulation ref;
  ref.lifted = std::move(pop);
  ref.map.n = N;  // no product pairs: the relaxation gets no linking rows
  return ref;
}

PopProblem make_example2(int n, int m) {
  if (n < 2 || m < 2)
    throw std::invalid_argument("make_example2: need n >= 2 and m >= 2");
  const int N = n + m;  // z = (x_1..x_n, y_1..y_m)
  PopProblem pop;
  pop.n = N;
  pop.sense = Sense::MIN;
  pop.domain = Domain::FREE;
  Polynomial obj(N);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
          Exponent e(N, 0);
          e[i] = e[j] = 1;
          e[n + a] = e[n + b] = 1;
          obj.add_term(e, 1.0);
        }
  pop.objective = std::move(obj);
  pop.constraints.push_back({sum_of_squares(N, 0, n), Relation::EQ, 1.0});
  pop.constraints.push_back({sum_of_squares(N, n, N), Relation::EQ, 1.0});
  return pop;
}

PopProblem make_example2_augmented(int n, int m) {
  PopProblem pop = make_example2(n, m);
  const int N = n + m;
  Polynomial px = sum_of_squares(N, 0, n) - Polynomial::constant(N, 1.0);
  Polynomial py = sum_of_squares(N, n, N) - Polynomial::constant(N, 1.0);
  pop.constraints.push_back({px * py, Relation::EQ, 0.0});
  pop.constraints.push_back({px * px, Relation::EQ, 0.0});
  pop.constraints.push_back({py * py, Relation::EQ, 0.0});
  return pop;
}

namespace {

PopProblem example3_base() {
  const int N = 2;
  PopProblem pop;
  pop.n = N;
  pop.sense = Sense::MIN;
  pop.domain = Domain::ORTHANT;
  Polynomial f0(N);
  f0.add_term({2, 0}, -8.0);
  f0.add_term({1, 1}, -1.0);
  f0.add_term({0, 2}, -13.0);
  f0.add_term({1, 0}, -6.0);
  f0.add_term({0, 1}, -1.0);
  pop.objective = f0;

  Polynomial f1(N);
  f1.add_term({2, 0}, 1.0);
  f1.add_term({1, 1}, 1.0);
  f1.add_term({0, 2}, 2.0);
  f1.add_term({1, 0}, -3.0);
  f1.add_term({0, 1}, -3.0);
  f1.add_term({0, 0}, -7.0);
  pop.constraints.push_back({f1, Relation::LE, 0.0});

  Polynomial f2(N);
  f2.add_term({1, 1}, 2.0);
  f2.add_term({1, 0}, 33.0);
  f2.add_term({0, 1}, 15.0);
  f2.add_term({0, 0}, -10.0);
  pop.constraints.push_back({f2, Relation::LE, 0.0});

  Polynomial f3(N);
  f3.add_term({1, 0}, 1.0);
  f3.add_term({0, 1}, 2.0);
  f3.add_term({0, 0}, -6.0);
  pop.constraints.push_back({f3, Relation::LE, 0.0});
  return pop;
}

}  // namespace

PopProblem make_example3(bool add_valid_inequalities) {
  PopProblem pop = example3_base();
  if (add_valid_inequalities) {
    multiply_constraint(pop, 1, {0, 1});  // x2 * f2 <= 0
    multiply_constraint(pop, 0, {2, 0});  // x1^2 * f1 <= 0
  }
  return pop;
}

PopProblem make_example3_products() {
  PopProblem pop = example3_base();
  multiply_constraint(pop, 2, {1, 0});  // x1 * f3 <= 0
  multiply_constraint(pop, 2, {0, 1});  // x2 * f3 <= 0
  return pop;
}

QcqpReformulation make_example3_slack() {
  const int N = 5;  // z = (x1, x2, y1, y2, y3)
  PopProblem base = example3_base();
  auto widen = [&](const Polynomial& p) {
    Polynomial q(N);
    for (const auto& [e, c] : p.terms()) q.add_term({e[0], e[1], 0, 0, 0}, c);
    return q;
  };
  PopProblem pop;
  pop.n = N;
  pop.sense = Sense::MIN;
  pop.domain = Domain::ORTHANT;
  pop.objective = widen(base.objective);

  // y1 = -f1, y2 = -f2, y3 = x1^2 as equalities.
  pop.constraints.push_back(
      {widen(base.constraints[0].poly) + Polynomial::monomial(N, unit(N, 2)),
       Relation::EQ, 0.0});
  pop.constraints.push_back(
      {widen(base.constraints[1].poly) + Polynomial::monomial(N, unit(N, 3)),
       Relation::EQ, 0.0});
  pop.constraints.push_back(
      {Polynomial::monomial(N, unit(N, 4)) - Polynomial::monomial(N, unit(N, 0, 2)),
       Relation::EQ, 0.0});
  // f3 <= 0, then the valid bilinear rows -x2*y2 <= 0 and -y1*y3 <= 0.
  const int f3_row = static_cast<int>(pop.constraints.size());
  pop.constraints.push_back({widen(base.constraints[2].poly), Relation::LE, 0.0});
  Polynomial x2y2(N);
  x2y2.add_term({0, 1, 0, 1, 0}, -1.0);
  pop.constraints.push_back({x2y2, Relation::LE, 0.0});
  Polynomial y1y3(N);
  y1y3.add_term({0, 0, 1, 0, 1}, -1.0);
  pop.constraints.push_back({y1y3, Relation::LE, 0.0});
  // All five products z_i * f3 <= 0.
  for (int i = 0; i < N; ++i) multiply_constraint(pop, f3_row, unit(N, i));

  QcqpReformulation ref;
  ref.lifted = std::move(pop);
  ref.map.n = N;  // no product pairs
  return ref;
}

PopProblem gen_example4(std::mt19937_64& rng) {
  const int N = 3;
  PopProblem pop;
  pop.n = N;
  pop.sense = Sense::MIN;
  pop.domain = Domain::ORTHANT;
  pop.objective = random_poly(rng, N, 4, /*exact_degree=*/true, -5, 5);

  // ||x - 0.5e||^2 = sum x_i^2 - sum x_i + 0.75, kept between 0.2^2 and 0.6^2.
  Polynomial shell = sum_of_squares(N, 0, N) - sum_of_vars(N, 0, N) +
                     Polynomial::constant(N, 0.75);
  pop.constraints.push_back({shell.scaled(-1.0), Relation::LE, -0.04});
  pop.constraints.push_back({shell, Relation::LE, 0.36});
  for (int i = 0; i < N; ++i)
    pop.constraints.push_back({Polynomial::monomial(N, unit(N, i)), Relation::LE, 1.0});
  return pop;
}

PopProblem gen_example5(std::mt19937_64& rng) {
  const int N = 3;
  for (;;) {
    PopProblem pop;
    pop.n = N;
    pop.sense = Sense::MIN;
    pop.domain = Domain::ORTHANT;
    pop.objective = random_poly(rng, N, 4, /*exact_degree=*/true, -5, 5);
    pop.constraints.push_back(
        {random_poly(rng, N, 4, /*exact_degree=*/false, -10, 10), Relation::LE, 0.0});
    pop.constraints.push_back(
        {random_poly(rng, N, 4, /*exact_degree=*/false, -10, 10), Relation::LE, 0.0});
    Polynomial lin(N);
    for (int i = 0; i < N; ++i) lin.add_term(unit(N, i), -draw_int(rng, 0, 5));
    double rhs = -draw_int(rng, 5, 15);
    pop.constraints.push_back({lin, Relation::LE, rhs});

    // Keep instances a global solver would have solved: a feasible point must
    // exist, no sampled recession direction may improve the objective without
    // limit (such instances have no finite optimum to tabulate), and the
    // sampled optimum must be of moderate size so bounds stay comparable at a
    // fixed absolute tolerance.
    if (has_improving_recession(pop, rng)) continue;
    OracleReport probe = sample_upper_bound(pop, 100000, rng());
    if (probe.feasible_found && std::abs(probe.best_value) <= 50.0) return pop;
  }
}

}  // namespace popcone
