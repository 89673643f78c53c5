#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "popcone/instances.hpp"
#include "popcone/oracle.hpp"
#include "popcone/relax.hpp"
#include "popcone/solver.hpp"
#include "popcone/symtensor.hpp"

using namespace popcone;

namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

// Independent stars-and-bars count (Pascal recurrence, no library calls).
long long choose_ll(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::vector<long long> row(k + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = std::min(i, k); j >= 1; --j) row[j] += row[j - 1];
  return row[k];
}

// Moment vector of the lifted point (1, x) under the relaxation's
// variable <-> exponent correspondence.
std::vector<double> moment_vector(const TensorRelaxation& rel,
                                  const std::vector<double>& x) {
  std::vector<double> hat(rel.dim);
  hat[0] = 1.0;
  for (int i = 1; i < rel.dim; ++i) hat[i] = x[i - 1];
  std::vector<double> mv(rel.exponent_of_var.size());
  for (std::size_t v = 0; v < rel.exponent_of_var.size(); ++v) {
    double p = 1.0;
    for (int i = 0; i < rel.dim; ++i)
      for (int k = 0; k < rel.exponent_of_var[v][i]; ++k) p *= hat[i];
    mv[v] = p;
  }
  return mv;
}

Eigen::MatrixXd block_at(const PsdBlock& blk, const std::vector<double>& point) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(blk.size, blk.size);
  for (const PsdConstEntry& e : blk.const_part) {
    m(e.i, e.j) += e.val;
    if (e.i != e.j) m(e.j, e.i) += e.val;
  }
  for (const PsdEntry& e : blk.entries) {
    m(e.i, e.j) += e.coef * point[e.var];
    if (e.i != e.j) m(e.j, e.i) += e.coef * point[e.var];
  }
  return m;
}

double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

bool rows_hold(const ConicProgram& prog, const std::vector<double>& point, double tol) {
  for (const LinearRow& row : prog.rows) {
    double v = eval_expr(row.terms, point);
    if (row.rel == Relation::EQ && std::fabs(v - row.rhs) > tol) return false;
    if (row.rel == Relation::LE && v > row.rhs + tol) return false;
  }
  return true;
}

// Quartic orthant test problem in three variables.
PopProblem three_var_quartic() {
  PopProblem pop;
  pop.n = 3;
  pop.domain = Domain::ORTHANT;
  Polynomial s(3);
  s.add_term({1, 0, 0}, 1.0);
  s.add_term({0, 1, 0}, 1.0);
  s.add_term({0, 0, 1}, 1.0);
  pop.objective = s * s * s * s;
  pop.constraints.push_back({s, Relation::LE, 1.0});
  return pop;
}

}  // namespace

TEST_CASE("tensor relaxation shapes match stars-and-bars counts") {
  PopProblem pop = three_var_quartic();  // n = 3, degree 4, dim 4

  TensorRelaxation dnn = build_tensor_relaxation(pop, ConeKind::DNN);
  CHECK(dnn.dim == 4);
  CHECK(dnn.degree == 4);
  CHECK(dnn.program.num_vars == choose_ll(4 + 4 - 1, 4));  // 35 entries
  CHECK(dnn.program.nonneg.size() == 35);
  // Slice blocks: one per degree-2 index over dim 4 -> C(5,2) = 10, size dim.
  REQUIRE(dnn.program.psd_blocks.size() == choose_ll(4 + 2 - 1, 2));
  for (const PsdBlock& b : dnn.program.psd_blocks) CHECK(b.size == 4);

  TensorRelaxation sdp = build_tensor_relaxation(pop, ConeKind::SDP);
  REQUIRE(sdp.program.psd_blocks.size() == 1);  // moment-matrix form
  CHECK(sdp.program.psd_blocks[0].size == choose_ll(4 + 2 - 1, 2));  // 10
  CHECK(sdp.program.nonneg.empty());

  TensorRelaxation prin =
      build_tensor_relaxation(pop, ConeKind::SDP, false, PsdForm::PrincipalSlices);
  CHECK(prin.program.psd_blocks.size() == 4);  // even degree-2 indices over dim 4

  TensorRelaxation l = build_tensor_relaxation(pop, ConeKind::L);
  CHECK(l.program.psd_blocks.empty());
  CHECK(l.program.nonneg.size() == 35);

  CHECK_NOTHROW(dnn.program.validate());
  CHECK_NOTHROW(sdp.program.validate());
}

TEST_CASE("tensor relaxation pins the normalization entry") {
  PopProblem pop = three_var_quartic();
  TensorRelaxation rel = build_tensor_relaxation(pop, ConeKind::DNN);
  REQUIRE(!rel.program.rows.empty());
  const LinearRow& norm = rel.program.rows[0];
  CHECK(norm.rel == Relation::EQ);
  CHECK(norm.rhs == doctest::Approx(1.0));
  REQUIRE(norm.terms.size() == 1);
  CHECK(norm.terms[0].var == rel.var_of_exponent.at({4, 0, 0, 0}));
  CHECK(norm.terms[0].coef == doctest::Approx(1.0));
}

TEST_CASE("sign rows bound the degree-(d-1) entries") {
  PopProblem pop = three_var_quartic();
  TensorRelaxation plain = build_tensor_relaxation(pop, ConeKind::DNN);
  TensorRelaxation signed_rel = build_tensor_relaxation(pop, ConeKind::DNN, true);
  REQUIRE(signed_rel.program.rows.size() == plain.program.rows.size() + 3);
  for (int i = 1; i <= 3; ++i) {
    const LinearRow& row =
        signed_rel.program.rows[plain.program.rows.size() + i - 1];
    CHECK(row.rel == Relation::LE);
    CHECK(row.rhs == doctest::Approx(0.0));
    REQUIRE(row.terms.size() == 1);
    Exponent e(4, 0);
    e[0] = 3;
    e[i] = 1;
    CHECK(row.terms[0].var == signed_rel.var_of_exponent.at(e));
    CHECK(row.terms[0].coef == doctest::Approx(-1.0));
  }

  PopProblem free_pop = make_example2(2, 2);
  CHECK_THROWS_AS(build_tensor_relaxation(free_pop, ConeKind::SDP, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_tensor_relaxation(free_pop, ConeKind::DNN),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_tensor_relaxation(free_pop, ConeKind::L),
                  std::invalid_argument);
}

TEST_CASE("orthant moment vectors are feasible and reproduce the objective") {
  PopProblem pop = make_example3(true);  // degree-4 orthant instance
  TensorRelaxation dnn = build_tensor_relaxation(pop, ConeKind::DNN);
  TensorRelaxation sdp = build_tensor_relaxation(pop, ConeKind::SDP);

  std::mt19937_64 rng(41);
  int used = 0;
  for (int t = 0; t < 2000 && used < 50; ++t) {
    std::vector<double> x{0.5 * unit_draw(rng), 0.5 * unit_draw(rng)};
    if (!pop.is_feasible(x, 1e-9)) continue;
    ++used;

    std::vector<double> mv = moment_vector(dnn, x);
    CHECK(rows_hold(dnn.program, mv, 1e-9));
    for (const LinExpr& f : dnn.program.nonneg)
      CHECK(eval_expr(f, mv) >= -1e-12);
    for (const PsdBlock& b : dnn.program.psd_blocks)
      CHECK(min_eig(block_at(b, mv)) >= -1e-9);
    double direct = pop.objective.eval(x);
    CHECK(dnn.program.objective_value(mv) ==
          doctest::Approx(direct).epsilon(1e-9));

    std::vector<double> mv2 = moment_vector(sdp, x);
    for (const PsdBlock& b : sdp.program.psd_blocks)
      CHECK(min_eig(block_at(b, mv2)) >= -1e-9);
  }
  CHECK(used == 50);
}

TEST_CASE("free-domain soundness depends on the PSD form") {
  PopProblem pop = make_example2(2, 2);  // spheres, mixed-sign feasible points

  TensorRelaxation moment = build_tensor_relaxation(pop, ConeKind::SDP);
  TensorRelaxation prin =
      build_tensor_relaxation(pop, ConeKind::SDP, false, PsdForm::PrincipalSlices);
  TensorRelaxation slices =
      build_tensor_relaxation(pop, ConeKind::SDP, false, PsdForm::AllSlices);

  std::mt19937_64 rng(43);
  for (int t = 0; t < 50; ++t) {
    double th = 6.283185307179586 * unit_draw(rng);
    double ph = 6.283185307179586 * unit_draw(rng);
    std::vector<double> x{std::cos(th), std::sin(th), std::cos(ph), std::sin(ph)};
    REQUIRE(pop.is_feasible(x, 1e-9));

    std::vector<double> mv = moment_vector(moment, x);
    CHECK(rows_hold(moment.program, mv, 1e-9));
    for (const PsdBlock& b : moment.program.psd_blocks)
      CHECK(min_eig(block_at(b, mv)) >= -1e-9);
    for (const PsdBlock& b : prin.program.psd_blocks)
      CHECK(min_eig(block_at(b, moment_vector(prin, x))) >= -1e-9);
  }

  // The full slice family is NOT valid off the orthant: at the feasible point
  // x = (-1, 0), y = (1, 0) a slice with one index fixed on the negative
  // coordinate equals a negative multiple of a rank-one matrix.
  std::vector<double> bad{-1.0, 0.0, 1.0, 0.0};
  REQUIRE(pop.is_feasible(bad, 1e-9));
  std::vector<double> mv = moment_vector(slices, bad);
  double worst = 0.0;
  for (const PsdBlock& b : slices.program.psd_blocks)
    worst = std::min(worst, min_eig(block_at(b, mv)));
  CHECK(worst < -0.5);
}

TEST_CASE("lifting map indexes pairs bijectively") {
  LiftingMap m2 = build_lifting_map(2);
  CHECK(m2.r() == 3);
  CHECK(m2.pair_index(1, 1) == 1);
  CHECK(m2.pair_index(1, 2) == 2);
  CHECK(m2.pair_index(2, 2) == 3);
  CHECK(m2.pairs[1] == std::make_pair(1, 2));
  CHECK(m2.y_var(1) == 2);  // y_1 sits right after x_1, x_2

  LiftingMap m1 = build_lifting_map(1);
  CHECK(m1.r() == 1);
  CHECK(m1.pair_index(1, 1) == 1);

  for (int n = 1; n <= 6; ++n) {
    LiftingMap m = build_lifting_map(n);
    CHECK(m.r() == n * (n + 1) / 2);
    std::vector<int> seen(m.r() + 1, 0);
    for (int a = 1; a <= n; ++a)
      for (int b = a; b <= n; ++b) {
        int c = m.pair_index(a, b);
        REQUIRE(c >= 1);
        REQUIRE(c <= m.r());
        ++seen[c];
        CHECK(m.pairs[c - 1] == std::make_pair(a, b));
      }
    for (int c = 1; c <= m.r(); ++c) CHECK(seen[c] == 1);  // bijection
  }

  CHECK_THROWS_AS(build_lifting_map(0), std::invalid_argument);
  CHECK_THROWS_AS(m2.pair_index(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(m2.pair_index(1, 3), std::invalid_argument);
}

TEST_CASE("quadratic reformulation of a univariate quartic") {
  PopProblem pop;
  pop.n = 1;
  pop.domain = Domain::ORTHANT;
  Polynomial obj(1);
  for (int k = 0; k <= 4; ++k) obj.add_term({k}, 1.0);
  pop.objective = obj;
  pop.constraints.push_back({Polynomial::monomial(1, {4}), Relation::LE, 1.0});

  QcqpReformulation ref = qcqp_reformulate(pop);
  CHECK(ref.map.r() == 1);
  CHECK(ref.lifted.n == 2);  // z = (x, y) with y = x^2
  // x^4 -> y^2, x^3 -> x y, degrees <= 2 pass through.
  CHECK(ref.lifted.objective.coef({0, 2}) == doctest::Approx(1.0));
  CHECK(ref.lifted.objective.coef({1, 1}) == doctest::Approx(1.0));
  CHECK(ref.lifted.objective.coef({2, 0}) == doctest::Approx(1.0));
  CHECK(ref.lifted.objective.coef({1, 0}) == doctest::Approx(1.0));
  CHECK(ref.lifted.objective.coef({0, 0}) == doctest::Approx(1.0));
  CHECK(ref.lifted.objective.degree() == 2);
  REQUIRE(ref.lifted.constraints.size() == 1);
  CHECK(ref.lifted.constraints[0].poly.coef({0, 2}) == doctest::Approx(1.0));
  CHECK(ref.lifted.constraints[0].poly.terms().size() == 1);
}

TEST_CASE("quadratic reformulation evaluates like the original on the graph") {
  PopProblem pop = make_example3(true);
  QcqpReformulation ref = qcqp_reformulate(pop);
  CHECK(ref.lifted.degree() <= 2);
  REQUIRE(ref.lifted.constraints.size() == pop.constraints.size());

  std::mt19937_64 rng(47);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x{2.0 * unit_draw(rng), 2.0 * unit_draw(rng)};
    std::vector<double> z(ref.map.num_lifted());
    for (int i = 0; i < pop.n; ++i) z[i] = x[i];
    for (int c = 1; c <= ref.map.r(); ++c) {
      auto [a, b] = ref.map.pairs[c - 1];
      z[ref.map.y_var(c)] = x[a - 1] * x[b - 1];
    }
    CHECK(ref.lifted.objective.eval(z) ==
          doctest::Approx(pop.objective.eval(x)).epsilon(1e-10));
    for (std::size_t i = 0; i < pop.constraints.size(); ++i) {
      CHECK(ref.lifted.constraints[i].poly.eval(z) ==
            doctest::Approx(pop.constraints[i].poly.eval(x)).epsilon(1e-10));
      CHECK(ref.lifted.constraints[i].rel == pop.constraints[i].rel);
      CHECK(ref.lifted.constraints[i].rhs ==
            doctest::Approx(pop.constraints[i].rhs));
    }
  }
}

TEST_CASE("quadratic problems pass through the reformulation unchanged") {
  PopProblem pop = make_example3(false);  // already degree 2
  QcqpReformulation ref = qcqp_reformulate(pop);
  CHECK(ref.lifted.n == 5);  // x1, x2 plus three unused pair coordinates
  CHECK(ref.lifted.objective.coef({2, 0, 0, 0, 0}) == doctest::Approx(-8.0));
  CHECK(ref.lifted.objective.coef({1, 1, 0, 0, 0}) == doctest::Approx(-1.0));
  CHECK(ref.lifted.objective.coef({0, 2, 0, 0, 0}) == doctest::Approx(-13.0));
  CHECK(ref.lifted.constraints.size() == pop.constraints.size());

  PopProblem quintic;
  quintic.n = 1;
  quintic.domain = Domain::ORTHANT;
  quintic.objective = Polynomial::monomial(1, {5});
  CHECK_THROWS_AS(qcqp_reformulate(quintic), std::invalid_argument);
}

TEST_CASE("matrix relaxation structure") {
  PopProblem pop = make_example3(true);
  QcqpReformulation ref = qcqp_reformulate(pop);
  QpRelaxation rel = build_qp_relaxation(ref.lifted, ref.map, ConeKind::DNN);
  CHECK(rel.zdim == 1 + 2 + 3);
  CHECK(rel.program.num_vars == rel.zdim * (rel.zdim + 1) / 2);
  CHECK(rel.program.nonneg.size() == rel.program.num_vars);
  REQUIRE(rel.program.psd_blocks.size() == 1);
  CHECK(rel.program.psd_blocks[0].size == rel.zdim);

  // Every upper-triangular entry is a distinct variable.
  std::vector<int> hits(rel.program.num_vars, 0);
  for (int i = 0; i < rel.zdim; ++i)
    for (int j = i; j < rel.zdim; ++j) {
      int v = rel.var_of_entry[i][j];
      REQUIRE(v >= 0);
      REQUIRE(v < rel.program.num_vars);
      ++hits[v];
    }
  for (int v : hits) CHECK(v == 1);

  // First row pins the corner, last r() rows link pair coordinates.
  const LinearRow& corner = rel.program.rows[0];
  CHECK(corner.rel == Relation::EQ);
  CHECK(corner.rhs == doctest::Approx(1.0));
  REQUIRE(corner.terms.size() == 1);
  CHECK(corner.terms[0].var == rel.var_of_entry[0][0]);

  std::size_t first_link = rel.program.rows.size() - ref.map.r();
  for (int c = 1; c <= ref.map.r(); ++c) {
    const LinearRow& link = rel.program.rows[first_link + c - 1];
    CHECK(link.rel == Relation::EQ);
    CHECK(link.rhs == doctest::Approx(0.0));
    REQUIRE(link.terms.size() == 2);
    auto [a, b] = ref.map.pairs[c - 1];
    CHECK(link.terms[0].var == rel.var_of_entry[0][ref.map.n + c]);
    CHECK(link.terms[0].coef == doctest::Approx(1.0));
    CHECK(link.terms[1].var == rel.var_of_entry[a][b]);
    CHECK(link.terms[1].coef == doctest::Approx(-1.0));
  }

  QpRelaxation relaxed =
      build_qp_relaxation(ref.lifted, ref.map, ConeKind::DNN, true);
  for (int c = 1; c <= ref.map.r(); ++c)
    CHECK(relaxed.program.rows[first_link + c - 1].rel == Relation::LE);

  CHECK_THROWS_AS(build_qp_relaxation(pop, build_lifting_map(2), ConeKind::SDP),
                  std::invalid_argument);  // degree 4 is not quadratic
}

TEST_CASE("matrix relaxation bounds on the nonconvex quadratic benchmark") {
  // Plain semidefinite relaxation: weak bound near -103.43.
  QcqpReformulation plain = qcqp_reformulate(make_example3(false));
  SolveReport sdp = solve(
      build_qp_relaxation(plain.lifted, plain.map, ConeKind::SDP).program);
  REQUIRE(sdp.status == SolveStatus::OPTIMAL);
  CHECK(std::fabs(sdp.primal_value - (-103.43)) < 0.5);

  // Product-augmented doubly-nonnegative relaxation: -26.67.
  QcqpReformulation prod = qcqp_reformulate(make_example3_products());
  SolveReport dnn = solve(
      build_qp_relaxation(prod.lifted, prod.map, ConeKind::DNN).program);
  REQUIRE(dnn.status == SolveStatus::OPTIMAL);
  CHECK(std::fabs(dnn.primal_value - (-26.67)) < 0.05);

  // Slack reformulation reaches the same strength without product pairs.
  QcqpReformulation slack = make_example3_slack();
  CHECK(slack.map.r() == 0);
  SolveReport dnn2 = solve(
      build_qp_relaxation(slack.lifted, slack.map, ConeKind::DNN).program);
  REQUIRE(dnn2.status == SolveStatus::OPTIMAL);
  CHECK(std::fabs(dnn2.primal_value - (-26.67)) < 0.05);
}

TEST_CASE("relaxed linking is exact for monotone maximization") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 10; ++t) {
    PopProblem pop;
    pop.n = 1;
    pop.sense = Sense::MAX;
    pop.domain = Domain::ORTHANT;
    Polynomial obj(1);
    for (int k = 0; k <= 4; ++k) obj.add_term({k}, unit_draw(rng));
    pop.objective = obj;
    for (int k = 1; k <= 4; ++k)
      pop.constraints.push_back(
          {Polynomial::monomial(1, {k}), Relation::LE, 1.0 + unit_draw(rng)});

    QcqpReformulation ref = qcqp_reformulate(pop);
    CHECK(relaxed_linking_is_exact(ref.lifted));
    SolveReport eq = lp_solve(
        build_qp_relaxation(ref.lifted, ref.map, ConeKind::L, false).program);
    SolveReport le = lp_solve(
        build_qp_relaxation(ref.lifted, ref.map, ConeKind::L, true).program);
    REQUIRE(eq.status == SolveStatus::OPTIMAL);
    REQUIRE(le.status == SolveStatus::OPTIMAL);
    CHECK(le.primal_value >= eq.primal_value - 1e-7);  // relaxation can't shrink
    CHECK(std::fabs(le.primal_value - eq.primal_value) <=
          1e-6 * (1.0 + std::fabs(eq.primal_value)));
  }

  PopProblem min_side;
  min_side.n = 1;
  min_side.sense = Sense::MIN;
  min_side.objective = Polynomial::monomial(1, {2});
  CHECK(!relaxed_linking_is_exact(min_side));

  PopProblem neg;
  neg.n = 1;
  neg.sense = Sense::MAX;
  neg.objective = Polynomial::monomial(1, {2}, -1.0);
  CHECK(!relaxed_linking_is_exact(neg));
}

TEST_CASE("cone strength orders the bounds") {
  PopProblem pop = make_example1(3);
  SolveReport l = lp_solve(build_tensor_relaxation(pop, ConeKind::L).program);
  SolveReport dnn = solve(build_tensor_relaxation(pop, ConeKind::DNN).program);
  REQUIRE(l.status == SolveStatus::OPTIMAL);
  REQUIRE(dnn.status == SolveStatus::OPTIMAL);
  OracleReport orc = sample_upper_bound(pop, 20000, 1);
  REQUIRE(orc.feasible_found);
  // Minimization: weaker cone <= stronger cone <= any feasible value.
  CHECK(l.primal_value <= dnn.primal_value + 1e-6);
  CHECK(dnn.primal_value <= orc.best_value + 1e-6);
  CHECK(l.primal_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("degree strengthening appends exact-degree products") {
  PopProblem pop = make_example3(false);  // degrees 2, 2, 1
  PopProblem strong = pop;
  strengthen_to_degree(strong, 4);
  // Rows of degree 2 pick up the 3 quadratic monomials, the linear row the
  // 4 cubic monomials: 3 + 3 + 4 new rows.
  CHECK(strong.constraints.size() == pop.constraints.size() + 10);
  for (std::size_t i = pop.constraints.size(); i < strong.constraints.size(); ++i)
    CHECK(strong.constraints[i].poly.degree() <= 4);

  // The added rows hold on the original feasible set.
  std::mt19937_64 rng(59);
  int used = 0;
  for (int t = 0; t < 4000 && used < 200; ++t) {
    std::vector<double> x{0.5 * unit_draw(rng), 0.5 * unit_draw(rng)};
    if (!pop.is_feasible(x, 1e-9)) continue;
    ++used;
    CHECK(strong.is_feasible(x, 1e-7));
  }
  CHECK(used == 200);

  // Equality rows and rows already at the target degree stay untouched.
  PopProblem with_eq = pop;
  with_eq.constraints.push_back(
      {Polynomial::monomial(2, {1, 1}), Relation::EQ, 0.25});
  std::size_t before = with_eq.constraints.size();
  PopProblem strong_eq = with_eq;
  strengthen_to_degree(strong_eq, 2);
  // Target 2: the quadratic rows have no room, only the linear row expands.
  CHECK(strong_eq.constraints.size() == before + 2);

  PopProblem free_pop = make_example2(2, 2);
  CHECK_THROWS_AS(strengthen_to_degree(free_pop, 4), std::invalid_argument);
  PopProblem low = make_example3(false);
  CHECK_THROWS_AS(strengthen_to_degree(low, 1), std::invalid_argument);
}
