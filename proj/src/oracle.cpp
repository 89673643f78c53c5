#include "popcone/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace popcone {

namespace {

constexpr double kFeasTol = 1e-8;
constexpr int kTopK = 10;
constexpr int kPolishRounds = 50;

struct Box {
  std::vector<double> lo, hi;
};

// Box implied by the domain plus any single-variable degree-1 bound rows.
Box sampling_box(const PopProblem& pop) {
  Box b;
  double lo = pop.domain == Domain::ORTHANT ? 0.0 : -10.0;
  b.lo.assign(pop.n, lo);
  b.hi.assign(pop.n, 10.0);
  for (const auto& con : pop.constraints) {
    if (con.rel != Relation::LE || con.poly.terms().size() != 1) continue;
    const auto& [e, coef] = *con.poly.terms().begin();
    if (total_degree(e) != 1) continue;
    int var = -1;
    for (int i = 0; i < pop.n; ++i)
      if (e[i] == 1) var = i;
    if (var < 0 || coef == 0.0) continue;
    double bound = con.rhs / coef;
    if (coef > 0)
      b.hi[var] = std::min(b.hi[var], bound);
    else
      b.lo[var] = std::max(b.lo[var], bound);
  }
  for (int i = 0; i < pop.n; ++i)
    if (b.lo[i] > b.hi[i]) b.lo[i] = b.hi[i];
  return b;
}

void clamp_to_box(const Box& box, std::vector<double>& x) {
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box.lo[i], box.hi[i]);
}

// Gauss-Newton projection onto the equality constraints (least-squares step
// on the residual vector), clamped back into the box each iteration.
void repair_equalities(const PopProblem& pop, const Box& box,
                       const std::vector<const Constraint*>& eqs,
                       const std::vector<std::vector<Polynomial>>& eq_grads,
                       std::vector<double>& x) {
  if (eqs.empty()) return;
  const int m = static_cast<int>(eqs.size());
  for (int it = 0; it < 20; ++it) {
    Eigen::VectorXd h(m);
    double worst = 0.0;
    for (int k = 0; k < m; ++k) {
      h[k] = eqs[k]->poly.eval(x) - eqs[k]->rhs;
      worst = std::max(worst, std::fabs(h[k]));
    }
    if (worst <= 1e-10) return;
    Eigen::MatrixXd J(m, pop.n);
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < pop.n; ++i) J(k, i) = eq_grads[k][i].eval(x);
    Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(h);
    if (!step.allFinite()) return;
    for (int i = 0; i < pop.n; ++i) x[i] -= step[i];
    clamp_to_box(box, x);
  }
}

// Objective in minimized orientation so one comparison covers both senses.
double oriented(const PopProblem& pop, const std::vector<double>& x) {
  double v = pop.objective.eval(x);
  return pop.sense == Sense::MAX ? -v : v;
}

struct Searcher {
  const PopProblem& pop;
  Box box;
  std::vector<const Constraint*> eqs;
  std::vector<std::vector<Polynomial>> eq_grads;
  // Oriented objective values of the current top points, worst last.
  std::vector<std::pair<double, std::vector<double>>> top;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_point;

  explicit Searcher(const PopProblem& p) : pop(p), box(sampling_box(p)) {
    for (const auto& con : p.constraints)
      if (con.rel == Relation::EQ) eqs.push_back(&con);
    for (const auto* c : eqs) {
      std::vector<Polynomial> g;
      for (int i = 0; i < p.n; ++i) g.push_back(c->poly.partial_derivative(i));
      eq_grads.push_back(std::move(g));
    }
  }

  bool feasible(const std::vector<double>& x) const { return pop.is_feasible(x, kFeasTol); }

  // Golden-section refinement of coordinate i on its box segment, keeping
  // only feasible improvements (equalities re-repaired after each move).
  void polish_coordinate(std::vector<double>& x, double& fx, int i) {
    static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = box.lo[i], b = box.hi[i];
    auto probe = [&](double t) {
      std::vector<double> y = x;
      y[i] = t;
      repair_equalities(pop, box, eqs, eq_grads, y);
      if (!feasible(y)) return std::numeric_limits<double>::infinity();
      double fy = oriented(pop, y);
      if (fy < fx) {
        x = y;
        fx = fy;
      }
      return fy;
    };
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = probe(c), fd = probe(d);
    for (int round = 0; round < 24 && (b - a) > 1e-10; ++round) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = probe(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = probe(d);
      }
    }
  }

  // Best feasible value of coordinate j on its segment with the rest of y
  // fixed; returns +inf when no feasible point is found on the line.
  double line_min(std::vector<double> y, int j, std::vector<double>* arg) const {
    static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = box.lo[j], b = box.hi[j];
    double fbest = std::numeric_limits<double>::infinity();
    auto probe = [&](double t) {
      std::vector<double> z = y;
      z[j] = t;
      repair_equalities(pop, box, eqs, eq_grads, z);
      if (!feasible(z)) return std::numeric_limits<double>::infinity();
      double fz = oriented(pop, z);
      if (fz < fbest) {
        fbest = fz;
        if (arg) *arg = z;
      }
      return fz;
    };
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = probe(c), fd = probe(d);
    for (int round = 0; round < 24 && (b - a) > 1e-10; ++round) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = probe(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = probe(d);
      }
    }
    return fbest;
  }

  // Coordinate descent jams where no single-coordinate move improves but a
  // coupled move does (a boundary corner). Search coordinate i with
  // coordinate j re-optimized at every probe to step along such corners.
  void polish_pair(std::vector<double>& x, double& fx, int i, int j) {
    static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = box.lo[i], b = box.hi[i];
    auto probe = [&](double t) {
      std::vector<double> y = x;
      y[i] = t;
      std::vector<double> z;
      double fz = line_min(y, j, &z);
      if (fz < fx) {
        x = z;
        fx = fz;
      }
      return fz;
    };
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = probe(c), fd = probe(d);
    for (int round = 0; round < 24 && (b - a) > 1e-10; ++round) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = probe(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = probe(d);
      }
    }
  }

  void polish(std::vector<double> x) {
    double fx = oriented(pop, x);
    for (int round = 0; round < kPolishRounds; ++round) {
      double before = fx;
      for (int i = 0; i < pop.n; ++i) polish_coordinate(x, fx, i);
      if (before - fx < 1e-12) break;
    }
    // The pair pass is quadratic in n and expensive; spend it only on points
    // that lead after the cheap pass.  The gate depends on the running best,
    // which is determined by the sample prefix, so a longer run still treats
    // the shared prefix identically and best_value stays monotone in budget.
    if (fx < best) {
      for (int round = 0; round < 3; ++round) {
        double before = fx;
        for (int i = 0; i < pop.n; ++i)
          for (int j = 0; j < pop.n; ++j)
            if (i != j) polish_pair(x, fx, i, j);
        for (int i = 0; i < pop.n; ++i) polish_coordinate(x, fx, i);
        if (before - fx < 1e-12) break;
      }
    }
    if (fx < best) {
      best = fx;
      best_point = x;
    }
  }

  void offer(const std::vector<double>& x) {
    double fx = oriented(pop, x);
    if (fx < best) {
      best = fx;
      best_point = x;
    }
    bool enters = top.size() < kTopK || fx < top.back().first;
    if (!enters) return;
    top.emplace_back(fx, x);
    std::sort(top.begin(), top.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    if (top.size() > kTopK) top.pop_back();
    polish(x);
  }
};

}  // namespace

OracleReport sample_upper_bound(const PopProblem& pop, long long budget, std::uint64_t seed) {
  pop.validate();
  if (budget < 1) throw std::invalid_argument("sample_upper_bound: budget must be >= 1");
  OracleReport rep;
  rep.hash = problem_hash(pop);
  rep.samples_tried = budget;

  Searcher s(pop);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(pop.n);
  for (long long k = 0; k < budget; ++k) {
    for (int i = 0; i < pop.n; ++i)
      x[i] = s.box.lo[i] + (s.box.hi[i] - s.box.lo[i]) * unit(rng);
    repair_equalities(pop, s.box, s.eqs, s.eq_grads, x);
    if (!s.feasible(x)) continue;
    s.offer(x);
  }

  if (std::isfinite(s.best)) {
    rep.feasible_found = true;
    rep.best_point = s.best_point;
    rep.best_value = pop.sense == Sense::MAX ? -s.best : s.best;
  }
  return rep;
}

bool verify_bound(const PopProblem& pop, double bound, const OracleReport& report) {
  if (report.hash != problem_hash(pop))
    throw std::invalid_argument("verify_bound: report belongs to a different problem");
  if (!report.feasible_found) return true;
  if (pop.sense == Sense::MIN) return bound <= report.best_value + 1e-6;
  return bound >= report.best_value - 1e-6;
}

}  // namespace popcone
