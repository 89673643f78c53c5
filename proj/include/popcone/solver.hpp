#pragma once

#include <optional>
#include <string>
#include <vector>

#include "popcone/conic.hpp"

namespace popcone {

enum class SolveStatus { OPTIMAL, UNBOUNDED, INFEASIBLE, MAX_ITER, NUMERICAL_TROUBLE };

const char* to_string(SolveStatus s);

struct SolverConfig {
  double tol_feas = 1e-8;
  double tol_gap = 1e-7;
  int max_iter = 200;
  // Objective magnitude past which a primal-feasible iterate is treated as
  // evidence of unboundedness even without a certificate.
  double unbounded_threshold = 1e8;
  // Reduced-accuracy acceptance: a run that stalls before the target
  // tolerances still reports OPTIMAL (with an annotation) when its best
  // iterate is within this factor of them on every convergence measure.
  double accept_factor = 100.0;
  // The algorithm has no randomized component; the flag is part of the
  // configuration surface and documents that runs are bit-reproducible.
  bool deterministic = true;
  // Internal: certificate searches run with this disabled to avoid recursion.
  bool enable_certificate_search = true;
};

struct SolveResiduals {
  double primal_inf = 0.0;  // max equality violation / cone infeasibility
  double dual_inf = 0.0;    // stationarity residual
  double gap = 0.0;         // |primal - dual|
};

struct SolveReport {
  SolveStatus status = SolveStatus::NUMERICAL_TROUBLE;
  double primal_value = 0.0;
  double dual_value = 0.0;
  // One multiplier per program row, in row order: >= 0 for inequality rows,
  // free for equality rows. For INFEASIBLE these hold the Farkas certificate.
  std::vector<double> row_multipliers;
  std::vector<double> x;  // primal point (tau-normalized, original scaling)
  SolveResiduals residuals;
  int iterations = 0;
  bool certified = false;         // UNBOUNDED: ray verified; INFEASIBLE: Farkas verified
  std::vector<double> ray;        // improving ray when status == UNBOUNDED and certified
  std::string annotation;
};

// Primal-dual path-following interior-point solve (homogeneous self-dual
// embedding, Nesterov-Todd scaling, Mehrotra predictor-corrector, dense
// Schur-complement factorization). Deterministic: identical inputs give
// bit-identical reports.
SolveReport solve(const ConicProgram& prog, const SolverConfig& cfg = {});

// Fast path for programs with no PSD blocks; same contract as solve().
// Throws std::invalid_argument if psd_blocks is nonempty.
SolveReport lp_solve(const ConicProgram& prog, const SolverConfig& cfg = {});

// Searches for an improving ray r of the homogenized program: all rows with
// rhs 0, cone constraints with constant parts dropped, and objective(r) <= -1
// (minimized orientation). Returns the ray normalized to objective -1, or
// nullopt if none is found within the iteration budget.
std::optional<std::vector<double>> find_improving_ray(const ConicProgram& prog,
                                                      const SolverConfig& cfg = {});

// Checks ray conditions numerically (rows at rhs 0, cone feasibility,
// normalized objective <= -(1 - tol)); used by solve() before it reports a
// certified UNBOUNDED status.
bool verify_ray(const ConicProgram& prog, const std::vector<double>& ray, double tol = 1e-6);

}  // namespace popcone
