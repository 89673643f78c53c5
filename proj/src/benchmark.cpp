#include "popcone/benchmark.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "popcone/instances.hpp"
#include "popcone/oracle.hpp"
#include "popcone/relax.hpp"

namespace popcone {

SolverConfig benchmark_config() {
  SolverConfig cfg;
  cfg.accept_factor = 1e4;
  return cfg;
}

GeneratedBatch generate_batch(int example, int count, std::uint64_t seed) {
  if (example != 4 && example != 5)
    throw std::invalid_argument("generate_batch: example must be 4 or 5");
  if (count < 1) throw std::invalid_argument("generate_batch: count must be >= 1");
  GeneratedBatch batch;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    batch.pops.push_back(example == 4 ? gen_example4(rng) : gen_example5(rng));
    batch.oracle_seeds.push_back(rng());
  }
  return batch;
}

namespace {

SolveReport solve_any(const ConicProgram& prog, const SolverConfig& cfg) {
  return prog.psd_blocks.empty() ? lp_solve(prog, cfg) : solve(prog, cfg);
}

}  // namespace

PipelineOutcome run_comparison(const std::string& id, const PopProblem& pop,
                               long long budget, std::uint64_t oracle_seed) {
  PipelineOutcome res;
  res.row.id = id;
  try {
    OracleReport orc = sample_upper_bound(pop, budget, oracle_seed);
    if (orc.feasible_found) res.row.oracle_value = orc.best_value;

    PopProblem strong = pop;
    ConeKind cone = ConeKind::SDP;
    if (pop.domain == Domain::ORTHANT) {
      cone = ConeKind::DNN;
      int target = std::max(4, pop.degree() + (pop.degree() % 2));
      strengthen_to_degree(strong, target);
    }
    SolverConfig cfg = benchmark_config();

    SolveReport tp = solve_any(build_tensor_relaxation(strong, cone).program, cfg);
    res.row.tp_status = tp.status;
    res.row.tp_bound = tp.primal_value;

    QcqpReformulation ref = qcqp_reformulate(strong);
    SolveReport qp =
        solve_any(build_qp_relaxation(ref.lifted, ref.map, cone).program, cfg);
    res.row.qp_status = qp.status;
    res.row.qp_bound = qp.primal_value;

    res.row.ratio = improve_ratio(res.row.oracle_value, tp.primal_value,
                                  tp.status, qp.primal_value, qp.status);

    if (tp.status == SolveStatus::NUMERICAL_TROUBLE ||
        qp.status == SolveStatus::NUMERICAL_TROUBLE) {
      res.row.note = "solver: numerical trouble";
      res.error_class = 4;
      return res;
    }
    // Soundness audit: a finite bound must sit on the correct side of the
    // sampled feasible value.
    if (orc.feasible_found) {
      if (tp.status == SolveStatus::OPTIMAL &&
          !verify_bound(pop, tp.primal_value, orc)) {
        res.row.note = "tensor bound fails the sampling soundness check";
        res.error_class = 4;
      } else if (qp.status == SolveStatus::OPTIMAL &&
                 !verify_bound(pop, qp.primal_value, orc)) {
        res.row.note = "quadratic bound fails the sampling soundness check";
        res.error_class = 4;
      }
    }
  } catch (const std::invalid_argument& e) {
    res.row.note = std::string("builder: ") + e.what();
    res.error_class = 3;
  } catch (const std::exception& e) {
    res.row.note = e.what();
    res.error_class = 4;
  }
  return res;
}

}  // namespace popcone
