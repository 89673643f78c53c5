// popcone: bounds for polynomial optimization problems via tensor-cone and
// quadratic-lifting relaxations, with instance generation and comparison
// reports. Exit codes: 0 success, 2 problem-file parse error, 3 relaxation
// builder error, 4 solver numerical trouble (or a failed table cell).
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "popcone/benchmark.hpp"
#include "popcone/instances.hpp"
#include "popcone/oracle.hpp"
#include "popcone/problem_io.hpp"
#include "popcone/relax.hpp"
#include "popcone/report.hpp"
#include "popcone/solver.hpp"

namespace {

using namespace popcone;

constexpr int kExitParse = 2;
constexpr int kExitBuilder = 3;
constexpr int kExitSolver = 4;

// ---------------------------------------------------------------------------
// Work pool: run tasks over POPCONE_THREADS workers (default: hardware
// concurrency), collecting results by index so output order never depends on
// completion order. Tasks must not throw.

void run_parallel(std::vector<std::function<void()>>& tasks) {
  if (tasks.empty()) return;
  unsigned hw = std::thread::hardware_concurrency();
  long threads = hw ? hw : 1;
  if (const char* env = std::getenv("POPCONE_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) threads = v;
  }
  threads = std::min<long>(threads, static_cast<long>(tasks.size()));
  if (threads <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (long w = 0; w < threads; ++w)
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) tasks[i]();
    });
  for (auto& w : workers) w.join();
}

// ---------------------------------------------------------------------------
// Small generic text table with markdown and RFC-4180 CSV renderings that
// share cell text exactly.

struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_escape_field(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char ch : f) {
    out += ch;
    if (ch == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string table_markdown(const TextTable& t) {
  std::ostringstream out;
  out << "|";
  for (const auto& h : t.header) out << " " << h << " |";
  out << "\n|";
  for (std::size_t i = 0; i < t.header.size(); ++i) out << " --- |";
  out << "\n";
  for (const auto& row : t.rows) {
    out << "|";
    for (const auto& c : row) out << " " << c << " |";
    out << "\n";
  }
  return out.str();
}

std::string table_csv(const TextTable& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out << (i ? "," : "") << csv_escape_field(t.header[i]);
  out << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_escape_field(row[i]);
    out << "\r\n";
  }
  return out.str();
}

std::string num4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

// Writes the CSV rendering when --csv was given; complains on I/O failure.
int emit_csv(const std::string& path, const std::string& csv) {
  if (path.empty()) return 0;
  if (!write_file(path, csv)) {
    std::cerr << "error: cannot write " << path << "\n";
    return 1;
  }
  return 0;
}

ConeKind parse_cone(const std::string& s) {
  if (s == "l") return ConeKind::L;
  if (s == "sdp") return ConeKind::SDP;
  return ConeKind::DNN;
}

SolveReport solve_any(const ConicProgram& prog, const SolverConfig& cfg) {
  return prog.psd_blocks.empty() ? lp_solve(prog, cfg) : solve(prog, cfg);
}

std::string describe_shape(const ConicProgram& prog) {
  int eq = 0, le = 0;
  for (const auto& r : prog.rows) (r.rel == Relation::EQ ? eq : le)++;
  std::map<int, int> by_size;
  for (const auto& b : prog.psd_blocks) by_size[b.size]++;
  std::ostringstream out;
  out << "program: " << prog.num_vars << " variables, " << eq
      << " equality rows, " << le << " inequality rows, "
      << prog.nonneg.size() << " nonnegative functionals, "
      << prog.psd_blocks.size() << " psd blocks";
  if (!by_size.empty()) {
    out << " (";
    bool first = true;
    for (auto [size, count] : by_size) {
      if (!first) out << ", ";
      first = false;
      out << count << " of size " << size;
    }
    out << ")";
  }
  return out.str();
}

std::string describe_result(const SolveReport& rep) {
  std::ostringstream out;
  if (rep.status == SolveStatus::OPTIMAL)
    out << "bound " << std::fixed << num4(rep.primal_value) << " OPTIMAL";
  else
    out << to_string(rep.status);
  if (rep.status == SolveStatus::UNBOUNDED || rep.status == SolveStatus::INFEASIBLE)
    out << (rep.certified ? " (certified)" : " (heuristic)");
  if (!rep.annotation.empty()) out << " [" << rep.annotation << "]";
  out << ", " << rep.iterations << " iterations";
  return out.str();
}

// ---------------------------------------------------------------------------
// relax: load one problem, build the requested relaxation, solve, report.

int cmd_relax(const std::string& file, const std::string& approach,
              const std::string& cone_name, bool relaxed_linking,
              bool sign_rows, const std::string& out_path) {
  PopProblem pop;
  try {
    pop = load_problem(file);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }
  ConeKind cone = parse_cone(cone_name);
  ConicProgram prog;
  try {
    if (approach == "tensor") {
      if (relaxed_linking) {
        std::cerr << "builder error: --relaxed-linking applies to the quadratic approach\n";
        return kExitBuilder;
      }
      prog = build_tensor_relaxation(pop, cone, sign_rows).program;
    } else {
      if (sign_rows) {
        std::cerr << "builder error: --sign-rows applies to the tensor approach\n";
        return kExitBuilder;
      }
      QcqpReformulation ref = qcqp_reformulate(pop);
      prog = build_qp_relaxation(ref.lifted, ref.map, cone, relaxed_linking).program;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "builder error: " << e.what() << "\n";
    return kExitBuilder;
  }
  std::cout << describe_shape(prog) << "\n";
  if (!out_path.empty()) {
    if (!write_file(out_path, prog.to_json())) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    std::cout << "wrote " << out_path << "\n";
  }
  SolveReport rep = solve_any(prog, SolverConfig{});
  std::cout << describe_result(rep) << "\n";
  return rep.status == SolveStatus::NUMERICAL_TROUBLE ? kExitSolver : 0;
}

// ---------------------------------------------------------------------------
// gen: write deterministic random instance files.

int cmd_gen(int example, int count, std::uint64_t seed, const std::string& outdir) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << outdir << ": " << ec.message() << "\n";
    return 1;
  }
  std::mt19937_64 rng(seed);
  for (int k = 1; k <= count; ++k) {
    PopProblem pop = example == 4 ? gen_example4(rng) : gen_example5(rng);
    char name[64];
    std::snprintf(name, sizeof(name), "ex%d_seed%llu_%02d.json", example,
                  static_cast<unsigned long long>(seed), k);
    std::string path = (std::filesystem::path(outdir) / name).string();
    try {
      save_problem(pop, path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    std::cout << path << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Comparison pipeline (run_comparison / generate_batch): shared with the
// acceptance checks so `reproduce ex4/ex5`, `compare`, and the pinned-seed
// statistics all run the identical code path.

int finish_comparison(const std::vector<PipelineOutcome>& results,
                      const std::string& csv_path) {
  std::vector<ComparisonRow> rows;
  rows.reserve(results.size());
  for (const auto& r : results) rows.push_back(r.row);
  std::cout << comparison_markdown(rows);
  std::cout << summary_line(summarize(rows)) << "\n";
  if (emit_csv(csv_path, comparison_csv(rows))) return 1;
  for (const auto& r : results)
    if (r.error_class) return r.error_class;
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce: the five built-in benchmark tables.

int reproduce_ex1(const std::string& csv_path) {
  const int n = 3;
  TextTable t;
  t.header = {"relaxation", "bound", "status"};
  int worst = 0;
  try {
    PopProblem pop = make_example1(n);
    SolveReport tp = lp_solve(build_tensor_relaxation(pop, ConeKind::L).program);
    QcqpReformulation ref = make_example1_qp(n);
    SolveReport qp = lp_solve(
        build_qp_relaxation(ref.lifted, ref.map, ConeKind::L).program);
    for (const auto& [label, rep] :
         {std::pair<const char*, const SolveReport&>{"tensor l", tp},
          {"quadratic l", qp}}) {
      t.rows.push_back({label,
                        rep.status == SolveStatus::OPTIMAL ? num4(rep.primal_value)
                                                           : "ERR",
                        to_string(rep.status)});
      if (rep.status != SolveStatus::OPTIMAL) worst = kExitSolver;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "builder error: " << e.what() << "\n";
    return kExitBuilder;
  }
  std::cout << table_markdown(t);
  if (emit_csv(csv_path, table_csv(t))) return 1;
  return worst;
}

int reproduce_ex2(const std::vector<std::pair<int, int>>& cells,
                  const std::string& csv_path) {
  struct Cell {
    std::pair<int, int> nm;
    SolveReport rep;
    std::string error;
  };
  std::vector<Cell> out(cells.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < cells.size(); ++i)
    tasks.push_back([&, i] {
      out[i].nm = cells[i];
      try {
        PopProblem pop = make_example2_augmented(cells[i].first, cells[i].second);
        out[i].rep = solve(build_tensor_relaxation(pop, ConeKind::SDP).program);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    });
  run_parallel(tasks);

  TextTable t;
  t.header = {"cell", "closed_form", "tensor_sdp", "status"};
  int worst = 0;
  for (const Cell& c : out) {
    double closed = -(std::max(c.nm.first, c.nm.second) - 1) / 4.0;
    std::string id = "(" + std::to_string(c.nm.first) + "," +
                     std::to_string(c.nm.second) + ")";
    if (!c.error.empty()) {
      t.rows.push_back({id, num4(closed), "ERR", c.error});
      worst = worst ? worst : kExitBuilder;
      continue;
    }
    bool ok = c.rep.status == SolveStatus::OPTIMAL &&
              std::fabs(c.rep.primal_value - closed) <= 1e-3;
    t.rows.push_back({id, num4(closed),
                      ok ? num4(c.rep.primal_value) : "ERR",
                      to_string(c.rep.status)});
    if (!ok) worst = worst ? worst : kExitSolver;
  }
  std::cout << table_markdown(t);
  if (emit_csv(csv_path, table_csv(t))) return 1;
  return worst;
}

int reproduce_ex3(long long budget, std::uint64_t seed, const std::string& csv_path) {
  struct Cell {
    const char* label;
    std::function<SolveReport()> run;
    SolveReport rep;
    std::string error;
  };
  std::vector<Cell> cells;
  cells.push_back({"quadratic sdp (plain)", [] {
                     QcqpReformulation ref = qcqp_reformulate(make_example3(false));
                     return solve(
                         build_qp_relaxation(ref.lifted, ref.map, ConeKind::SDP).program);
                   }});
  cells.push_back({"quadratic dnn (product rows)", [] {
                     QcqpReformulation ref = qcqp_reformulate(make_example3_products());
                     return solve(
                         build_qp_relaxation(ref.lifted, ref.map, ConeKind::DNN).program);
                   }});
  cells.push_back({"quadratic dnn (slack form)", [] {
                     QcqpReformulation ref = make_example3_slack();
                     return solve(
                         build_qp_relaxation(ref.lifted, ref.map, ConeKind::DNN).program);
                   }});
  cells.push_back({"tensor dnn (augmented)", [] {
                     return solve(
                         build_tensor_relaxation(make_example3(true), ConeKind::DNN).program);
                   }});
  std::vector<std::function<void()>> tasks;
  for (auto& c : cells)
    tasks.push_back([&c] {
      try {
        c.rep = c.run();
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    });
  run_parallel(tasks);
  OracleReport orc = sample_upper_bound(make_example3(false), budget, seed);

  TextTable t;
  t.header = {"formulation", "bound", "status"};
  int worst = 0;
  for (const Cell& c : cells) {
    if (!c.error.empty()) {
      t.rows.push_back({c.label, "ERR", c.error});
      worst = worst ? worst : kExitBuilder;
      continue;
    }
    bool ok = c.rep.status == SolveStatus::OPTIMAL;
    t.rows.push_back({c.label, ok ? num4(c.rep.primal_value) : "ERR",
                      to_string(c.rep.status)});
    if (!ok) worst = worst ? worst : kExitSolver;
  }
  t.rows.push_back({"sampled upper bound",
                    orc.feasible_found ? num4(orc.best_value) : "ERR", "sampled"});
  std::cout << table_markdown(t);
  if (emit_csv(csv_path, table_csv(t))) return 1;
  return worst;
}

int reproduce_generated(int example, int count, std::uint64_t seed,
                        long long budget, const std::string& csv_path) {
  GeneratedBatch batch = generate_batch(example, count, seed);
  std::vector<PipelineOutcome> results(count);
  std::vector<std::function<void()>> tasks;
  for (int k = 0; k < count; ++k)
    tasks.push_back([&, k] {
      char id[32];
      std::snprintf(id, sizeof(id), "ex%d-%02d", example, k + 1);
      results[k] = run_comparison(id, batch.pops[k], budget, batch.oracle_seeds[k]);
    });
  run_parallel(tasks);
  return finish_comparison(results, csv_path);
}

// ---------------------------------------------------------------------------
// compare: the same pipeline over user-supplied problem files.

int cmd_compare(const std::vector<std::string>& files, long long budget,
                const std::string& csv_path) {
  std::vector<PipelineOutcome> results(files.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < files.size(); ++i)
    tasks.push_back([&, i] {
      std::string id = std::filesystem::path(files[i]).filename().string();
      try {
        PopProblem pop = load_problem(files[i]);
        // The oracle seed derives from the problem itself, so rerunning the
        // same file set reproduces identical rows in any order.
        results[i] = run_comparison(id, pop, budget, problem_hash(pop));
      } catch (const ParseError& e) {
        results[i].row.id = id;
        results[i].row.note = std::string("parse: ") + e.what();
        results[i].error_class = kExitParse;
      }
    });
  run_parallel(tasks);
  return finish_comparison(results, csv_path);
}

std::vector<std::pair<int, int>> parse_cells(const std::vector<std::string>& specs,
                                             bool& ok) {
  std::vector<std::pair<int, int>> cells;
  ok = true;
  for (const std::string& s : specs) {
    int n = 0, m = 0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%d,%d%c", &n, &m, &extra) != 2 || n < 1 || m < 1) {
      std::cerr << "error: bad cell '" << s << "', expected n,m\n";
      ok = false;
      return cells;
    }
    cells.emplace_back(n, m);
  }
  return cells;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "popcone: tensor-cone and quadratic-lifting relaxation bounds for "
      "polynomial optimization problems"};
  app.require_subcommand(1);

  // relax ------------------------------------------------------------------
  auto* relax = app.add_subcommand(
      "relax", "Build and solve one relaxation of a problem file");
  std::string relax_file, relax_approach = "tensor", relax_cone, relax_out;
  bool relax_relaxed_linking = false, relax_sign_rows = false;
  relax->add_option("file", relax_file, "Problem JSON file")->required();
  relax->add_option("--approach", relax_approach, "tensor or quadratic")
      ->check(CLI::IsMember({"tensor", "quadratic"}));
  relax->add_option("--cone", relax_cone, "l, sdp, or dnn")
      ->required()
      ->check(CLI::IsMember({"l", "sdp", "dnn"}));
  relax->add_flag("--relaxed-linking", relax_relaxed_linking,
                  "Quadratic approach: inequality linking rows");
  relax->add_flag("--sign-rows", relax_sign_rows,
                  "Tensor approach: add per-variable sign rows");
  relax->add_option("--out", relax_out, "Write the conic program as JSON");

  // gen --------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate random benchmark instances");
  int gen_example = 4, gen_count = 10;
  std::uint64_t gen_seed = 1;
  std::string gen_outdir = ".";
  gen->add_option("--example", gen_example, "Instance family: 4 or 5")
      ->required()
      ->check(CLI::IsMember({4, 5}));
  gen->add_option("--count", gen_count, "Number of instances")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--outdir", gen_outdir, "Output directory");

  // reproduce --------------------------------------------------------------
  auto* reproduce =
      app.add_subcommand("reproduce", "Reproduce a built-in benchmark table");
  std::string rep_target;
  std::vector<std::string> rep_cells;
  int rep_count = -1;
  std::uint64_t rep_seed = 1;
  long long rep_budget = 100000;
  std::string rep_csv;
  reproduce->add_option("--target", rep_target, "ex1, ex2, ex3, ex4, or ex5")
      ->required()
      ->check(CLI::IsMember({"ex1", "ex2", "ex3", "ex4", "ex5"}));
  reproduce->add_option("--cells", rep_cells,
                        "ex2 grid cells as n,m (default: the six table cells)");
  reproduce->add_option("--count", rep_count,
                        "ex4/ex5 instance count (default 20 / 10)");
  reproduce->add_option("--seed", rep_seed, "ex4/ex5 generator seed");
  reproduce->add_option("--budget", rep_budget, "Sampling budget per instance")
      ->check(CLI::PositiveNumber);
  reproduce->add_option("--csv", rep_csv, "Also write the table as CSV");

  // compare ----------------------------------------------------------------
  auto* compare = app.add_subcommand(
      "compare", "Tensor vs quadratic bounds over problem files");
  std::vector<std::string> cmp_files;
  long long cmp_budget = 100000;
  std::string cmp_csv;
  compare->add_option("files", cmp_files, "Problem JSON files")->required();
  compare->add_option("--budget", cmp_budget, "Sampling budget per instance")
      ->check(CLI::PositiveNumber);
  compare->add_option("--csv", cmp_csv, "Also write the table as CSV");

  CLI11_PARSE(app, argc, argv);

  if (relax->parsed())
    return cmd_relax(relax_file, relax_approach, relax_cone,
                     relax_relaxed_linking, relax_sign_rows, relax_out);
  if (gen->parsed()) return cmd_gen(gen_example, gen_count, gen_seed, gen_outdir);
  if (reproduce->parsed()) {
    if (rep_target == "ex1") return reproduce_ex1(rep_csv);
    if (rep_target == "ex2") {
      std::vector<std::pair<int, int>> cells = {{2, 2}, {3, 3},  {4, 4},
                                                {5, 5}, {2, 10}, {4, 8}};
      if (!rep_cells.empty()) {
        bool ok = false;
        cells = parse_cells(rep_cells, ok);
        if (!ok) return 1;
      }
      return reproduce_ex2(cells, rep_csv);
    }
    if (rep_target == "ex3") return reproduce_ex3(rep_budget, rep_seed, rep_csv);
    int example = rep_target == "ex4" ? 4 : 5;
    int count = rep_count > 0 ? rep_count : (example == 4 ? 20 : 10);
    return reproduce_generated(example, count, rep_seed, rep_budget, rep_csv);
  }
  return cmd_compare(cmp_files, cmp_budget, cmp_csv);
}
