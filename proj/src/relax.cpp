#include "popcone/relax.hpp"

#include <algorithm>
#include <stdexcept>

#include "popcone/symtensor.hpp"

namespace popcone {

const char* to_string(ConeKind k) {
  switch (k) {
    case ConeKind::L: return "L";
    case ConeKind::SDP: return "SDP";
    case ConeKind::DNN: return "DNN";
  }
  return "?";
}

const char* to_string(PsdForm f) {
  switch (f) {
    case PsdForm::MomentMatrix: return "moment-matrix";
    case PsdForm::AllSlices: return "all-slices";
    case PsdForm::PrincipalSlices: return "principal-slices";
  }
  return "?";
}

namespace {

// Lifted exponent of a monomial beta: (d - |beta|, beta) over dim n+1.
Exponent lift_exponent(const Exponent& beta, int d) {
  Exponent e(beta.size() + 1, 0);
  e[0] = d - total_degree(beta);
  std::copy(beta.begin(), beta.end(), e.begin() + 1);
  return e;
}

// Row functional <T_d(p), X> over the tensor-entry variables. Position
// multiplicities cancel against the coefficient map's division, so the
// coefficient on the variable at (d-|beta|, beta) is exactly p_beta.
LinExpr telescoped_row(const Polynomial& p, int d,
                       const std::map<Exponent, int>& var_of) {
  LinExpr row;
  for (const auto& [beta, coef] : p.terms())
    row.push_back({var_of.at(lift_exponent(beta, d)), coef});
  return row;
}

}  // namespace

TensorRelaxation build_tensor_relaxation(const PopProblem& pop, ConeKind cone,
                                         bool add_sign_rows, std::optional<PsdForm> form) {
  pop.validate();
  if (pop.objective.is_zero())
    throw std::invalid_argument("build_tensor_relaxation: empty objective");
  if (cone != ConeKind::SDP && pop.domain != Domain::ORTHANT)
    throw std::invalid_argument(
        "build_tensor_relaxation: L and DNN cones require a nonnegative-orthant problem");
  if (add_sign_rows && pop.domain != Domain::ORTHANT)
    throw std::invalid_argument(
        "build_tensor_relaxation: sign rows encode x >= 0 and require a "
        "nonnegative-orthant problem");

  int deg = pop.degree();
  int d = std::max(2, 2 * ((deg + 1) / 2));  // round odd degrees up
  TensorRelaxation rel;
  rel.dim = pop.n + 1;
  rel.degree = d;
  rel.exponent_of_var = enumerate_exponents(rel.dim, d);
  for (size_t v = 0; v < rel.exponent_of_var.size(); ++v)
    rel.var_of_exponent[rel.exponent_of_var[v]] = static_cast<int>(v);

  ConicProgram& prog = rel.program;
  prog.num_vars = static_cast<int>(rel.exponent_of_var.size());
  prog.sense = pop.sense;
  prog.objective = telescoped_row(pop.objective, d, rel.var_of_exponent);

  // Normalization: T_d(1) has its only nonzero at (d,0,...,0).
  Exponent norm_exp(rel.dim, 0);
  norm_exp[0] = d;
  prog.rows.push_back({{{rel.var_of_exponent.at(norm_exp), 1.0}}, Relation::EQ, 1.0});

  for (const auto& con : pop.constraints)
    prog.rows.push_back({telescoped_row(con.poly, d, rel.var_of_exponent), con.rel, con.rhs});

  if (add_sign_rows) {
    for (int i = 1; i <= pop.n; ++i) {
      Exponent e(rel.dim, 0);
      e[0] = d - 1;
      e[i] = 1;
      prog.rows.push_back({{{rel.var_of_exponent.at(e), -1.0}}, Relation::LE, 0.0});
    }
  }

  if (cone == ConeKind::L || cone == ConeKind::DNN)
    for (int v = 0; v < prog.num_vars; ++v) prog.nonneg.push_back({{v, 1.0}});

  if (cone == ConeKind::SDP || cone == ConeKind::DNN) {
    PsdForm f = form.value_or(cone == ConeKind::SDP ? PsdForm::MomentMatrix
                                                    : PsdForm::AllSlices);
    if (f == PsdForm::MomentMatrix) {
      // One block indexed by half-degree exponents: B[a][b] = X[alpha+beta].
      std::vector<Exponent> half = enumerate_exponents(rel.dim, d / 2);
      PsdBlock blk;
      blk.size = static_cast<int>(half.size());
      for (int a = 0; a < blk.size; ++a)
        for (int b = a; b < blk.size; ++b) {
          Exponent e(rel.dim, 0);
          for (int v = 0; v < rel.dim; ++v) e[v] = half[a][v] + half[b][v];
          blk.entries.push_back({a, b, rel.var_of_exponent.at(e), 1.0});
        }
      prog.psd_blocks.push_back(std::move(blk));
    } else {
      bool principal_only = (f == PsdForm::PrincipalSlices);
      for (const auto& gamma : enumerate_slices(rel.dim, d, principal_only)) {
        PsdBlock blk;
        blk.size = rel.dim;
        for (int j = 0; j < rel.dim; ++j)
          for (int k = j; k < rel.dim; ++k) {
            Exponent e = gamma;
            e[j] += 1;
            e[k] += 1;
            blk.entries.push_back({j, k, rel.var_of_exponent.at(e), 1.0});
          }
        prog.psd_blocks.push_back(std::move(blk));
      }
    }
  }
  return rel;
}

int LiftingMap::pair_index(int a, int b) const {
  if (a < 1 || b < a || b > n)
    throw std::invalid_argument("LiftingMap::pair_index: need 1 <= a <= b <= n");
  // (n + 1 - a/2)(a - 1) + b - a + 1 evaluated without the half-integer:
  // (a-1) consecutive block lengths n, n-1, ..., n-a+2 sum to
  // (2n + 2 - a)(a - 1) / 2.
  return (2 * n + 2 - a) * (a - 1) / 2 + b - a + 1;
}

LiftingMap build_lifting_map(int n) {
  if (n < 1) throw std::invalid_argument("build_lifting_map: need n >= 1");
  LiftingMap m;
  m.n = n;
  m.pairs.resize(static_cast<size_t>(n) * (n + 1) / 2);
  for (int a = 1; a <= n; ++a)
    for (int b = a; b <= n; ++b) m.pairs[m.pair_index(a, b) - 1] = {a, b};
  return m;
}

namespace {

// Variable indices (1-based, ascending, with repetition) of a monomial.
std::vector<int> monomial_indices(const Exponent& e) {
  std::vector<int> idx;
  for (size_t v = 0; v < e.size(); ++v)
    for (int k = 0; k < e[v]; ++k) idx.push_back(static_cast<int>(v) + 1);
  return idx;
}

Polynomial lift_polynomial(const Polynomial& p, const LiftingMap& map) {
  int nl = map.num_lifted();
  Polynomial out(nl);
  for (const auto& [beta, coef] : p.terms()) {
    Exponent e(nl, 0);
    int deg = total_degree(beta);
    if (deg <= 2) {
      std::copy(beta.begin(), beta.end(), e.begin());
    } else if (deg == 3) {
      auto idx = monomial_indices(beta);
      e[map.y_var(map.pair_index(idx[0], idx[1]))] += 1;
      e[idx[2] - 1] += 1;
    } else if (deg == 4) {
      auto idx = monomial_indices(beta);
      e[map.y_var(map.pair_index(idx[0], idx[1]))] += 1;
      e[map.y_var(map.pair_index(idx[2], idx[3]))] += 1;
    } else {
      throw std::invalid_argument("qcqp_reformulate: monomial degree exceeds 4");
    }
    out.add_term(e, coef);
  }
  return out;
}

}  // namespace

QcqpReformulation qcqp_reformulate(const PopProblem& pop) {
  pop.validate();
  if (pop.degree() > 4)
    throw std::invalid_argument("qcqp_reformulate: degree exceeds 4");
  QcqpReformulation ref;
  ref.map = build_lifting_map(pop.n);
  ref.lifted.n = ref.map.num_lifted();
  ref.lifted.sense = pop.sense;
  ref.lifted.domain = pop.domain;
  ref.lifted.objective = lift_polynomial(pop.objective, ref.map);
  for (const auto& con : pop.constraints)
    ref.lifted.constraints.push_back({lift_polynomial(con.poly, ref.map), con.rel, con.rhs});
  return ref;
}

QpRelaxation build_qp_relaxation(const PopProblem& lifted, const LiftingMap& map,
                                 ConeKind cone, bool relaxed_linking) {
  lifted.validate();
  if (lifted.degree() > 2)
    throw std::invalid_argument("build_qp_relaxation: lifted problem must be quadratic");
  if (lifted.n != map.num_lifted())
    throw std::invalid_argument("build_qp_relaxation: lifted variable count does not match map");
  if (cone != ConeKind::SDP && lifted.domain != Domain::ORTHANT)
    throw std::invalid_argument(
        "build_qp_relaxation: L and DNN cones require a nonnegative-orthant problem");

  QpRelaxation rel;
  rel.zdim = 1 + map.num_lifted();
  rel.var_of_entry.assign(rel.zdim, std::vector<int>(rel.zdim, -1));
  ConicProgram& prog = rel.program;
  int nv = 0;
  for (int i = 0; i < rel.zdim; ++i)
    for (int j = i; j < rel.zdim; ++j) rel.var_of_entry[i][j] = nv++;
  prog.num_vars = nv;
  prog.sense = lifted.sense;

  // <T_2(q), Z> telescopes to q's own coefficients: constant -> Z_00,
  // z_a -> Z_{0,a+1}, z_a z_b -> Z_{a+1,b+1} (a <= b), z_a^2 -> Z_{a+1,a+1}.
  auto telescoped = [&](const Polynomial& q) {
    LinExpr row;
    for (const auto& [beta, coef] : q.terms()) {
      auto idx = monomial_indices(beta);  // 1-based z indices
      int i = 0, j = 0;
      if (idx.size() == 1) j = idx[0];
      else if (idx.size() == 2) {
        i = idx[0];
        j = idx[1];
      }
      row.push_back({rel.var_of_entry[i][j], coef});
    }
    return row;
  };

  prog.objective = telescoped(lifted.objective);
  prog.rows.push_back({{{rel.var_of_entry[0][0], 1.0}}, Relation::EQ, 1.0});
  for (const auto& con : lifted.constraints)
    prog.rows.push_back({telescoped(con.poly), con.rel, con.rhs});

  for (int c = 1; c <= map.r(); ++c) {
    auto [a, b] = map.pairs[c - 1];
    LinExpr link{{rel.var_of_entry[0][map.n + c], 1.0}, {rel.var_of_entry[a][b], -1.0}};
    prog.rows.push_back({std::move(link),
                         relaxed_linking ? Relation::LE : Relation::EQ, 0.0});
  }

  if (cone == ConeKind::L || cone == ConeKind::DNN)
    for (int v = 0; v < prog.num_vars; ++v) prog.nonneg.push_back({{v, 1.0}});
  if (cone == ConeKind::SDP || cone == ConeKind::DNN) {
    PsdBlock blk;
    blk.size = rel.zdim;
    for (int i = 0; i < rel.zdim; ++i)
      for (int j = i; j < rel.zdim; ++j)
        blk.entries.push_back({i, j, rel.var_of_entry[i][j], 1.0});
    prog.psd_blocks.push_back(std::move(blk));
  }
  return rel;
}

bool relaxed_linking_is_exact(const PopProblem& lifted) {
  if (lifted.sense != Sense::MAX) return false;
  for (const auto& [beta, coef] : lifted.objective.terms())
    if (coef < 0) return false;
  return true;
}

void strengthen_to_degree(PopProblem& pop, int target_degree) {
  if (pop.domain != Domain::ORTHANT)
    throw std::invalid_argument(
        "strengthen_to_degree: products are only valid on the orthant");
  if (target_degree < pop.degree())
    throw std::invalid_argument(
        "strengthen_to_degree: target below the problem degree");
  const std::size_t original_rows = pop.constraints.size();
  for (std::size_t i = 0; i < original_rows; ++i) {
    if (pop.constraints[i].rel != Relation::LE) continue;
    int room = target_degree - pop.constraints[i].poly.degree();
    if (room < 1) continue;
    // Only the products reaching the target degree are appended: they are
    // the rows that read the top-degree entries, and intermediate degrees
    // would add many near-collinear rows that degrade conditioning.
    for (const Exponent& a : enumerate_exponents(pop.n, room))
      multiply_constraint(pop, static_cast<int>(i), a);
  }
}

}  // namespace popcone
