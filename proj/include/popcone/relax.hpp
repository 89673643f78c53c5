#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "popcone/conic.hpp"
#include "popcone/polynomial.hpp"

namespace popcone {

// Tractable cone standing in for the (intractable) completely-positive /
// completely-positive-semidefinite tensor cones:
//   L    entrywise nonnegative                  (orthant problems only)
//   SDP  a positive-semidefinite realization (see PsdForm)
//   DNN  entrywise nonnegative + PSD realization (orthant problems only)
enum class ConeKind { L, SDP, DNN };
const char* to_string(ConeKind k);

// How the PSD part of the cone is realized on the tensor variable X.
//   MomentMatrix     one block B with B[alpha][beta] = X[alpha+beta] over all
//                    half-degree exponents. Sound for any sign pattern
//                    (B at a rank-one moment tensor is an outer product) and
//                    the only listed form that keeps the free-domain
//                    benchmark family bounded. Default for SDP.
//   AllSlices        every order-(d-2) slice PSD. Sound only on the orthant
//                    (slices of moment tensors of sign-mixed points need not
//                    be PSD). Default for DNN, where it matches the
//                    slice-defined cone used by the reported comparisons.
//   PrincipalSlices  only all-even slice indices. Sound for any sign pattern
//                    but strictly weaker than MomentMatrix (principal slices
//                    are principal submatrices of the moment block); kept for
//                    experiments and soundness checks.
enum class PsdForm { MomentMatrix, AllSlices, PrincipalSlices };
const char* to_string(PsdForm f);

// A tensor relaxation: the conic program plus the variable <-> lifted
// exponent correspondence needed to interpret its solution.
struct TensorRelaxation {
  ConicProgram program;
  int dim = 0;     // n + 1 (coordinate 0 homogenizes)
  int degree = 0;  // even lifting order
  std::vector<Exponent> exponent_of_var;
  std::map<Exponent, int> var_of_exponent;
};

// Lift an n-variable POP of degree <= d into one tensor variable X of order
// d (rounded up to even) over dimension n+1, one linear row per polynomial
// constraint, the normalization X[(d,0,...,0)] = 1, optional sign rows
// -X[(d-1,e_i)] <= 0, and the chosen cone's constraints. When form is not
// given it defaults per cone: SDP -> MomentMatrix, DNN -> AllSlices.
// Errors (std::invalid_argument): L/DNN on a free-domain problem; sign rows
// on a free-domain problem; empty objective.
TensorRelaxation build_tensor_relaxation(const PopProblem& pop, ConeKind cone,
                                         bool add_sign_rows = false,
                                         std::optional<PsdForm> form = std::nullopt);

// Index map for the quadratic lifting y_c = x_a * x_b over 1 <= a <= b <= n:
// c = (n + 1 - a/2)(a - 1) + b - a + 1, a bijection onto {1..n(n+1)/2}.
struct LiftingMap {
  int n = 0;
  std::vector<std::pair<int, int>> pairs;  // position c-1 holds (a,b), 1-based

  int r() const { return static_cast<int>(pairs.size()); }
  int num_lifted() const { return n + r(); }
  // 1-based (a,b) with a <= b -> 1-based c.
  int pair_index(int a, int b) const;
  // 0-based index of y_c within the lifted variable vector z = (x, y).
  int y_var(int c) const { return n + c - 1; }
};

LiftingMap build_lifting_map(int n);

struct QcqpReformulation {
  PopProblem lifted;  // degree <= 2 problem over z = (x, y)
  LiftingMap map;
};

// Rewrite a degree <= 4 POP as a quadratic problem over z = (x, y):
// degree-4 monomials become products of two y's, degree-3 monomials y * x,
// lower degrees pass through. Split rule: sort the monomial's variable
// indices ascending; the two smallest form the first pair, the two largest
// the second (degree 3: the two smallest pair up, the largest stays x).
// The linking identities y_c = x_a x_b live in the map, not in the
// constraint list. Errors: degree > 4.
QcqpReformulation qcqp_reformulate(const PopProblem& pop);

// A quadratic-lifting matrix relaxation: the program plus the entry <-> (i,j)
// correspondence of the matrix variable Z.
struct QpRelaxation {
  ConicProgram program;
  int zdim = 0;                                // 1 + n + r
  std::vector<std::vector<int>> var_of_entry;  // [i][j], i <= j, else -1
};

// One matrix variable Z of size (1+n+r): row <T_2(q), Z> {<=,=} rhs per
// constraint, normalization Z_00 = 1, linking rows
// Z[0][n+c] - Z[a][b] {=, <=} 0 (relaxed_linking picks <=), and the cone
// (SDP: Z PSD; DNN: Z PSD + entrywise >= 0; L: entrywise >= 0). The matrix
// always covers all n + r lifted coordinates, including unused pairs.
// Errors: lifted degree > 2; L/DNN on a free-domain lifted problem.
QpRelaxation build_qp_relaxation(const PopProblem& lifted, const LiftingMap& map,
                                 ConeKind cone, bool relaxed_linking = false);

// True when relaxing the linking equalities to inequalities provably cannot
// change the optimum: a maximization whose lifted objective has no negative
// coefficient. In this regime the equality-linked and relaxed-linked
// programs have equal optima.
bool relaxed_linking_is_exact(const PopProblem& lifted);

// Multiplies every original inequality row of an orthant problem by all
// monomials x^a with |a| = target_degree - deg(row) exactly, appending the
// products (valid on the orthant) as extra rows. Low-degree rows otherwise
// reach the lifted tensor only through entries with homogenizing indices,
// leaving recession directions supported on the top-degree entries; the
// exact-degree product rows read those entries directly and are what keeps
// the degree-4 relaxations of bounded benchmark instances bounded.
// Intermediate-degree products are deliberately not added: they pin no new
// entries and their near-collinearity degrades interior-point conditioning.
// Equality rows and rows already at the target degree are left untouched.
// Errors (std::invalid_argument): free-domain problem, target_degree below
// the problem degree.
void strengthen_to_degree(PopProblem& pop, int target_degree);

}  // namespace popcone
