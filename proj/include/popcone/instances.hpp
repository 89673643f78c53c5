#pragma once

// Built-in benchmark instance families, referred to as ex1..ex5 by the CLI's
// reproduce command.
//
//   ex1  quartic with a single fourth-power equality; the tensor relaxation
//        is tight (optimum 1) while the quadratic lifting loses everything
//        (bound 0).
//   ex2  bi-quadratic family on two unit spheres with closed-form optimum
//        -(max(n,m)-1)/4; the quadratic lifting's SDP relaxation is
//        unbounded.
//   ex3  a small nonconvex QCQP (optimum -6.4444) in four relaxation
//        variants of increasing strength.
//   ex4  random homogeneous quartic objectives over a nonconvex spherical
//        shell inside the unit box.
//   ex5  random quartic problems whose quadratic-lifting DNN relaxation is
//        frequently unbounded while the tensor relaxation stays finite.

#include <random>

#include "popcone/polynomial.hpp"
#include "popcone/relax.hpp"

namespace popcone {

// min (sum x_i)^4 s.t. x_1^4 = 1 on the nonnegative orthant. Optimum 1.
PopProblem make_example1(int n);

// Quadratic reformulation of ex1 with the fewest extra variables:
// z = (x_1..x_n, y_1, y_2), min y_1^2 s.t. y_1 = (sum x)^2, y_2 = x_1^2,
// y_2^2 = 1. The lifting map is empty (no product pairs), so the matrix
// relaxation has no linking rows; its L relaxation gives 0.
QcqpReformulation make_example1_qp(int n);

// Bi-quadratic instance: min sum_{i<j,a<b} x_i x_j y_a y_b over the product
// of unit spheres ||x|| = ||y|| = 1 (free domain). Optimum -(max(n,m)-1)/4.
PopProblem make_example2(int n, int m);

// ex2 plus redundant products of the sphere equalities:
//   (||x||^2-1)(||y||^2-1) = 0, (||x||^2-1)^2 = 0, (||y||^2-1)^2 = 0.
// These hold at every feasible point, so the optimum is unchanged, but they
// are what makes the degree-4 tensor relaxation attain the closed form
// (without them the tensor program has a recession direction supported on
// low-degree entries and is unbounded for every cone realization).
PopProblem make_example2_augmented(int n, int m);

// Nonconvex QCQP over x >= 0:
//   min -8x1^2 - x1x2 - 13x2^2 - 6x1 - x2
//   s.t. f1 = x1^2 + x1x2 + 2x2^2 - 3x1 - 3x2 - 7 <= 0
//        f2 = 2x1x2 + 33x1 + 15x2 - 10          <= 0
//        f3 = x1 + 2x2 - 6                      <= 0
// Optimum -6.4444 at (0, 2/3). With add_valid_inequalities the rows
// x2*f2 <= 0 and x1^2*f1 <= 0 are appended (redundant on the feasible set),
// turning it into the degree-4 instance the tensor relaxation consumes.
PopProblem make_example3(bool add_valid_inequalities);

// ex3 closed under the degree-2 products x1*f3 <= 0 and x2*f3 <= 0. Its
// quadratic-lifting DNN relaxation reproduces the copositive-strength bound
// -26.67 (the plain DNN relaxation of ex3 only reaches -71.33).
PopProblem make_example3_products();

// Slack reformulation of the augmented ex3 as a nonnegative QCQP over
// z = (x1, x2, y1, y2, y3): y1 = -f1, y2 = -f2, y3 = x1^2 as equalities,
// valid products -x2*y2 <= 0, -y1*y3 <= 0, and all five z_i*f3 <= 0.
// The lifting map is empty; the DNN relaxation of this program reproduces
// the bound -26.67 from a lifted quadratic rather than a tensor program.
QcqpReformulation make_example3_slack();

// Random ex4 instance: homogeneous degree-4 objective in 3 variables with
// integer coefficients in [-5,5] (not all zero), the spherical-shell rows
// 0.2^2 <= ||x - 0.5e||^2 <= 0.6^2, and the box rows x_i <= 1, on the
// orthant. Consumes a deterministic number of rng draws per call.
PopProblem gen_example4(std::mt19937_64& rng);

// Random ex5 instance: homogeneous degree-4 objective in 3 variables with
// integer coefficients in [-5,5] (not all zero), two dense degree <= 4
// constraint polynomials <= 0 with integer coefficients in [-10,10], and one
// linear row a.x >= b (a integer in [0,5], b integer in [5,15]) stored as
// -a.x <= -b, on the orthant. Candidates are screened before acceptance:
// draws whose degree-4 lift has a sampled improving recession mixture (see
// the recession screen in the implementation), draws with no feasible point
// in 1e5 oracle samples, and draws whose sampled optimum exceeds 50 in
// magnitude (bounds at larger scales are not comparable at a fixed absolute
// tolerance) are discarded and redrawn. Draw count varies with discards but
// depends only on the rng state, keeping generation deterministic per seed.
PopProblem gen_example5(std::mt19937_64& rng);

}  // namespace popcone
