#include "popcone/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace popcone {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::OPTIMAL: return "OPTIMAL";
    case SolveStatus::UNBOUNDED: return "UNBOUNDED";
    case SolveStatus::INFEASIBLE: return "INFEASIBLE";
    case SolveStatus::MAX_ITER: return "MAX_ITER";
    case SolveStatus::NUMERICAL_TROUBLE: return "NUMERICAL_TROUBLE";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

struct NumericalFailure {};

// Cholesky of a PSD-up-to-roundoff matrix: retries with a growing diagonal
// shift so near-singular iterates late in the path do not abort the solve.
Eigen::LLT<Eigen::MatrixXd> safe_chol(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  double base = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
  for (double shift = 1e-14; shift <= 1e-7; shift *= 100.0) {
    Eigen::MatrixXd ms = m;
    ms.diagonal().array() += shift * base;
    llt.compute(ms);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw NumericalFailure{};
}

int svec_len(int p) { return p * (p + 1) / 2; }
int svec_idx(int i, int j) { return j * (j + 1) / 2 + i; }  // i <= j, column-major upper

MatrixXd mat_from_svec(const VectorXd& v, int off, int p) {
  MatrixXd m(p, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i <= j; ++i) {
      double x = v[off + svec_idx(i, j)];
      if (i == j) m(i, i) = x;
      else {
        m(i, j) = x / kSqrt2;
        m(j, i) = x / kSqrt2;
      }
    }
  return m;
}

void svec_into(const MatrixXd& m, VectorXd& v, int off) {
  int p = static_cast<int>(m.rows());
  for (int j = 0; j < p; ++j)
    for (int i = 0; i <= j; ++i)
      v[off + svec_idx(i, j)] = (i == j) ? m(i, i) : kSqrt2 * m(i, j);
}

// ---------- canonical (scaled) problem data ----------

struct Block {
  int p = 0;
  std::vector<PsdEntry> entries;
  std::vector<PsdConstEntry> cpart;
  int off = 0;
  int len = 0;
};

struct Canon {
  int N = 0;
  VectorXd c;
  double c0 = 0.0;
  bool negated = false;
  MatrixXd A;  // p_eq x N
  VectorXd b;
  std::vector<LinExpr> glp;  // LP cone rows: slack = hlp - glp.x
  VectorXd hlp;
  std::vector<Block> blocks;
  int l = 0;
  int M = 0;
  double nu = 0.0;
  std::vector<std::pair<bool, int>> row_origin;  // per original row: (is_eq, idx)
  VectorXd colscale;
  std::vector<double> eqscale, lpscale, blkscale;
  double objscale = 1.0;
};

double expr_maxabs(const LinExpr& e) {
  double m = 0.0;
  for (const auto& t : e) m = std::max(m, std::fabs(t.coef));
  return m;
}

Canon canonicalize(const ConicProgram& prog) {
  prog.validate();
  Canon cd;
  cd.N = prog.num_vars;
  cd.negated = (prog.sense == Sense::MAX);
  cd.c0 = prog.objective_constant;

  // Column equilibration from max-abs appearance across rows and blocks.
  cd.colscale = VectorXd::Ones(cd.N);
  {
    VectorXd m = VectorXd::Zero(cd.N);
    for (const auto& r : prog.rows)
      for (const auto& t : r.terms) m[t.var] = std::max(m[t.var], std::fabs(t.coef));
    for (const auto& f : prog.nonneg)
      for (const auto& t : f) m[t.var] = std::max(m[t.var], std::fabs(t.coef));
    for (const auto& bl : prog.psd_blocks)
      for (const auto& e : bl.entries) m[e.var] = std::max(m[e.var], std::fabs(e.coef));
    for (int v = 0; v < cd.N; ++v)
      if (m[v] > 0) cd.colscale[v] = std::clamp(1.0 / std::sqrt(m[v]), 1e-4, 1e4);
  }

  std::vector<const LinearRow*> eqs;
  cd.row_origin.resize(prog.rows.size());
  for (size_t r = 0; r < prog.rows.size(); ++r) {
    if (prog.rows[r].rel == Relation::EQ) {
      cd.row_origin[r] = {true, static_cast<int>(eqs.size())};
      eqs.push_back(&prog.rows[r]);
    } else {
      cd.row_origin[r] = {false, static_cast<int>(cd.glp.size())};
      cd.glp.push_back({});  // filled below
      cd.lpscale.push_back(1.0);
    }
  }

  // Equality rows, row-equilibrated after column scaling.
  int p_eq = static_cast<int>(eqs.size());
  cd.A = MatrixXd::Zero(p_eq, cd.N);
  cd.b = VectorXd::Zero(p_eq);
  cd.eqscale.assign(p_eq, 1.0);
  for (int r = 0; r < p_eq; ++r) {
    double m = 0.0;
    for (const auto& t : eqs[r]->terms) m = std::max(m, std::fabs(t.coef) * cd.colscale[t.var]);
    double sc = (m > 0) ? std::clamp(1.0 / m, 1e-8, 1e8) : 1.0;
    cd.eqscale[r] = sc;
    for (const auto& t : eqs[r]->terms) cd.A(r, t.var) += sc * t.coef * cd.colscale[t.var];
    cd.b[r] = sc * eqs[r]->rhs;
  }

  // LP cone: inequality rows (slack = rhs - row.x), then nonneg functionals
  // (slack = f(x) = 0 - (-f).x).
  std::vector<double> hvals;
  {
    int k = 0;
    for (size_t r = 0; r < prog.rows.size(); ++r) {
      if (prog.rows[r].rel != Relation::LE) continue;
      double m = 0.0;
      for (const auto& t : prog.rows[r].terms) m = std::max(m, std::fabs(t.coef) * cd.colscale[t.var]);
      double sc = (m > 0) ? std::clamp(1.0 / m, 1e-8, 1e8) : 1.0;
      cd.lpscale[k] = sc;
      LinExpr g;
      for (const auto& t : prog.rows[r].terms) g.push_back({t.var, sc * t.coef * cd.colscale[t.var]});
      cd.glp[k] = std::move(g);
      hvals.push_back(sc * prog.rows[r].rhs);
      ++k;
    }
    for (const auto& f : prog.nonneg) {
      double m = 0.0;
      for (const auto& t : f) m = std::max(m, std::fabs(t.coef) * cd.colscale[t.var]);
      double sc = (m > 0) ? std::clamp(1.0 / m, 1e-8, 1e8) : 1.0;
      cd.lpscale.push_back(sc);
      LinExpr g;
      for (const auto& t : f) g.push_back({t.var, -sc * t.coef * cd.colscale[t.var]});
      cd.glp.push_back(std::move(g));
      hvals.push_back(0.0);
    }
  }
  cd.l = static_cast<int>(cd.glp.size());
  cd.hlp = Eigen::Map<VectorXd>(hvals.data(), cd.l);

  cd.M = cd.l;
  cd.nu = cd.l;
  for (const auto& bl : prog.psd_blocks) {
    double m = 0.0;
    for (const auto& e : bl.entries) m = std::max(m, std::fabs(e.coef) * cd.colscale[e.var]);
    for (const auto& e : bl.const_part) m = std::max(m, std::fabs(e.val));
    double sc = (m > 0) ? std::clamp(1.0 / m, 1e-8, 1e8) : 1.0;
    cd.blkscale.push_back(sc);
    Block B;
    B.p = bl.size;
    B.off = cd.M;
    B.len = svec_len(bl.size);
    for (const auto& e : bl.entries)
      B.entries.push_back({e.i, e.j, e.var, sc * e.coef * cd.colscale[e.var]});
    for (const auto& e : bl.const_part) B.cpart.push_back({e.i, e.j, sc * e.val});
    cd.M += B.len;
    cd.nu += bl.size;
    cd.blocks.push_back(std::move(B));
  }

  // Objective (minimized orientation), scaled.
  VectorXd craw = VectorXd::Zero(cd.N);
  for (const auto& t : prog.objective) craw[t.var] += t.coef;
  if (cd.negated) {
    craw = -craw;
    cd.c0 = -cd.c0;
  }
  craw = craw.cwiseProduct(cd.colscale);
  double cm = craw.cwiseAbs().maxCoeff();
  cd.objscale = (cm > 0) ? std::clamp(1.0 / cm, 1e-8, 1e8) : 1.0;
  cd.c = cd.objscale * craw;
  return cd;
}

// G x (cone-space vector). Block part carries the -svec(A_v) sign convention.
VectorXd apply_G(const Canon& cd, const VectorXd& x) {
  VectorXd out = VectorXd::Zero(cd.M);
  for (int r = 0; r < cd.l; ++r) {
    double v = 0.0;
    for (const auto& t : cd.glp[r]) v += t.coef * x[t.var];
    out[r] = v;
  }
  for (const auto& B : cd.blocks)
    for (const auto& e : B.entries) {
      double v = e.coef * x[e.var];
      out[B.off + svec_idx(e.i, e.j)] -= (e.i == e.j) ? v : kSqrt2 * v;
    }
  return out;
}

// G' z.
VectorXd apply_Gt(const Canon& cd, const VectorXd& z) {
  VectorXd out = VectorXd::Zero(cd.N);
  for (int r = 0; r < cd.l; ++r)
    for (const auto& t : cd.glp[r]) out[t.var] += t.coef * z[r];
  for (const auto& B : cd.blocks)
    for (const auto& e : B.entries) {
      double zv = z[B.off + svec_idx(e.i, e.j)];
      out[e.var] -= (e.i == e.j) ? e.coef * zv : kSqrt2 * e.coef * zv;
    }
  return out;
}

VectorXd cone_h(const Canon& cd) {
  VectorXd h = VectorXd::Zero(cd.M);
  h.head(cd.l) = cd.hlp;
  for (const auto& B : cd.blocks)
    for (const auto& e : B.cpart)
      h[B.off + svec_idx(e.i, e.j)] += (e.i == e.j) ? e.val : kSqrt2 * e.val;
  return h;
}

VectorXd cone_identity(const Canon& cd) {
  VectorXd e = VectorXd::Zero(cd.M);
  e.head(cd.l).setOnes();
  for (const auto& B : cd.blocks)
    for (int i = 0; i < B.p; ++i) e[B.off + svec_idx(i, i)] = 1.0;
  return e;
}

struct Scaling {
  VectorXd w;                      // LP: sqrt(s/z)
  VectorXd lam_lp;                 // LP: sqrt(s.z)
  std::vector<MatrixXd> R, Rinv, Minv;
  std::vector<VectorXd> lam;       // block NT eigenvalues
};

Scaling compute_scaling(const Canon& cd, const VectorXd& s, const VectorXd& z) {
  Scaling sc;
  sc.w.resize(cd.l);
  sc.lam_lp.resize(cd.l);
  for (int i = 0; i < cd.l; ++i) {
    if (s[i] <= 0 || z[i] <= 0) throw NumericalFailure{};
    sc.w[i] = std::sqrt(s[i] / z[i]);
    sc.lam_lp[i] = std::sqrt(s[i] * z[i]);
  }
  for (const auto& B : cd.blocks) {
    MatrixXd S = mat_from_svec(s, B.off, B.p);
    MatrixXd Z = mat_from_svec(z, B.off, B.p);
    Eigen::LLT<MatrixXd> ls = safe_chol(S);
    Eigen::LLT<MatrixXd> lz = safe_chol(Z);
    MatrixXd Ls = ls.matrixL();
    MatrixXd Lz = lz.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
    VectorXd sig = svd.singularValues();
    if (sig.minCoeff() <= 0) throw NumericalFailure{};
    VectorXd isq = sig.cwiseSqrt().cwiseInverse();
    MatrixXd R = Ls * svd.matrixV() * isq.asDiagonal();
    MatrixXd Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    sc.Minv.push_back(Rinv.transpose() * Rinv);
    sc.R.push_back(std::move(R));
    sc.Rinv.push_back(std::move(Rinv));
    sc.lam.push_back(sig);
  }
  return sc;
}

// Scaled z-side: out = W z  (per block svec(R' Z R)).
VectorXd scale_z(const Canon& cd, const Scaling& sc, const VectorXd& z) {
  VectorXd out(cd.M);
  out.head(cd.l) = sc.w.cwiseProduct(z.head(cd.l));
  for (size_t k = 0; k < cd.blocks.size(); ++k) {
    const Block& B = cd.blocks[k];
    MatrixXd Z = mat_from_svec(z, B.off, B.p);
    MatrixXd T = sc.R[k].transpose() * Z * sc.R[k];
    svec_into(T, out, B.off);
  }
  return out;
}

// Scaled s-side: out = W^{-T} s  (per block svec(Rinv S Rinv')).
VectorXd scale_s(const Canon& cd, const Scaling& sc, const VectorXd& s) {
  VectorXd out(cd.M);
  out.head(cd.l) = s.head(cd.l).cwiseQuotient(sc.w);
  for (size_t k = 0; k < cd.blocks.size(); ++k) {
    const Block& B = cd.blocks[k];
    MatrixXd S = mat_from_svec(s, B.off, B.p);
    MatrixXd T = sc.Rinv[k] * S * sc.Rinv[k].transpose();
    svec_into(T, out, B.off);
  }
  return out;
}

// out = W' v  (maps scaled s-side back: per block svec(R V R')).
VectorXd unscale_s(const Canon& cd, const Scaling& sc, const VectorXd& v) {
  VectorXd out(cd.M);
  out.head(cd.l) = sc.w.cwiseProduct(v.head(cd.l));
  for (size_t k = 0; k < cd.blocks.size(); ++k) {
    const Block& B = cd.blocks[k];
    MatrixXd V = mat_from_svec(v, B.off, B.p);
    MatrixXd T = sc.R[k] * V * sc.R[k].transpose();
    svec_into(T, out, B.off);
  }
  return out;
}

// out = (W'W)^{-1} u  (per block svec(Minv U Minv)).
VectorXd apply_Hinv(const Canon& cd, const Scaling& sc, const VectorXd& u) {
  VectorXd out(cd.M);
  out.head(cd.l) = u.head(cd.l).cwiseQuotient(sc.w.cwiseProduct(sc.w));
  for (size_t k = 0; k < cd.blocks.size(); ++k) {
    const Block& B = cd.blocks[k];
    MatrixXd U = mat_from_svec(u, B.off, B.p);
    MatrixXd T = sc.Minv[k] * U * sc.Minv[k];
    svec_into(T, out, B.off);
  }
  return out;
}

// Largest a with s + a*ds staying in the cone (per part), capped at `cap`.
double step_to_boundary(const Canon& cd, const VectorXd& s, const VectorXd& ds, double cap) {
  double a = cap;
  for (int i = 0; i < cd.l; ++i)
    if (ds[i] < 0) a = std::min(a, -s[i] / ds[i]);
  for (const auto& B : cd.blocks) {
    MatrixXd S = mat_from_svec(s, B.off, B.p);
    MatrixXd D = mat_from_svec(ds, B.off, B.p);
    Eigen::LLT<MatrixXd> ls = safe_chol(S);
    MatrixXd L = ls.matrixL();
    MatrixXd T = L.triangularView<Eigen::Lower>().solve(D);
    MatrixXd LiDLit = L.triangularView<Eigen::Lower>().solve(T.transpose()).transpose();
    // LiDLit = L^{-1} D L^{-T}; symmetric up to roundoff.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (LiDLit + LiDLit.transpose()),
                                               Eigen::EigenvaluesOnly);
    double mn = es.eigenvalues().minCoeff();
    if (mn < 0) a = std::min(a, -1.0 / mn);
  }
  return a;
}

struct Factorization {
  Eigen::LLT<MatrixXd> hs;
  MatrixXd XA;  // Hs^{-1} A'
  Eigen::LLT<MatrixXd> eq;
};

// Hs = G' (W'W)^{-1} G + delta I, assembled blockwise.
MatrixXd assemble_hs(const Canon& cd, const Scaling& sc) {
  MatrixXd Hs = MatrixXd::Zero(cd.N, cd.N);
  for (int r = 0; r < cd.l; ++r) {
    double iw2 = 1.0 / (sc.w[r] * sc.w[r]);
    const LinExpr& g = cd.glp[r];
    for (const auto& a : g)
      for (const auto& b : g) Hs(a.var, b.var) += a.coef * b.coef * iw2;
  }
  for (size_t k = 0; k < cd.blocks.size(); ++k) {
    const Block& B = cd.blocks[k];
    const MatrixXd& Mi = sc.Minv[k];
    const auto& E = B.entries;
    size_t ne = E.size();
    for (size_t ia = 0; ia < ne; ++ia) {
      const PsdEntry& ea = E[ia];
      for (size_t ib = 0; ib < ne; ++ib) {
        const PsdEntry& eb = E[ib];
        double contrib;
        bool da = ea.i == ea.j, db = eb.i == eb.j;
        if (da && db) contrib = Mi(ea.i, eb.i) * Mi(ea.i, eb.i);
        else if (da) contrib = 2.0 * Mi(ea.i, eb.i) * Mi(ea.i, eb.j);
        else if (db) contrib = 2.0 * Mi(ea.i, eb.i) * Mi(ea.j, eb.i);
        else
          contrib = 2.0 * (Mi(ea.i, eb.i) * Mi(ea.j, eb.j) + Mi(ea.i, eb.j) * Mi(ea.j, eb.i));
        Hs(ea.var, eb.var) += ea.coef * eb.coef * contrib;
      }
    }
  }
  return Hs;
}

Factorization factorize(const Canon& cd, const Scaling& sc) {
  Factorization F;
  MatrixXd Hs = assemble_hs(cd, sc);
  double dmax = std::max(1.0, Hs.diagonal().cwiseAbs().maxCoeff());
  double delta = 1e-10 * dmax;
  for (int attempt = 0; attempt < 4; ++attempt) {
    MatrixXd Hr = Hs;
    Hr.diagonal().array() += delta;
    F.hs.compute(Hr);
    if (F.hs.info() == Eigen::Success) break;
    delta *= 1e3;
    if (attempt == 3) throw NumericalFailure{};
  }
  int p = static_cast<int>(cd.A.rows());
  if (p > 0) {
    F.XA = F.hs.solve(cd.A.transpose());
    MatrixXd Seq = cd.A * F.XA;
    double smax = std::max(1.0, Seq.diagonal().cwiseAbs().maxCoeff());
    Seq.diagonal().array() += 1e-12 * smax;
    F.eq.compute(Seq);
    if (F.eq.info() != Eigen::Success) throw NumericalFailure{};
  }
  return F;
}

struct K3Sol {
  VectorXd dx, dy, dz;
};

K3Sol k3_base_solve(const Canon& cd, const Scaling& sc, const Factorization& F,
                    const VectorXd& ux, const VectorXd& uy, const VectorXd& uz) {
  K3Sol r;
  VectorXd t = apply_Hinv(cd, sc, uz);
  VectorXd f = ux + apply_Gt(cd, t);
  VectorXd dx0 = F.hs.solve(f);
  int p = static_cast<int>(cd.A.rows());
  if (p > 0) {
    VectorXd rhs_y = cd.A * dx0 - uy;
    r.dy = F.eq.solve(rhs_y);
    r.dx = dx0 - F.XA * r.dy;
  } else {
    r.dy = VectorXd::Zero(0);
    r.dx = dx0;
  }
  r.dz = apply_Hinv(cd, sc, apply_G(cd, r.dx) - uz);
  return r;
}

// Solve the quasidefinite 3x3 system with iterative refinement; the scaling
// matrix is severely ill-conditioned near convergence and refinement recovers
// the digits the factorization loses.
K3Sol k3_solve(const Canon& cd, const Scaling& sc, const Factorization& F,
               const VectorXd& ux, const VectorXd& uy, const VectorXd& uz) {
  K3Sol r = k3_base_solve(cd, sc, F, ux, uy, uz);
  int p = static_cast<int>(cd.A.rows());
  for (int pass = 0; pass < 2; ++pass) {
    VectorXd hz = unscale_s(cd, sc, scale_z(cd, sc, r.dz));  // (W'W) dz
    VectorXd r1 = ux - (cd.A.transpose() * r.dy + apply_Gt(cd, r.dz));
    VectorXd r2 = (p > 0) ? VectorXd(uy - cd.A * r.dx) : VectorXd::Zero(0);
    VectorXd r3 = uz - (apply_G(cd, r.dx) - hz);
    K3Sol c = k3_base_solve(cd, sc, F, r1, r2, r3);
    r.dx += c.dx;
    if (p > 0) r.dy += c.dy;
    r.dz += c.dz;
  }
  return r;
}

// lam \ v  (solve lam o u = v in scaled space; block scalings are diagonal).
VectorXd lambda_div(const Canon& cd, const Scaling& sc, const VectorXd& v) {
  VectorXd out(cd.M);
  out.head(cd.l) = v.head(cd.l).cwiseQuotient(sc.lam_lp);
  for (size_t k = 0; k < cd.blocks.size(); ++k) {
    const Block& B = cd.blocks[k];
    const VectorXd& lm = sc.lam[k];
    MatrixXd V = mat_from_svec(v, B.off, B.p);
    MatrixXd U(B.p, B.p);
    for (int i = 0; i < B.p; ++i)
      for (int j = 0; j < B.p; ++j) U(i, j) = 2.0 * V(i, j) / (lm[i] + lm[j]);
    svec_into(U, out, B.off);
  }
  return out;
}

// Jordan product u o v in scaled space.
VectorXd jordan(const Canon& cd, const VectorXd& u, const VectorXd& v) {
  VectorXd out(cd.M);
  out.head(cd.l) = u.head(cd.l).cwiseProduct(v.head(cd.l));
  for (const auto& B : cd.blocks) {
    MatrixXd U = mat_from_svec(u, B.off, B.p);
    MatrixXd V = mat_from_svec(v, B.off, B.p);
    MatrixXd T = 0.5 * (U * V + V * U);
    svec_into(T, out, B.off);
  }
  return out;
}

VectorXd lambda_sq(const Canon& cd, const Scaling& sc) {
  VectorXd out = VectorXd::Zero(cd.M);
  out.head(cd.l) = sc.lam_lp.cwiseProduct(sc.lam_lp);
  for (size_t k = 0; k < cd.blocks.size(); ++k) {
    const Block& B = cd.blocks[k];
    for (int i = 0; i < B.p; ++i) out[B.off + svec_idx(i, i)] = sc.lam[k][i] * sc.lam[k][i];
  }
  return out;
}

// Minimum cone eigenvalue of a cone-space vector (LP entries and block eigs).
double cone_min_eig(const Canon& cd, const VectorXd& v) {
  double mn = kInf;
  for (int i = 0; i < cd.l; ++i) mn = std::min(mn, v[i]);
  for (const auto& B : cd.blocks) {
    MatrixXd V = mat_from_svec(v, B.off, B.p);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(V, Eigen::EigenvaluesOnly);
    mn = std::min(mn, es.eigenvalues().minCoeff());
  }
  if (cd.M == 0) mn = 0.0;
  return mn;
}

struct HsdState {
  VectorXd x, y, z, s;
  double tau = 1.0, kappa = 1.0;
};

enum class RawOutcome { OPTIMAL, UNBOUNDED_CAND, INFEASIBLE_CAND, MAX_ITER, TROUBLE };

struct RawResult {
  RawOutcome outcome = RawOutcome::TROUBLE;
  HsdState st;
  int iterations = 0;
  // max(pres/tol_feas, dres/tol_feas, relgap/tol_gap) at the returned iterate
  // (the best one seen when the loop did not converge).
  double best_merit = kInf;
};

// Core homogeneous self-dual predictor-corrector loop on scaled data.
RawResult run_hsd(const Canon& cd, const SolverConfig& cfg) {
  RawResult rr;
  HsdState st;
  st.x = VectorXd::Zero(cd.N);
  st.y = VectorXd::Zero(cd.A.rows());
  st.s = cone_identity(cd);
  st.z = cone_identity(cd);
  VectorXd h = cone_h(cd);

  double bnorm = cd.b.size() ? cd.b.cwiseAbs().maxCoeff() : 0.0;
  double hnorm = cd.M ? h.cwiseAbs().maxCoeff() : 0.0;
  double cnorm = cd.N ? cd.c.cwiseAbs().maxCoeff() : 0.0;

  // Iterates can degrade once the scaling condition number passes what the
  // factorization can absorb; keep the best tau-normalized iterate seen.
  HsdState best = st;
  double best_merit = kInf;
  int consecutive_small = 0;
  try {
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
      rr.iterations = iter;
      // Residuals of the self-dual system.
      VectorXd rx = -(cd.A.transpose() * st.y + apply_Gt(cd, st.z) + cd.c * st.tau);
      VectorXd ry = cd.A * st.x - cd.b * st.tau;
      VectorXd rz = st.s + apply_G(cd, st.x) - h * st.tau;
      double rtau = st.kappa + cd.c.dot(st.x) + (cd.b.size() ? cd.b.dot(st.y) : 0.0) +
                    (cd.M ? h.dot(st.z) : 0.0);
      double szdot = cd.M ? st.s.dot(st.z) : 0.0;
      double mu = (szdot + st.tau * st.kappa) / (cd.nu + 1.0);

      // Convergence on the tau-normalized iterate.
      double itau = 1.0 / st.tau;
      double pcost = cd.c.dot(st.x) * itau;
      double dcost = -((cd.b.size() ? cd.b.dot(st.y) : 0.0) + (cd.M ? h.dot(st.z) : 0.0)) * itau;
      double pres = 0.0;
      if (cd.b.size()) pres = std::max(pres, (ry * itau).cwiseAbs().maxCoeff() / (1.0 + bnorm));
      if (cd.M) {
        VectorXd pr = (apply_G(cd, st.x) + st.s - h * st.tau) * itau;
        pres = std::max(pres, pr.cwiseAbs().maxCoeff() / (1.0 + hnorm));
      }
      VectorXd dr = (cd.A.transpose() * st.y + apply_Gt(cd, st.z) + cd.c * st.tau) * itau;
      double dres = dr.cwiseAbs().maxCoeff() / (1.0 + cnorm);
      double gap = szdot * itau * itau;
      double relgap = gap / std::max(1.0, std::fabs(pcost));
      if (std::getenv("POPCONE_IPM_TRACE"))
        std::fprintf(stderr,
                     "  ipm it=%3d mu=%9.3e pres=%9.3e dres=%9.3e relgap=%9.3e "
                     "tau=%9.3e kappa=%9.3e pcost=%+.6e\n",
                     iter, mu, pres, dres, relgap, st.tau, st.kappa, pcost);
      double merit = std::max({pres / cfg.tol_feas, dres / cfg.tol_feas, relgap / cfg.tol_gap});
      if (merit < best_merit) {
        best_merit = merit;
        best = st;
      }
      if (pres <= cfg.tol_feas && dres <= cfg.tol_feas && relgap <= cfg.tol_gap) {
        rr.outcome = RawOutcome::OPTIMAL;
        rr.st = st;
        rr.best_merit = merit;
        return rr;
      }

      // Certificate candidates.
      double cx = cd.c.dot(st.x);
      if (cx < -1e-12) {
        double inv = -1.0 / cx;
        double perr = 0.0;
        if (cd.b.size()) perr = std::max(perr, (cd.A * st.x * inv).cwiseAbs().maxCoeff());
        if (cd.M)
          perr = std::max(perr, ((apply_G(cd, st.x) + st.s) * inv).cwiseAbs().maxCoeff());
        double xs = (st.x * inv).cwiseAbs().maxCoeff();
        if (perr <= 1e-9 * (1.0 + xs)) {
          rr.outcome = RawOutcome::UNBOUNDED_CAND;
          rr.st = st;
          return rr;
        }
      }
      double bh = -((cd.b.size() ? cd.b.dot(st.y) : 0.0) + (cd.M ? h.dot(st.z) : 0.0));
      if (bh > 1e-12) {
        double inv = 1.0 / bh;
        VectorXd derr = (cd.A.transpose() * st.y + apply_Gt(cd, st.z)) * inv;
        double ys = 0.0;
        if (cd.b.size()) ys = std::max(ys, (st.y * inv).cwiseAbs().maxCoeff());
        if (cd.M) ys = std::max(ys, (st.z * inv).cwiseAbs().maxCoeff());
        if (derr.cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + ys)) {
          rr.outcome = RawOutcome::INFEASIBLE_CAND;
          rr.st = st;
          return rr;
        }
      }

      Scaling sc = compute_scaling(cd, st.s, st.z);
      Factorization F = factorize(cd, sc);
      K3Sol s1 = k3_solve(cd, sc, F, -cd.c, cd.b, h);
      double denom = cd.c.dot(s1.dx) + (cd.b.size() ? cd.b.dot(s1.dy) : 0.0) +
                     (cd.M ? h.dot(s1.dz) : 0.0) - st.kappa / st.tau;
      if (!std::isfinite(denom) || std::fabs(denom) < 1e-300) throw NumericalFailure{};

      VectorXd lam2 = lambda_sq(cd, sc);

      auto direction = [&](const VectorXd& ds_target, double dk_target) {
        VectorXd ldiv = lambda_div(cd, sc, ds_target);
        VectorXd uz = -rz - unscale_s(cd, sc, ldiv);
        K3Sol s2 = k3_solve(cd, sc, F, rx, -ry, uz);
        double num = -rtau - dk_target / st.tau - (cd.c.dot(s2.dx) +
                     (cd.b.size() ? cd.b.dot(s2.dy) : 0.0) + (cd.M ? h.dot(s2.dz) : 0.0));
        double dtau = num / denom;
        VectorXd dx = s2.dx + dtau * s1.dx;
        VectorXd dy = s2.dy + dtau * s1.dy;
        VectorXd dz = s2.dz + dtau * s1.dz;
        VectorXd dzt = scale_z(cd, sc, dz);
        VectorXd dst = ldiv - dzt;
        VectorXd ds = unscale_s(cd, sc, dst);
        double dkappa = (dk_target - st.kappa * dtau) / st.tau;
        return std::tuple<VectorXd, VectorXd, VectorXd, VectorXd, double, double, VectorXd, VectorXd>(
            dx, dy, dz, ds, dtau, dkappa, dst, dzt);
      };

      // Affine (predictor) direction.
      auto [dxa, dya, dza, dsa, dtaua, dkappaa, dsta, dzta] = direction(-lam2, -st.tau * st.kappa);
      double alpha_a = step_to_boundary(cd, st.s, dsa, 1.0);
      alpha_a = std::min(alpha_a, step_to_boundary(cd, st.z, dza, alpha_a));
      if (dtaua < 0) alpha_a = std::min(alpha_a, -st.tau / dtaua);
      if (dkappaa < 0) alpha_a = std::min(alpha_a, -st.kappa / dkappaa);
      double mu_aff = ((cd.M ? (st.s + alpha_a * dsa).dot(st.z + alpha_a * dza) : 0.0) +
                       (st.tau + alpha_a * dtaua) * (st.kappa + alpha_a * dkappaa)) /
                      (cd.nu + 1.0);
      double sigma = std::clamp(mu_aff / mu, 0.0, 1.0);
      sigma = sigma * sigma * sigma;

      // Combined (corrector) direction with Mehrotra second-order term.
      VectorXd corr = jordan(cd, dsta, dzta);
      VectorXd ds_target = -lam2 - corr + sigma * mu * cone_identity(cd);
      double dk_target = -st.tau * st.kappa - dtaua * dkappaa + sigma * mu;
      auto [dx, dy, dz, ds, dtau, dkappa, dst, dzt] = direction(ds_target, dk_target);

      double alpha = step_to_boundary(cd, st.s, ds, 1.0 / 0.99);
      alpha = std::min(alpha, step_to_boundary(cd, st.z, dz, alpha));
      if (dtau < 0) alpha = std::min(alpha, -st.tau / dtau);
      if (dkappa < 0) alpha = std::min(alpha, -st.kappa / dkappa);
      alpha = std::min(1.0, 0.99 * alpha);
      if (!std::isfinite(alpha) || alpha <= 1e-10) throw NumericalFailure{};

      st.x += alpha * dx;
      if (st.y.size()) st.y += alpha * dy;
      st.z += alpha * dz;
      st.s += alpha * ds;
      st.tau += alpha * dtau;
      st.kappa += alpha * dkappa;
      if (st.tau <= 1e-300 || !std::isfinite(st.tau)) throw NumericalFailure{};

      if (alpha < 1e-4) {
        if (++consecutive_small >= 3) throw NumericalFailure{};
      } else {
        consecutive_small = 0;
      }
    }
  } catch (const NumericalFailure&) {
    rr.outcome = RawOutcome::TROUBLE;
    rr.st = best;
    rr.best_merit = best_merit;
    return rr;
  }
  rr.outcome = RawOutcome::MAX_ITER;
  rr.st = best;
  rr.iterations = cfg.max_iter;
  rr.best_merit = best_merit;
  return rr;
}

// ---------- report assembly on original data ----------

// Cone slack of the original program at x: per-block matrix min-eigenvalue and
// nonneg/inequality slacks; returns max violation (positive = infeasible).
double primal_cone_violation(const ConicProgram& prog, const std::vector<double>& x) {
  double v = 0.0;
  for (const auto& f : prog.nonneg) v = std::max(v, -eval_expr(f, x));
  for (const auto& bl : prog.psd_blocks) {
    MatrixXd S = MatrixXd::Zero(bl.size, bl.size);
    for (const auto& e : bl.const_part) {
      S(e.i, e.j) += e.val;
      if (e.i != e.j) S(e.j, e.i) += e.val;
    }
    for (const auto& e : bl.entries) {
      double val = e.coef * x[e.var];
      S(e.i, e.j) += val;
      if (e.i != e.j) S(e.j, e.i) += val;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
    v = std::max(v, -es.eigenvalues().minCoeff());
  }
  return v;
}

SolveReport finalize(const ConicProgram& prog, const Canon& cd, const RawResult& rr,
                     const SolverConfig& cfg) {
  SolveReport rep;
  rep.iterations = rr.iterations;
  const HsdState& st = rr.st;
  double itau = 1.0 / st.tau;

  // Unscaled primal point.
  rep.x.assign(cd.N, 0.0);
  for (int v = 0; v < cd.N; ++v) rep.x[v] = st.x[v] * itau * cd.colscale[v];

  // Row multipliers in original row order and units.
  rep.row_multipliers.assign(prog.rows.size(), 0.0);
  for (size_t r = 0; r < prog.rows.size(); ++r) {
    auto [is_eq, idx] = cd.row_origin[r];
    double m = is_eq ? cd.eqscale[idx] * st.y[idx] : cd.lpscale[idx] * st.z[idx];
    rep.row_multipliers[r] = m * itau / cd.objscale;
  }

  // Values and residuals against the original data.
  double pval = 0.0;
  for (const auto& t : prog.objective) pval += t.coef * rep.x[t.var];
  pval += prog.objective_constant;
  VectorXd h = cone_h(cd);
  double dcost_scaled =
      -((cd.b.size() ? cd.b.dot(st.y) : 0.0) + (cd.M ? h.dot(st.z) : 0.0)) * itau;
  double dval = dcost_scaled / cd.objscale + cd.c0;
  // pval is computed from the original objective and already carries the
  // original sense; only the minimized-orientation dual value flips.
  if (cd.negated) dval = -dval;
  rep.primal_value = pval;
  rep.dual_value = dval;

  double eqviol = 0.0, ineqviol = 0.0;
  for (const auto& r : prog.rows) {
    double v = eval_expr(r.terms, rep.x) - r.rhs;
    if (r.rel == Relation::EQ) eqviol = std::max(eqviol, std::fabs(v));
    else ineqviol = std::max(ineqviol, v);
  }
  rep.residuals.primal_inf =
      std::max({eqviol, ineqviol, primal_cone_violation(prog, rep.x)});
  {
    // Dual residual in scaled space (the solved system), reported relative.
    VectorXd dr = (cd.A.transpose() * st.y + apply_Gt(cd, st.z) + cd.c * st.tau) * itau;
    rep.residuals.dual_inf = dr.size() ? dr.cwiseAbs().maxCoeff() : 0.0;
  }
  rep.residuals.gap = std::fabs(rep.primal_value - rep.dual_value);
  return rep;
}

ConicProgram homogenized(const ConicProgram& prog) {
  ConicProgram h = prog;
  h.sense = Sense::MIN;
  h.objective.clear();
  h.objective_constant = 0.0;
  for (auto& r : h.rows) r.rhs = 0.0;
  for (auto& b : h.psd_blocks) b.const_part.clear();
  LinearRow obj_row;
  for (const auto& t : prog.objective)
    obj_row.terms.push_back({t.var, prog.sense == Sense::MAX ? -t.coef : t.coef});
  obj_row.rel = Relation::LE;
  obj_row.rhs = -1.0;
  h.rows.push_back(std::move(obj_row));
  return h;
}

struct Presolved {
  ConicProgram prog;
  std::vector<int> orig_of_new;
  int orig_nvars = 0;
  bool ray_impossible = false;  // pinned/sign analysis proves no ray
};

// Structural presolve for the homogenized ray program: pins variables that
// the rows force to zero (single-term equality rows; all-positive equality
// rows over implicitly nonnegative variables) and propagates PSD structure
// (a zero diagonal forces its whole row/column to zero).
Presolved presolve_homogenized(const ConicProgram& in) {
  Presolved out;
  out.orig_nvars = in.num_vars;
  std::vector<char> pinned(in.num_vars, 0);

  // A variable is implicitly nonnegative if it is the sole term of a
  // positive-coefficient nonneg functional or sits alone on a PSD diagonal
  // with a positive coefficient.
  std::vector<char> nonneg_var(in.num_vars, 0);
  for (const auto& f : in.nonneg)
    if (f.size() == 1 && f[0].coef > 0) nonneg_var[f[0].var] = 1;
  // Group block entries by position to know which positions are single-term.
  struct Pos {
    int count = 0;
    int var = -1;
    double coef = 0.0;
  };
  std::vector<std::vector<Pos>> blockpos(in.psd_blocks.size());
  for (size_t k = 0; k < in.psd_blocks.size(); ++k) {
    const auto& bl = in.psd_blocks[k];
    blockpos[k].assign(static_cast<size_t>(bl.size) * bl.size, Pos{});
    for (const auto& e : bl.entries) {
      Pos& p = blockpos[k][e.i * bl.size + e.j];
      p.count++;
      p.var = e.var;
      p.coef = e.coef;
    }
    for (const auto& e : bl.entries)
      if (e.i == e.j && blockpos[k][e.i * bl.size + e.i].count == 1 && e.coef > 0)
        nonneg_var[e.var] = 1;
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : in.rows) {
      if (r.rel != Relation::EQ) continue;
      // Effective row after dropping pinned vars.
      int live = 0, last_var = -1;
      bool all_pos = true, all_neg = true, all_nn = true;
      for (const auto& t : r.terms) {
        if (pinned[t.var]) continue;
        ++live;
        last_var = t.var;
        if (t.coef <= 0) all_pos = false;
        if (t.coef >= 0) all_neg = false;
        if (!nonneg_var[t.var]) all_nn = false;
      }
      if (live == 1 && !pinned[last_var]) {
        pinned[last_var] = 1;
        changed = true;
      } else if (live > 1 && (all_pos || all_neg) && all_nn) {
        for (const auto& t : r.terms)
          if (!pinned[t.var]) {
            pinned[t.var] = 1;
            changed = true;
          }
      }
    }
    // PSD propagation: zero diagonal pins its row/column (single-term
    // positions only).
    for (size_t k = 0; k < in.psd_blocks.size(); ++k) {
      const auto& bl = in.psd_blocks[k];
      for (int i = 0; i < bl.size; ++i) {
        const Pos& d = blockpos[k][i * bl.size + i];
        bool diag_zero = (d.count == 0) || (d.count == 1 && pinned[d.var]);
        if (!diag_zero) continue;
        for (const auto& e : bl.entries) {
          if (e.i != i && e.j != i) continue;
          const Pos& p = blockpos[k][e.i * bl.size + e.j];
          if (p.count == 1 && !pinned[e.var]) {
            pinned[e.var] = 1;
            changed = true;
          }
        }
      }
    }
  }

  // Detect impossibility: a <= row with negative rhs whose live terms are all
  // nonnegative-coefficient implicitly-nonneg variables can never go negative.
  for (const auto& r : in.rows) {
    if (r.rel != Relation::LE || r.rhs >= 0) continue;
    bool hopeless = true;
    for (const auto& t : r.terms) {
      if (pinned[t.var]) continue;
      if (t.coef < 0 || !nonneg_var[t.var]) {
        hopeless = false;
        break;
      }
    }
    if (hopeless) {
      out.ray_impossible = true;
      return out;
    }
  }

  // Compress variables.
  std::vector<int> newidx(in.num_vars, -1);
  std::vector<char> used(in.num_vars, 0);
  auto mark = [&](int v) {
    if (!pinned[v]) used[v] = 1;
  };
  for (const auto& r : in.rows)
    for (const auto& t : r.terms) mark(t.var);
  for (const auto& f : in.nonneg)
    for (const auto& t : f) mark(t.var);
  for (const auto& bl : in.psd_blocks)
    for (const auto& e : bl.entries) mark(e.var);
  for (const auto& t : in.objective) mark(t.var);
  int nn = 0;
  for (int v = 0; v < in.num_vars; ++v)
    if (used[v]) {
      newidx[v] = nn++;
      out.orig_of_new.push_back(v);
    }
  if (nn == 0) {
    out.ray_impossible = true;
    return out;
  }

  ConicProgram& p = out.prog;
  p.num_vars = nn;
  p.sense = Sense::MIN;
  for (const auto& r : in.rows) {
    LinearRow nr;
    nr.rel = r.rel;
    nr.rhs = r.rhs;
    for (const auto& t : r.terms)
      if (!pinned[t.var]) nr.terms.push_back({newidx[t.var], t.coef});
    if (nr.terms.empty()) {
      if (r.rel == Relation::LE && r.rhs < 0) {
        out.ray_impossible = true;
        return out;
      }
      continue;  // 0 == 0 or 0 <= nonneg rhs
    }
    p.rows.push_back(std::move(nr));
  }
  for (const auto& f : in.nonneg) {
    LinExpr nf;
    for (const auto& t : f)
      if (!pinned[t.var]) nf.push_back({newidx[t.var], t.coef});
    if (!nf.empty()) p.nonneg.push_back(std::move(nf));
  }
  for (const auto& bl : in.psd_blocks) {
    PsdBlock nb;
    nb.size = bl.size;
    for (const auto& e : bl.entries)
      if (!pinned[e.var]) nb.entries.push_back({e.i, e.j, newidx[e.var], e.coef});
    if (!nb.entries.empty()) p.psd_blocks.push_back(std::move(nb));
  }
  return out;
}

}  // namespace

bool verify_ray(const ConicProgram& prog, const std::vector<double>& ray, double tol) {
  if (static_cast<int>(ray.size()) != prog.num_vars) return false;
  double cr = 0.0;
  for (const auto& t : prog.objective) cr += t.coef * ray[t.var];
  if (prog.sense == Sense::MAX) cr = -cr;
  if (!(cr < 0.0)) return false;
  std::vector<double> r(ray);
  double inv = 1.0 / (-cr);
  for (double& v : r) v *= inv;
  double scale = 1.0;
  for (double v : r) scale = std::max(scale, std::fabs(v));
  for (const auto& row : prog.rows) {
    double v = eval_expr(row.terms, r);
    if (row.rel == Relation::EQ ? std::fabs(v) > tol * scale : v > tol * scale) return false;
  }
  for (const auto& f : prog.nonneg)
    if (eval_expr(f, r) < -tol * scale) return false;
  for (const auto& bl : prog.psd_blocks) {
    MatrixXd S = MatrixXd::Zero(bl.size, bl.size);
    for (const auto& e : bl.entries) {
      double val = e.coef * r[e.var];
      S(e.i, e.j) += val;
      if (e.i != e.j) S(e.j, e.i) += val;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * std::max(1.0, S.cwiseAbs().maxCoeff()))
      return false;
  }
  return true;
}

std::optional<std::vector<double>> find_improving_ray(const ConicProgram& prog,
                                                      const SolverConfig& cfg) {
  ConicProgram hom = homogenized(prog);
  Presolved ps = presolve_homogenized(hom);
  if (ps.ray_impossible) return std::nullopt;
  try {
    ps.prog.validate();
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  SolverConfig c2 = cfg;
  c2.enable_certificate_search = false;
  c2.max_iter = std::min(cfg.max_iter, 100);
  // Feasibility solve: minimize 0 over the reduced homogenized set.
  Canon cd;
  try {
    cd = canonicalize(ps.prog);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  RawResult rr = run_hsd(cd, c2);
  if (rr.outcome != RawOutcome::OPTIMAL && rr.outcome != RawOutcome::MAX_ITER)
    return std::nullopt;
  double itau = 1.0 / rr.st.tau;
  std::vector<double> full(prog.num_vars, 0.0);
  for (size_t i = 0; i < ps.orig_of_new.size(); ++i)
    full[ps.orig_of_new[i]] = rr.st.x[i] * itau * cd.colscale[i];
  // Normalize to objective exactly -1 and verify against the original data.
  double cr = 0.0;
  for (const auto& t : prog.objective) cr += t.coef * full[t.var];
  if (prog.sense == Sense::MAX) cr = -cr;
  if (!(cr < 0.0)) return std::nullopt;
  for (double& v : full) v /= -cr;
  if (!verify_ray(prog, full, 1e-6)) return std::nullopt;
  return full;
}

SolveReport solve(const ConicProgram& prog, const SolverConfig& cfg) {
  SolveReport rep;
  Canon cd;
  try {
    cd = canonicalize(prog);
  } catch (const std::invalid_argument& e) {
    rep.status = SolveStatus::NUMERICAL_TROUBLE;
    rep.annotation = std::string("invalid program: ") + e.what();
    return rep;
  }
  RawResult rr = run_hsd(cd, cfg);
  rep = finalize(prog, cd, rr, cfg);

  auto try_unbounded = [&](SolveReport& out) -> bool {
    if (!cfg.enable_certificate_search) return false;
    auto ray = find_improving_ray(prog, cfg);
    if (ray) {
      out.status = SolveStatus::UNBOUNDED;
      out.certified = true;
      out.ray = *ray;
      out.annotation = "certified by improving ray";
      out.primal_value = cd.negated ? kInf : -kInf;
      out.dual_value = out.primal_value;
      return true;
    }
    // Fall back to the embedding's own certificate.
    double cx = cd.c.dot(rr.st.x);
    if (cx < 0) {
      std::vector<double> cand(cd.N);
      for (int v = 0; v < cd.N; ++v) cand[v] = rr.st.x[v] * cd.colscale[v];
      if (verify_ray(prog, cand, 1e-6)) {
        double cr = 0.0;
        for (const auto& t : prog.objective) cr += t.coef * cand[t.var];
        if (prog.sense == Sense::MAX) cr = -cr;
        for (double& v : cand) v /= -cr;
        out.status = SolveStatus::UNBOUNDED;
        out.certified = true;
        out.ray = cand;
        out.annotation = "certified by embedding certificate";
        out.primal_value = cd.negated ? kInf : -kInf;
        out.dual_value = out.primal_value;
        return true;
      }
    }
    return false;
  };

  switch (rr.outcome) {
    case RawOutcome::OPTIMAL:
      rep.status = SolveStatus::OPTIMAL;
      break;
    case RawOutcome::UNBOUNDED_CAND: {
      if (try_unbounded(rep)) break;
      // Heuristic: objective diverged while primal-feasible.
      double minimized = cd.negated ? -rep.primal_value : rep.primal_value;
      if (minimized < -cfg.unbounded_threshold &&
          rep.residuals.primal_inf <= std::sqrt(cfg.tol_feas)) {
        rep.status = SolveStatus::UNBOUNDED;
        rep.certified = false;
        rep.annotation = "heuristic: objective passed unbounded_threshold while primal-feasible";
        rep.primal_value = cd.negated ? kInf : -kInf;
        rep.dual_value = rep.primal_value;
      } else {
        rep.status = SolveStatus::NUMERICAL_TROUBLE;
        rep.annotation = "unboundedness suspected but no certificate verified";
      }
      break;
    }
    case RawOutcome::INFEASIBLE_CAND: {
      // Verify the Farkas certificate in the (exactly reformulated) scaled
      // space: A'y + G'z ~ 0, z in the cone, b'y + h'z = -1 after normalizing.
      const HsdState& st = rr.st;
      VectorXd h = cone_h(cd);
      double bh = -((cd.b.size() ? cd.b.dot(st.y) : 0.0) + (cd.M ? h.dot(st.z) : 0.0));
      bool ok = false;
      if (bh > 0) {
        VectorXd yr = st.y / bh;
        VectorXd zr = st.z / bh;
        VectorXd derr = cd.A.transpose() * yr + apply_Gt(cd, zr);
        double sc = 1.0;
        if (yr.size()) sc = std::max(sc, yr.cwiseAbs().maxCoeff());
        if (zr.size()) sc = std::max(sc, zr.cwiseAbs().maxCoeff());
        ok = derr.cwiseAbs().maxCoeff() <= 1e-6 * sc && cone_min_eig(cd, zr) >= -1e-8 * sc;
        if (ok) {
          for (size_t r = 0; r < prog.rows.size(); ++r) {
            auto [is_eq, idx] = cd.row_origin[r];
            rep.row_multipliers[r] =
                (is_eq ? cd.eqscale[idx] * yr[idx] : cd.lpscale[idx] * zr[idx]);
          }
        }
      }
      if (ok) {
        rep.status = SolveStatus::INFEASIBLE;
        rep.certified = true;
        rep.annotation = "Farkas certificate verified";
        rep.primal_value = cd.negated ? -kInf : kInf;
        rep.dual_value = rep.primal_value;
      } else {
        rep.status = SolveStatus::NUMERICAL_TROUBLE;
        rep.annotation = "infeasibility suspected but certificate failed verification";
      }
      break;
    }
    case RawOutcome::MAX_ITER:
      if (rr.best_merit <= cfg.accept_factor) {
        rep.status = SolveStatus::OPTIMAL;
        rep.annotation = "reduced accuracy: stalled within accept_factor of target tolerances";
        break;
      }
      if (try_unbounded(rep)) break;
      rep.status = SolveStatus::MAX_ITER;
      rep.annotation = "iteration limit reached";
      break;
    case RawOutcome::TROUBLE:
      if (rr.best_merit <= cfg.accept_factor) {
        rep.status = SolveStatus::OPTIMAL;
        rep.annotation = "reduced accuracy: stalled within accept_factor of target tolerances";
        break;
      }
      if (try_unbounded(rep)) break;
      rep.status = SolveStatus::NUMERICAL_TROUBLE;
      if (rep.annotation.empty()) rep.annotation = "numerical failure in interior-point loop";
      break;
  }
  return rep;
}

SolveReport lp_solve(const ConicProgram& prog, const SolverConfig& cfg) {
  if (!prog.psd_blocks.empty())
    throw std::invalid_argument("lp_solve: program has PSD blocks");
  return solve(prog, cfg);
}

}  // namespace popcone
