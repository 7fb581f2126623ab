#include "fasisac/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "fasisac/channel.hpp"
#include "fasisac/errors.hpp"

namespace fasisac {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using std::complex;

constexpr double kSqrtHalf = 0.70710678118654752440;

// Orthonormal real basis of the Hermitian N x N matrices under <A,B> = tr(AB):
// unit diagonals, then (E_ab + E_ba)/sqrt2 and (iE_ab - iE_ba)/sqrt2 for a < b.
// Each element is at most two weighted E_{rc} terms, which keeps the Hessian
// assembly closed-form: tr(W E_{r1c1} W E_{r2c2}) = W(c2,r1) W(c1,r2).
struct HermitianBasis {
  struct Term {
    complex<double> coef;
    int r, c;
  };
  struct Elem {
    Term t0, t1;
    int nterms;
  };

  explicit HermitianBasis(int n) : n_(n) {
    elems_.reserve(n * n);
    for (int a = 0; a < n; ++a) elems_.push_back({{1.0, a, a}, {}, 1});
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        elems_.push_back({{kSqrtHalf, a, b}, {kSqrtHalf, b, a}, 2});
        elems_.push_back({{complex<double>(0, kSqrtHalf), a, b},
                          {complex<double>(0, -kSqrtHalf), b, a},
                          2});
      }
    }
  }

  int dim() const { return static_cast<int>(elems_.size()); }

  VectorXd to_coords(const MatrixXcd& m) const {
    VectorXd v(dim());
    int i = 0;
    for (int a = 0; a < n_; ++a) v[i++] = m(a, a).real();
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) {
        v[i++] = 2.0 * kSqrtHalf * m(a, b).real();
        v[i++] = 2.0 * kSqrtHalf * m(a, b).imag();
      }
    }
    return v;
  }

  MatrixXcd from_coords(const VectorXd& v) const {
    MatrixXcd m = MatrixXcd::Zero(n_, n_);
    int i = 0;
    for (int a = 0; a < n_; ++a) m(a, a) = v[i++];
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) {
        const double re = v[i++] * kSqrtHalf;
        const double im = v[i++] * kSqrtHalf;
        m(a, b) = complex<double>(re, im);
        m(b, a) = complex<double>(re, -im);
      }
    }
    return m;
  }

  // K(i,j) = tr(W B_i W B_j) for Hermitian W.
  MatrixXd curvature(const MatrixXcd& w) const {
    const int m = dim();
    MatrixXd k(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        complex<double> acc = 0.0;
        const Elem& ei = elems_[i];
        const Elem& ej = elems_[j];
        for (int s = 0; s < ei.nterms; ++s) {
          const Term& ts = (s == 0) ? ei.t0 : ei.t1;
          for (int t = 0; t < ej.nterms; ++t) {
            const Term& tt = (t == 0) ? ej.t0 : ej.t1;
            acc += ts.coef * tt.coef * w(tt.c, ts.r) * w(ts.c, tt.r);
          }
        }
        k(i, j) = acc.real();
        k(j, i) = k(i, j);
      }
    }
    return k;
  }

 private:
  int n_;
  std::vector<Elem> elems_;
};

bool positive_definite(const MatrixXcd& m, Eigen::LLT<MatrixXcd>& llt) {
  llt.compute(m);
  return llt.info() == Eigen::Success;
}

double log_det_from_llt(const Eigen::LLT<MatrixXcd>& llt) {
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

// Shared log-barrier Newton machinery for the covariance SDP and its phase-1
// variant. Coordinates are [vec(U); s] with the scalar s only in phase 1.
struct BarrierProblem {
  int n = 0;
  bool phase1 = false;
  double p_max = 0.0;
  double gamma = 0.0;
  const MatrixXcd* objective = nullptr;         // F in the main solve
  const std::vector<MatrixXcd>* constraints = nullptr;  // G_k

  int num_sensing() const { return static_cast<int>(constraints->size()); }
  double barrier_degree() const { return n + 1 + num_sensing(); }
};

struct Iterate {
  MatrixXcd u;
  double s = 0.0;  // phase-1 auxiliary level; ignored otherwise
};

double power_slack(const BarrierProblem& p, const Iterate& x) {
  return p.p_max - x.u.trace().real();
}

VectorXd sensing_slacks(const BarrierProblem& p, const Iterate& x) {
  VectorXd sl(p.num_sensing());
  for (int k = 0; k < p.num_sensing(); ++k) {
    sl[k] = ((*p.constraints)[k] * x.u).trace().real() - p.gamma - (p.phase1 ? x.s : 0.0);
  }
  return sl;
}

double objective_value(const BarrierProblem& p, const Iterate& x) {
  if (p.phase1) return x.s;
  return ((*p.objective) * x.u).trace().real();
}

bool strictly_feasible(const BarrierProblem& p, const Iterate& x, Eigen::LLT<MatrixXcd>& llt) {
  if (power_slack(p, x) <= 0.0) return false;
  if ((sensing_slacks(p, x).array() <= 0.0).any()) return false;
  return positive_definite(x.u, llt);
}

double barrier_value(const BarrierProblem& p, const Iterate& x, double t,
                     const Eigen::LLT<MatrixXcd>& llt) {
  double phi = t * objective_value(p, x) + log_det_from_llt(llt) + std::log(power_slack(p, x));
  const VectorXd sl = sensing_slacks(p, x);
  for (int k = 0; k < sl.size(); ++k) phi += std::log(sl[k]);
  return phi;
}

struct CenterResult {
  Iterate x;
  int newton_steps = 0;
  double grad_norm = 0.0;
};

// Newton ascent of phi_t from a strictly feasible iterate. The Hessian in
// basis coordinates is -K_W - rank-one terms from the scalar slacks, dense
// and small (N^2+1 at most), so an LDLT solve per step is cheap.
CenterResult center(const BarrierProblem& p, const HermitianBasis& basis, Iterate x, double t,
                    const SolverConfig& cfg, int newton_budget) {
  const int mu = basis.dim();
  const int m = mu + (p.phase1 ? 1 : 0);
  Eigen::LLT<MatrixXcd> llt;
  if (!strictly_feasible(p, x, llt))
    throw NumericalError("interior solver: centering started outside the interior");

  CenterResult result;
  result.x = x;
  for (int it = 0; it < std::min(cfg.max_newton_per_stage, newton_budget); ++it) {
    positive_definite(result.x.u, llt);
    const MatrixXcd w = llt.solve(MatrixXcd::Identity(p.n, p.n));  // U^{-1}
    const double sp = power_slack(p, result.x);
    const VectorXd sl = sensing_slacks(p, result.x);

    // Gradient of phi_t.
    MatrixXcd grad_mat = w - (1.0 / sp) * MatrixXcd::Identity(p.n, p.n);
    for (int k = 0; k < p.num_sensing(); ++k) grad_mat += (1.0 / sl[k]) * (*p.constraints)[k];
    if (!p.phase1) grad_mat += t * (*p.objective);
    VectorXd g(m);
    g.head(mu) = basis.to_coords(grad_mat);
    if (p.phase1) g[mu] = t;
    for (int k = 0; p.phase1 && k < p.num_sensing(); ++k) g[mu] -= 1.0 / sl[k];

    // Negated Hessian (positive definite for the ascent direction solve).
    MatrixXd neg_h(m, m);
    neg_h.setZero();
    neg_h.topLeftCorner(mu, mu) = basis.curvature(w);
    const VectorXd vec_id = basis.to_coords(MatrixXcd::Identity(p.n, p.n));
    neg_h.topLeftCorner(mu, mu) += (vec_id * vec_id.transpose()) / (sp * sp);
    for (int k = 0; k < p.num_sensing(); ++k) {
      const VectorXd vg = basis.to_coords((*p.constraints)[k]);
      neg_h.topLeftCorner(mu, mu) += (vg * vg.transpose()) / (sl[k] * sl[k]);
      if (p.phase1) {
        neg_h.block(0, mu, mu, 1) -= vg / (sl[k] * sl[k]);
        neg_h.block(mu, 0, 1, mu) -= vg.transpose() / (sl[k] * sl[k]);
        neg_h(mu, mu) += 1.0 / (sl[k] * sl[k]);
      }
    }

    // Solve (-H) d = g, with a ridge fallback if roundoff spoils definiteness.
    VectorXd d;
    double ridge = 0.0;
    for (;;) {
      Eigen::LDLT<MatrixXd> ldlt(neg_h + ridge * MatrixXd::Identity(m, m));
      d = ldlt.solve(g);
      if (ldlt.info() == Eigen::Success && d.allFinite() && g.dot(d) >= 0.0) break;
      ridge = (ridge == 0.0) ? 1e-12 * neg_h.diagonal().maxCoeff() : ridge * 100.0;
      if (ridge > 1e6 * neg_h.diagonal().maxCoeff())
        throw NumericalError("interior solver: Newton system unsolvable");
    }

    const double decrement_sq = g.dot(d);
    result.grad_norm = g.norm();
    if (0.5 * decrement_sq <= cfg.newton_tol) break;

    // Backtracking line search keeping the iterate strictly interior.
    positive_definite(result.x.u, llt);
    const double phi0 = barrier_value(p, result.x, t, llt);
    const MatrixXcd step_mat = basis.from_coords(d.head(mu));
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 70; ++bt) {
      Iterate trial;
      trial.u = result.x.u + alpha * step_mat;
      trial.s = result.x.s + (p.phase1 ? alpha * d[mu] : 0.0);
      if (strictly_feasible(p, trial, llt) &&
          barrier_value(p, trial, t, llt) >= phi0 + 0.01 * alpha * decrement_sq) {
        result.x = trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++result.newton_steps;
    if (!accepted) break;  // step collapsed: as centered as roundoff allows
  }
  return result;
}

struct PathResult {
  Iterate x;
  double t_final = 0.0;
  int newton_total = 0;
  bool hit_iteration_cap = false;
  double grad_norm = 0.0;
};

// Follow the central path until gap = degree/t meets stop_gap(x), or the
// caller's early_stop fires after a completed centering.
template <typename StopGap, typename EarlyStop>
PathResult follow_path(const BarrierProblem& p, const HermitianBasis& basis, Iterate x,
                       const SolverConfig& cfg, StopGap stop_gap, EarlyStop early_stop) {
  PathResult out;
  out.x = std::move(x);
  double t = cfg.barrier_t0;
  for (;;) {
    const CenterResult c =
        center(p, basis, out.x, t, cfg, cfg.max_total_newton - out.newton_total);
    out.x = c.x;
    out.newton_total += c.newton_steps;
    out.t_final = t;
    out.grad_norm = c.grad_norm;
    const double gap = p.barrier_degree() / t;
    if (early_stop(out.x, t, gap)) break;
    if (gap <= stop_gap(out.x)) break;
    if (out.newton_total >= cfg.max_total_newton) {
      out.hit_iteration_cap = true;
      break;
    }
    t /= cfg.barrier_reduction;
  }
  return out;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kMaxIter: return "max_iter";
    case SolveStatus::kRankOneRecoveryFailed: return "rank_one_recovery_failed";
  }
  return "unknown";
}

std::vector<MatrixXcd> sensing_constraint_matrices(const std::vector<MatrixXcd>& target_mats) {
  std::vector<MatrixXcd> g;
  g.reserve(target_mats.size());
  for (const auto& e : target_mats) g.push_back(e.adjoint() * e);
  return g;
}

std::pair<Covariance, SolveReport> solve_covariance(const RowVectorXcd& channel,
                                                    const std::vector<MatrixXcd>& target_mats,
                                                    double p_max, double gamma,
                                                    double noise_power,
                                                    const SolverConfig& config) {
  const int n = static_cast<int>(channel.size());
  if (n == 0 || channel.norm() == 0.0)
    throw ConfigError("solve_covariance: channel must be non-zero");
  if (!(p_max > 0.0)) throw ConfigError("solve_covariance: p_max must be > 0");
  for (const auto& e : target_mats) {
    if (e.cols() != n) throw ConfigError("solve_covariance: target matrix has wrong width");
  }

  const MatrixXcd f_mat = channel.adjoint() * channel;
  const std::vector<MatrixXcd> g_mats = sensing_constraint_matrices(target_mats);
  const int num_k = static_cast<int>(g_mats.size());
  const HermitianBasis basis(n);

  SolveReport report;
  auto rate_of = [&](const MatrixXcd& u) {
    return std::log2(1.0 + std::max(0.0, (f_mat * u).trace().real()) / noise_power);
  };

  // Strictly feasible start: half-power scaled identity if the sensing margins
  // allow it, otherwise a phase-1 solve (maximize the minimum sensing slack).
  Iterate start;
  start.u = (p_max / (2.0 * n)) * MatrixXcd::Identity(n, n);
  const double margin = 1e-3 * std::max(1.0, gamma);
  bool start_ok = true;
  for (int k = 0; k < num_k; ++k) {
    if ((g_mats[k] * start.u).trace().real() - gamma < margin) start_ok = false;
  }

  int phase1_newton = 0;
  if (!start_ok) {
    BarrierProblem p1;
    p1.n = n;
    p1.phase1 = true;
    p1.p_max = p_max;
    p1.gamma = gamma;
    p1.constraints = &g_mats;

    Iterate x1;
    x1.u = start.u;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < num_k; ++k)
      worst = std::min(worst, (g_mats[k] * x1.u).trace().real() - gamma);
    x1.s = worst - std::max(1.0, 0.1 * std::abs(worst));

    const double eps_level = 1e-9 * std::max(1.0, gamma);
    const PathResult pr = follow_path(
        p1, basis, x1, config,
        [&](const Iterate&) { return eps_level; },
        [&](const Iterate& x, double /*t*/, double gap) {
          return x.s >= margin || x.s + gap < 0.0;
        });
    phase1_newton = pr.newton_total;

    const double gap = p1.barrier_degree() / pr.t_final;
    if (pr.x.s < margin && (pr.x.s + gap < 0.0 || pr.x.s <= 0.0)) {
      // Infeasible (or boundary-tight beyond barrier resolution): emit the
      // dual certificate w_k = 1/(t sigma_k), which sums to one at a centered
      // phase-1 point, and the bound p_max lambda_max(sum w_k G_k) - gamma.
      const VectorXd sl = sensing_slacks(p1, pr.x);
      VectorXd w(num_k);
      for (int k = 0; k < num_k; ++k) w[k] = 1.0 / (pr.t_final * sl[k]);
      w /= w.sum();
      MatrixXcd combo = MatrixXcd::Zero(n, n);
      for (int k = 0; k < num_k; ++k) combo += w[k] * g_mats[k];
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(combo);
      report.status = SolveStatus::kInfeasible;
      report.infeasibility_certificate = w;
      report.certificate_bound = p_max * es.eigenvalues().maxCoeff() - gamma;
      report.iterations = phase1_newton;
      report.relaxed_rate = 0.0;
      return {Covariance::zero(n), report};
    }
    start.u = pr.x.u;
    if (pr.hit_iteration_cap) {
      report.status = SolveStatus::kMaxIter;
      report.iterations = phase1_newton;
      report.relaxed_rate = rate_of(start.u);
      return {Covariance{hermitize(start.u), std::nullopt}, report};
    }
  }

  BarrierProblem p;
  p.n = n;
  p.p_max = p_max;
  p.gamma = gamma;
  p.objective = &f_mat;
  p.constraints = &g_mats;

  const PathResult pr = follow_path(
      p, basis, start, config,
      [&](const Iterate& x) {
        return config.gap_tol * (1.0 + std::abs(objective_value(p, x)));
      },
      [](const Iterate&, double, double) { return false; });

  Covariance cov{hermitize(pr.x.u), std::nullopt};
  report.status = pr.hit_iteration_cap ? SolveStatus::kMaxIter : SolveStatus::kOptimal;
  report.relaxed_rate = rate_of(cov.matrix);
  report.iterations = phase1_newton + pr.newton_total;
  report.constraint_slacks.push_back(p_max - cov.trace());
  for (int k = 0; k < num_k; ++k)
    report.constraint_slacks.push_back((g_mats[k] * cov.matrix).trace().real() - gamma);
  const double gap_rel = (p.barrier_degree() / pr.t_final) /
                         (1.0 + std::abs((f_mat * cov.matrix).trace().real()));
  const double stat_rel = pr.grad_norm / (pr.t_final * (1.0 + f_mat.norm()));
  report.kkt_residual = std::max(gap_rel, stat_rel);
  return {std::move(cov), report};
}

std::pair<Covariance, SolveReport> gaussian_randomize(const Covariance& covariance,
                                                      const RowVectorXcd& channel,
                                                      const std::vector<MatrixXcd>& target_mats,
                                                      double p_max, double gamma,
                                                      double noise_power, int num_samples,
                                                      Rng& rng) {
  if (num_samples < 1) throw ConfigError("gaussian_randomize: need num_samples >= 1");
  const int n = covariance.dim();
  const MatrixXcd u_herm = hermitize(covariance.matrix);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(u_herm);
  if (es.info() != Eigen::Success)
    throw NumericalError("gaussian_randomize: eigendecomposition failed");
  const VectorXd eigs = es.eigenvalues().cwiseMax(0.0);
  const MatrixXcd sqrt_u =
      es.eigenvectors() * eigs.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();

  const double target_power = std::min(p_max, u_herm.trace().real());
  const double slack_tol = 1e-8 * std::max(1.0, gamma);

  SolveReport report;
  report.relaxed_rate = communication_rate(channel, Covariance{u_herm, std::nullopt}, noise_power);

  auto evaluate = [&](const VectorXcd& u) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& e : target_mats) worst = std::min(worst, (e * u).squaredNorm() - gamma);
    if (target_mats.empty()) worst = 0.0;
    const double rate = std::log2(1.0 + std::norm((channel * u).value()) / noise_power);
    return std::make_pair(rate, worst);
  };

  VectorXcd best_feasible, best_any;
  double best_feasible_rate = -1.0, best_any_rate = -1.0, best_any_slack = 0.0;

  auto consider = [&](const VectorXcd& u) {
    const auto [rate, worst] = evaluate(u);
    if (worst >= -slack_tol && rate > best_feasible_rate) {
      best_feasible_rate = rate;
      best_feasible = u;
    }
    if (rate > best_any_rate) {
      best_any_rate = rate;
      best_any = u;
      best_any_slack = worst;
    }
  };

  // Candidate 0: scaled dominant eigenvector (recovers rank-one inputs exactly).
  int tested = 0;
  {
    VectorXcd lead = es.eigenvectors().col(n - 1);
    lead *= std::sqrt(target_power);
    consider(lead);
    ++tested;
  }
  for (int l = 1; l <= num_samples; ++l) {
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.complex_normal();
    VectorXcd u = sqrt_u * v;
    const double norm = u.norm();
    if (norm < 1e-14) continue;
    u *= std::sqrt(target_power) / norm;
    consider(u);
    ++tested;
  }
  report.iterations = tested;

  if (best_feasible.size() > 0) {
    report.status = SolveStatus::kOptimal;
    report.recovered_rate = best_feasible_rate;
    report.worst_slack = evaluate(best_feasible).second;
    report.constraint_slacks.push_back(p_max - target_power);
    for (const auto& e : target_mats)
      report.constraint_slacks.push_back((e * best_feasible).squaredNorm() - gamma);
    return {Covariance::from_factor(best_feasible), report};
  }
  report.status = SolveStatus::kRankOneRecoveryFailed;
  report.recovered_rate = std::nullopt;
  report.worst_slack = best_any_slack;
  report.constraint_slacks.push_back(p_max - target_power);
  for (const auto& e : target_mats)
    report.constraint_slacks.push_back((e * best_any).squaredNorm() - gamma);
  return {Covariance::from_factor(best_any), report};
}

Covariance mrt_beamformer(const RowVectorXcd& channel, double p_max) {
  const double norm = channel.norm();
  if (norm == 0.0) throw ConfigError("mrt_beamformer: channel must be non-zero");
  const VectorXcd u = std::sqrt(p_max) * channel.adjoint() / norm;
  return Covariance::from_factor(u);
}

ConstraintReport validate_covariance(const Covariance& covariance, const RowVectorXcd& channel,
                                     const std::vector<MatrixXcd>& target_mats, double p_max,
                                     double gamma, double noise_power) {
  ConstraintReport report;
  const MatrixXcd& u = covariance.matrix;
  report.hermitian_residual = (u - u.adjoint()).norm();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(u));
  report.min_eigenvalue = es.eigenvalues().minCoeff();
  report.power_slack = p_max - u.trace().real();
  for (const auto& e : target_mats)
    report.sensing_slacks.push_back(sensing_gain(e, covariance) - gamma);
  report.rate = communication_rate(channel, covariance, noise_power);
  return report;
}

}  // namespace fasisac
