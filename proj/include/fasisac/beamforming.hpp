#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fasisac/covariance.hpp"
#include "fasisac/rng.hpp"

namespace fasisac {

enum class SolveStatus { kOptimal, kInfeasible, kMaxIter, kRankOneRecoveryFailed };

const char* to_string(SolveStatus status);

struct SolverConfig {
  double barrier_t0 = 1.0;          // initial barrier weight on the objective
  double barrier_reduction = 0.2;   // duality-gap shrink factor per stage
  double gap_tol = 1e-7;            // stop when gap < gap_tol * (1 + |objective|)
  double newton_tol = 1e-9;         // centering stop on half squared Newton decrement
  int max_newton_per_stage = 60;
  int max_total_newton = 4000;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kOptimal;
  double relaxed_rate = 0.0;
  std::optional<double> recovered_rate;
  std::vector<double> constraint_slacks;  // power slack, then per-target sensing slack
  int iterations = 0;                     // Newton steps (solve) or candidates (randomization)
  double kkt_residual = 0.0;
  // Phase-1 infeasibility certificate: simplex weights w with
  // p_max * lambda_max(sum_k w_k G_k) < gamma, when status == kInfeasible.
  std::optional<Eigen::VectorXd> infeasibility_certificate;
  double certificate_bound = 0.0;  // p_max * lambda_max(sum w_k G_k) - gamma
  double worst_slack = 0.0;        // randomization only: worst sensing slack of returned candidate
};

/// Sensing constraint matrices G_k = E_k^H E_k from the target response matrices.
std::vector<Eigen::MatrixXcd> sensing_constraint_matrices(
    const std::vector<Eigen::MatrixXcd>& target_mats);

/// Maximize log2(1 + f U f^H / sigma^2) over Hermitian PSD U subject to
/// Tr(U) <= p_max and Tr(G_k U) >= gamma for every target. Solved as the
/// linear SDP max Tr(F U), F = f^H f, by a log-barrier interior-point method
/// with dense eigendecompositions; a phase-1 solve (maximize the minimum
/// sensing slack) runs first and certifies infeasibility with a dual point.
std::pair<Covariance, SolveReport> solve_covariance(
    const Eigen::RowVectorXcd& channel, const std::vector<Eigen::MatrixXcd>& target_mats,
    double p_max, double gamma, double noise_power, const SolverConfig& config = {});

/// Rank-one recovery by Gaussian randomization: candidates U^{1/2} v with
/// v ~ CN(0, I), rescaled to Tr(u u^H) = min(p_max, Tr(U)); the scaled dominant
/// eigenvector is always tested as candidate 0. The best-rate candidate that
/// meets all sensing constraints wins (ties: lowest candidate index).
std::pair<Covariance, SolveReport> gaussian_randomize(
    const Covariance& covariance, const Eigen::RowVectorXcd& channel,
    const std::vector<Eigen::MatrixXcd>& target_mats, double p_max, double gamma,
    double noise_power, int num_samples, Rng& rng);

/// Analytic maximum-ratio-transmission beamformer u = sqrt(p_max) f^H / |f|.
Covariance mrt_beamformer(const Eigen::RowVectorXcd& channel, double p_max);

struct ConstraintReport {
  double hermitian_residual = 0.0;
  double min_eigenvalue = 0.0;
  double power_slack = 0.0;                // p_max - Tr(U)
  std::vector<double> sensing_slacks;      // gain_k - gamma
  double rate = 0.0;
};

ConstraintReport validate_covariance(const Covariance& covariance,
                                     const Eigen::RowVectorXcd& channel,
                                     const std::vector<Eigen::MatrixXcd>& target_mats,
                                     double p_max, double gamma, double noise_power);

}  // namespace fasisac
