// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_SPOOF_OPTIMIZER_HPP
#define ANGSPOOF_SPOOF_OPTIMIZER_HPP

#include "angspoof/array_geometry.hpp"
#include "angspoof/channel_model.hpp"

#include <armadillo>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace angspoof {

/// Blind angular spoofing by analog precoder design.
///
/// The UE knows its own path angles rho and the public sounding codebook
/// (W, F) but not the path gains. It picks per-measurement precoders
/// {F~_s} so that the received signal Z({F~_s}, rho) alpha looks like it
/// was produced by the nominal bank F through a target geometry rho-bar,
/// i.e. lies in range(Z(F, rho-bar)). Gains are replaced by an auxiliary
/// vector d, and the equivalent target gains lambda are budgeted by
/// ||lambda||^2 <= p_max. The relaxed problem
///
///   min  sum_s || Z_s(F~_s, rho) d - Z_s(F, rho-bar) lambda ||^2
///   s.t. |F~_s(i, m)| <= 1/sqrt(N_t),  ||lambda||^2 <= p_max
///
/// is solved by block coordinate descent over ({F~_s}, d, lambda); every
/// block update is exact, so the objective never increases.
class SpoofProblem {
 public:
  SpoofProblem(SoundingCodebook codebook, AngleVector true_angles, AngleVector target_angles,
               double p_max);

  const SoundingCodebook& codebook() const noexcept { return codebook_; }
  const AngleVector& true_angles() const noexcept { return true_angles_; }
  const AngleVector& target_angles() const noexcept { return target_angles_; }
  double p_max() const noexcept { return p_max_; }
  std::size_t paths() const noexcept { return true_angles_.size(); }
  /// Amplitude cap c = 1/sqrt(N_t).
  double amplitude_cap() const noexcept { return cap_; }

  /// Z(F, rho-bar), SM x L.
  const arma::cx_mat& target_operator() const noexcept { return target_op_; }
  /// Z({F~_s}, rho), SM x L.
  arma::cx_mat spoofed_operator(const PrecoderSet& precoders) const;

  /// w_s^H a_BS(theta_l) for the true AoAs, S x L.
  const arma::cx_mat& bs_response() const noexcept { return bs_resp_; }
  /// a_UE(phi_l) for the true AoDs, N_t x L.
  const arma::cx_mat& ue_steering() const noexcept { return ue_steer_; }

  /// b_s = conj(sum_l d_l (w_s^H a_BS(theta_l)) a_UE(phi_l)), so that entry m
  /// of Z_s(F~_s, rho) d equals b_s^H f~_{s,m}.
  arma::cx_vec b_vector(std::size_t s, const arma::cx_vec& d) const;

  /// Target samples y~_s = Z_s(F, rho-bar) lambda for measurement s (length M).
  arma::cx_vec target_signal(std::size_t s, const arma::cx_vec& lambda) const;

  /// Degenerate target geometry: Z(F, rho-bar) is column-rank deficient.
  bool target_rank_deficient() const noexcept { return target_rank_ < paths(); }

 private:
  SoundingCodebook codebook_;
  AngleVector true_angles_;
  AngleVector target_angles_;
  double p_max_;
  double cap_;
  arma::cx_mat target_op_;
  arma::cx_mat bs_resp_;
  arma::cx_mat ue_steer_;
  std::size_t target_rank_ = 0;
};

/// Result of one per-column precoder subproblem.
struct ColumnSolution {
  arma::cx_vec column;
  double beta = 0.0;
  /// sum_i |b_i| min(c, beta |b_i|) - min(|y~|, c ||b||_1).
  double equation_residual = 0.0;
};

/// Exact minimiser of |b^H f - target|^2 subject to |f(i)| <= cap:
/// f(i) = min(cap, beta |b(i)|) exp(j(arg target + arg b(i))), with beta >= 0
/// the smallest root of sum_i |b(i)| min(cap, beta |b(i)|) = min(|target|, cap ||b||_1)
/// found by bisection. b = 0 or target = 0 yields the zero column.
ColumnSolution solve_precoder_column(const arma::cx_vec& b, cplx target, double cap);

/// sum_s || Z_s(F~_s, rho) d - Z_s(F, rho-bar) lambda ||^2.
double spoof_objective(const SpoofProblem& problem, const PrecoderSet& precoders,
                       const arma::cx_vec& d, const arma::cx_vec& lambda);

struct PrecoderUpdate {
  PrecoderSet precoders;
  /// Measurements with b_s = 0 (their columns are set to zero).
  std::vector<std::size_t> zero_b_measurements;
  /// Largest |beta equation residual| over all columns.
  double max_equation_residual = 0.0;
};

/// Per-measurement, per-column closed-form precoder update for fixed d, lambda.
PrecoderUpdate update_precoders(const SpoofProblem& problem, const arma::cx_vec& d,
                                const arma::cx_vec& lambda);

/// d = Z^+({F~_s}, rho) Z(F, rho-bar) lambda (minimum-norm least squares).
arma::cx_vec update_d(const SpoofProblem& problem, const PrecoderSet& precoders,
                      const arma::cx_vec& lambda);

/// Least-squares lambda if it fits the budget, otherwise the ridge solution
/// (Zbar^H Zbar + mu I)^{-1} Zbar^H Z~ d with mu bisected onto ||lambda||^2 = p_max.
arma::cx_vec update_lambda(const SpoofProblem& problem, const PrecoderSet& precoders,
                           const arma::cx_vec& d);

/// Lower-level form of the lambda step: minimise ||target - zbar lambda||^2
/// over ||lambda||^2 <= p_max.
arma::cx_vec budgeted_least_squares(const arma::cx_mat& zbar, const arma::cx_vec& target,
                                    double p_max);

/// ||(I - Pbar) Z~ d||^2 / ||Z~ d||^2 with Pbar the projector onto range(Zbar).
/// Returns 1 when Z~ d vanishes.
double subspace_residual(const SpoofProblem& problem, const PrecoderSet& precoders,
                         const arma::cx_vec& d);

struct SpoofState {
  PrecoderSet precoders;
  arma::cx_vec d;
  arma::cx_vec lambda;
  /// Objective at initialisation followed by one entry per completed cycle.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
};

struct BlockCosts {
  double after_precoders = 0.0;
  double after_d = 0.0;
  double after_lambda = 0.0;
};

struct SpoofDiagnostics {
  double final_objective = 0.0;
  double subspace_residual = 1.0;
  /// Subspace residual after each cycle (index 0 = initial state).
  std::vector<double> residual_trace;
  std::vector<BlockCosts> per_iteration_block_costs;
  std::size_t zero_b_columns = 0;
  double max_equation_residual = 0.0;
  bool converged = false;
  std::vector<std::string> warnings;
};

enum class SpoofBlock { kPrecoders, kD, kLambda };

struct SpoofOptions {
  std::size_t max_iters = 200;
  double tol = 1e-8;
  /// 0 keeps the deterministic all-ones start; any other value perturbs the
  /// initial d/lambda phases from this seed.
  std::uint64_t init_seed = 0;
  /// Called after every block update with the current iterate.
  std::function<void(std::size_t iteration, SpoofBlock block, const SpoofState& state)> observer;
};

struct SpoofRun {
  SpoofState state;
  SpoofDiagnostics diagnostics;
};

/// Alternating optimisation precoders -> d -> lambda until
/// |C^k - C^{k+1}| <= tol * max(1, C^k) or max_iters cycles.
/// Throws NumericalFailure on a non-finite objective.
SpoofRun run_spoof_design(const SpoofProblem& problem, const SpoofOptions& options = {});

/// Initial iterate: lambda = d = sqrt(p_max / L) * ones, F~_s = F.
SpoofState initial_spoof_state(const SpoofProblem& problem, std::uint64_t init_seed = 0);

/// Column m_hat of F~_{s_hat}: what the UE keeps transmitting after the BS
/// picks beam pair (s_hat, m_hat).
arma::cx_vec communication_precoder(const SpoofState& state, std::size_t s_hat,
                                    std::size_t m_hat);

/// CSV `iteration,objective,subspace_residual`.
void write_diagnostics_csv(std::ostream& out, const SpoofState& state,
                           const SpoofDiagnostics& diagnostics);

}  // namespace angspoof

#endif  // ANGSPOOF_SPOOF_OPTIMIZER_HPP
