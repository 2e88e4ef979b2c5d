// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/spoof_optimizer.hpp"

#include "angspoof/bs_estimator.hpp"
#include "angspoof/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace angspoof {

SpoofProblem::SpoofProblem(SoundingCodebook codebook, AngleVector true_angles,
                           AngleVector target_angles, double p_max)
    : codebook_(std::move(codebook)),
      true_angles_(std::move(true_angles)),
      target_angles_(std::move(target_angles)),
      p_max_(p_max),
      cap_(1.0 / std::sqrt(static_cast<double>(codebook_.n_t()))) {
  if (target_angles_.size() != true_angles_.size()) {
    throw InvalidArgument("target geometry must have as many paths as the true channel");
  }
  if (!(p_max_ > 0.0) || !std::isfinite(p_max_)) throw InvalidArgument("p_max must be positive");
  target_op_ = build_observation(codebook_.combiners(), codebook_.precoders(), target_angles_);
  bs_resp_ = codebook_.combiners().t() * steering_matrix(codebook_.n_r(), true_angles_.aoa());
  ue_steer_ = steering_matrix(codebook_.n_t(), true_angles_.aod());
  target_rank_ = arma::rank(target_op_);
}

arma::cx_mat SpoofProblem::spoofed_operator(const PrecoderSet& precoders) const {
  return build_observation(codebook_.combiners(), precoders, true_angles_);
}

arma::cx_vec SpoofProblem::b_vector(std::size_t s, const arma::cx_vec& d) const {
  if (d.n_elem != paths()) throw InvalidArgument("d has the wrong length");
  const arma::cx_vec weights = bs_resp_.row(s).st() % d;
  return arma::conj(ue_steer_ * weights);
}

arma::cx_vec SpoofProblem::target_signal(std::size_t s, const arma::cx_vec& lambda) const {
  if (lambda.n_elem != paths()) throw InvalidArgument("lambda has the wrong length");
  const std::size_t M = codebook_.symbols();
  return target_op_.rows(s * M, s * M + M - 1) * lambda;
}

ColumnSolution solve_precoder_column(const arma::cx_vec& b, cplx target, double cap) {
  if (!(cap > 0.0)) throw InvalidArgument("amplitude cap must be positive");
  ColumnSolution out;
  out.column.zeros(b.n_elem);
  const arma::vec mag = arma::abs(b);
  const double l1 = arma::accu(mag);
  const double want = std::abs(target);
  if (l1 == 0.0 || want == 0.0) return out;

  const double goal = std::min(want, cap * l1);
  auto achieved = [&](double beta) {
    double sum = 0.0;
    for (double m : mag) sum += m * std::min(cap, beta * m);
    return sum;
  };

  double min_nonzero = std::numeric_limits<double>::infinity();
  for (double m : mag) {
    if (m > 0.0) min_nonzero = std::min(min_nonzero, m);
  }
  // Every nonzero entry saturates once beta >= cap / min|b(i)|.
  double lo = 0.0;
  double hi = cap / min_nonzero;
  double beta = hi;
  if (want < cap * l1) {
    const double stop = 1e-13 * std::max(1.0, goal);
    for (int it = 0; it < 400; ++it) {
      beta = 0.5 * (lo + hi);
      const double r = achieved(beta) - goal;
      if (std::abs(r) <= stop || beta == lo || beta == hi) break;
      (r < 0.0 ? lo : hi) = beta;
    }
  }
  out.beta = beta;
  out.equation_residual = achieved(beta) - goal;

  const double phase = std::arg(target);
  for (std::size_t i = 0; i < b.n_elem; ++i) {
    if (mag[i] == 0.0) continue;
    out.column[i] = std::polar(std::min(cap, beta * mag[i]), phase + std::arg(b[i]));
  }
  return out;
}

double spoof_objective(const SpoofProblem& problem, const PrecoderSet& precoders,
                       const arma::cx_vec& d, const arma::cx_vec& lambda) {
  const auto& cb = problem.codebook();
  if (precoders.measurements() != cb.measurements() || precoders.symbols() != cb.symbols() ||
      precoders.n_t() != cb.n_t()) {
    throw InvalidArgument("precoder set does not match the sounding codebook");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < cb.measurements(); ++s) {
    // Entry m of Z_s(F~_s, rho) d is b_s^H f~_{s,m}.
    const arma::cx_vec spoofed = precoders[s].st() * arma::conj(problem.b_vector(s, d));
    const arma::cx_vec e = spoofed - problem.target_signal(s, lambda);
    total += std::real(arma::cdot(e, e));
  }
  return total;
}

PrecoderUpdate update_precoders(const SpoofProblem& problem, const arma::cx_vec& d,
                                const arma::cx_vec& lambda) {
  const auto& cb = problem.codebook();
  const double cap = problem.amplitude_cap();
  std::vector<arma::cx_mat> mats(cb.measurements(),
                                 arma::cx_mat(cb.n_t(), cb.symbols(), arma::fill::zeros));
  std::vector<std::size_t> zero_b;
  double worst = 0.0;
  for (std::size_t s = 0; s < cb.measurements(); ++s) {
    const arma::cx_vec b = problem.b_vector(s, d);
    if (arma::abs(b).max() == 0.0) {
      zero_b.push_back(s);
      continue;
    }
    const arma::cx_vec y = problem.target_signal(s, lambda);
    for (std::size_t m = 0; m < cb.symbols(); ++m) {
      ColumnSolution col = solve_precoder_column(b, y[m], cap);
      worst = std::max(worst, std::abs(col.equation_residual));
      mats[s].col(m) = std::move(col.column);
    }
  }
  return {PrecoderSet(std::move(mats)), std::move(zero_b), worst};
}

arma::cx_vec update_d(const SpoofProblem& problem, const PrecoderSet& precoders,
                      const arma::cx_vec& lambda) {
  const arma::cx_mat spoofed = problem.spoofed_operator(precoders);
  return pseudo_inverse(spoofed) * (problem.target_operator() * lambda);
}

arma::cx_vec budgeted_least_squares(const arma::cx_mat& zbar, const arma::cx_vec& target,
                                    double p_max) {
  arma::cx_vec lambda = pseudo_inverse(zbar) * target;
  if (std::real(arma::cdot(lambda, lambda)) <= p_max) return lambda;

  // Ridge path in the eigenbasis of Zbar^H Zbar: ||lambda(mu)||^2 =
  // sum_i |c_i|^2 / (e_i + mu)^2, strictly decreasing in mu.
  arma::vec e;
  arma::cx_mat v;
  if (!arma::eig_sym(e, v, arma::cx_mat(zbar.t() * zbar))) {
    throw NumericalFailure("eigendecomposition failed in the lambda update", 0);
  }
  e = arma::clamp(e, 0.0, std::numeric_limits<double>::max());
  const arma::cx_vec c = v.t() * (zbar.t() * target);
  const arma::vec c2 = arma::square(arma::abs(c));
  auto norm2 = [&](double mu) {
    double sum = 0.0;
    for (std::size_t i = 0; i < e.n_elem; ++i) {
      if (e[i] + mu > 0.0) sum += c2[i] / ((e[i] + mu) * (e[i] + mu));
    }
    return sum;
  };

  double lo = 0.0;
  double hi = std::max(e.max(), std::numeric_limits<double>::min());
  while (norm2(hi) >= p_max) hi *= 2.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double n = norm2(mid);
    if (n >= p_max) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(n - p_max) <= 1e-13 * p_max && n <= p_max) break;
  }
  // hi always satisfies the budget.
  arma::cx_vec scaled = c;
  for (std::size_t i = 0; i < e.n_elem; ++i) scaled[i] = c[i] / (e[i] + hi);
  return v * scaled;
}

arma::cx_vec update_lambda(const SpoofProblem& problem, const PrecoderSet& precoders,
                           const arma::cx_vec& d) {
  const arma::cx_vec spoofed = problem.spoofed_operator(precoders) * d;
  return budgeted_least_squares(problem.target_operator(), spoofed, problem.p_max());
}

double subspace_residual(const SpoofProblem& problem, const PrecoderSet& precoders,
                         const arma::cx_vec& d) {
  const arma::cx_vec v = problem.spoofed_operator(precoders) * d;
  const double total = std::real(arma::cdot(v, v));
  if (total == 0.0) return 1.0;
  return projected_cost(v, problem.target_operator()) / total;
}

SpoofState initial_spoof_state(const SpoofProblem& problem, std::uint64_t init_seed) {
  const std::size_t L = problem.paths();
  const double amp = std::sqrt(problem.p_max() / static_cast<double>(L));
  arma::cx_vec lambda(L);
  lambda.fill(cplx(amp, 0.0));
  if (init_seed != 0) {
    std::mt19937_64 rng(init_seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (auto& x : lambda) x = std::polar(amp, phase(rng));
  }
  const auto& cb = problem.codebook();
  return SpoofState{PrecoderSet::replicate(cb.precoders(), cb.measurements()), lambda, lambda,
                    {}, 0};
}

SpoofRun run_spoof_design(const SpoofProblem& problem, const SpoofOptions& options) {
  if (options.max_iters == 0) throw InvalidArgument("max_iters must be at least 1");
  if (!(options.tol > 0.0)) throw InvalidArgument("tol must be positive");

  SpoofRun run{initial_spoof_state(problem, options.init_seed), {}};
  SpoofState& state = run.state;
  SpoofDiagnostics& diag = run.diagnostics;
  if (problem.target_rank_deficient()) {
    diag.warnings.emplace_back(
        "target observation operator is rank deficient (coincident target paths)");
  }

  auto objective = [&](std::size_t k) {
    const double c = spoof_objective(problem, state.precoders, state.d, state.lambda);
    if (!std::isfinite(c)) throw NumericalFailure("non-finite spoofing objective", k);
    return c;
  };
  auto notify = [&](std::size_t k, SpoofBlock block) {
    if (options.observer) options.observer(k, block, state);
  };

  state.objective_trace.push_back(objective(0));
  diag.residual_trace.push_back(subspace_residual(problem, state.precoders, state.d));

  for (std::size_t k = 1; k <= options.max_iters; ++k) {
    BlockCosts costs;
    PrecoderUpdate up = update_precoders(problem, state.d, state.lambda);
    state.precoders = std::move(up.precoders);
    diag.zero_b_columns = up.zero_b_measurements.size() * problem.codebook().symbols();
    diag.max_equation_residual = up.max_equation_residual;
    costs.after_precoders = objective(k);
    notify(k, SpoofBlock::kPrecoders);

    state.d = update_d(problem, state.precoders, state.lambda);
    costs.after_d = objective(k);
    notify(k, SpoofBlock::kD);

    state.lambda = update_lambda(problem, state.precoders, state.d);
    costs.after_lambda = objective(k);
    notify(k, SpoofBlock::kLambda);

    const double previous = state.objective_trace.back();
    state.objective_trace.push_back(costs.after_lambda);
    diag.per_iteration_block_costs.push_back(costs);
    diag.residual_trace.push_back(subspace_residual(problem, state.precoders, state.d));
    state.iterations = k;
    if (std::abs(previous - costs.after_lambda) <= options.tol * std::max(1.0, previous)) {
      diag.converged = true;
      break;
    }
  }
  if (diag.zero_b_columns > 0) {
    diag.warnings.emplace_back("some measurements have b_s = 0; their precoders were zeroed");
  }
  diag.final_objective = state.objective_trace.back();
  diag.subspace_residual = diag.residual_trace.back();
  return run;
}

arma::cx_vec communication_precoder(const SpoofState& state, std::size_t s_hat,
                                    std::size_t m_hat) {
  if (s_hat >= state.precoders.measurements() || m_hat >= state.precoders.symbols()) {
    throw InvalidArgument("beam index out of range");
  }
  return state.precoders[s_hat].col(m_hat);
}

void write_diagnostics_csv(std::ostream& out, const SpoofState& state,
                           const SpoofDiagnostics& diagnostics) {
  const auto precision = out.precision();
  out.precision(12);
  out << "iteration,objective,subspace_residual\n";
  const std::size_t rows = std::min(state.objective_trace.size(), diagnostics.residual_trace.size());
  for (std::size_t k = 0; k < rows; ++k) {
    out << k << ',' << state.objective_trace[k] << ',' << diagnostics.residual_trace[k] << '\n';
  }
  out.precision(precision);
}

}  // namespace angspoof
