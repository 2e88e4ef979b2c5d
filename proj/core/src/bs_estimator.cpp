// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/bs_estimator.hpp"

#include "angspoof/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

namespace angspoof {

AngleGrid AngleGrid::uniform(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("grid step must be positive");
  constexpr double kPi = std::numbers::pi;
  const auto intervals = static_cast<std::size_t>(std::max(1.0, std::round(kPi / step)));
  AngleGrid grid;
  grid.step = kPi / static_cast<double>(intervals);
  grid.aoa_points.resize(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    grid.aoa_points[k] = -kPi / 2.0 + static_cast<double>(k) * grid.step;
  }
  grid.aoa_points.back() = kPi / 2.0;
  grid.aod_points = grid.aoa_points;
  return grid;
}

arma::cx_mat pseudo_inverse(const arma::cx_mat& z) {
  if (z.n_elem == 0) return arma::cx_mat(z.n_cols, z.n_rows, arma::fill::zeros);
  arma::cx_mat u;
  arma::vec sv;
  arma::cx_mat v;
  if (!arma::svd_econ(u, sv, v, z)) throw NumericalFailure("SVD did not converge", 0);
  const double tol = static_cast<double>(std::max(z.n_rows, z.n_cols)) *
                     std::numeric_limits<double>::epsilon() * (sv.n_elem ? sv.max() : 0.0);
  arma::cx_mat out(z.n_cols, z.n_rows, arma::fill::zeros);
  for (std::size_t k = 0; k < sv.n_elem; ++k) {
    if (sv[k] > tol) out += (v.col(k) / sv[k]) * u.col(k).t();
  }
  return out;
}

double projected_cost(const arma::cx_vec& y, const arma::cx_mat& z) {
  if (z.n_rows != y.n_elem) throw InvalidArgument("observation operator and signal differ in length");
  const arma::cx_vec r = y - z * (pseudo_inverse(z) * y);
  return std::real(arma::cdot(r, r));
}

arma::cx_vec estimate_gains(const arma::cx_vec& y, const arma::cx_mat& z, double tx_power) {
  if (z.n_rows != y.n_elem) throw InvalidArgument("observation operator and signal differ in length");
  if (!(tx_power > 0.0)) throw InvalidArgument("gain estimation needs positive transmit power");
  return (pseudo_inverse(z) * y) / std::sqrt(tx_power);
}

namespace {

struct GridPoint {
  std::size_t i = 0;  // AoA index
  std::size_t j = 0;  // AoD index

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

bool within(const GridPoint& a, const GridPoint& b, std::size_t radius) {
  const auto di = a.i > b.i ? a.i - b.i : b.i - a.i;
  const auto dj = a.j > b.j ? a.j - b.j : b.j - a.j;
  return std::max(di, dj) <= radius;
}

// Nominal observation model evaluated on the search grid. A candidate path
// at grid point (i, j) has observation column z_{s,m} = U(s,i) V(m,j).
class GridModel {
 public:
  GridModel(const ReceivedSignal& y, const SoundingCodebook& codebook, const AngleGrid& grid)
      : y_(y.samples),
        S_(codebook.measurements()),
        M_(codebook.symbols()),
        combiners_(codebook.combiners()),
        precoders_(codebook.precoders()),
        grid_(grid) {
    u_ = combiners_.t() * steering_matrix(codebook.n_r(), grid.aoa_points);
    v_ = precoders_.st() * steering_matrix(codebook.n_t(), grid.aod_points);
    nu_ = arma::sum(arma::square(arma::abs(u_)), 0).t();
    nv_ = arma::sum(arma::square(arma::abs(v_)), 0).t();
  }

  std::size_t rows() const { return grid_.aoa_points.size(); }
  std::size_t cols() const { return grid_.aod_points.size(); }

  arma::cx_vec column(double aoa, double aod) const {
    const arma::cx_vec u = combiners_.t() * steering(combiners_.n_rows, aoa);
    const arma::cx_vec v = precoders_.st() * steering(precoders_.n_rows, aod);
    return arma::kron(u, v);
  }

  arma::cx_vec column(const GridPoint& p) const {
    return arma::kron(arma::cx_vec(u_.col(p.i)), arma::cx_vec(v_.col(p.j)));
  }

  // Projected cost of [Q, z(i, j)] for every grid point, Q orthonormal.
  arma::mat conditional_surface(const arma::cx_mat& q) const {
    const arma::cx_vec r = residual(q);
    const double r2 = std::real(arma::cdot(r, r));
    const arma::cx_mat g = u_.t() * as_matrix(r) * arma::conj(v_);
    arma::mat denom = nu_ * nv_.t();
    const arma::mat full = denom;
    for (std::size_t k = 0; k < q.n_cols; ++k) {
      const arma::cx_mat t = u_.st() * arma::conj(as_matrix(q.col(k))) * v_;
      denom -= arma::square(arma::abs(t));
    }
    arma::mat cost(rows(), cols());
    const arma::mat g2 = arma::square(arma::abs(g));
    for (std::size_t n = 0; n < cost.n_elem; ++n) {
      cost[n] = denom[n] > 1e-12 * full[n] ? std::max(0.0, r2 - g2[n] / denom[n]) : r2;
    }
    return cost;
  }

  // Same cost at a single grid point.
  double conditional_cost(const arma::cx_mat& q, const GridPoint& p) const {
    const arma::cx_vec r = residual(q);
    const double r2 = std::real(arma::cdot(r, r));
    const arma::cx_vec z = column(p);
    const double full = nu_[p.i] * nv_[p.j];
    double denom = full;
    if (q.n_cols > 0) {
      const arma::cx_vec qz = q.t() * z;
      denom -= std::real(arma::cdot(qz, qz));
    }
    if (!(denom > 1e-12 * full)) return r2;
    return std::max(0.0, r2 - std::norm(arma::cdot(z, r)) / denom);
  }

  const AngleGrid& grid() const { return grid_; }
  const arma::cx_vec& samples() const { return y_; }

 private:
  arma::cx_vec residual(const arma::cx_mat& q) const {
    if (q.n_cols == 0) return y_;
    return y_ - q * (q.t() * y_);
  }

  // Sample vector (measurement-major) as an S x M matrix.
  arma::cx_mat as_matrix(const arma::cx_vec& x) const {
    return arma::reshape(x, M_, S_).st();
  }

  arma::cx_vec y_;
  std::size_t S_;
  std::size_t M_;
  arma::cx_mat combiners_;
  arma::cx_mat precoders_;
  const AngleGrid& grid_;
  arma::cx_mat u_;  // S x |AoA|
  arma::cx_mat v_;  // M x |AoD|
  arma::vec nu_;
  arma::vec nv_;
};

arma::cx_mat orthonormal_basis(const arma::cx_mat& z) {
  if (z.n_cols == 0) return arma::cx_mat(z.n_rows, 0);
  return arma::orth(z);
}

std::optional<GridPoint> best_admissible(const arma::mat& cost, const std::vector<GridPoint>& taken,
                                         std::size_t radius) {
  std::optional<GridPoint> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cost.n_rows; ++i) {
    for (std::size_t j = 0; j < cost.n_cols; ++j) {
      const GridPoint p{i, j};
      if (std::any_of(taken.begin(), taken.end(),
                      [&](const GridPoint& t) { return within(p, t, radius); })) {
        continue;
      }
      if (cost(i, j) < best_cost) {
        best_cost = cost(i, j);
        best = p;
      }
    }
  }
  return best;
}

std::vector<GridPoint> local_minima_nms(const arma::mat& cost, std::size_t count,
                                        std::size_t radius) {
  std::vector<GridPoint> minima;
  const auto rows = static_cast<long>(cost.n_rows);
  const auto cols = static_cast<long>(cost.n_cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      bool is_min = true;
      for (long di = -1; di <= 1 && is_min; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
          const long a = i + di;
          const long b = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= rows || b >= cols) continue;
          if (cost(a, b) < cost(i, j)) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) minima.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
    }
  }
  std::stable_sort(minima.begin(), minima.end(), [&](const GridPoint& a, const GridPoint& b) {
    return cost(a.i, a.j) < cost(b.i, b.j);
  });
  std::vector<GridPoint> picked;
  for (const auto& p : minima) {
    if (picked.size() == count) break;
    if (std::none_of(picked.begin(), picked.end(),
                     [&](const GridPoint& t) { return within(p, t, radius); })) {
      picked.push_back(p);
    }
  }
  return picked;
}

arma::cx_mat columns_at(const GridModel& model, const std::vector<double>& aoa,
                        const std::vector<double>& aod, std::size_t skip) {
  arma::cx_mat z(model.samples().n_elem, 0);
  for (std::size_t l = 0; l < aoa.size(); ++l) {
    if (l == skip) continue;
    z.insert_cols(z.n_cols, model.column(aoa[l], aod[l]));
  }
  return z;
}

// Vertex offset of the parabola through (-1, lo), (0, mid), (1, hi), in cells.
double parabolic_offset(double lo, double mid, double hi) {
  const double curvature = lo - 2.0 * mid + hi;
  if (!(curvature > 0.0)) return 0.0;
  return std::clamp(0.5 * (lo - hi) / curvature, -0.5, 0.5);
}

}  // namespace

arma::mat single_path_cost_surface(const ReceivedSignal& y, const SoundingCodebook& codebook,
                                   const AngleGrid& grid) {
  if (y.samples.n_elem != codebook.measurements() * codebook.symbols()) {
    throw InvalidArgument("signal length differs from S*M of the codebook");
  }
  GridModel model(y, codebook, grid);
  return model.conditional_surface(arma::cx_mat(y.samples.n_elem, 0));
}

EstimationResult grid_ml_estimate(const ReceivedSignal& y, const SoundingCodebook& codebook,
                                  const AngleGrid& grid, const EstimatorOptions& options) {
  if (options.paths == 0) throw InvalidArgument("at least one path must be estimated");
  if (grid.aoa_points.empty() || grid.aod_points.empty()) throw InvalidArgument("empty angle grid");
  if (y.samples.n_elem != codebook.measurements() * codebook.symbols()) {
    throw InvalidArgument("signal length differs from S*M of the codebook");
  }

  const GridModel model(y, codebook, grid);
  const std::size_t n = y.samples.n_elem;
  const std::size_t radius = options.min_separation;
  const arma::mat surface = model.conditional_surface(arma::cx_mat(n, 0));

  std::vector<GridPoint> peaks;
  if (options.search == PeakSearch::kSingleSurface) {
    peaks = local_minima_nms(surface, options.paths, radius);
  } else {
    for (std::size_t l = 0; l < options.paths; ++l) {
      arma::cx_mat z(n, 0);
      for (const auto& p : peaks) z.insert_cols(z.n_cols, model.column(p));
      const arma::mat cost = l == 0 ? surface : model.conditional_surface(orthonormal_basis(z));
      const auto next = best_admissible(cost, peaks, radius);
      if (!next) break;
      peaks.push_back(*next);
    }
    for (std::size_t pass = 0; pass < options.relax_passes && peaks.size() > 1; ++pass) {
      bool moved = false;
      for (std::size_t l = 0; l < peaks.size(); ++l) {
        std::vector<GridPoint> others = peaks;
        others.erase(others.begin() + static_cast<long>(l));
        arma::cx_mat z(n, 0);
        for (const auto& p : others) z.insert_cols(z.n_cols, model.column(p));
        const arma::mat cost = model.conditional_surface(orthonormal_basis(z));
        const auto next = best_admissible(cost, others, radius);
        if (next && !(*next == peaks[l])) {
          peaks[l] = *next;
          moved = true;
        }
      }
      if (!moved) break;
    }
  }
  if (peaks.empty()) throw NumericalFailure("no admissible peak on the search grid", 0);

  std::vector<double> aoa;
  std::vector<double> aod;
  for (const auto& p : peaks) {
    aoa.push_back(grid.aoa_points[p.i]);
    aod.push_back(grid.aod_points[p.j]);
  }

  // Parabolic refinement of each path on the cost conditioned on the others.
  const std::size_t last_i = grid.aoa_points.size() - 1;
  const std::size_t last_j = grid.aod_points.size() - 1;
  for (std::size_t pass = 0; pass < options.refine_passes; ++pass) {
    for (std::size_t l = 0; l < peaks.size(); ++l) {
      const arma::cx_mat q = orthonormal_basis(columns_at(model, aoa, aod, l));
      const GridPoint& p = peaks[l];
      const double mid = model.conditional_cost(q, p);
      if (p.i > 0 && p.i < last_i) {
        const double lo = model.conditional_cost(q, {p.i - 1, p.j});
        const double hi = model.conditional_cost(q, {p.i + 1, p.j});
        aoa[l] = grid.aoa_points[p.i] + parabolic_offset(lo, mid, hi) * grid.step;
      }
      if (p.j > 0 && p.j < last_j) {
        const double lo = model.conditional_cost(q, {p.i, p.j - 1});
        const double hi = model.conditional_cost(q, {p.i, p.j + 1});
        aod[l] = grid.aod_points[p.j] + parabolic_offset(lo, mid, hi) * grid.step;
      }
    }
  }

  const arma::cx_mat z = columns_at(model, aoa, aod, aoa.size());
  EstimationResult result{AngleVector(aoa, aod), {}, 0.0, {}, peaks.size() < options.paths};
  result.gains = estimate_gains(y.samples, z, y.tx_power > 0.0 ? y.tx_power : 1.0);
  result.residual_cost = projected_cost(y.samples, z);
  if (options.keep_surface) result.cost_surface = surface;
  return result;
}

BeamIndex select_beam(const ReceivedSignal& y) {
  if (y.samples.n_elem == 0 || y.symbols == 0) throw InvalidArgument("empty received signal");
  std::size_t best = 0;
  double best_power = -1.0;
  for (std::size_t k = 0; k < y.samples.n_elem; ++k) {
    const double p = std::norm(y.samples[k]);
    if (p > best_power) {
      best_power = p;
      best = k;
    }
  }
  return {best / y.symbols, best % y.symbols};
}

RateResult achievable_rate(const ChannelParams& channel, const arma::cx_vec& w_comm,
                           const arma::cx_vec& f_comm, double tx_power, double bandwidth,
                           double noise_psd, SnrConvention convention) {
  if (!(bandwidth > 0.0) || !(noise_psd > 0.0)) {
    throw InvalidArgument("bandwidth and noise PSD must be positive");
  }
  const arma::cx_mat h = channel_matrix(channel, w_comm.n_elem, f_comm.n_elem);
  RateResult out;
  out.snr_gain = std::norm(arma::cdot(w_comm, h * f_comm));
  const double noise = convention == SnrConvention::kBandwidthNoise ? bandwidth * noise_psd
                                                                     : noise_psd;
  out.spectral_efficiency = std::log2(1.0 + out.snr_gain * tx_power / noise);
  out.rate = bandwidth * out.spectral_efficiency;
  return out;
}

arma::mat normalized_likelihood(const arma::mat& cost) {
  const double lo = cost.min();
  const double hi = cost.max();
  if (!(hi > lo)) return arma::mat(cost.n_rows, cost.n_cols, arma::fill::zeros);
  return (hi - cost) / (hi - lo);
}

void write_cost_surface_csv(std::ostream& out, const AngleGrid& grid, const arma::mat& cost) {
  if (cost.n_rows != grid.aoa_points.size() || cost.n_cols != grid.aod_points.size()) {
    throw InvalidArgument("cost surface shape differs from the grid");
  }
  const arma::mat like = normalized_likelihood(cost);
  constexpr double kDeg = 180.0 / std::numbers::pi;
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.precision(10);
  out << "aoa_deg,aod_deg,normalized_likelihood\n";
  for (std::size_t i = 0; i < like.n_rows; ++i) {
    for (std::size_t j = 0; j < like.n_cols; ++j) {
      out << grid.aoa_points[i] * kDeg << ',' << grid.aod_points[j] * kDeg << ',' << like(i, j)
          << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace angspoof
