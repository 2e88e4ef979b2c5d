// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/array_geometry.hpp"

#include "angspoof/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace angspoof {

double wrap_angle(double x) {
  constexpr double kPi = std::numbers::pi;
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

namespace {

void require_distinct(const Point2& a, const Point2& b, const char* what) {
  if (a == b) {
    throw DegenerateGeometry(std::string("coincident positions: ") + what);
  }
}

bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double bearing(const Point2& from, const Point2& to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

}  // namespace

SceneGeometry::SceneGeometry(Point2 bs_position, double bs_orientation, Point2 ue_position,
                             double ue_orientation, std::vector<Point2> scatterers)
    : bs_position_(bs_position),
      bs_orientation_(wrap_angle(bs_orientation)),
      ue_position_(ue_position),
      ue_orientation_(wrap_angle(ue_orientation)),
      scatterers_(std::move(scatterers)) {
  if (!std::isfinite(bs_orientation) || !std::isfinite(ue_orientation)) {
    throw InvalidArgument("scene orientations must be finite");
  }
  if (!finite(bs_position_) || !finite(ue_position_)) {
    throw InvalidArgument("scene positions must be finite");
  }
  require_distinct(bs_position_, ue_position_, "BS and UE");
  for (const auto& sp : scatterers_) {
    if (!finite(sp)) throw InvalidArgument("scatterer positions must be finite");
    require_distinct(sp, bs_position_, "scatterer and BS");
    require_distinct(sp, ue_position_, "scatterer and UE");
  }
}

AngleVector::AngleVector(std::vector<double> aoa, std::vector<double> aod)
    : aoa_(std::move(aoa)), aod_(std::move(aod)) {
  if (aoa_.empty()) throw InvalidArgument("angle vector needs at least one path");
  if (aoa_.size() != aod_.size()) {
    throw InvalidArgument("AoA and AoD vectors differ in length");
  }
  for (auto* v : {&aoa_, &aod_}) {
    for (double& a : *v) {
      if (!std::isfinite(a)) throw InvalidArgument("angles must be finite");
      a = wrap_angle(a);
    }
  }
}

arma::cx_vec steering_from_sine(std::size_t n_antennas, double sine) {
  if (n_antennas == 0) throw InvalidArgument("steering vector needs at least one antenna");
  arma::cx_vec a(n_antennas);
  a[0] = cplx(1.0, 0.0);
  for (std::size_t k = 1; k < n_antennas; ++k) {
    a[k] = std::polar(1.0, std::numbers::pi * static_cast<double>(k) * sine);
  }
  return a;
}

arma::cx_vec steering(std::size_t n_antennas, double angle) {
  if (!std::isfinite(angle)) throw InvalidArgument("steering angle must be finite");
  return steering_from_sine(n_antennas, std::sin(angle));
}

arma::cx_mat steering_matrix(std::size_t n_antennas, const std::vector<double>& angles) {
  arma::cx_mat a(n_antennas, angles.size());
  for (std::size_t l = 0; l < angles.size(); ++l) a.col(l) = steering(n_antennas, angles[l]);
  return a;
}

AngleVector scene_to_angles(const SceneGeometry& scene) {
  const Point2& bs = scene.bs_position();
  const Point2& ue = scene.ue_position();
  std::vector<double> aoa;
  std::vector<double> aod;
  aoa.reserve(scene.num_paths());
  aod.reserve(scene.num_paths());

  aoa.push_back(bearing(bs, ue) - scene.bs_orientation());
  aod.push_back(bearing(ue, bs) - scene.ue_orientation());
  for (const auto& sp : scene.scatterers()) {
    aoa.push_back(bearing(bs, sp) - scene.bs_orientation());
    aod.push_back(bearing(ue, sp) - scene.ue_orientation());
  }
  return AngleVector(std::move(aoa), std::move(aod));
}

}  // namespace angspoof
