// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_ARRAY_GEOMETRY_HPP
#define ANGSPOOF_ARRAY_GEOMETRY_HPP

#include <armadillo>

#include <cstddef>
#include <vector>

namespace angspoof {

using cplx = std::complex<double>;

/// Planar position in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Maps x onto (-pi, pi]; -pi itself maps to +pi.
double wrap_angle(double x);

/// BS, UE and scatterer layout of a 2-D scene. Orientations are wrapped to
/// (-pi, pi] on construction. Throws DegenerateGeometry if any two of the
/// BS, UE and scatterer points coincide (scatterers may coincide with each
/// other, the resulting paths are then identical).
class SceneGeometry {
 public:
  SceneGeometry(Point2 bs_position, double bs_orientation, Point2 ue_position,
                double ue_orientation, std::vector<Point2> scatterers = {});

  const Point2& bs_position() const noexcept { return bs_position_; }
  double bs_orientation() const noexcept { return bs_orientation_; }
  const Point2& ue_position() const noexcept { return ue_position_; }
  double ue_orientation() const noexcept { return ue_orientation_; }
  const std::vector<Point2>& scatterers() const noexcept { return scatterers_; }

  /// Number of propagation paths: LoS plus one per scatterer.
  std::size_t num_paths() const noexcept { return scatterers_.size() + 1; }

 private:
  Point2 bs_position_;
  double bs_orientation_;
  Point2 ue_position_;
  double ue_orientation_;
  std::vector<Point2> scatterers_;
};

/// Per-path angles of arrival (at the BS) and departure (at the UE), in
/// radians. Index 0 is the LoS path, 1..L-1 follow the scatterer order.
/// Entries are wrapped to (-pi, pi] on construction.
class AngleVector {
 public:
  AngleVector(std::vector<double> aoa, std::vector<double> aod);

  const std::vector<double>& aoa() const noexcept { return aoa_; }
  const std::vector<double>& aod() const noexcept { return aod_; }
  std::size_t size() const noexcept { return aoa_.size(); }

 private:
  std::vector<double> aoa_;
  std::vector<double> aod_;
};

/// Half-wavelength ULA response, entry k = exp(j*pi*k*sin(angle)).
arma::cx_vec steering(std::size_t n_antennas, double angle);

/// Same response parameterised directly by the direction cosine u = sin(angle).
arma::cx_vec steering_from_sine(std::size_t n_antennas, double sine);

/// Steering vectors for every angle, one per column.
arma::cx_mat steering_matrix(std::size_t n_antennas, const std::vector<double>& angles);

/// Path angles of a scene.
///
/// The AoA of path l is the bearing of the emitter (UE for LoS, scatterer l
/// otherwise) seen from the BS, minus the BS orientation. The AoD is the
/// bearing of the first hop (BS for LoS, scatterer l otherwise) seen from the
/// UE, minus the UE orientation:
///
///   aoa_0 = atan2(y_UE - y_BS, x_UE - x_BS) - o_BS
///   aod_0 = atan2(y_BS - y_UE, x_BS - x_UE) - o_UE
///
/// All outputs wrapped to (-pi, pi].
AngleVector scene_to_angles(const SceneGeometry& scene);

}  // namespace angspoof

#endif  // ANGSPOOF_ARRAY_GEOMETRY_HPP
