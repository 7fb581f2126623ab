#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fasisac/errors.hpp"

namespace fasisac {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned square region a fluid antenna may occupy.
struct Region {
  double half_width = 0.0;
  Vec2 center = Vec2::Zero();

  Region() = default;
  Region(double half_width_, const Vec2& center_ = Vec2::Zero())
      : half_width(half_width_), center(center_) {
    if (!(half_width > 0.0)) throw ConfigError("Region: half_width must be > 0");
  }

  bool contains(const Vec2& p, double tol = 0.0) const {
    return (p - center).cwiseAbs().maxCoeff() <= half_width + tol;
  }

  /// Componentwise projection onto the region.
  Vec2 clamp(const Vec2& p) const {
    return center + (p - center).cwiseMax(-half_width).cwiseMin(half_width);
  }
};

/// Fluid-antenna positions: N base-station antennas plus the single user antenna.
struct AntennaLayout {
  Eigen::Matrix2Xd bs_positions;  // column n = position of BS antenna n
  Vec2 ut_position = Vec2::Zero();

  int num_bs() const { return static_cast<int>(bs_positions.cols()); }
};

/// Per-path elevation/azimuth angle stack; all angles live in [0, pi].
struct PathAngles {
  Eigen::VectorXd elevation;
  Eigen::VectorXd azimuth;

  PathAngles() = default;
  PathAngles(Eigen::VectorXd elevation_, Eigen::VectorXd azimuth_)
      : elevation(std::move(elevation_)), azimuth(std::move(azimuth_)) {
    validate();
  }

  int num_paths() const { return static_cast<int>(elevation.size()); }

  void validate() const {
    if (elevation.size() != azimuth.size())
      throw ConfigError("PathAngles: elevation/azimuth length mismatch");
    constexpr double kPi = 3.14159265358979323846;
    for (Eigen::Index i = 0; i < elevation.size(); ++i) {
      if (elevation[i] < 0.0 || elevation[i] > kPi || azimuth[i] < 0.0 || azimuth[i] > kPi)
        throw ConfigError("PathAngles: angle outside [0, pi]");
    }
  }
};

/// True iff all pairwise BS-antenna distances are >= d_s (boundary inclusive).
/// The user antenna is excluded: it is alone in its own region.
bool min_distance_ok(const AntennaLayout& layout, double d_s);

/// Centered grid of N antennas with the given spacing, filled row-major over
/// the smallest near-square grid that holds N points. The fixed-position
/// baseline uses spacing = lambda/2.
Eigen::Matrix2Xd centered_grid(int n, double spacing);

/// Baseline layout: centered lambda/2 BS grid, user antenna at its region center.
/// Throws ConfigError when the grid does not fit inside region_bs.
AntennaLayout fpa_layout(int n, double wavelength, const Region& region_bs,
                         const Region& region_ut);

}  // namespace fasisac
