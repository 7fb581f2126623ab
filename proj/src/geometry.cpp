#include "fasisac/geometry.hpp"

#include <cmath>

namespace fasisac {

bool min_distance_ok(const AntennaLayout& layout, double d_s) {
  const int n = layout.num_bs();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if ((layout.bs_positions.col(a) - layout.bs_positions.col(b)).norm() < d_s) return false;
    }
  }
  return true;
}

Eigen::Matrix2Xd centered_grid(int n, double spacing) {
  if (n < 1) throw ConfigError("centered_grid: need at least one antenna");
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  // Center the full rows x cols lattice, take the first n cells row-major.
  const double x0 = -0.5 * (cols - 1) * spacing;
  const double y0 = -0.5 * (rows - 1) * spacing;
  Eigen::Matrix2Xd out(2, n);
  for (int i = 0; i < n; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    out.col(i) = Vec2(x0 + c * spacing, y0 + r * spacing);
  }
  return out;
}

AntennaLayout fpa_layout(int n, double wavelength, const Region& region_bs,
                         const Region& region_ut) {
  AntennaLayout layout;
  layout.bs_positions = centered_grid(n, 0.5 * wavelength);
  layout.bs_positions.colwise() += region_bs.center;
  for (int i = 0; i < n; ++i) {
    if (!region_bs.contains(layout.bs_positions.col(i)))
      throw ConfigError("fpa_layout: lambda/2 grid does not fit the BS region");
  }
  layout.ut_position = region_ut.center;
  return layout;
}

}  // namespace fasisac
