#pragma once

// Candidate grids on the unit sphere of impact directions.
//
// Bivariate problems use a deterministic polar grid so set lengths can be
// read off as (point count) * spacing.  Higher dimensions use normalized
// Gaussian draws, which are exactly uniform on the sphere.  Zero
// restrictions shrink the domain to a lower-dimensional sphere embedded in
// the leading-zeros coordinates.

#include <cmath>
#include <optional>

#include "svarsets/common.hpp"
#include "svarsets/restrictions.hpp"
#include "svarsets/rng.hpp"

namespace svarsets {

// count x n matrix of independent uniform draws on the unit sphere.
inline Matrix sample_uniform(int n, int count, Rng& rng) {
  if (n < 2) throw config_error("sample_uniform: need n >= 2");
  if (count < 1) throw config_error("sample_uniform: need count >= 1");
  Matrix q(count, n);
  std::normal_distribution<double> normal;
  for (int i = 0; i < count; ++i) {
    double norm2 = 0.0;
    do {
      for (int j = 0; j < n; ++j) {
        q(i, j) = normal(rng);
      }
      norm2 = q.row(i).squaredNorm();
    } while (norm2 < 1e-40);  // astronomically rare, but keeps rows unit
    q.row(i) /= std::sqrt(norm2);
  }
  return q;
}

// Angles a + k*(b-a)/count for k = 1..count: a half-open grid on (a, b]
// with uniform spacing and no duplicated endpoint.
inline Vector polar_angles(int count, double a, double b) {
  if (count < 1) throw config_error("polar_angles: need count >= 1");
  if (!(b > a)) throw config_error("polar_angles: empty angle interval");
  const double step = (b - a) / static_cast<double>(count);
  Vector angles(count);
  for (int k = 1; k <= count; ++k) angles(k - 1) = a + step * static_cast<double>(k);
  return angles;
}

inline Matrix polar_grid_2d(int count, double a, double b) {
  const Vector angles = polar_angles(count, a, b);
  Matrix q(count, 2);
  for (int i = 0; i < count; ++i) {
    q(i, 0) = std::cos(angles(i));
    q(i, 1) = std::sin(angles(i));
  }
  return q;
}

// Prepend zero_count zero coordinates to each row of a reduced-sphere grid.
inline Matrix embed_zero_restricted(const Matrix& reduced, int n, int zero_count) {
  if (restricted_domain_dim(n, zero_count) != reduced.cols())
    throw config_error("embed_zero_restricted: grid dimension does not match n - zero_count");
  Matrix q = Matrix::Zero(reduced.rows(), n);
  q.rightCols(reduced.cols()) = reduced;
  return q;
}

// A grid together with the metadata needed for set-length reporting.
struct QGrid {
  Matrix points;                   // count x n
  std::optional<double> spacing;   // angular spacing for polar grids
  std::optional<Vector> angles;    // polar angle per point when applicable
  int zero_count = 0;

  int count() const { return static_cast<int>(points.rows()); }
  int n() const { return static_cast<int>(points.cols()); }
};

inline QGrid make_polar_grid(int count, double a = -pi, double b = pi) {
  QGrid g;
  g.points = polar_grid_2d(count, a, b);
  g.angles = polar_angles(count, a, b);
  g.spacing = (b - a) / static_cast<double>(count);
  return g;
}

inline QGrid make_uniform_grid(int n, int count, std::uint64_t seed) {
  QGrid g;
  Rng rng = derive_rng(seed, {0x5fe8eULL});
  g.points = sample_uniform(n, count, rng);
  return g;
}

// Grid on the zero-restricted domain.  The free block is a polar grid when
// two coordinates remain, the two-point set {-1,+1} when one remains, and
// uniform sphere draws otherwise.
inline QGrid make_restricted_grid(int n, int zero_count, int count, std::uint64_t seed) {
  const int dim = restricted_domain_dim(n, zero_count);
  QGrid g;
  g.zero_count = zero_count;
  if (dim == 1) {
    Matrix reduced(2, 1);
    reduced << 1.0, -1.0;
    g.points = embed_zero_restricted(reduced, n, zero_count);
    return g;
  }
  if (dim == 2) {
    QGrid polar = make_polar_grid(count);
    g.points = embed_zero_restricted(polar.points, n, zero_count);
    g.angles = polar.angles;
    g.spacing = polar.spacing;
    return g;
  }
  Rng rng = derive_rng(seed, {0x5fe8eULL, static_cast<std::uint64_t>(zero_count)});
  g.points = embed_zero_restricted(sample_uniform(dim, count, rng), n, zero_count);
  return g;
}

}  // namespace svarsets
