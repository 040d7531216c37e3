#pragma once

// Small dense nonnegative quadratic programs.
//
// The moment objective needs min_{v >= 0} (y - v)' B (y - v) with B
// symmetric positive definite, and a pinned variant where some
// coordinates are fixed at zero.  Both reduce to
//   min_{x >= 0} x' Q x - 2 b' x
// solved by Lawson-Hanson active-set iteration on the normal equations.
// Problem sizes here are the number of kept restriction rows (single
// digits), so robustness and exact KKT termination matter more than scale.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "svarsets/common.hpp"

namespace svarsets {

struct QpResult {
  Vector x;
  double objective = 0.0;  // x'Qx - 2 b'x  (caller adds any constant)
  int iterations = 0;
};

// min_{x >= 0} x'Qx - 2 b'x for symmetric positive definite Q.
inline QpResult qp_nonneg(const Matrix& Q, const Vector& b, double kkt_tol = 1e-10) {
  const int d = static_cast<int>(b.size());
  if (Q.rows() != d || Q.cols() != d)
    throw config_error("qp_nonneg: Q must be square and match the size of b");
  QpResult res;
  res.x = Vector::Zero(d);
  if (d == 0) return res;
  const double tol = kkt_tol * (1.0 + b.cwiseAbs().maxCoeff());

  std::vector<char> passive(d, 0);
  Vector x = Vector::Zero(d);
  int iterations = 0;
  const int cap = 50 * (d + 1) * (d + 1);

  auto passive_solution = [&](std::vector<int>& p) -> Vector {
    p.clear();
    for (int i = 0; i < d; ++i)
      if (passive[i]) p.push_back(i);
    Matrix Qp(p.size(), p.size());
    Vector bp(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) {
      bp(static_cast<Eigen::Index>(a)) = b(p[a]);
      for (std::size_t c = 0; c < p.size(); ++c) Qp(a, c) = Q(p[a], p[c]);
    }
    return Qp.ldlt().solve(bp);
  };

  std::vector<int> p;
  for (;;) {
    if (++iterations > cap) throw numeric_error("qp_nonneg: iteration cap exceeded");
    // w = b - Qx is half the negative gradient; at a KKT point no active
    // coordinate has positive w
    const Vector w = b - Q * x;
    int enter = -1;
    double best = tol;
    for (int i = 0; i < d; ++i) {
      if (!passive[i] && w(i) > best) {
        best = w(i);
        enter = i;
      }
    }
    if (enter < 0) break;
    passive[enter] = 1;

    for (;;) {
      if (++iterations > cap) throw numeric_error("qp_nonneg: iteration cap exceeded");
      const Vector z = passive_solution(p);
      double zmin = std::numeric_limits<double>::infinity();
      for (Eigen::Index a = 0; a < z.size(); ++a) zmin = std::min(zmin, z(a));
      if (zmin > 0.0) {
        x.setZero();
        for (std::size_t a = 0; a < p.size(); ++a) x(p[a]) = z(static_cast<Eigen::Index>(a));
        break;
      }
      // largest feasible step toward z; the blocking coordinate leaves
      double alpha = 1.0;
      for (std::size_t a = 0; a < p.size(); ++a) {
        const double za = z(static_cast<Eigen::Index>(a));
        if (za <= 0.0) {
          const double xa = x(p[a]);
          const double denom = xa - za;
          if (denom > 0.0) alpha = std::min(alpha, xa / denom);
        }
      }
      for (std::size_t a = 0; a < p.size(); ++a) {
        const double za = z(static_cast<Eigen::Index>(a));
        x(p[a]) += alpha * (za - x(p[a]));
      }
      bool removed = false;
      for (std::size_t a = 0; a < p.size(); ++a) {
        if (z(static_cast<Eigen::Index>(a)) <= 0.0 && x(p[a]) <= tol) {
          x(p[a]) = 0.0;
          passive[p[a]] = 0;
          removed = true;
        }
      }
      if (!removed) {
        // numerical corner: evict the most negative z to guarantee progress
        int worst = p[0];
        double worst_z = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < p.size(); ++a) {
          if (z(static_cast<Eigen::Index>(a)) < worst_z) {
            worst_z = z(static_cast<Eigen::Index>(a));
            worst = p[a];
          }
        }
        x(worst) = 0.0;
        passive[worst] = 0;
      }
    }
  }
  res.x = x;
  res.objective = x.dot(Q * x) - 2.0 * b.dot(x);
  res.iterations = iterations;
  return res;
}

struct NnlsResult {
  Vector v;
  double objective = 0.0;  // (y - v)' B (y - v)
  int iterations = 0;
};

// Projection of y onto the nonnegative orthant in the metric induced by B.
inline NnlsResult nnls_project(const Vector& y, const Matrix& B, double kkt_tol = 1e-10) {
  QpResult qp = qp_nonneg(B, B * y, kkt_tol);
  NnlsResult res;
  res.v = qp.x;
  const Vector diff = y - qp.x;
  res.objective = diff.dot(B * diff);
  res.iterations = qp.iterations;
  return res;
}

}  // namespace svarsets
