#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "tightcert/triangle_mesh.hpp"

namespace tightcert::test {

inline constexpr double pi = std::numbers::pi;

/// Samples g(u, v) at the chart coordinates of a flat-torus mesh.
inline Eigen::VectorXd on_chart(const surface::TriangleMesh& mesh,
                                const std::function<double(double, double)>& g) {
  const auto& uv = mesh.chart()->uv;
  Eigen::VectorXd f(static_cast<Eigen::Index>(uv.size()));
  for (std::size_t i = 0; i < uv.size(); ++i)
    f[static_cast<Eigen::Index>(i)] = g(uv[i].x(), uv[i].y());
  return f;
}

/// Samples g(x, y, z) at the vertex positions of an embedded mesh.
inline Eigen::VectorXd on_positions(const surface::TriangleMesh& mesh,
                                    const std::function<double(double, double, double)>& g) {
  const auto& p = *mesh.positions();
  Eigen::VectorXd f(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i)
    f[static_cast<Eigen::Index>(i)] = g(p[i].x(), p[i].y(), p[i].z());
  return f;
}

/// Exact generalized eigenvalues of the cotangent stiffness against the
/// consistent mass on the diagonal-split nx-by-ny periodic grid, from the
/// Fourier symbols of both stencils (diagonal edges carry zero cotangent
/// weight because the opposite angles are right angles).
inline std::vector<double> grid_torus_spectrum(int nx, int ny, double lx, double ly) {
  const double hx = lx / nx, hy = ly / ny;
  std::vector<double> out;
  for (int p = 0; p < nx; ++p) {
    for (int q = 0; q < ny; ++q) {
      const double tx = 2.0 * pi * p / nx, ty = 2.0 * pi * q / ny;
      const double s = (hy / hx) * (2.0 - 2.0 * std::cos(tx)) + (hx / hy) * (2.0 - 2.0 * std::cos(ty));
      const double m =
          hx * hy * (0.5 + (std::cos(tx) + std::cos(ty) + std::cos(tx + ty)) / 6.0);
      out.push_back(s / m);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace tightcert::test
