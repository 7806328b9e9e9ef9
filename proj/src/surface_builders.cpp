#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "tightcert/surface.hpp"

namespace tightcert::surface {

namespace {

void require(bool ok, const char* what) {
  if (!ok)
    throw MeshError(MeshErrorKind::invalid_parameter, what);
}

} // namespace

TriangleMesh build_flat_torus(int nx, int ny, double lx, double ly) {
  require(nx >= 3 && ny >= 3, "flat torus needs nx >= 3 and ny >= 3");
  require(lx > 0.0 && ly > 0.0 && std::isfinite(lx) && std::isfinite(ly),
          "flat torus periods must be positive");
  const double hx = lx / nx;
  const double hy = ly / ny;
  const double hd = std::hypot(hx, hy);
  const auto id = [nx, ny](int i, int j) { return ((j + ny) % ny) * nx + (i + nx) % nx; };

  std::vector<Face> faces;
  faces.reserve(2 * nx * ny);
  std::vector<std::pair<Edge, double>> lengths;
  lengths.reserve(3 * nx * ny);
  const auto edge = [](int a, int b) { return Edge{std::min(a, b), std::max(a, b)}; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      faces.push_back({v00, v10, v11});
      faces.push_back({v00, v11, v01});
      lengths.emplace_back(edge(v00, v10), hx);
      lengths.emplace_back(edge(v00, v01), hy);
      lengths.emplace_back(edge(v00, v11), hd);
    }
  }

  FlatChart chart;
  chart.period_x = lx;
  chart.period_y = ly;
  chart.uv.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      chart.uv[id(i, j)] = Eigen::Vector2d(i * hx, j * hy);

  return TriangleMesh::from_intrinsic(nx * ny, std::move(faces), lengths)
      .with_chart(std::move(chart));
}

TriangleMesh build_icosphere(int subdivisions) {
  require(subdivisions >= 0, "icosphere subdivision must be >= 0");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> p = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& v : p)
    v.normalize();
  std::vector<Face> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  for (int s = 0; s < subdivisions; ++s) {
    std::map<Edge, int> midpoint;
    const auto mid = [&](int a, int b) {
      const Edge key{std::min(a, b), std::max(a, b)};
      const auto it = midpoint.find(key);
      if (it != midpoint.end())
        return it->second;
      p.push_back((p[a] + p[b]).normalized());
      const int id = static_cast<int>(p.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& t : faces) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  return TriangleMesh::from_positions(std::move(p), std::move(faces));
}

// Hyperboloid model: t^2 - x^2 - y^2 = 1, t > 0.
namespace {

using Hyp = Eigen::Vector3d; // (x, y, t)

double minkowski(const Hyp& p, const Hyp& q) { return p.x() * q.x() + p.y() * q.y() - p.z() * q.z(); }

Hyp hyperbolic_midpoint(const Hyp& p, const Hyp& q) {
  const Hyp s = p + q;
  return s / std::sqrt(-minkowski(s, s));
}

double hyperbolic_distance(const Hyp& p, const Hyp& q) {
  const Hyp d = p - q;
  // <p-q, p-q> = 4 sinh^2(dist / 2); avoids acosh cancellation.
  return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, minkowski(d, d))));
}

} // namespace

double octagon_circumradius() {
  // cosh R = cot(pi/8) cot(alpha/2) with alpha = pi/4.
  const double c = 1.0 / std::tan(std::numbers::pi / 8.0);
  return std::acosh(c * c);
}

double octagon_side_length() {
  // cosh(s/2) = cos(pi/8) / sin(alpha/2) with alpha = pi/4.
  return 2.0 * std::acosh(1.0 / std::tan(std::numbers::pi / 8.0));
}

TriangleMesh build_hyperbolic_genus2(int refinement) {
  require(refinement >= 0 && refinement <= 6, "genus-2 refinement must be in [0, 6]");
  const int n = 1 << (refinement + 4);
  const double radius = octagon_circumradius();

  const Hyp centre(0.0, 0.0, 1.0);
  std::array<Hyp, 8> corner;
  for (int k = 0; k < 8; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / 8.0;
    corner[k] = Hyp(std::sinh(radius) * std::cos(theta), std::sinh(radius) * std::sin(theta),
                    std::cosh(radius));
  }

  // Grid of one sector: (i, j) with i + j <= n, i steps toward corner k and
  // j toward corner k+1. Built by repeated midpoint subdivision.
  const auto grid_index = [](int i, int j, int size) { return i * (size + 1) + j; };
  const auto sector_grid = [&](const Hyp& c, const Hyp& a, const Hyp& b) {
    int size = 1;
    std::vector<Hyp> g((size + 1) * (size + 1));
    g[grid_index(0, 0, size)] = c;
    g[grid_index(1, 0, size)] = a;
    g[grid_index(0, 1, size)] = b;
    while (size < n) {
      const int fine = 2 * size;
      std::vector<Hyp> h((fine + 1) * (fine + 1));
      for (int i = 0; i <= fine; ++i) {
        for (int j = 0; i + j <= fine; ++j) {
          Hyp& out = h[grid_index(i, j, fine)];
          const auto at = [&](int ii, int jj) { return g[grid_index(ii, jj, size)]; };
          if (i % 2 == 0 && j % 2 == 0)
            out = at(i / 2, j / 2);
          else if (i % 2 == 1 && j % 2 == 0)
            out = hyperbolic_midpoint(at((i - 1) / 2, j / 2), at((i + 1) / 2, j / 2));
          else if (i % 2 == 0)
            out = hyperbolic_midpoint(at(i / 2, (j - 1) / 2), at(i / 2, (j + 1) / 2));
          else
            out = hyperbolic_midpoint(at((i - 1) / 2, (j + 1) / 2), at((i + 1) / 2, (j - 1) / 2));
        }
      }
      g = std::move(h);
      size = fine;
    }
    return g;
  };

  // Global numbering after identification.
  constexpr int centre_id = 0;
  constexpr int corner_id = 1;
  const int spoke_base = 2;                      // 8 spokes x (n - 1)
  const int side_base = spoke_base + 8 * (n - 1); // 4 side classes x (n - 1)
  const int inner_base = side_base + 4 * (n - 1);
  const int inner_per_sector = (n - 1) * (n - 2) / 2;
  const int vertex_count = inner_base + 8 * inner_per_sector;

  // Side pairing a b a^-1 b^-1 c d c^-1 d^-1: side 2 is side 0 reversed, etc.
  const auto side_point = [&](int side, int t) {
    static constexpr std::array<int, 8> klass = {0, 1, 0, 1, 2, 3, 2, 3};
    static constexpr std::array<bool, 8> reversed = {false, false, true, true,
                                                     false, false, true, true};
    const int tt = reversed[side] ? n - t : t;
    return side_base + klass[side] * (n - 1) + (tt - 1);
  };
  const auto global_id = [&](int sector, int i, int j) {
    if (i == 0 && j == 0)
      return centre_id;
    if (i + j == n) {
      if (j == 0 || j == n)
        return corner_id;
      return side_point(sector, j);
    }
    if (j == 0)
      return spoke_base + sector * (n - 1) + (i - 1);
    if (i == 0)
      return spoke_base + ((sector + 1) % 8) * (n - 1) + (j - 1);
    // Interior: row-major over i >= 1, j >= 1, i + j < n.
    int offset = 0;
    for (int r = 1; r < i; ++r)
      offset += n - 1 - r;
    return inner_base + sector * inner_per_sector + offset + (j - 1);
  };

  std::vector<Face> faces;
  faces.reserve(8 * n * n);
  std::map<Edge, double> lengths;
  for (int k = 0; k < 8; ++k) {
    const auto g = sector_grid(centre, corner[k], corner[(k + 1) % 8]);
    const auto add = [&](std::array<std::pair<int, int>, 3> ij) {
      Face face;
      for (int c = 0; c < 3; ++c)
        face[c] = global_id(k, ij[c].first, ij[c].second);
      faces.push_back(face);
      for (int c = 0; c < 3; ++c) {
        const auto [i0, j0] = ij[c];
        const auto [i1, j1] = ij[(c + 1) % 3];
        const Edge key{std::min(face[c], face[(c + 1) % 3]), std::max(face[c], face[(c + 1) % 3])};
        lengths.emplace(key, hyperbolic_distance(g[grid_index(i0, j0, n)], g[grid_index(i1, j1, n)]));
      }
    };
    for (int i = 0; i < n; ++i) {
      for (int j = 0; i + j < n; ++j) {
        add({{{i, j}, {i + 1, j}, {i, j + 1}}});
        if (i + j <= n - 2)
          add({{{i + 1, j}, {i + 1, j + 1}, {i, j + 1}}});
      }
    }
  }
  const std::vector<std::pair<Edge, double>> edge_list(lengths.begin(), lengths.end());
  return TriangleMesh::from_intrinsic(vertex_count, std::move(faces), edge_list);
}

} // namespace tightcert::surface
