#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tightcert/torus3.hpp"

namespace tightcert::torus3 {

namespace {

class UnionFind {
public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b)
      parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<int> parent_;
};

constexpr std::array<int, 3> unit(int axis) {
  return {axis == 0 ? 1 : 0, axis == 1 ? 1 : 0, axis == 2 ? 1 : 0};
}

} // namespace

bool CharacteristicSurface::all_tori() const {
  return !components.empty() &&
         std::all_of(components.begin(), components.end(),
                     [](const IsoComponent& c) { return c.euler_characteristic == 0; });
}

CharacteristicSurface characteristic_surface(const Grid3Scalar& f, double tol) {
  const int n = f.n;
  if (n < 2 || f.values.size() != static_cast<std::size_t>(n) * n * n)
    throw std::invalid_argument("characteristic_surface: malformed grid");
  double fmax = 0.0;
  for (double v : f.values)
    fmax = std::max(fmax, std::abs(v));
  const double eps = tol * fmax;
  if (!(fmax > 0.0) || std::all_of(f.values.begin(), f.values.end(),
                                   [eps](double v) { return std::abs(v) < eps; }))
    throw std::invalid_argument("characteristic_surface: field is below tolerance everywhere");

  CharacteristicSurface out;
  const int count = n * n * n;
  std::vector<double> g(f.values);
  for (double& v : g) {
    if (std::abs(v) < eps) {
      v = eps > 0.0 ? eps : std::numeric_limits<double>::min();
      ++out.snapped_values;
    }
  }
  const auto id = [&](int i, int j, int k) { return f.index(i, j, k); };
  const auto coords = [n](int p) { return std::array<int, 3>{p % n, (p / n) % n, p / (n * n)}; };
  const auto shifted = [&](int p, std::array<int, 3> d) {
    const auto c = coords(p);
    return id(c[0] + d[0], c[1] + d[1], c[2] + d[2]);
  };

  // Crossing points, one per sign-changing grid edge (p, p + e_axis).
  std::vector<int> crossing(3 * static_cast<std::size_t>(count), -1);
  int nv = 0;
  for (int p = 0; p < count; ++p)
    for (int a = 0; a < 3; ++a)
      if ((g[p] > 0.0) != (g[shifted(p, unit(a))] > 0.0))
        crossing[3 * p + a] = nv++;

  // Segments on every grid face (base vertex p, normal axis a), pairing the
  // crossings on its four edges.
  std::vector<std::array<int, 2>> segments;
  std::vector<int> face_first(3 * static_cast<std::size_t>(count) + 1, 0);
  for (int p = 0; p < count; ++p) {
    for (int a = 0; a < 3; ++a) {
      face_first[3 * p + a] = static_cast<int>(segments.size());
      const int u = (a + 1) % 3, v = (a + 2) % 3;
      const int q00 = p, q10 = shifted(p, unit(u)), q01 = shifted(p, unit(v));
      const int q11 = shifted(q10, unit(v));
      const int e0 = crossing[3 * q00 + u], e1 = crossing[3 * q10 + v];
      const int e2 = crossing[3 * q01 + u], e3 = crossing[3 * q00 + v];
      std::array<int, 4> present{};
      int m = 0;
      for (int e : {e0, e1, e2, e3})
        if (e >= 0)
          present[m++] = e;
      if (m == 2) {
        segments.push_back({present[0], present[1]});
      } else if (m == 4) {
        ++out.ambiguous_faces;
        const double A = g[q00], B = g[q10], C = g[q11], D = g[q01];
        const double saddle = (A * C - B * D) / (A + C - B - D);
        if (saddle == 0.0)
          ++out.singular_faces;
        const bool diagonal_joined = (saddle >= 0.0) == (A > 0.0);
        if (diagonal_joined) {
          segments.push_back({e0, e1}); // cuts off q10
          segments.push_back({e2, e3}); // cuts off q01
        } else {
          segments.push_back({e3, e0}); // cuts off q00
          segments.push_back({e1, e2}); // cuts off q11
        }
      }
    }
  }
  face_first[3 * static_cast<std::size_t>(count)] = static_cast<int>(segments.size());

  UnionFind uf(std::max(nv, 1));
  for (const auto& s : segments)
    uf.unite(s[0], s[1]);

  // Loops inside each cube become polygons.
  std::vector<int> loop_vertex;
  for (int p = 0; p < count; ++p) {
    std::array<std::array<int, 2>, 12> local{};
    int ns = 0;
    for (int a = 0; a < 3; ++a) {
      for (int face : {3 * p + a, 3 * shifted(p, unit(a)) + a})
        for (int s = face_first[face]; s < face_first[face + 1]; ++s)
          local[ns++] = segments[s];
    }
    std::array<bool, 12> used{};
    for (int s = 0; s < ns; ++s) {
      if (used[s])
        continue;
      // Walk the loop starting at segment s.
      used[s] = true;
      const int start = local[s][0];
      int cur = local[s][1];
      while (cur != start) {
        int next = -1;
        for (int t = 0; t < ns; ++t) {
          if (used[t] || (local[t][0] != cur && local[t][1] != cur))
            continue;
          next = t;
          break;
        }
        if (next < 0)
          throw std::logic_error("characteristic_surface: open loop in a cube");
        used[next] = true;
        cur = local[next][0] == cur ? local[next][1] : local[next][0];
      }
      loop_vertex.push_back(start);
    }
  }

  std::vector<int> component_of(std::max(nv, 1), -1);
  const auto component = [&](int vertex) {
    const int r = uf.find(vertex);
    if (component_of[r] < 0) {
      component_of[r] = static_cast<int>(out.components.size());
      out.components.emplace_back();
    }
    return component_of[r];
  };
  for (int v = 0; v < nv; ++v)
    out.components[component(v)].vertices += 1;
  for (const auto& s : segments)
    out.components[component(s[0])].edges += 1;
  for (int v : loop_vertex)
    out.components[component(v)].faces += 1;
  for (auto& c : out.components)
    c.euler_characteristic = c.vertices - c.edges + c.faces;
  return out;
}

} // namespace tightcert::torus3
