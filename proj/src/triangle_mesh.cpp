#include "tightcert/triangle_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace tightcert::surface {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::string edge_str(int a, int b) {
  std::ostringstream os;
  os << "(" << std::min(a, b) << ", " << std::max(a, b) << ")";
  return os.str();
}

} // namespace

const char* to_string(MeshErrorKind kind) {
  switch (kind) {
  case MeshErrorKind::parse: return "parse error";
  case MeshErrorKind::open_surface: return "open surface";
  case MeshErrorKind::non_manifold_edge: return "non-manifold edge";
  case MeshErrorKind::non_manifold_vertex: return "non-manifold vertex";
  case MeshErrorKind::inconsistent_orientation: return "inconsistent orientation";
  case MeshErrorKind::disconnected: return "disconnected surface";
  case MeshErrorKind::triangle_inequality: return "triangle inequality violation";
  case MeshErrorKind::bad_index: return "bad vertex index";
  case MeshErrorKind::length_mismatch: return "edge length mismatch";
  case MeshErrorKind::invalid_parameter: return "invalid parameter";
  }
  return "mesh error";
}

double triangle_area(double a, double b, double c) {
  // Kahan: sort a >= b >= c.
  if (a < b)
    std::swap(a, b);
  if (a < c)
    std::swap(a, c);
  if (b < c)
    std::swap(b, c);
  const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  return p > 0.0 ? 0.25 * std::sqrt(p) : 0.0;
}

double opposite_angle(double a, double b, double c) {
  // tan(angle) = 4 area / (b^2 + c^2 - a^2); stays accurate on slivers where
  // acos of the law-of-cosines ratio loses half the digits.
  return std::atan2(4.0 * triangle_area(a, b, c), b * b + c * c - a * a);
}

double opposite_cotangent(double a, double b, double c) {
  const double area = triangle_area(a, b, c);
  return (b * b + c * c - a * a) / (4.0 * area);
}

std::array<Eigen::Vector2d, 3> layout_triangle(double l01, double l12, double l20) {
  const double x = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01);
  const double y = std::sqrt(std::max(0.0, l20 * l20 - x * x));
  return {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(l01, 0.0), Eigen::Vector2d(x, y)};
}

TriangleMesh TriangleMesh::from_intrinsic(int vertex_count, std::vector<Face> faces,
                                          std::span<const std::pair<Edge, double>> edge_lengths) {
  if (vertex_count <= 0)
    throw MeshError(MeshErrorKind::invalid_parameter, "mesh needs at least one vertex");
  TriangleMesh mesh;
  mesh.vertex_count_ = vertex_count;
  mesh.faces_ = std::move(faces);
  mesh.build_topology();

  std::unordered_map<std::uint64_t, int> index;
  index.reserve(mesh.edges_.size() * 2);
  for (int e = 0; e < mesh.edge_count(); ++e)
    index.emplace(edge_key(mesh.edges_[e].first, mesh.edges_[e].second), e);

  mesh.lengths_.assign(mesh.edges_.size(), -1.0);
  for (const auto& [edge, length] : edge_lengths) {
    const auto it = index.find(edge_key(edge.first, edge.second));
    if (it == index.end())
      throw MeshError(MeshErrorKind::length_mismatch,
                      "length given for " + edge_str(edge.first, edge.second) +
                          " which is not an edge of any face");
    if (!(length > 0.0) || !std::isfinite(length))
      throw MeshError(MeshErrorKind::length_mismatch,
                      "edge " + edge_str(edge.first, edge.second) + " has non-positive length");
    double& slot = mesh.lengths_[it->second];
    if (slot >= 0.0 && slot != length)
      throw MeshError(MeshErrorKind::length_mismatch,
                      "edge " + edge_str(edge.first, edge.second) + " has conflicting lengths");
    slot = length;
  }
  for (int e = 0; e < mesh.edge_count(); ++e) {
    if (mesh.lengths_[e] < 0.0)
      throw MeshError(MeshErrorKind::length_mismatch,
                      "edge " + edge_str(mesh.edges_[e].first, mesh.edges_[e].second) +
                          " has no length");
  }
  mesh.validate_metric();
  return mesh;
}

TriangleMesh TriangleMesh::from_positions(std::vector<Eigen::Vector3d> positions,
                                          std::vector<Face> faces) {
  if (positions.empty())
    throw MeshError(MeshErrorKind::invalid_parameter, "mesh needs at least one vertex");
  TriangleMesh mesh;
  mesh.vertex_count_ = static_cast<int>(positions.size());
  mesh.faces_ = std::move(faces);
  mesh.build_topology();
  mesh.lengths_.resize(mesh.edges_.size());
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto [a, b] = mesh.edges_[e];
    mesh.lengths_[e] = (positions[a] - positions[b]).norm();
  }
  mesh.positions_ = std::move(positions);
  mesh.validate_metric();
  return mesh;
}

TriangleMesh TriangleMesh::with_chart(FlatChart chart) const {
  if (static_cast<int>(chart.uv.size()) != vertex_count_)
    throw MeshError(MeshErrorKind::invalid_parameter, "chart size does not match vertex count");
  TriangleMesh copy = *this;
  copy.chart_ = std::move(chart);
  return copy;
}

void TriangleMesh::build_topology() {
  const int nv = vertex_count_;
  const int nf = face_count();
  if (nf == 0)
    throw MeshError(MeshErrorKind::open_surface, "mesh has no faces");

  for (int f = 0; f < nf; ++f) {
    const Face& t = faces_[f];
    for (int c = 0; c < 3; ++c) {
      if (t[c] < 0 || t[c] >= nv) {
        std::ostringstream os;
        os << "face " << f << " references vertex " << t[c] << " outside [0, " << nv << ")";
        throw MeshError(MeshErrorKind::bad_index, os.str());
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0]) {
      std::ostringstream os;
      os << "face " << f << " repeats a vertex";
      throw MeshError(MeshErrorKind::bad_index, os.str());
    }
  }

  // Edges in order of first appearance; record which faces traverse them
  // in which direction.
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(static_cast<std::size_t>(nf) * 2);
  face_edges_.assign(nf, {-1, -1, -1});
  std::vector<std::vector<std::pair<int, bool>>> users; // (face, traverses min->max)
  for (int f = 0; f < nf; ++f) {
    for (int c = 0; c < 3; ++c) {
      const int a = faces_[f][(c + 1) % 3];
      const int b = faces_[f][(c + 2) % 3];
      const auto [it, inserted] = index.emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.emplace_back(std::min(a, b), std::max(a, b));
        users.emplace_back();
      }
      face_edges_[f][c] = it->second;
      users[it->second].emplace_back(f, a < b);
    }
  }

  edge_faces_.resize(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& u = users[e];
    const std::string where = edge_str(edges_[e].first, edges_[e].second);
    if (u.size() == 1)
      throw MeshError(MeshErrorKind::open_surface,
                      "boundary edge " + where + " belongs to a single face (" +
                          std::to_string(u[0].first) + ")");
    if (u.size() > 2)
      throw MeshError(MeshErrorKind::non_manifold_edge,
                      "edge " + where + " is shared by " + std::to_string(u.size()) + " faces");
    if (u[0].second == u[1].second)
      throw MeshError(MeshErrorKind::inconsistent_orientation,
                      "faces " + std::to_string(u[0].first) + " and " +
                          std::to_string(u[1].first) + " traverse edge " + where +
                          " in the same direction");
    edge_faces_[e] = u[0].second ? std::array<int, 2>{u[0].first, u[1].first}
                                 : std::array<int, 2>{u[1].first, u[0].first};
  }

  vertex_corners_.assign(nv, {});
  for (int f = 0; f < nf; ++f)
    for (int c = 0; c < 3; ++c)
      vertex_corners_[faces_[f][c]].emplace_back(f, c);

  // Each vertex link must be a single cycle.
  neighbors_.assign(nv, {});
  for (int v = 0; v < nv; ++v) {
    const auto& corners = vertex_corners_[v];
    if (corners.empty())
      throw MeshError(MeshErrorKind::disconnected,
                      "vertex " + std::to_string(v) + " is not used by any face");
    std::unordered_map<int, int> next; // link edge a -> b for faces (v, a, b)
    for (const auto& [f, c] : corners)
      next.emplace(faces_[f][(c + 1) % 3], faces_[f][(c + 2) % 3]);
    const int start = faces_[corners[0].first][(corners[0].second + 1) % 3];
    int cur = start;
    std::size_t steps = 0;
    do {
      const auto it = next.find(cur);
      if (it == next.end())
        break;
      cur = it->second;
      ++steps;
    } while (cur != start && steps <= corners.size());
    if (steps != corners.size() || cur != start)
      throw MeshError(MeshErrorKind::non_manifold_vertex,
                      "vertex " + std::to_string(v) + " has a disconnected face fan");
    auto& nb = neighbors_[v];
    for (const auto& [f, c] : corners) {
      nb.push_back(faces_[f][(c + 1) % 3]);
      nb.push_back(faces_[f][(c + 2) % 3]);
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  // Face adjacency connectivity.
  std::vector<char> seen(nf, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int f = stack.back();
    stack.pop_back();
    for (int c = 0; c < 3; ++c) {
      const auto& ef = edge_faces_[face_edges_[f][c]];
      const int g = ef[0] == f ? ef[1] : ef[0];
      if (!seen[g]) {
        seen[g] = 1;
        ++reached;
        stack.push_back(g);
      }
    }
  }
  if (reached != nf)
    throw MeshError(MeshErrorKind::disconnected,
                    "face adjacency graph has more than one component (" +
                        std::to_string(reached) + " of " + std::to_string(nf) +
                        " faces reachable from face 0)");
}

void TriangleMesh::validate_metric() const {
  for (int f = 0; f < face_count(); ++f) {
    const double a = opposite_length(f, 0);
    const double b = opposite_length(f, 1);
    const double c = opposite_length(f, 2);
    if (!(a < b + c && b < c + a && c < a + b)) {
      std::ostringstream os;
      os.precision(17);
      os << "face " << f << " (" << faces_[f][0] << ", " << faces_[f][1] << ", " << faces_[f][2]
         << ") has lengths " << a << ", " << b << ", " << c;
      throw MeshError(MeshErrorKind::triangle_inequality, os.str());
    }
  }
}

int TriangleMesh::find_edge(int a, int b) const {
  if (a < 0 || b < 0 || a >= vertex_count_ || b >= vertex_count_)
    return -1;
  for (const auto& [f, c] : vertex_corners_[a]) {
    for (int k = 1; k <= 2; ++k) {
      if (faces_[f][(c + k) % 3] == b)
        return face_edges_[f][(c + 3 - k) % 3];
    }
  }
  return -1;
}

double TriangleMesh::corner_angle(int f, int c) const {
  return opposite_angle(opposite_length(f, c), opposite_length(f, (c + 1) % 3),
                        opposite_length(f, (c + 2) % 3));
}

double TriangleMesh::face_area(int f) const {
  return triangle_area(opposite_length(f, 0), opposite_length(f, 1), opposite_length(f, 2));
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (int f = 0; f < face_count(); ++f)
    sum += face_area(f);
  return sum;
}

} // namespace tightcert::surface
