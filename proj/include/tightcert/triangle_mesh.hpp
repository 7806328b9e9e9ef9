#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace tightcert::surface {

using Face = std::array<int, 3>;
using Edge = std::pair<int, int>; // always (min, max)

/// Category of a mesh validation failure.
enum class MeshErrorKind {
  parse,
  open_surface,
  non_manifold_edge,
  non_manifold_vertex,
  inconsistent_orientation,
  disconnected,
  triangle_inequality,
  bad_index,
  length_mismatch,
  invalid_parameter,
};

const char* to_string(MeshErrorKind kind);

class MeshError : public std::runtime_error {
public:
  MeshError(MeshErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  MeshErrorKind kind() const noexcept { return kind_; }

private:
  MeshErrorKind kind_;
};

/// Periodic planar coordinates attached to flat-torus meshes. Used only
/// for presentation (SVG layouts); geometry always comes from edge lengths.
struct FlatChart {
  double period_x = 0.0;
  double period_y = 0.0;
  std::vector<Eigen::Vector2d> uv;
};

/// Closed, connected, orientable intrinsic triangle mesh.
///
/// The metric is given by one length per undirected edge. Embedded inputs
/// keep their positions, but every geometric quantity downstream is a
/// function of the edge lengths alone. Instances are immutable.
class TriangleMesh {
public:
  /// Intrinsic construction. `edge_lengths` must list every edge of `faces`
  /// exactly once (in any orientation).
  static TriangleMesh from_intrinsic(int vertex_count, std::vector<Face> faces,
                                     std::span<const std::pair<Edge, double>> edge_lengths);

  /// Embedded construction; edge lengths are the Euclidean chord lengths.
  static TriangleMesh from_positions(std::vector<Eigen::Vector3d> positions,
                                     std::vector<Face> faces);

  TriangleMesh with_chart(FlatChart chart) const;

  int vertex_count() const noexcept { return vertex_count_; }
  int face_count() const noexcept { return static_cast<int>(faces_.size()); }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  int euler_characteristic() const noexcept {
    return vertex_count() - edge_count() + face_count();
  }

  const std::vector<Face>& faces() const noexcept { return faces_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<double>& edge_lengths() const noexcept { return lengths_; }

  /// Index of the edge opposite corner `c` of face `f`.
  int face_edge(int f, int c) const { return face_edges_[f][c]; }
  /// Length of the edge opposite corner `c` of face `f`.
  double opposite_length(int f, int c) const { return lengths_[face_edges_[f][c]]; }
  /// The two faces incident to edge `e` (first one traverses it min->max).
  const std::array<int, 2>& edge_faces(int e) const { return edge_faces_[e]; }
  /// Edge index for a vertex pair, or -1.
  int find_edge(int a, int b) const;

  /// Interior angle at corner `c` of face `f` (from the lengths via atan2).
  double corner_angle(int f, int c) const;
  double face_area(int f) const;
  double total_area() const;

  /// Vertex neighbours in ascending index order.
  const std::vector<int>& neighbors(int v) const { return neighbors_[v]; }
  /// Faces incident to vertex `v` paired with the corner index of `v`.
  const std::vector<std::pair<int, int>>& vertex_corners(int v) const {
    return vertex_corners_[v];
  }

  const std::optional<std::vector<Eigen::Vector3d>>& positions() const noexcept {
    return positions_;
  }
  const std::optional<FlatChart>& chart() const noexcept { return chart_; }

private:
  TriangleMesh() = default;
  void build_topology();
  void validate_metric() const;

  int vertex_count_ = 0;
  std::vector<Face> faces_;
  std::vector<Edge> edges_;
  std::vector<double> lengths_;
  std::vector<std::array<int, 3>> face_edges_;
  std::vector<std::array<int, 2>> edge_faces_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<std::pair<int, int>>> vertex_corners_;
  std::optional<std::vector<Eigen::Vector3d>> positions_;
  std::optional<FlatChart> chart_;
};

/// Area of a triangle with side lengths a, b, c (Kahan's stable Heron form).
double triangle_area(double a, double b, double c);

/// Angle opposite side `a` in a triangle with sides a, b, c.
double opposite_angle(double a, double b, double c);

/// Cotangent of the angle opposite side `a`.
double opposite_cotangent(double a, double b, double c);

/// Lays out a triangle in the plane: first vertex at the origin, second on
/// the positive x axis, third in the upper half plane. `l01`, `l12`, `l20`
/// are the lengths of the three sides.
std::array<Eigen::Vector2d, 3> layout_triangle(double l01, double l12, double l20);

} // namespace tightcert::surface
