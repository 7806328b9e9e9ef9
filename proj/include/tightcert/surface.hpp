#pragma once

#include <filesystem>
#include <vector>

#include "tightcert/triangle_mesh.hpp"

namespace tightcert::surface {

/// Periodic nx-by-ny grid on [0, lx) x [0, ly); every cell is split along
/// its (i, j)-(i+1, j+1) diagonal. Carries a FlatChart for plotting.
TriangleMesh build_flat_torus(int nx, int ny, double lx, double ly);

/// Subdivided icosahedron projected to the unit sphere.
TriangleMesh build_icosphere(int subdivisions);

/// Closed hyperbolic genus-2 surface from the regular octagon with interior
/// angles pi/4 and side pairing a b a^-1 b^-1 c d c^-1 d^-1. Each of the
/// eight centre-corner sectors is split by repeated hyperbolic midpoint
/// subdivision (2^(refinement + 4) segments per sector edge), then the
/// boundary is identified. Intrinsic only; edge lengths are hyperbolic
/// geodesic distances.
TriangleMesh build_hyperbolic_genus2(int refinement);

/// Side length of the regular hyperbolic octagon with angles pi/4.
double octagon_side_length();
/// Circumradius of the same octagon.
double octagon_circumradius();

// Mesh files. ".off" is embedded OFF; ".ioff" is the intrinsic format
// documented in docs/ioff.md.
TriangleMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

TriangleMesh read_ioff(std::istream& in);
void write_ioff(const TriangleMesh& mesh, std::ostream& out);
TriangleMesh read_off(std::istream& in);
void write_off(const TriangleMesh& mesh, std::ostream& out);

struct CurvatureField {
  std::vector<double> vertex_defect;       // radians
  std::vector<double> vertex_lumped_area;  // one third of incident face area
  std::vector<double> pointwise_curvature; // defect / lumped area

  double total_defect() const;
};

/// Angle-defect curvature with barycentric (lumped) vertex areas.
CurvatureField discrete_curvature(const TriangleMesh& mesh);

struct CurvatureSignCheck {
  bool nonpositive = false;
  double max_curvature = 0.0;
  int worst_vertex = -1;
};

/// True iff every pointwise curvature is <= tol.
CurvatureSignCheck curvature_nonpositive(const TriangleMesh& mesh, double tol);
CurvatureSignCheck curvature_nonpositive(const CurvatureField& curvature, double tol);

} // namespace tightcert::surface
