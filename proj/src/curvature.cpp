#include <numbers>

#include "tightcert/surface.hpp"

namespace tightcert::surface {

double CurvatureField::total_defect() const {
  double sum = 0.0;
  for (double d : vertex_defect)
    sum += d;
  return sum;
}

CurvatureField discrete_curvature(const TriangleMesh& mesh) {
  const int nv = mesh.vertex_count();
  CurvatureField k;
  k.vertex_defect.assign(nv, 2.0 * std::numbers::pi);
  k.vertex_lumped_area.assign(nv, 0.0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const double third = mesh.face_area(f) / 3.0;
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.faces()[f][c];
      k.vertex_defect[v] -= mesh.corner_angle(f, c);
      k.vertex_lumped_area[v] += third;
    }
  }
  k.pointwise_curvature.resize(nv);
  for (int v = 0; v < nv; ++v)
    k.pointwise_curvature[v] = k.vertex_defect[v] / k.vertex_lumped_area[v];
  return k;
}

CurvatureSignCheck curvature_nonpositive(const CurvatureField& curvature, double tol) {
  CurvatureSignCheck out;
  const auto& kk = curvature.pointwise_curvature;
  for (int v = 0; v < static_cast<int>(kk.size()); ++v) {
    if (out.worst_vertex < 0 || kk[v] > out.max_curvature) {
      out.max_curvature = kk[v];
      out.worst_vertex = v;
    }
  }
  out.nonpositive = out.max_curvature <= tol;
  return out;
}

CurvatureSignCheck curvature_nonpositive(const TriangleMesh& mesh, double tol) {
  return curvature_nonpositive(discrete_curvature(mesh), tol);
}

} // namespace tightcert::surface
