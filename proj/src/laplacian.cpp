#include <sstream>

#include "tightcert/spectral.hpp"

namespace tightcert::spectral {

double cotangent_weight(const surface::TriangleMesh& mesh, int e) {
  double w = 0.0;
  for (int f : mesh.edge_faces(e)) {
    for (int c = 0; c < 3; ++c) {
      if (mesh.face_edge(f, c) == e)
        w += 0.5 * surface::opposite_cotangent(mesh.opposite_length(f, c),
                                               mesh.opposite_length(f, (c + 1) % 3),
                                               mesh.opposite_length(f, (c + 2) % 3));
    }
  }
  return w;
}

OperatorPair assemble(const surface::TriangleMesh& mesh) {
  const int nv = mesh.vertex_count();
  const int nf = mesh.face_count();

  std::vector<double> area(nf);
  double mean = 0.0;
  for (int f = 0; f < nf; ++f) {
    area[f] = mesh.face_area(f);
    mean += area[f];
  }
  mean /= nf;
  for (int f = 0; f < nf; ++f) {
    if (!(area[f] > 1e-14 * mean)) {
      std::ostringstream os;
      os << "degenerate triangle: face " << f << " has area " << area[f]
         << " (mean face area " << mean << ")";
      throw DegenerateTriangle(f, os.str());
    }
  }

  std::vector<Eigen::Triplet<double>> s_entries, m_entries;
  s_entries.reserve(static_cast<std::size_t>(nf) * 9);
  m_entries.reserve(static_cast<std::size_t>(nf) * 9);
  OperatorPair ops;
  ops.lumped_mass = Vector::Zero(nv);
  for (int f = 0; f < nf; ++f) {
    const auto& t = mesh.faces()[f];
    const double l[3] = {mesh.opposite_length(f, 0), mesh.opposite_length(f, 1),
                         mesh.opposite_length(f, 2)};
    for (int c = 0; c < 3; ++c) {
      // Edge opposite corner c joins corners c+1 and c+2.
      const double a = l[c], b = l[(c + 1) % 3], d = l[(c + 2) % 3];
      const double w = 0.5 * (b * b + d * d - a * a) / (4.0 * area[f]);
      const int i = t[(c + 1) % 3], j = t[(c + 2) % 3];
      s_entries.emplace_back(i, j, -w);
      s_entries.emplace_back(j, i, -w);
      s_entries.emplace_back(i, i, w);
      s_entries.emplace_back(j, j, w);
      m_entries.emplace_back(i, j, area[f] / 12.0);
      m_entries.emplace_back(j, i, area[f] / 12.0);
      m_entries.emplace_back(t[c], t[c], area[f] / 6.0);
      ops.lumped_mass[t[c]] += area[f] / 3.0;
    }
  }
  ops.stiffness.resize(nv, nv);
  ops.stiffness.setFromTriplets(s_entries.begin(), s_entries.end());
  ops.mass.resize(nv, nv);
  ops.mass.setFromTriplets(m_entries.begin(), m_entries.end());
  return ops;
}

} // namespace tightcert::spectral
