#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/LU>

#include "tightcert/nodal.hpp"

namespace tightcert::nodal {

namespace {

constexpr double pi = std::numbers::pi;

// Zero points keep this fraction of the edge away from either endpoint. Closer
// points produce slivers whose angles are only determined to about
// 1e-16 / fraction from intrinsic lengths.
constexpr double min_edge_fraction = 1e-5;

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

// Neighbours of `v` in cyclic (counterclockwise) order.
std::vector<int> one_ring(const TriangleMesh& mesh, int v) {
  std::map<int, int> next;
  for (const auto& [f, c] : mesh.vertex_corners(v)) {
    const auto& t = mesh.faces()[f];
    next[t[(c + 1) % 3]] = t[(c + 2) % 3];
  }
  std::vector<int> ring;
  if (next.empty())
    return ring;
  const int start = next.begin()->first;
  int cur = start;
  do {
    ring.push_back(cur);
    cur = next.at(cur);
  } while (cur != start && ring.size() <= next.size());
  return ring;
}

int sign_of(double x) { return x > 0.0 ? 1 : -1; }

// Sum of corner angles at refined vertex `v` over faces accepted by `keep`.
template <class Keep>
double angle_sum(const TriangleMesh& mesh, int v, Keep keep) {
  double sum = 0.0;
  for (const auto& [f, c] : mesh.vertex_corners(v))
    if (keep(f))
      sum += mesh.corner_angle(f, c);
  return sum;
}

} // namespace

const char* to_string(NodalErrorKind kind) {
  switch (kind) {
  case NodalErrorKind::size_mismatch: return "size mismatch";
  case NodalErrorKind::not_finite: return "non-finite value";
  case NodalErrorKind::trivial_field: return "trivial field";
  case NodalErrorKind::plateau: return "near-zero plateau";
  case NodalErrorKind::singular_point: return "singular nodal point";
  }
  return "nodal error";
}

bool NodalDecomposition::has_disc_domain() const {
  return std::any_of(domains.begin(), domains.end(),
                     [](const NodalDomain& d) { return d.is_disc(); });
}

bool CourantReport::all_ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const CourantEntry& e) { return e.ok; });
}

NodalDecomposition decompose(const TriangleMesh& mesh, const ScalarField& values, double zero_tol) {
  const int nv = mesh.vertex_count();
  if (values.size() != nv) {
    std::ostringstream os;
    os << "field has " << values.size() << " values for " << nv << " vertices";
    throw NodalError(NodalErrorKind::size_mismatch, -1, os.str());
  }
  if (!(zero_tol >= 0.0 && zero_tol < 1.0))
    throw NodalError(NodalErrorKind::size_mismatch, -1, "zero_tol must be in [0, 1)");
  for (int v = 0; v < nv; ++v)
    if (!std::isfinite(values[v]))
      throw NodalError(NodalErrorKind::not_finite, v,
                       "field value at vertex " + std::to_string(v) + " is not finite");

  const double fmax = values.cwiseAbs().maxCoeff();
  if (!(fmax > 0.0))
    throw NodalError(NodalErrorKind::trivial_field, -1, "field is identically zero");
  if (values.maxCoeff() - values.minCoeff() <= zero_tol * fmax)
    throw NodalError(NodalErrorKind::trivial_field, -1,
                     "field is constant; it has no nodal structure");
  const double eps = zero_tol * fmax;

  NodalDecomposition dec(mesh);
  dec.zero_tol = zero_tol;
  dec.input_vertex_count = nv;
  dec.surface_euler_characteristic = mesh.euler_characteristic();

  // Snap near-zero vertices.
  std::vector<double> g(values.data(), values.data() + nv);
  for (int v = 0; v < nv; ++v) {
    if (std::abs(values[v]) >= eps)
      continue;
    int best = -1;
    for (int w : mesh.neighbors(v))
      if (best < 0 || std::abs(values[w]) > std::abs(values[best]))
        best = w;
    if (best < 0 || std::abs(values[best]) < eps) {
      std::ostringstream os;
      os << "vertex " << v << " and all its neighbours are below the zero tolerance "
         << eps << "; the field has a zero plateau";
      throw NodalError(NodalErrorKind::plateau, v, os.str());
    }
    int changes = 0, first = 0, last = 0;
    for (int w : one_ring(mesh, v)) {
      if (std::abs(values[w]) < eps)
        continue;
      const int s = sign_of(values[w]);
      if (first == 0)
        first = s;
      else if (s != last)
        ++changes;
      last = s;
    }
    if (first != 0 && last != first)
      ++changes;
    if (changes >= 4) {
      std::ostringstream os;
      os << "singular nodal point at vertex " << v << ": the sign changes " << changes
         << " times around it";
      throw NodalError(NodalErrorKind::singular_point, v, os.str());
    }
    g[v] = sign_of(values[best]) * eps;
    if (g[v] == 0.0) // zero_tol == 0
      g[v] = sign_of(values[best]) * std::numeric_limits<double>::min();
    dec.snapped.push_back({v, values[v], g[v], best});
  }

  // Zero points on sign-changing edges.
  const int ne = mesh.edge_count();
  std::vector<int> edge_zero(ne, -1);
  for (int e = 0; e < ne; ++e) {
    const auto [a, b] = mesh.edges()[e];
    if (sign_of(g[a]) == sign_of(g[b]))
      continue;
    edge_zero[e] = nv + static_cast<int>(dec.zero_points.size());
    const double t = std::clamp(g[a] / (g[a] - g[b]), min_edge_fraction, 1.0 - min_edge_fraction);
    dec.zero_points.push_back({e, a, b, t});
  }
  const int total_vertices = nv + static_cast<int>(dec.zero_points.size());

  std::map<surface::Edge, double> lengths;
  const auto put = [&](int a, int b, double l) {
    lengths.emplace(surface::Edge{std::min(a, b), std::max(a, b)}, l);
  };
  for (int e = 0; e < ne; ++e) {
    const auto [a, b] = mesh.edges()[e];
    const double l = mesh.edge_lengths()[e];
    if (edge_zero[e] < 0) {
      put(a, b, l);
    } else {
      const double t = dec.zero_points[edge_zero[e] - nv].t;
      put(a, edge_zero[e], t * l);
      put(edge_zero[e], b, (1.0 - t) * l);
    }
  }

  std::vector<surface::Face> faces;
  std::vector<int> face_sign;
  std::map<int, int> segment_next;
  faces.reserve(mesh.face_count() * 2);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& t = mesh.faces()[f];
    const int s0 = sign_of(g[t[0]]), s1 = sign_of(g[t[1]]), s2 = sign_of(g[t[2]]);
    if (s0 == s1 && s1 == s2) {
      faces.push_back(t);
      face_sign.push_back(s0);
      dec.parent_face.push_back(f);
      continue;
    }
    // Corner whose sign differs from the other two.
    const int c = s1 == s2 ? 0 : (s0 == s2 ? 1 : 2);
    const int v = t[c], a = t[(c + 1) % 3], b = t[(c + 2) % 3];
    const int p = edge_zero[mesh.face_edge(f, (c + 2) % 3)]; // on v-a
    const int q = edge_zero[mesh.face_edge(f, (c + 1) % 3)]; // on v-b
    const auto fraction_from = [&](int zero, int from) {
      const ZeroPoint& z = dec.zero_points[zero - nv];
      return z.first == from ? z.t : 1.0 - z.t;
    };
    const auto pos = surface::layout_triangle(mesh.opposite_length(f, (c + 2) % 3),
                                              mesh.opposite_length(f, c),
                                              mesh.opposite_length(f, (c + 1) % 3));
    const Eigen::Vector2d pp = pos[0] + fraction_from(p, v) * (pos[1] - pos[0]);
    const Eigen::Vector2d pq = pos[0] + fraction_from(q, v) * (pos[2] - pos[0]);
    put(p, q, (pp - pq).norm());
    put(p, b, (pp - pos[2]).norm());

    const int sv = sign_of(g[v]);
    faces.push_back({v, p, q});
    face_sign.push_back(sv);
    faces.push_back({p, a, b});
    face_sign.push_back(-sv);
    faces.push_back({p, b, q});
    face_sign.push_back(-sv);
    for (int k = 0; k < 3; ++k)
      dec.parent_face.push_back(f);
    if (sv > 0)
      segment_next[p] = q;
    else
      segment_next[q] = p;
  }

  const std::vector<std::pair<surface::Edge, double>> edge_list(lengths.begin(), lengths.end());
  dec.refined_mesh = TriangleMesh::from_intrinsic(total_vertices, std::move(faces), edge_list);
  const TriangleMesh& rm = dec.refined_mesh;
  dec.refined_values.assign(total_vertices, 0.0);
  std::copy(g.begin(), g.end(), dec.refined_values.begin());

  // Polylines.
  std::vector<int> polyline_of(total_vertices, -1);
  for (const auto& [start, unused] : segment_next) {
    (void)unused;
    if (polyline_of[start] >= 0)
      continue;
    std::vector<int> cycle;
    int cur = start;
    do {
      polyline_of[cur] = static_cast<int>(dec.dividing_set.size());
      cycle.push_back(cur);
      const auto it = segment_next.find(cur);
      if (it == segment_next.end())
        throw std::logic_error("decompose: open dividing polyline");
      cur = it->second;
    } while (cur != start);
    dec.dividing_set.push_back(std::move(cycle));
  }

  // Domains: same-sign faces joined across shared edges.
  const int nf = rm.face_count();
  UnionFind uf(nf);
  for (int e = 0; e < rm.edge_count(); ++e) {
    const auto& ef = rm.edge_faces(e);
    if (face_sign[ef[0]] == face_sign[ef[1]])
      uf.unite(ef[0], ef[1]);
  }
  dec.face_domain.assign(nf, -1);
  std::vector<int> root_domain(nf, -1);
  for (int f = 0; f < nf; ++f) {
    const int r = uf.find(f);
    if (root_domain[r] < 0) {
      root_domain[r] = static_cast<int>(dec.domains.size());
      dec.domains.emplace_back();
      dec.domains.back().sign = face_sign[f];
    }
    dec.face_domain[f] = root_domain[r];
    NodalDomain& d = dec.domains[root_domain[r]];
    d.faces.push_back(f);
    d.area += rm.face_area(f);
  }

  const int nd = dec.domain_count();
  std::vector<int> vertex_domain(total_vertices, -1);
  for (int f = 0; f < nf; ++f)
    for (int v : rm.faces()[f])
      if (v < nv)
        vertex_domain[v] = dec.face_domain[f];
  std::vector<std::vector<char>> touches_polyline(
      nd, std::vector<char>(dec.dividing_set.size(), 0));
  for (int e = 0; e < rm.edge_count(); ++e) {
    const auto& ef = rm.edge_faces(e);
    const int d0 = dec.face_domain[ef[0]], d1 = dec.face_domain[ef[1]];
    dec.domains[d0].edge_count += 1;
    if (d1 != d0) {
      dec.domains[d1].edge_count += 1;
      const int line = polyline_of[rm.edges()[e].first];
      touches_polyline[d0][line] = 1;
      touches_polyline[d1][line] = 1;
    }
  }
  for (int v = 0; v < total_vertices; ++v) {
    if (v < nv) {
      NodalDomain& d = dec.domains[vertex_domain[v]];
      d.vertex_count += 1;
      const double defect = 2.0 * pi - angle_sum(rm, v, [](int) { return true; });
      d.curvature_positive_part_integral += std::max(0.0, defect);
    } else {
      // A zero point borders exactly two domains.
      std::vector<int> seen;
      for (const auto& [f, c] : rm.vertex_corners(v)) {
        (void)c;
        const int d = dec.face_domain[f];
        if (std::find(seen.begin(), seen.end(), d) == seen.end())
          seen.push_back(d);
      }
      for (int d : seen)
        dec.domains[d].vertex_count += 1;
    }
  }
  for (int d = 0; d < nd; ++d) {
    NodalDomain& dom = dec.domains[d];
    dom.euler_characteristic =
        dom.vertex_count - dom.edge_count + static_cast<int>(dom.faces.size());
    dom.boundary_components = static_cast<int>(
        std::count(touches_polyline[d].begin(), touches_polyline[d].end(), 1));
  }
  return dec;
}

CourantReport courant_check(std::span<const spectral::EigenPair> pairs,
                            std::span<const NodalDecomposition> decompositions,
                            double cluster_gap) {
  if (pairs.empty() || decompositions.size() + 1 != pairs.size())
    throw std::invalid_argument("courant_check: need one decomposition per non-constant pair");
  const std::vector<spectral::EigenPair> list(pairs.begin(), pairs.end());
  const auto clusters = spectral::multiplicity_clusters(list, cluster_gap);
  CourantReport report;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    CourantEntry entry;
    entry.index = static_cast<int>(i);
    entry.lambda = pairs[i].lambda;
    entry.domains = decompositions[i - 1].domain_count();
    for (const auto& [lo, hi] : clusters)
      if (lo <= entry.index && entry.index <= hi)
        entry.bound = hi + 1;
    entry.ok = entry.domains <= entry.bound;
    report.entries.push_back(entry);
  }
  return report;
}

GaussBonnetBalance domain_gauss_bonnet(const NodalDecomposition& dec, int domain) {
  if (domain < 0 || domain >= dec.domain_count())
    throw std::out_of_range("domain_gauss_bonnet: no domain " + std::to_string(domain));
  const TriangleMesh& rm = dec.refined_mesh;
  const auto in_domain = [&](int f) { return dec.face_domain[f] == domain; };
  std::vector<char> visited(rm.vertex_count(), 0);
  GaussBonnetBalance out;
  for (int f : dec.domains[domain].faces) {
    for (int v : rm.faces()[f]) {
      if (visited[v])
        continue;
      visited[v] = 1;
      const double inside = angle_sum(rm, v, in_domain);
      if (v < dec.input_vertex_count)
        out.curvature_integral += 2.0 * pi - inside;
      else
        out.turning_integral += pi - inside;
    }
  }
  out.defect = out.curvature_integral + out.turning_integral -
               2.0 * pi * dec.domains[domain].euler_characteristic;
  return out;
}

std::vector<DiscInequality> disc_domain_inequality(const NodalDecomposition& dec, double lambda) {
  std::vector<DiscInequality> out;
  for (int d = 0; d < dec.domain_count(); ++d) {
    const NodalDomain& dom = dec.domains[d];
    if (!dom.is_disc())
      continue;
    DiscInequality r;
    r.domain = d;
    r.lhs = 4.0 * pi - 2.0 * dom.curvature_positive_part_integral;
    r.rhs = lambda * dom.area;
    r.margin = r.rhs - r.lhs;
    out.push_back(r);
  }
  return out;
}

std::vector<PolylineGeometry> dividing_set_geometry(const NodalDecomposition& dec,
                                                    const TriangleMesh& mesh,
                                                    std::optional<std::span<const double>> log_norm) {
  if (mesh.vertex_count() != dec.input_vertex_count)
    throw std::invalid_argument("dividing_set_geometry: mesh does not match decomposition");
  if (log_norm && static_cast<int>(log_norm->size()) != mesh.vertex_count())
    throw std::invalid_argument("dividing_set_geometry: log_norm size mismatch");
  const TriangleMesh& rm = dec.refined_mesh;
  const int nv = dec.input_vertex_count;
  const auto positive = [&](int f) { return dec.domains[dec.face_domain[f]].sign > 0; };

  std::vector<PolylineGeometry> out;
  for (const auto& line : dec.dividing_set) {
    PolylineGeometry geo;
    const int m = static_cast<int>(line.size());
    std::vector<double> seg(m);
    for (int i = 0; i < m; ++i) {
      seg[i] = rm.edge_lengths()[rm.find_edge(line[i], line[(i + 1) % m])];
      geo.length += seg[i];
    }
    for (int i = 0; i < m; ++i) {
      const double turning = pi - angle_sum(rm, line[i], positive);
      geo.total_turning += turning;
      geo.curvature_samples.push_back(turning / (0.5 * (seg[i] + seg[(i + m - 1) % m])));
    }
    if (log_norm) {
      const auto& u = *log_norm;
      for (int i = 0; i < m; ++i) {
        const int p = line[i], q = line[(i + 1) % m];
        const int f = dec.parent_face[rm.edge_faces(rm.find_edge(p, q))[0]];
        const auto& t = mesh.faces()[f];
        const auto pos = surface::layout_triangle(mesh.opposite_length(f, 2),
                                                  mesh.opposite_length(f, 0),
                                                  mesh.opposite_length(f, 1));
        const auto place = [&](int z) {
          const ZeroPoint& zp = dec.zero_points[z - nv];
          Eigen::Vector2d a, b;
          for (int c = 0; c < 3; ++c) {
            if (t[c] == zp.first)
              a = pos[c];
            if (t[c] == zp.second)
              b = pos[c];
          }
          return Eigen::Vector2d((1.0 - zp.t) * a + zp.t * b);
        };
        Eigen::Matrix2d jac;
        jac.row(0) = (pos[1] - pos[0]).transpose();
        jac.row(1) = (pos[2] - pos[0]).transpose();
        const Eigen::Vector2d du(u[t[1]] - u[t[0]], u[t[2]] - u[t[0]]);
        const Eigen::Vector2d grad = jac.inverse() * du;
        const Eigen::Vector2d d = (place(q) - place(p)).normalized();
        const Eigen::Vector2d nu(d.y(), -d.x());
        geo.normal_derivative_samples.push_back(grad.dot(nu));
      }
    }
    out.push_back(std::move(geo));
  }
  return out;
}

} // namespace tightcert::nodal
