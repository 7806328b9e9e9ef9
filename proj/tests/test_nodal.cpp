#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tightcert/nodal.hpp"
#include "tightcert/spectral.hpp"
#include "tightcert/surface.hpp"

using namespace tightcert;
using nodal::NodalError;
using nodal::NodalErrorKind;

namespace {

const double two_pi = 2.0 * test::pi;

NodalErrorKind error_kind(const surface::TriangleMesh& mesh, const Eigen::VectorXd& f) {
  try {
    nodal::decompose(mesh, f);
  } catch (const NodalError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return NodalErrorKind::size_mismatch;
}

void expect_topology_identities(const nodal::NodalDecomposition& dec) {
  int chi = 0;
  double area = 0.0;
  for (const auto& d : dec.domains) {
    chi += d.euler_characteristic;
    area += d.area;
  }
  EXPECT_EQ(chi, dec.surface_euler_characteristic);
  EXPECT_NEAR(area, dec.refined_mesh.total_area(), 1e-9 * area);
  // Every refined face belongs to exactly one domain of matching sign.
  for (int f = 0; f < dec.refined_mesh.face_count(); ++f) {
    const int d = dec.face_domain[f];
    ASSERT_GE(d, 0);
    for (int v : dec.refined_mesh.faces()[f])
      EXPECT_GE(dec.refined_values[v] * dec.domains[d].sign, 0.0);
  }
}

// Smooth random trigonometric polynomial on the 2 pi torus.
Eigen::VectorXd random_torus_field(const surface::TriangleMesh& mesh, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double c[3][3][2];
  for (auto& a : c)
    for (auto& b : a)
      for (double& x : b)
        x = g(rng);
  return test::on_chart(mesh, [&](double u, double v) {
    double s = 0.3 * c[0][0][0];
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        if (p + q > 0)
          s += c[p][q][0] * std::cos(p * u + q * v) + c[p][q][1] * std::sin(p * u - q * v);
    return s;
  });
}

} // namespace

TEST(Decompose, TorusCosXGivesTwoAnnuli) {
  // 30 cells: the zeros x = pi/2, 3pi/2 fall mid-edge.
  const auto mesh = surface::build_flat_torus(30, 30, two_pi, two_pi);
  const auto dec = nodal::decompose(mesh, test::on_chart(mesh, [](double u, double) {
                                      return std::cos(u);
                                    }));
  EXPECT_EQ(dec.domain_count(), 2);
  EXPECT_FALSE(dec.has_disc_domain());
  for (const auto& d : dec.domains) {
    EXPECT_TRUE(d.is_annulus());
    EXPECT_EQ(d.boundary_components, 2);
    EXPECT_NEAR(d.area, two_pi * test::pi, 1e-9);
  }
  ASSERT_EQ(dec.dividing_set.size(), 2u);
  EXPECT_TRUE(dec.snapped.empty());
  expect_topology_identities(dec);

  for (const auto& g : nodal::dividing_set_geometry(dec, mesh)) {
    EXPECT_NEAR(g.length, two_pi, 1e-9);
    EXPECT_NEAR(g.total_turning, 0.0, 1e-9);
  }
  for (int d = 0; d < 2; ++d)
    EXPECT_LT(std::abs(nodal::domain_gauss_bonnet(dec, d).defect), 1e-9);
}

TEST(Decompose, PositiveSideIsOnTheLeft) {
  const auto mesh = surface::build_flat_torus(30, 30, two_pi, two_pi);
  const auto dec = nodal::decompose(mesh, test::on_chart(mesh, [](double u, double) {
                                      return std::cos(u);
                                    }));
  // Reconstruct chart coordinates of the inserted zero points.
  const auto& uv = mesh.chart()->uv;
  const auto point = [&](int v) -> Eigen::Vector2d {
    if (v < dec.input_vertex_count)
      return uv[v];
    const auto& z = dec.zero_points[v - dec.input_vertex_count];
    Eigen::Vector2d d = uv[z.second] - uv[z.first];
    for (int k = 0; k < 2; ++k)
      d[k] -= two_pi * std::round(d[k] / two_pi);
    return uv[z.first] + z.t * d;
  };
  for (const auto& cycle : dec.dividing_set) {
    const double x = point(cycle[0]).x();
    // cos > 0 left of x = pi/2 means travel along +v there, and along -v at 3pi/2.
    const double expected = std::abs(x - test::pi / 2) < 0.1 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      double dv = point(cycle[(i + 1) % cycle.size()]).y() - point(cycle[i]).y();
      dv -= two_pi * std::round(dv / two_pi);
      EXPECT_GT(dv * expected, 0.0);
    }
  }
}

TEST(Decompose, SphereEquatorGivesTwoDiscs) {
  const auto mesh = surface::build_icosphere(4);
  const auto dec = nodal::decompose(mesh, test::on_positions(mesh, [](double x, double y, double z) {
                                      return z + 0.01 * x + 0.02 * y;
                                    }));
  ASSERT_EQ(dec.domain_count(), 2);
  for (int d = 0; d < 2; ++d) {
    EXPECT_TRUE(dec.domains[d].is_disc());
    EXPECT_EQ(dec.domains[d].boundary_components, 1);
    EXPECT_LT(std::abs(nodal::domain_gauss_bonnet(dec, d).defect), 1e-8);
  }
  EXPECT_TRUE(dec.dividing_set_connected());
  expect_topology_identities(dec);
  const auto g = nodal::dividing_set_geometry(dec, mesh);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_NEAR(g[0].length, two_pi, 0.01 * two_pi);
}

TEST(Decompose, SingleSignedFieldHasOneDomain) {
  const auto mesh = surface::build_icosphere(2);
  const auto dec =
      nodal::decompose(mesh, test::on_positions(mesh, [](double, double, double z) { return 2 + z; }));
  EXPECT_EQ(dec.domain_count(), 1);
  EXPECT_EQ(dec.domains[0].euler_characteristic, 2);
  EXPECT_TRUE(dec.dividing_set_empty());
}

TEST(Decompose, SnapsVertexZerosToNeighbourSign) {
  // 32 cells: x = pi/2 lies on a vertex column.
  const auto mesh = surface::build_flat_torus(32, 32, two_pi, two_pi);
  const auto f = test::on_chart(mesh, [](double u, double) { return std::cos(u); });
  const auto dec = nodal::decompose(mesh, f);
  EXPECT_EQ(dec.snapped.size(), 64u);
  for (const auto& s : dec.snapped) {
    EXPECT_LT(std::abs(s.original_value), 1e-9);
    EXPECT_GT(s.snapped_value * f[s.reference_neighbor], 0.0);
    for (int n : mesh.neighbors(s.vertex))
      EXPECT_LE(std::abs(f[n]), std::abs(f[s.reference_neighbor]) + 1e-15);
  }
  EXPECT_EQ(dec.domain_count(), 2);
  expect_topology_identities(dec);
}

TEST(Decompose, ZeroPointsStayInsideEdges) {
  const auto mesh = surface::build_icosphere(3);
  const auto dec = nodal::decompose(mesh, test::on_positions(mesh, [](double x, double y, double z) {
                                      return x * y + 0.3 * z;
                                    }));
  for (const auto& z : dec.zero_points) {
    EXPECT_GE(z.t, 1e-5);
    EXPECT_LE(z.t, 1 - 1e-5);
    EXPECT_LT(z.first, z.second);
  }
  expect_topology_identities(dec);
}

TEST(Decompose, Errors) {
  const auto mesh = surface::build_flat_torus(16, 16, two_pi, two_pi);
  Eigen::VectorXd f = test::on_chart(mesh, [](double u, double) { return std::cos(u); });
  EXPECT_EQ(error_kind(mesh, Eigen::VectorXd::Zero(mesh.vertex_count())),
            NodalErrorKind::trivial_field);
  EXPECT_EQ(error_kind(mesh, Eigen::VectorXd::Constant(mesh.vertex_count(), 2.0)),
            NodalErrorKind::trivial_field);
  EXPECT_EQ(error_kind(mesh, f.head(10)), NodalErrorKind::size_mismatch);
  Eigen::VectorXd g = f;
  g[3] = std::nan("");
  EXPECT_EQ(error_kind(mesh, g), NodalErrorKind::not_finite);
  // A flat zero band several cells wide.
  const Eigen::VectorXd plateau = test::on_chart(mesh, [](double u, double) {
    return std::abs(u - test::pi) < 1.0 ? 0.0 : u - test::pi;
  });
  EXPECT_EQ(error_kind(mesh, plateau), NodalErrorKind::plateau);
  // cos u - cos v vanishes at the saddle (0, 0) where the nodal lines cross.
  const Eigen::VectorXd saddle =
      test::on_chart(mesh, [](double u, double v) { return std::cos(u) - std::cos(v); });
  EXPECT_EQ(error_kind(mesh, saddle), NodalErrorKind::singular_point);
}

TEST(DecomposeProperty, EulerCharacteristicsAddUp) {
  const auto torus = surface::build_flat_torus(40, 40, two_pi, two_pi);
  const auto sphere = surface::build_icosphere(3);
  for (unsigned seed = 1; seed <= 12; ++seed) {
    const auto dec = nodal::decompose(torus, random_torus_field(torus, seed));
    expect_topology_identities(dec);
    for (int d = 0; d < dec.domain_count(); ++d)
      EXPECT_LT(std::abs(nodal::domain_gauss_bonnet(dec, d).defect), 1e-8) << seed;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const double a = g(rng), b = g(rng), c = g(rng), d = g(rng), e = g(rng);
    const auto sdec = nodal::decompose(sphere, test::on_positions(sphere, [&](double x, double y,
                                                                           double z) {
      return a * x + b * y * z + c * (x * x - y * y) + d * z + 0.2 * e;
    }));
    expect_topology_identities(sdec);
    for (int k = 0; k < sdec.domain_count(); ++k)
      EXPECT_LT(std::abs(nodal::domain_gauss_bonnet(sdec, k).defect), 1e-8) << seed;
  }
}

TEST(DecomposeProperty, NegationSwapsSigns) {
  const auto mesh = surface::build_flat_torus(24, 24, two_pi, two_pi);
  const auto f = random_torus_field(mesh, 99);
  const auto a = nodal::decompose(mesh, f);
  const auto b = nodal::decompose(mesh, -f);
  ASSERT_EQ(a.domain_count(), b.domain_count());
  std::vector<std::pair<int, int>> sa, sb;
  for (int i = 0; i < a.domain_count(); ++i) {
    sa.emplace_back(a.domains[i].sign, a.domains[i].euler_characteristic);
    sb.emplace_back(-b.domains[i].sign, b.domains[i].euler_characteristic);
  }
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  EXPECT_EQ(sa, sb);
}

TEST(Courant, FirstEigenfunctionsOnTorusAndSphere) {
  for (const auto& mesh : {surface::build_flat_torus(48, 48, two_pi, two_pi),
                           surface::build_icosphere(4)}) {
    const auto ops = spectral::assemble(mesh);
    const auto pairs = spectral::solve_lowest(ops, 7);
    std::vector<nodal::NodalDecomposition> decs;
    for (int i = 1; i < 7; ++i)
      decs.push_back(nodal::decompose(mesh, pairs[i].f));
    const auto report = nodal::courant_check(pairs, decs);
    ASSERT_EQ(report.entries.size(), 6u);
    EXPECT_TRUE(report.all_ok());
    for (const auto& d : decs)
      expect_topology_identities(d);
  }
}

TEST(Courant, BoundUsesClusterEnd) {
  const auto mesh = surface::build_icosphere(3);
  const auto ops = spectral::assemble(mesh);
  const auto pairs = spectral::solve_lowest(ops, 4);
  std::vector<nodal::NodalDecomposition> decs;
  for (int i = 1; i < 4; ++i)
    decs.push_back(nodal::decompose(mesh, pairs[i].f));
  for (const auto& e : nodal::courant_check(pairs, decs).entries) {
    EXPECT_EQ(e.bound, 4);
    EXPECT_EQ(e.domains, 2);
  }
}

TEST(DiscInequality, SphereHemispheres) {
  const auto mesh = surface::build_icosphere(4);
  const auto ops = spectral::assemble(mesh);
  const auto pairs = spectral::solve_lowest(ops, 2);
  const auto dec = nodal::decompose(mesh, pairs[1].f);
  const auto rows = nodal::disc_domain_inequality(dec, pairs[1].lambda);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.margin, r.rhs - r.lhs, 1e-12);
    EXPECT_GE(r.margin, -0.05 * 4 * test::pi);
    // Hemisphere: K+ integral ~ 2 pi, area ~ 2 pi.
    EXPECT_NEAR(r.lhs, 0.0, 0.1);
    EXPECT_NEAR(r.rhs, 4 * test::pi, 0.1);
  }
}

TEST(DecomposeProperty, PolylinesSeparateOppositeSigns) {
  const auto mesh = surface::build_flat_torus(40, 40, two_pi, two_pi);
  for (unsigned seed : {3u, 5u, 8u}) {
    const auto dec = nodal::decompose(mesh, random_torus_field(mesh, seed));
    const auto& rm = dec.refined_mesh;
    std::vector<int> owner(rm.vertex_count(), -1);
    for (std::size_t c = 0; c < dec.dividing_set.size(); ++c) {
      const auto& cycle = dec.dividing_set[c];
      ASSERT_GE(cycle.size(), 3u);
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        EXPECT_EQ(owner[cycle[i]], -1) << "vertex shared between or within polylines";
        owner[cycle[i]] = static_cast<int>(c);
        const int e = rm.find_edge(cycle[i], cycle[(i + 1) % cycle.size()]);
        ASSERT_GE(e, 0);
        const auto [f0, f1] = rm.edge_faces(e);
        EXPECT_EQ(dec.domains[dec.face_domain[f0]].sign, -dec.domains[dec.face_domain[f1]].sign);
      }
    }
  }
}

TEST(DecomposeProperty, DomainCountsSurviveRefinement) {
  const auto coarse = surface::build_flat_torus(30, 30, two_pi, two_pi);
  const auto fine = surface::build_flat_torus(60, 60, two_pi, two_pi);
  const auto g = [](double u, double v) { return std::cos(u) + 0.5 * std::sin(2 * v) + 0.1; };
  const auto a = nodal::decompose(coarse, test::on_chart(coarse, g));
  const auto b = nodal::decompose(fine, test::on_chart(fine, g));
  EXPECT_EQ(a.domain_count(), b.domain_count());
  const auto sa = surface::build_icosphere(3), sb = surface::build_icosphere(4);
  const auto h = [](double x, double y, double z) { return x * x - y * y + 0.2 * z; };
  EXPECT_EQ(nodal::decompose(sa, test::on_positions(sa, h)).domain_count(),
            nodal::decompose(sb, test::on_positions(sb, h)).domain_count());
}

TEST(Decompose, EmptyDividingSetOnGenus2) {
  const auto mesh = surface::build_hyperbolic_genus2(0);
  Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(mesh.vertex_count(), 1.0, 2.0);
  const auto dec = nodal::decompose(mesh, f);
  ASSERT_EQ(dec.domain_count(), 1);
  EXPECT_EQ(dec.domains[0].euler_characteristic, -2);
  EXPECT_TRUE(dec.dividing_set_empty());
  EXPECT_LT(std::abs(nodal::domain_gauss_bonnet(dec, 0).defect), 1e-9);
}

TEST(DiscInequality, EmptyWithoutDiscs) {
  const auto mesh = surface::build_flat_torus(30, 30, two_pi, two_pi);
  const auto dec = nodal::decompose(mesh, test::on_chart(mesh, [](double u, double) {
                                      return std::cos(u);
                                    }));
  EXPECT_TRUE(nodal::disc_domain_inequality(dec, 1.0).empty());
}

TEST(DividingGeometry, UnitNormHasNoNormalDerivative) {
  const auto mesh = surface::build_flat_torus(30, 30, two_pi, two_pi);
  const auto dec = nodal::decompose(mesh, test::on_chart(mesh, [](double u, double) {
                                      return std::cos(u);
                                    }));
  const std::vector<double> zero(mesh.vertex_count(), 0.0);
  for (const auto& g : nodal::dividing_set_geometry(dec, mesh, std::span<const double>(zero))) {
    ASSERT_FALSE(g.normal_derivative_samples.empty());
    for (double s : g.normal_derivative_samples)
      EXPECT_EQ(s, 0.0);
  }
  // ln|alpha| = u has normal derivative +-1 across the vertical lines.
  const auto u = test::on_chart(mesh, [](double x, double) { return x; });
  std::vector<double> lu(u.data(), u.data() + u.size());
  for (const auto& g : nodal::dividing_set_geometry(dec, mesh, std::span<const double>(lu)))
    for (double s : g.normal_derivative_samples)
      EXPECT_NEAR(std::abs(s), 1.0, 1e-9);
}
