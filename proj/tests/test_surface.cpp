#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "support.hpp"
#include "tightcert/surface.hpp"

using namespace tightcert;
using surface::MeshError;
using surface::MeshErrorKind;
using surface::TriangleMesh;

namespace {

const std::filesystem::path data_dir = TIGHTCERT_TEST_DATA;

double gauss_bonnet_error(const TriangleMesh& mesh) {
  return surface::discrete_curvature(mesh).total_defect() -
         2.0 * test::pi * mesh.euler_characteristic();
}

MeshErrorKind load_error_kind(const std::string& text, bool intrinsic) {
  std::istringstream in(text);
  try {
    if (intrinsic)
      surface::read_ioff(in);
    else
      surface::read_off(in);
  } catch (const MeshError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return MeshErrorKind::invalid_parameter;
}

} // namespace

TEST(FlatTorus, CountsAndArea) {
  const auto mesh = surface::build_flat_torus(7, 5, 3.0, 2.0);
  EXPECT_EQ(mesh.vertex_count(), 35);
  EXPECT_EQ(mesh.face_count(), 70);
  EXPECT_EQ(mesh.edge_count(), 105);
  EXPECT_EQ(mesh.euler_characteristic(), 0);
  EXPECT_NEAR(mesh.total_area(), 6.0, 1e-12);
  ASSERT_TRUE(mesh.chart().has_value());
  EXPECT_FALSE(mesh.positions().has_value());
}

TEST(FlatTorus, CurvatureVanishes) {
  const auto k = surface::discrete_curvature(surface::build_flat_torus(9, 4, 10.0, 1.0));
  for (double d : k.vertex_defect)
    EXPECT_NEAR(d, 0.0, 1e-12);
}

TEST(FlatTorus, RejectsBadParameters) {
  EXPECT_THROW(surface::build_flat_torus(2, 5, 1.0, 1.0), MeshError);
  EXPECT_THROW(surface::build_flat_torus(5, 5, -1.0, 1.0), MeshError);
}

TEST(Icosphere, Counts) {
  for (int s = 0; s <= 4; ++s) {
    const auto mesh = surface::build_icosphere(s);
    const int faces = 20 * (1 << (2 * s));
    EXPECT_EQ(mesh.face_count(), faces);
    EXPECT_EQ(mesh.vertex_count(), faces / 2 + 2);
    EXPECT_EQ(mesh.euler_characteristic(), 2);
  }
}

TEST(Icosphere, AreaConvergesToUnitSphere) {
  double previous = 1.0;
  for (int s = 2; s <= 5; ++s) {
    const double err = std::abs(surface::build_icosphere(s).total_area() - 4.0 * test::pi);
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous / (4.0 * test::pi), 2e-3);
}

TEST(HyperbolicGenus2, OctagonClosedForms) {
  // Regular hyperbolic n-gon with interior angle a: cosh(s / 2) = cos(pi / n) / sin(a / 2),
  // cosh(R) = cot(pi / n) cot(a / 2).
  const double c = std::cos(test::pi / 8.0) / std::sin(test::pi / 8.0);
  EXPECT_NEAR(surface::octagon_side_length(), 2.0 * std::acosh(c), 1e-12);
  EXPECT_NEAR(surface::octagon_circumradius(), std::acosh(c * c), 1e-12);
}

TEST(HyperbolicGenus2, TopologyAndCurvature) {
  const auto mesh = surface::build_hyperbolic_genus2(1);
  EXPECT_EQ(mesh.euler_characteristic(), -2);
  EXPECT_FALSE(mesh.positions().has_value());
  EXPECT_FALSE(mesh.chart().has_value());
  EXPECT_TRUE(surface::curvature_nonpositive(mesh, 0.0).nonpositive);
}

TEST(HyperbolicGenus2, AreaApproachesFourPi) {
  double previous = 1e9;
  for (int r = 0; r <= 3; ++r) {
    const double err = std::abs(surface::build_hyperbolic_genus2(r).total_area() - 4.0 * test::pi);
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous / (4.0 * test::pi), 0.01);
}

TEST(GaussBonnet, EveryBuilder) {
  std::vector<TriangleMesh> meshes;
  meshes.push_back(surface::build_flat_torus(3, 3, 1.0, 1.0));
  meshes.push_back(surface::build_flat_torus(40, 4, 10.0, 1.0));
  for (int s = 0; s <= 4; ++s)
    meshes.push_back(surface::build_icosphere(s));
  for (int r = 0; r <= 2; ++r)
    meshes.push_back(surface::build_hyperbolic_genus2(r));
  for (const auto& m : meshes)
    EXPECT_LT(std::abs(gauss_bonnet_error(m)), 1e-9 * (1 + std::abs(m.euler_characteristic())));
}

TEST(GaussBonnet, LoadedMeshes) {
  for (const char* name : {"octahedron.off", "torus_of_revolution.off", "tetrahedron.ioff"}) {
    const auto m = surface::load_mesh(data_dir / name);
    EXPECT_LT(std::abs(gauss_bonnet_error(m)), 1e-9 * (1 + std::abs(m.euler_characteristic())))
        << name;
  }
}

TEST(Curvature, RegularTetrahedron) {
  const auto mesh = surface::load_mesh(data_dir / "tetrahedron.ioff");
  const auto k = surface::discrete_curvature(mesh);
  const double face_area = std::sqrt(3.0) / 4.0;
  for (int v = 0; v < 4; ++v) {
    EXPECT_NEAR(k.vertex_defect[v], test::pi, 1e-12);
    EXPECT_NEAR(k.vertex_lumped_area[v], face_area, 1e-12);
    EXPECT_NEAR(k.pointwise_curvature[v], test::pi / face_area, 1e-10);
  }
  for (int f = 0; f < 4; ++f)
    for (int c = 0; c < 3; ++c)
      EXPECT_NEAR(mesh.corner_angle(f, c), test::pi / 3.0, 1e-14);
}

TEST(Curvature, ScalesInverselyWithArea) {
  const auto base = surface::load_mesh(data_dir / "torus_of_revolution.off");
  std::vector<std::pair<surface::Edge, double>> scaled;
  for (int e = 0; e < base.edge_count(); ++e)
    scaled.emplace_back(base.edges()[e], 3.0 * base.edge_lengths()[e]);
  const auto big = TriangleMesh::from_intrinsic(base.vertex_count(), base.faces(), scaled);
  EXPECT_NEAR(big.total_area(), 9.0 * base.total_area(), 1e-9);
  const auto k0 = surface::discrete_curvature(base), k1 = surface::discrete_curvature(big);
  for (int v = 0; v < base.vertex_count(); ++v) {
    EXPECT_NEAR(k1.vertex_defect[v], k0.vertex_defect[v], 1e-12);
    EXPECT_NEAR(9.0 * k1.pointwise_curvature[v], k0.pointwise_curvature[v], 1e-9);
  }
}

TEST(Curvature, TorusOfRevolutionChangesSign) {
  // Outer equator K > 0, inner equator K < 0.
  const auto mesh = surface::load_mesh(data_dir / "torus_of_revolution.off");
  const auto k = surface::discrete_curvature(mesh);
  const auto& p = *mesh.positions();
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const double r = std::hypot(p[v].x(), p[v].y());
    if (std::abs(p[v].z()) < 1e-9) {
      EXPECT_EQ(k.pointwise_curvature[v] > 0.0, r > 2.0) << "vertex " << v;
    }
  }
  EXPECT_FALSE(surface::curvature_nonpositive(k, 1e-8).nonpositive);
}

TEST(TriangleMeshProperty, AnglesSumToPi) {
  for (const auto& mesh : {surface::build_icosphere(3), surface::build_hyperbolic_genus2(1),
                           surface::load_mesh(data_dir / "torus_of_revolution.off")}) {
    for (int f = 0; f < mesh.face_count(); ++f)
      EXPECT_NEAR(mesh.corner_angle(f, 0) + mesh.corner_angle(f, 1) + mesh.corner_angle(f, 2),
                  test::pi, 1e-12);
  }
}

TEST(TriangleMeshProperty, RigidMotionLeavesLengthsUnchanged) {
  const auto mesh = surface::load_mesh(data_dir / "torus_of_revolution.off");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  const Eigen::Quaterniond q = Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized();
  const Eigen::Vector3d shift(n(rng), n(rng), n(rng));
  std::vector<Eigen::Vector3d> moved;
  for (const auto& p : *mesh.positions())
    moved.push_back(q * p + shift);
  const auto other = TriangleMesh::from_positions(moved, mesh.faces());
  for (int e = 0; e < mesh.edge_count(); ++e)
    EXPECT_NEAR(other.edge_lengths()[e], mesh.edge_lengths()[e], 1e-12);
}

TEST(TriangleHelpers, KahanAreaAndLayout) {
  EXPECT_NEAR(surface::triangle_area(3, 4, 5), 6.0, 1e-14);
  EXPECT_NEAR(surface::opposite_angle(5, 3, 4), test::pi / 2.0, 1e-15);
  EXPECT_NEAR(surface::opposite_cotangent(5, 3, 4), 0.0, 1e-15);
  // Needle: Heron in the naive form loses all digits here.
  EXPECT_NEAR(surface::triangle_area(1.0, 1.0, 1e-9), 0.5e-9, 1e-22);
  const auto p = surface::layout_triangle(3, 5, 4);
  EXPECT_NEAR((p[1] - p[0]).norm(), 3, 1e-14);
  EXPECT_NEAR((p[2] - p[1]).norm(), 5, 1e-14);
  EXPECT_NEAR((p[0] - p[2]).norm(), 4, 1e-14);
  EXPECT_GT(p[2].y(), 0.0);
}

TEST(MeshIO, IoffRoundTripIsExact) {
  const auto mesh = surface::build_hyperbolic_genus2(0);
  std::stringstream s;
  surface::write_ioff(mesh, s);
  const auto back = surface::read_ioff(s);
  ASSERT_EQ(back.edge_count(), mesh.edge_count());
  EXPECT_EQ(back.faces(), mesh.faces());
  for (int e = 0; e < mesh.edge_count(); ++e)
    EXPECT_EQ(back.edge_lengths()[e], mesh.edge_lengths()[e]);
}

TEST(MeshIO, OffRoundTripAndPositions) {
  const auto mesh = surface::build_icosphere(1);
  std::stringstream s;
  surface::write_off(mesh, s);
  const auto back = surface::read_off(s);
  EXPECT_EQ(back.faces(), mesh.faces());
  EXPECT_EQ(*back.positions(), *mesh.positions());
  std::stringstream t;
  EXPECT_THROW(surface::write_off(surface::build_hyperbolic_genus2(0), t), MeshError);
}

TEST(MeshIO, ErrorKinds) {
  EXPECT_EQ(load_error_kind("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n", false),
            MeshErrorKind::open_surface);
  EXPECT_EQ(load_error_kind("OFF\n3 1 0\n0 0 0\n1 0 0\n", false), MeshErrorKind::parse);
  EXPECT_EQ(load_error_kind("OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 3 1\n"
                            "3 0 2 3\n3 1 3 7\n",
                            false),
            MeshErrorKind::bad_index);
  // Tetrahedron with one face flipped.
  EXPECT_EQ(load_error_kind("OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 3 1\n"
                            "3 0 2 3\n3 1 2 3\n",
                            false),
            MeshErrorKind::inconsistent_orientation);
  EXPECT_EQ(load_error_kind("IOFF\n4 4 6\n0 1 2\n0 3 1\n0 2 3\n1 3 2\n0 1 1\n0 2 1\n0 3 1\n"
                            "1 2 1\n1 3 1\n0 1 2\n",
                            true),
            MeshErrorKind::length_mismatch);
  EXPECT_EQ(load_error_kind("NOFF\n", true), MeshErrorKind::parse);
}

TEST(MeshIO, LoadedFileErrors) {
  try {
    surface::load_mesh(data_dir / "bad_lengths.ioff");
    FAIL();
  } catch (const MeshError& e) {
    EXPECT_EQ(e.kind(), MeshErrorKind::triangle_inequality);
  }
  try {
    surface::load_mesh(data_dir / "open_square.off");
    FAIL();
  } catch (const MeshError& e) {
    EXPECT_EQ(e.kind(), MeshErrorKind::open_surface);
  }
  EXPECT_THROW(surface::load_mesh(data_dir / "missing.off"), MeshError);
  EXPECT_THROW(surface::load_mesh(data_dir / "octahedron.obj"), MeshError);
}

TEST(MeshIO, ParseErrorsCarryLineNumbers) {
  std::istringstream in("IOFF\n# comment\n4 4 6\n0 1 2\n0 3 x\n");
  try {
    surface::read_ioff(in);
    FAIL();
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(FlatTorus, SmallGridCounts) {
  const auto mesh = surface::build_flat_torus(4, 4, 2 * test::pi, 2 * test::pi);
  EXPECT_EQ(mesh.vertex_count(), 16);
  EXPECT_EQ(mesh.edge_count(), 48);
  EXPECT_EQ(mesh.face_count(), 32);
  EXPECT_NEAR(surface::build_flat_torus(64, 64, 10.0, 1.0).total_area(), 10.0, 1e-12);
}

TEST(Icosphere, IcosahedronDefects) {
  const auto mesh = surface::build_icosphere(0);
  EXPECT_EQ(mesh.vertex_count(), 12);
  EXPECT_EQ(mesh.edge_count(), 30);
  for (double d : surface::discrete_curvature(mesh).vertex_defect)
    EXPECT_NEAR(d, test::pi / 3.0, 1e-12);
}

TEST(Curvature, SignChecksOnBuilders) {
  EXPECT_TRUE(surface::curvature_nonpositive(surface::build_flat_torus(8, 8, 1, 1), 1e-8).nonpositive);
  const auto sphere = surface::curvature_nonpositive(surface::build_icosphere(4), 1e-8);
  EXPECT_FALSE(sphere.nonpositive);
  // Largest at the twelve valence-5 vertices.
  EXPECT_NEAR(sphere.max_curvature, 1.0, 0.2);
  const auto g2 = surface::build_hyperbolic_genus2(2);
  const auto k = surface::discrete_curvature(g2);
  double kmax = 0.0;
  for (double x : k.pointwise_curvature)
    kmax = std::max(kmax, std::abs(x));
  EXPECT_TRUE(surface::curvature_nonpositive(k, 1e-2 * kmax).nonpositive);
}

TEST(Builders, BitwiseDeterministic) {
  const auto a = surface::build_hyperbolic_genus2(2), b = surface::build_hyperbolic_genus2(2);
  EXPECT_EQ(a.faces(), b.faces());
  EXPECT_EQ(a.edge_lengths(), b.edge_lengths());
  const auto c = surface::build_icosphere(3), d = surface::build_icosphere(3);
  EXPECT_EQ(*c.positions(), *d.positions());
  EXPECT_EQ(c.edge_lengths(), d.edge_lengths());
}

TEST(Builders, PositiveAreasAndEmbeddedLengths) {
  for (const auto& mesh : {surface::build_icosphere(3), surface::build_hyperbolic_genus2(1),
                           surface::build_flat_torus(5, 7, 1.0, 3.0)}) {
    for (int f = 0; f < mesh.face_count(); ++f)
      EXPECT_GT(mesh.face_area(f), 0.0);
    if (mesh.positions()) {
      const auto& p = *mesh.positions();
      for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto [a, b] = mesh.edges()[e];
        EXPECT_NEAR(mesh.edge_lengths()[e], (p[a] - p[b]).norm(), 1e-12 * mesh.edge_lengths()[e]);
      }
    }
  }
}

TEST(HyperbolicGenus2, CoarseAndFineAreasAgree) {
  const double a0 = surface::build_hyperbolic_genus2(0).total_area();
  const double a3 = surface::build_hyperbolic_genus2(3).total_area();
  EXPECT_LT(std::abs(a0 - a3) / a3, 0.01);
}

TEST(MeshIO, NonManifoldEdge) {
  // Edge (0, 1) shared by three faces.
  EXPECT_EQ(load_error_kind("OFF\n5 6 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 -1 0\n3 0 1 2\n3 1 0 3\n"
                            "3 0 1 4\n3 0 2 3\n3 1 3 2\n3 0 4 1\n",
                            false),
            MeshErrorKind::non_manifold_edge);
}

TEST(GaussBonnetProperty, RandomlyJitteredMeshes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  for (const auto& base : {surface::load_mesh(data_dir / "torus_of_revolution.off"),
                           surface::build_icosphere(2)}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Eigen::Vector3d> moved;
      for (const auto& p : *base.positions())
        moved.push_back(p + Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng)));
      const auto mesh = TriangleMesh::from_positions(moved, base.faces());
      EXPECT_LT(std::abs(gauss_bonnet_error(mesh)), 1e-10);
    }
  }
}
