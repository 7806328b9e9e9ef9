#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "tightcert/spectral.hpp"
#include "tightcert/triangle_mesh.hpp"

namespace tightcert::nodal {

using surface::TriangleMesh;

/// Vertex-sampled real function on a mesh.
using ScalarField = Eigen::VectorXd;

/// Why a decomposition was refused.
enum class NodalErrorKind {
  size_mismatch,
  not_finite,
  trivial_field,   // identically zero or constant
  plateau,         // near-zero vertex with no clearly signed neighbour
  singular_point,  // near-zero vertex where the nodal set crosses itself
};

const char* to_string(NodalErrorKind kind);

class NodalError : public std::runtime_error {
public:
  NodalError(NodalErrorKind kind, int vertex, const std::string& what)
      : std::runtime_error(what), kind_(kind), vertex_(vertex) {}
  NodalErrorKind kind() const noexcept { return kind_; }
  /// Offending vertex, or -1 when the error is global.
  int vertex() const noexcept { return vertex_; }

private:
  NodalErrorKind kind_;
  int vertex_;
};

/// A vertex whose value was below the zero tolerance and was pushed to the
/// sign of its largest-magnitude neighbour.
struct SnappedVertex {
  int vertex = -1;
  double original_value = 0.0;
  double snapped_value = 0.0;
  int reference_neighbor = -1;
};

/// Zero crossing inserted on an edge of the input mesh. The point sits at
/// (1 - t) * first + t * second along edge (first, second), first < second.
/// t is the linear interpolation root clamped to [1e-5, 1 - 1e-5].
struct ZeroPoint {
  int edge = -1;
  int first = -1;
  int second = -1;
  double t = 0.0;
};

struct NodalDomain {
  int sign = 0;
  std::vector<int> faces; // refined face indices
  int vertex_count = 0;
  int edge_count = 0;
  int euler_characteristic = 0;
  int boundary_components = 0;
  double area = 0.0;
  /// Sum of positive angle defects over vertices not on the boundary.
  double curvature_positive_part_integral = 0.0;

  bool is_disc() const { return euler_characteristic == 1; }
  bool is_annulus() const { return euler_characteristic == 0 && boundary_components == 2; }
};

/// Sign decomposition of a surface by the zero set of a vertex function.
///
/// Refined vertices [0, input vertex count) are the input vertices; the rest
/// are zero points, in the order of `zero_points`.
struct NodalDecomposition {
  explicit NodalDecomposition(TriangleMesh refined) : refined_mesh(std::move(refined)) {}

  TriangleMesh refined_mesh;
  std::vector<double> refined_values;   // zero at inserted vertices
  std::vector<int> parent_face;         // refined face -> input face
  std::vector<int> face_domain;         // refined face -> domain index
  std::vector<ZeroPoint> zero_points;
  std::vector<SnappedVertex> snapped;
  std::vector<NodalDomain> domains;
  /// Closed polylines as cyclic refined-vertex lists, oriented with the
  /// positive domain on the left.
  std::vector<std::vector<int>> dividing_set;
  double zero_tol = 0.0;
  int input_vertex_count = 0;
  int surface_euler_characteristic = 0;

  int domain_count() const { return static_cast<int>(domains.size()); }
  bool has_disc_domain() const;
  bool dividing_set_empty() const { return dividing_set.empty(); }
  bool dividing_set_connected() const { return dividing_set.size() == 1; }
};

/// Splits every sign-mixed triangle along the linearly interpolated zero
/// segment and groups same-sign faces into connected domains.
///
/// Values with |f| < zero_tol * max|f| are snapped first (see SnappedVertex).
/// Throws NodalError for NaN input, a zero or constant field, a near-zero
/// plateau, or a near-zero vertex around which the sign changes four or more
/// times (a self-crossing of the nodal set).
NodalDecomposition decompose(const TriangleMesh& mesh, const ScalarField& values,
                             double zero_tol = 1e-9);

inline int count_domains(const NodalDecomposition& dec) { return dec.domain_count(); }
inline bool is_disc(const NodalDomain& domain) { return domain.is_disc(); }
inline bool has_disc_domain(const NodalDecomposition& dec) { return dec.has_disc_domain(); }

struct CourantEntry {
  int index = 0; // position in the sorted spectrum, constant mode = 0
  double lambda = 0.0;
  int domains = 0;
  int bound = 0; // last index of the multiplicity cluster, plus one
  bool ok = false;
};

struct CourantReport {
  std::vector<CourantEntry> entries;
  bool all_ok() const;
};

/// Courant nodal-domain bound for pairs[1..]; `decompositions[i]` belongs to
/// pairs[i + 1]. The constant mode is skipped.
CourantReport courant_check(std::span<const spectral::EigenPair> pairs,
                            std::span<const NodalDecomposition> decompositions,
                            double cluster_gap = 1e-3);

struct GaussBonnetBalance {
  double curvature_integral = 0.0; // angle defects at non-boundary vertices
  double turning_integral = 0.0;   // boundary turning angles
  double defect = 0.0;             // sum of both minus 2 pi chi
};

GaussBonnetBalance domain_gauss_bonnet(const NodalDecomposition& dec, int domain);

struct DiscInequality {
  int domain = -1;
  double lhs = 0.0; // 4 pi - 2 * integral of K+
  double rhs = 0.0; // lambda * area
  double margin = 0.0;
};

/// 4 pi - 2 int K+ <= lambda * area(domain) for every disc domain.
std::vector<DiscInequality> disc_domain_inequality(const NodalDecomposition& dec, double lambda);

struct PolylineGeometry {
  double length = 0.0;
  double total_turning = 0.0;
  /// Turning angle of the positive side at each polyline vertex, divided by
  /// the dual length (half the two adjacent segments).
  std::vector<double> curvature_samples;
  /// Per segment: <grad u, nu> with nu the unit normal pointing to the
  /// negative side. Empty unless a vertex function u was supplied.
  std::vector<double> normal_derivative_samples;
};

/// Length and discrete geodesic curvature of every dividing polyline.
/// `log_norm`, when given, is a function on the input mesh vertices (for
/// example ln|alpha|) whose normal derivative is sampled per segment.
std::vector<PolylineGeometry> dividing_set_geometry(
    const NodalDecomposition& dec, const TriangleMesh& mesh,
    std::optional<std::span<const double>> log_norm = std::nullopt);

} // namespace tightcert::nodal
