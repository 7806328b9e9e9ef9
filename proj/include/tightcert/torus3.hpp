#pragma once

#include <filesystem>
#include <numbers>
#include <vector>

namespace tightcert::torus3 {

/// Periodic n^3 vertex grid on [0, L)^3. Index (i, j, k) maps to
/// (k * n + j) * n + i, so z is the slowest axis.
struct Grid3Scalar {
  int n = 0;
  double L = 2.0 * std::numbers::pi;
  std::vector<double> values;

  double spacing() const { return L / n; }
  int index(int i, int j, int k) const {
    const auto wrap = [this](int a) { return ((a % n) + n) % n; };
    return (wrap(k) * n + wrap(j)) * n + wrap(i);
  }
  double at(int i, int j, int k) const { return values[index(i, j, k)]; }
};

/// Vertex-collocated 1-form a_x dx + a_y dy + a_z dz on the periodic grid.
struct Grid3Field {
  int n = 0;
  double L = 2.0 * std::numbers::pi;
  std::vector<double> ax, ay, az;

  double spacing() const { return L / n; }
  int index(int i, int j, int k) const {
    const auto wrap = [this](int a) { return ((a % n) + n) % n; };
    return (wrap(k) * n + wrap(j)) * n + wrap(i);
  }
};

/// cos(m z') dx + sin(m z') dy with z' = 2 pi z / L. Throws for m == 0 or n < 8.
Grid3Field sample_alpha_n(int mode, int n, double L = 2.0 * std::numbers::pi);

/// Orientation under which *d alpha = orientation * curl(alpha). In the
/// right-handed volume form dx dy dz, alpha_n has curl = -m alpha_n, so it is a
/// negative contact form there; the reversed orientation makes mu = +m.
enum class Orientation { right_handed = 1, left_handed = -1 };

constexpr Orientation alpha_n_positive = Orientation::left_handed;

/// ||*d_h alpha - mu alpha||_inf / ||alpha||_inf with second-order centred
/// differences.
double curl_residual(const Grid3Field& field, double mu,
                     Orientation orientation = alpha_n_positive);

/// Least-squares minimiser of the discrete residual over mu:
/// <*d_h alpha, alpha> / <alpha, alpha>.
double fit_mu(const Grid3Field& field, Orientation orientation = alpha_n_positive);

/// Richardson extrapolation of a second-order quantity from spacing h
/// (`coarse`) and h/2 (`fine`).
inline double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

enum class Axis { x, y, z };

struct Hamiltonian {
  Grid3Scalar f;
  /// True when |f| <= 1e-12 |alpha| everywhere: X lies in the plane field,
  /// which contact data forbids; usually a wrong choice of X.
  bool degenerate = false;
};

/// f = alpha(X) for the unit coordinate field X along `direction`.
Hamiltonian contact_hamiltonian(const Grid3Field& field, Axis direction);

struct IsoComponent {
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  int euler_characteristic = 0;
};

struct CharacteristicSurface {
  std::vector<IsoComponent> components;
  int ambiguous_faces = 0; // faces resolved by the asymptotic decider
  int singular_faces = 0;  // decider value exactly zero (saddle on the level set)
  int snapped_values = 0;  // grid values with |f| < tol, treated as positive
  bool all_tori() const;
};

/// Zero level set of a periodic grid function, extracted cube by cube.
/// Crossings sit on grid edges at the linear root; each cube face pairs its
/// crossings into segments (the asymptotic decider settles faces with four),
/// and every closed loop of segments in a cube becomes one polygon. Euler
/// characteristics are V - E + F of this polygonal surface per component.
///
/// Values with |f| < tol * max|f| count as positive. Throws
/// std::invalid_argument if every value is below that threshold.
CharacteristicSurface characteristic_surface(const Grid3Scalar& f, double tol = 1e-9);

/// ||Delta_h f - mu^2 f||_inf / ||f||_inf with the 7-point Laplacian
/// (positive semidefinite sign convention).
double gener_lap_residual(const Grid3Scalar& f, double mu);

struct ReebTangency {
  double max_abs = 0.0;
  int samples = 0;
};

/// max |<X_alpha, grad_h f>| over grid points with a sign change of f to an
/// axis neighbour, where X_alpha = alpha^# / |alpha|^2 (the Reeb field of a
/// Beltrami form with |alpha| = 1). Throws std::domain_error if |alpha|
/// falls below tol * max |alpha|.
ReebTangency reeb_tangency(const Grid3Field& field, const Grid3Scalar& f, double tol = 1e-9);

/// cos(m z') sampled on the grid, z' = 2 pi z / L.
Grid3Scalar sample_cos_z(int mode, int n, double L = 2.0 * std::numbers::pi);

// Binary layout: 8-byte magic "TCGRID3\0", int64 n, float64 L, then a_x, a_y,
// a_z as n^3 little-endian float64 each, z-major. A JSON sidecar
// "<path>.json" describes the same header.
void write_grid3(const Grid3Field& field, const std::filesystem::path& path);
Grid3Field read_grid3(const std::filesystem::path& path);

} // namespace tightcert::torus3
