#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tightcert/nodal.hpp"
#include "tightcert/spectral.hpp"
#include "tightcert/surface.hpp"

namespace tightcert::contact {

using surface::TriangleMesh;

/// S^1-invariant 1-form alpha = f d(theta) + (1/mu) *df on S^1 x Sigma, sampled
/// at the vertices of Sigma. The fibre coordinate theta has period `fiber_length`.
struct ContactFormData {
  Eigen::VectorXd f;          // contact hamiltonian alpha(X)
  Eigen::VectorXd grad_sq;    // |df|^2 per vertex
  Eigen::VectorXd alpha_norm; // sqrt(f^2 + |df|^2 / mu^2)
  double lambda = 0.0;        // surface eigenvalue, mu (mu - E) = lambda
  double mu = 0.0;            // curl eigenvalue; its sign is the orientation
  double E = 0.0;             // twisting constant of the fibration
  double fiber_length = 0.0;

  int vertex_count() const { return static_cast<int>(f.size()); }
};

/// Positive root of mu^2 - E mu - lambda = 0.
double mu_from_lambda_E(double lambda, double E);

/// Per-vertex |grad f|^2: face values averaged with one-third area weights.
Eigen::VectorXd vertex_gradient_squared(const TriangleMesh& mesh, const Eigen::VectorXd& f);

/// Lift of a surface eigenpair. mu = orientation * mu_from_lambda_E(lambda, E).
/// Throws std::invalid_argument for lambda <= 0, orientation not +-1 or a
/// non-positive fibre length.
ContactFormData lift_to_beltrami(const TriangleMesh& mesh, const spectral::EigenPair& pair,
                                 double fiber_length, int orientation = 1, double E = 0.0);

/// Same lift with |df|^2 supplied per vertex (for analytically known fields).
ContactFormData lift_with_differential(Eigen::VectorXd f, Eigen::VectorXd grad_sq, double lambda,
                                       double fiber_length, int orientation = 1, double E = 0.0);

struct NonvanishingReport {
  bool ok = false;
  double min_norm = 0.0;
  double mean_norm = 0.0;
  int min_vertex = -1;
};

/// ok iff min |alpha| > tol * mean |alpha|.
NonvanishingReport nonvanishing_check(const ContactFormData& form, double tol = 1e-6);

enum class MAlphaVariant { main, ver2 };

struct MAlpha {
  double value = 0.0;               // max(0, max over vertices of `pointwise`)
  int worst_vertex = -1;
  Eigen::VectorXd laplacian_log_norm; // Delta ln|alpha| = S u / lumped mass
  Eigen::VectorXd pointwise;          // the maximised quantity
};

/// m_alpha from the lumped-mass Laplacian of ln|alpha| (Delta = -div grad).
/// The ver2 variant adds the pointwise curvature K = kappa_E + 3/4 E^2.
/// Throws std::domain_error if some |alpha| <= 0.
MAlpha compute_m_alpha(const ContactFormData& form, const spectral::OperatorPair& ops,
                       MAlphaVariant variant, const surface::CurvatureField& curvature);

struct TubularBound {
  double lhs = 0.0; // max Delta ln|alpha|
  double rhs = 0.0; // 2 pi / area
  bool pass = false;
  bool curvature_nonpositive = false;
};

/// max Delta ln|alpha| < 2 pi / Vol(Sigma); the K <= 0 hypothesis is reported
/// alongside, not enforced.
TubularBound tubular_bound(const ContactFormData& form, const spectral::OperatorPair& ops,
                           const surface::CurvatureField& curvature, double curvature_tol);

struct CertificateInput {
  int cover_degree = 1;
  int euler_number = 0;
  std::optional<double> fiber_length_min; // defaults to the form's fibre length
  std::optional<double> constant_E;       // defaults to 2 pi e / Vol(Sigma)
  /// K <= curvature_tol * 2 pi / Vol(Sigma) counts as nonpositive.
  double curvature_tol = 1e-8;
  double nonvanishing_tol = 1e-6;
  /// Relative variation of |alpha| below which the norm counts as constant.
  double constant_norm_tol = 1e-6;
};

/// 2 pi e / Vol(Sigma).
double twisting_constant(int euler_number, double surface_area);

enum class Verdict { universally_tight, not_universally_tight, inconclusive };
const char* to_string(Verdict v);

/// direct: Giroux classification (necessary and sufficient);
/// sufficient: volume bound implying universal tightness;
/// local: tightness near one surface only;
/// consistency: a theorem re-checked on the data.
enum class Role { direct, sufficient, local, consistency };
const char* to_string(Role r);

struct Criterion {
  std::string name;
  std::string reference; // the result being evaluated
  Role role = Role::sufficient;
  bool applicable = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0; // rhs - lhs
  bool pass = false;
  std::string note;
};

enum class Status { pass, fail, not_applicable };
const char* to_string(Status s);

struct Precondition {
  std::string name;
  Status status = Status::not_applicable;
  double value = 0.0;
  std::string note;
};

struct Certificate {
  Verdict verdict = Verdict::inconclusive;
  std::optional<Verdict> giroux_verdict;
  std::vector<Criterion> criteria;
  std::vector<Precondition> preconditions;
  std::vector<std::string> reasons;
  int consistency_failures = 0;

  // Inputs after defaults were applied.
  int cover_degree = 1;
  int euler_number = 0;
  double fiber_length_min = 0.0;
  double E = 0.0;
  double surface_area = 0.0;
  double volume = 0.0; // fibre length * Vol(Sigma)
  int surface_euler_characteristic = 0;
  double m_alpha_main = 0.0;
  double m_alpha_ver2 = 0.0;
  /// Non-product inputs (e != 0 or k > 1) are evaluated formally; no check
  /// is made that a Seifert manifold with these invariants exists.
  bool formal_inputs = false;

  const Criterion* find(const std::string& name) const;
};

/// Evaluates the Giroux classification on `dec` (when given) and every volume
/// bound, reporting all margins. A sufficient or local bound that passes while
/// the classification finds the structure not universally tight is a
/// consistency failure and forces an inconclusive verdict.
///
/// Throws std::invalid_argument on size mismatches or invalid inputs.
Certificate certify(const TriangleMesh& mesh, const spectral::OperatorPair& ops,
                    const surface::CurvatureField& curvature, const ContactFormData& form,
                    const nodal::NodalDecomposition* dec, const CertificateInput& input);

} // namespace tightcert::contact
