#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tightcert/contact.hpp"

namespace tightcert::contact {

double mu_from_lambda_E(double lambda, double E) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("mu_from_lambda_E: lambda must be positive");
  // Written to avoid cancellation when E is large and negative.
  const double root = std::sqrt(E * E + 4.0 * lambda);
  return E >= 0.0 ? 0.5 * (E + root) : 2.0 * lambda / (root - E);
}

double twisting_constant(int euler_number, double surface_area) {
  if (!(surface_area > 0.0))
    throw std::invalid_argument("twisting_constant: surface area must be positive");
  return 2.0 * std::numbers::pi * euler_number / surface_area;
}

Eigen::VectorXd vertex_gradient_squared(const TriangleMesh& mesh, const Eigen::VectorXd& f) {
  if (f.size() != mesh.vertex_count())
    throw std::invalid_argument("vertex_gradient_squared: size mismatch");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mesh.vertex_count());
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(mesh.vertex_count());
  for (int face = 0; face < mesh.face_count(); ++face) {
    const auto& t = mesh.faces()[face];
    const double l[3] = {mesh.opposite_length(face, 0), mesh.opposite_length(face, 1),
                         mesh.opposite_length(face, 2)};
    const double area = mesh.face_area(face);
    // |grad f|^2 * area = 1/2 sum over corners of cot(corner) * (difference
    // across the opposite edge)^2.
    double energy = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double cot = surface::opposite_cotangent(l[c], l[(c + 1) % 3], l[(c + 2) % 3]);
      const double d = f[t[(c + 1) % 3]] - f[t[(c + 2) % 3]];
      energy += 0.5 * cot * d * d;
    }
    for (int v : t) {
      acc[v] += energy / 3.0;
      weight[v] += area / 3.0;
    }
  }
  return acc.cwiseQuotient(weight);
}

ContactFormData lift_with_differential(Eigen::VectorXd f, Eigen::VectorXd grad_sq, double lambda,
                                       double fiber_length, int orientation, double E) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("lift: lambda must be positive (the constant mode has no lift)");
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("lift: orientation must be +1 or -1");
  if (!(fiber_length > 0.0))
    throw std::invalid_argument("lift: fiber length must be positive");
  if (f.size() != grad_sq.size())
    throw std::invalid_argument("lift: f and |df|^2 sizes differ");
  ContactFormData form;
  form.lambda = lambda;
  form.E = E;
  form.mu = orientation * mu_from_lambda_E(lambda, E);
  form.fiber_length = fiber_length;
  const double mu2 = form.mu * form.mu;
  form.alpha_norm = (f.array().square() + grad_sq.array() / mu2).sqrt().matrix();
  form.f = std::move(f);
  form.grad_sq = std::move(grad_sq);
  return form;
}

ContactFormData lift_to_beltrami(const TriangleMesh& mesh, const spectral::EigenPair& pair,
                                 double fiber_length, int orientation, double E) {
  if (pair.f.size() != mesh.vertex_count())
    throw std::invalid_argument("lift: eigenvector size does not match the mesh");
  return lift_with_differential(pair.f, vertex_gradient_squared(mesh, pair.f), pair.lambda,
                                fiber_length, orientation, E);
}

NonvanishingReport nonvanishing_check(const ContactFormData& form, double tol) {
  NonvanishingReport r;
  if (form.alpha_norm.size() == 0)
    return r;
  Eigen::Index arg = 0;
  r.min_norm = form.alpha_norm.minCoeff(&arg);
  r.min_vertex = static_cast<int>(arg);
  r.mean_norm = form.alpha_norm.mean();
  r.ok = r.min_norm > tol * r.mean_norm;
  return r;
}

MAlpha compute_m_alpha(const ContactFormData& form, const spectral::OperatorPair& ops,
                       MAlphaVariant variant, const surface::CurvatureField& curvature) {
  const int n = form.vertex_count();
  if (ops.size() != n || static_cast<int>(curvature.pointwise_curvature.size()) != n)
    throw std::invalid_argument("compute_m_alpha: size mismatch");
  for (int v = 0; v < n; ++v) {
    if (!(form.alpha_norm[v] > 0.0)) {
      std::ostringstream os;
      os << "compute_m_alpha: |alpha| = " << form.alpha_norm[v] << " at vertex " << v;
      throw std::domain_error(os.str());
    }
  }
  MAlpha out;
  const Eigen::VectorXd u = form.alpha_norm.array().log().matrix();
  out.laplacian_log_norm = (ops.stiffness * u).cwiseQuotient(ops.lumped_mass);
  out.pointwise = out.laplacian_log_norm;
  if (variant == MAlphaVariant::ver2)
    for (int v = 0; v < n; ++v)
      out.pointwise[v] += curvature.pointwise_curvature[v];
  Eigen::Index arg = 0;
  const double top = out.pointwise.maxCoeff(&arg);
  out.worst_vertex = static_cast<int>(arg);
  out.value = std::max(0.0, top);
  return out;
}

TubularBound tubular_bound(const ContactFormData& form, const spectral::OperatorPair& ops,
                           const surface::CurvatureField& curvature, double curvature_tol) {
  const MAlpha m = compute_m_alpha(form, ops, MAlphaVariant::main, curvature);
  TubularBound t;
  t.lhs = m.laplacian_log_norm.maxCoeff();
  t.rhs = 2.0 * std::numbers::pi / ops.total_area();
  t.pass = t.lhs < t.rhs;
  t.curvature_nonpositive = surface::curvature_nonpositive(curvature, curvature_tol).nonpositive;
  return t;
}

} // namespace tightcert::contact
