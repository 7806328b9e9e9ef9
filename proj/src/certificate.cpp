#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tightcert/contact.hpp"

namespace tightcert::contact {

namespace {

constexpr double pi = std::numbers::pi;

// Slack allowed on theorem re-checks that only hold in the continuum limit.
constexpr double discretization_slack = 0.05 * 4.0 * pi;

Criterion make(std::string name, std::string reference, Role role, bool applicable, double lhs,
               double rhs, bool pass, std::string note = {}) {
  Criterion c;
  c.name = std::move(name);
  c.reference = std::move(reference);
  c.role = role;
  c.applicable = applicable;
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = rhs - lhs;
  c.pass = pass;
  c.note = std::move(note);
  return c;
}

Precondition condition(std::string name, Status status, double value, std::string note = {}) {
  return {std::move(name), status, value, std::move(note)};
}

Status status_of(bool ok) { return ok ? Status::pass : Status::fail; }

} // namespace

const char* to_string(Verdict v) {
  switch (v) {
  case Verdict::universally_tight: return "UNIVERSALLY_TIGHT";
  case Verdict::not_universally_tight: return "NOT_UNIVERSALLY_TIGHT";
  case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

const char* to_string(Role r) {
  switch (r) {
  case Role::direct: return "direct";
  case Role::sufficient: return "sufficient";
  case Role::local: return "local";
  case Role::consistency: return "consistency";
  }
  return "sufficient";
}

const char* to_string(Status s) {
  switch (s) {
  case Status::pass: return "pass";
  case Status::fail: return "fail";
  case Status::not_applicable: return "not_applicable";
  }
  return "not_applicable";
}

const Criterion* Certificate::find(const std::string& name) const {
  for (const auto& c : criteria)
    if (c.name == name)
      return &c;
  return nullptr;
}

Certificate certify(const TriangleMesh& mesh, const spectral::OperatorPair& ops,
                    const surface::CurvatureField& curvature, const ContactFormData& form,
                    const nodal::NodalDecomposition* dec, const CertificateInput& input) {
  const int nv = mesh.vertex_count();
  if (form.vertex_count() != nv || ops.size() != nv ||
      static_cast<int>(curvature.pointwise_curvature.size()) != nv)
    throw std::invalid_argument("certify: form, operators and curvature must match the mesh");
  if (dec && dec->input_vertex_count != nv)
    throw std::invalid_argument("certify: nodal decomposition belongs to a different mesh");
  if (input.cover_degree < 1)
    throw std::invalid_argument("certify: cover degree must be >= 1");
  if (!(form.fiber_length > 0.0))
    throw std::invalid_argument("certify: fiber length must be positive");

  Certificate cert;
  cert.cover_degree = input.cover_degree;
  cert.euler_number = input.euler_number;
  cert.fiber_length_min = input.fiber_length_min.value_or(form.fiber_length);
  if (!(cert.fiber_length_min > 0.0))
    throw std::invalid_argument("certify: l_min must be positive");
  cert.surface_area = ops.total_area();
  cert.volume = form.fiber_length * cert.surface_area;
  cert.surface_euler_characteristic = mesh.euler_characteristic();
  cert.E = input.constant_E.value_or(twisting_constant(input.euler_number, cert.surface_area));
  if (std::abs(cert.E - form.E) > 1e-12 * (1.0 + std::abs(cert.E))) {
    std::ostringstream os;
    os << "certify: the form was lifted with E = " << form.E << " but the inputs give E = "
       << cert.E;
    throw std::invalid_argument(os.str());
  }
  cert.formal_inputs = input.euler_number != 0 || input.cover_degree > 1;

  const int chi = cert.surface_euler_characteristic;
  const double k = input.cover_degree;
  const double mu = form.mu;
  const double mu_mu_e = mu * (mu - cert.E);

  // Preconditions.
  const NonvanishingReport nonvanishing = nonvanishing_check(form, input.nonvanishing_tol);
  const bool norms_positive = form.alpha_norm.size() > 0 && form.alpha_norm.minCoeff() > 0.0;
  const double k_tol = input.curvature_tol * 2.0 * pi / cert.surface_area;
  const surface::CurvatureSignCheck ksign = surface::curvature_nonpositive(curvature, k_tol);
  const bool not_sphere = chi <= 0;
  {
    std::ostringstream os;
    os << "min |alpha| " << nonvanishing.min_norm << " at vertex " << nonvanishing.min_vertex
       << ", mean " << nonvanishing.mean_norm;
    cert.preconditions.push_back(condition("nonvanishing_alpha", status_of(nonvanishing.ok),
                                           nonvanishing.min_norm / nonvanishing.mean_norm,
                                           os.str()));
  }
  cert.preconditions.push_back(condition("mu_times_mu_minus_E_nonnegative",
                                         status_of(mu_mu_e >= 0.0), mu_mu_e));
  {
    std::ostringstream os;
    os << "max K " << ksign.max_curvature << " at vertex " << ksign.worst_vertex
       << ", tolerance " << k_tol;
    cert.preconditions.push_back(condition("curvature_nonpositive", status_of(ksign.nonpositive),
                                           ksign.max_curvature, os.str()));
  }
  cert.preconditions.push_back(condition("base_has_nonzero_genus", status_of(not_sphere), chi));
  cert.preconditions.push_back(condition(
      "nodal_decomposition", dec ? Status::pass : Status::not_applicable,
      dec ? dec->domain_count() : 0.0, dec ? "" : "no decomposition; Giroux criteria skipped"));

  // Giroux classification.
  if (dec) {
    const int discs = static_cast<int>(std::count_if(
        dec->domains.begin(), dec->domains.end(), [](const auto& d) { return d.is_disc(); }));
    const int curves = static_cast<int>(dec->dividing_set.size());
    if (chi <= 0) {
      cert.criteria.push_back(make("giroux_no_disc_domain",
                                   "Giroux classification, base other than S^2: no component of "
                                   "the complement of the dividing set is a disc",
                                   Role::direct, nonvanishing.ok, discs, 0.0, discs == 0,
                                   std::to_string(discs) + " disc domain(s)"));
    } else if (input.euler_number < 0) {
      cert.criteria.push_back(make("giroux_sphere_empty_dividing_set",
                                   "Giroux classification, base S^2 with e < 0: dividing set empty",
                                   Role::direct, nonvanishing.ok, curves, 0.0, curves == 0,
                                   std::to_string(curves) + " dividing curve(s)"));
    } else {
      Criterion c = make("giroux_sphere_connected_dividing_set",
                         "Giroux classification, base S^2 with e >= 0: dividing set connected",
                         Role::direct, nonvanishing.ok, curves, 1.0, curves == 1,
                         std::to_string(curves) + " dividing curve(s)");
      c.margin = -std::abs(curves - 1.0);
      cert.criteria.push_back(c);
    }
    if (nonvanishing.ok)
      cert.giroux_verdict = cert.criteria.back().pass ? Verdict::universally_tight
                                                      : Verdict::not_universally_tight;
  }

  // Volume bounds.
  std::optional<MAlpha> m_main, m_ver2;
  if (norms_positive) {
    m_main = compute_m_alpha(form, ops, MAlphaVariant::main, curvature);
    m_ver2 = compute_m_alpha(form, ops, MAlphaVariant::ver2, curvature);
    cert.m_alpha_main = m_main->value;
    cert.m_alpha_ver2 = m_ver2->value;
  }
  const double scale = k * cert.volume / cert.fiber_length_min;
  {
    const bool applicable = nonvanishing.ok && norms_positive && ksign.nonpositive;
    const double lhs = scale * cert.m_alpha_main;
    cert.criteria.push_back(make("main_volume_bound",
                                 "main theorem under K <= 0: Vol(M) < 2 pi l_min / (m_alpha k) "
                                 "with m_alpha = max(0, Delta ln|alpha|)",
                                 Role::sufficient, applicable, lhs, 2.0 * pi, lhs < 2.0 * pi,
                                 "lhs = k m_alpha Vol(M) / l_min"));
  }
  {
    const bool applicable = nonvanishing.ok && norms_positive && not_sphere;
    const double lhs = scale * cert.m_alpha_ver2;
    cert.criteria.push_back(make("ver2_volume_bound",
                                 "main theorem, good-orbifold version: Vol(M) < 2 pi l_min / "
                                 "(m_alpha k) with m_alpha = max(0, Delta ln|alpha| + K)",
                                 Role::sufficient, applicable, lhs, 2.0 * pi, lhs < 2.0 * pi,
                                 "lhs = k m_alpha Vol(M) / l_min"));
  }
  {
    const bool applicable = nonvanishing.ok && ksign.nonpositive && mu_mu_e > 0.0;
    const double l = form.fiber_length;
    const double lhs = k * mu * mu * cert.volume / l;
    const double rhs = 4.0 * pi + 2.0 * pi * input.euler_number * k * mu;
    cert.criteria.push_back(make("constant_mu_volume_bound",
                                 "constant mu and E corollary: Vol(M) < 4 pi l / (mu^2 k) + "
                                 "2 pi e(M) l / mu",
                                 Role::sufficient, applicable, lhs, rhs, lhs < rhs,
                                 "lhs = k mu^2 Vol(M) / l, rhs = 4 pi + 2 pi e k mu"));
  }
  {
    const bool product = input.euler_number == 0 && input.cover_degree == 1 && cert.E == 0.0;
    const bool applicable = nonvanishing.ok && ksign.nonpositive && product;
    const double lhs = mu * mu * cert.volume / form.fiber_length;
    cert.criteria.push_back(make("product_volume_bound",
                                 "product metric on S^1 x Sigma with K <= 0: Vol(M) < 4 pi l / mu^2",
                                 Role::sufficient, applicable, lhs, 4.0 * pi, lhs < 4.0 * pi,
                                 "lhs = mu^2 Vol(Sigma)"));
  }
  {
    const double mean = form.alpha_norm.size() ? form.alpha_norm.mean() : 0.0;
    const double variation =
        mean > 0.0 ? (form.alpha_norm.maxCoeff() - form.alpha_norm.minCoeff()) / mean
                   : std::numeric_limits<double>::infinity();
    const bool applicable = nonvanishing.ok && ksign.nonpositive;
    cert.criteria.push_back(make("constant_norm_corollary",
                                 "constant |alpha| under K <= 0 implies universal tightness",
                                 Role::sufficient, applicable, variation, input.constant_norm_tol,
                                 variation <= input.constant_norm_tol,
                                 "lhs = (max - min) / mean of |alpha|"));
  }
  if (norms_positive) {
    const double lhs = m_main->laplacian_log_norm.maxCoeff();
    const double rhs = 2.0 * pi / cert.surface_area;
    cert.criteria.push_back(make("tubular_bound",
                                 "tight tubular neighbourhood: max Delta ln|alpha| < 2 pi / Vol(Sigma)",
                                 Role::local, nonvanishing.ok && ksign.nonpositive && not_sphere,
                                 lhs, rhs, lhs < rhs,
                                 ksign.nonpositive ? "" : "K <= 0 fails; reported only"));
  }
  if (dec && dec->has_disc_domain()) {
    const auto discs = nodal::disc_domain_inequality(*dec, form.lambda);
    const auto worst = std::min_element(discs.begin(), discs.end(), [](const auto& a, const auto& b) {
      return a.margin < b.margin;
    });
    Criterion c = make("nodal_disc_inequality",
                       "disc nodal domain: 4 pi - 2 int K+ <= lambda Vol(Omega)",
                       Role::consistency, true, worst->lhs, worst->rhs,
                       worst->margin >= -discretization_slack,
                       "worst of " + std::to_string(discs.size()) + " disc domain(s), slack 5% of 4 pi");
    cert.criteria.push_back(c);
    const double lhs = 4.0 * pi;
    const double rhs = form.lambda * cert.surface_area;
    cert.criteria.push_back(make("disc_area_bound_nonpositive_curvature",
                                 "K <= 0 and a disc nodal domain: 4 pi / Vol(Sigma) <= lambda",
                                 Role::consistency, ksign.nonpositive, lhs, rhs,
                                 rhs - lhs >= -discretization_slack, "slack 5% of 4 pi"));
  }

  // Conflicts between the classification and sufficient or local bounds.
  if (cert.giroux_verdict == Verdict::not_universally_tight) {
    for (const auto& c : cert.criteria) {
      if (c.applicable && c.pass && (c.role == Role::sufficient || c.role == Role::local)) {
        ++cert.consistency_failures;
        cert.reasons.push_back("CONSISTENCY_FAILURE: " + c.name +
                               " passes while the dividing set rules out universal tightness");
      }
    }
  }

  if (!nonvanishing.ok) {
    cert.verdict = Verdict::inconclusive;
    cert.reasons.push_back("alpha vanishes somewhere; the lift is not a contact form");
  } else if (mu_mu_e < 0.0) {
    cert.verdict = Verdict::inconclusive;
    cert.reasons.push_back("mu (mu - E) < 0; no S^1-invariant contact eigenfield with these data");
  } else if (cert.consistency_failures > 0) {
    cert.verdict = Verdict::inconclusive;
  } else if (cert.giroux_verdict) {
    cert.verdict = *cert.giroux_verdict;
    for (const auto& c : cert.criteria)
      if (c.role == Role::direct)
        cert.reasons.push_back(std::string(to_string(cert.verdict)) + " by " + c.name + " (" +
                               c.note + ")");
    for (const auto& c : cert.criteria)
      if (c.role == Role::sufficient && c.applicable && c.pass)
        cert.reasons.push_back("also implied by " + c.name);
  } else {
    cert.verdict = Verdict::inconclusive;
    for (const auto& c : cert.criteria) {
      if (c.role == Role::sufficient && c.applicable && c.pass) {
        cert.verdict = Verdict::universally_tight;
        cert.reasons.push_back("UNIVERSALLY_TIGHT by " + c.name);
      }
    }
    if (cert.verdict == Verdict::inconclusive)
      cert.reasons.push_back("no decomposition and no applicable sufficient bound passed");
  }
  if (cert.formal_inputs)
    cert.reasons.push_back("non-product inputs (e or k) evaluated formally; existence of the "
                           "Seifert manifold is not checked");
  return cert;
}

} // namespace tightcert::contact
