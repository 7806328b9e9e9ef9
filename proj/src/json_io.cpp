#include <cmath>
#include <numbers>

#include "tightcert/json_io.hpp"

namespace tightcert::io {

namespace {

// JSON has no infinities; they are written as strings.
Json number(double x) {
  if (std::isfinite(x))
    return x;
  if (std::isnan(x))
    return "nan";
  return x > 0 ? "inf" : "-inf";
}

} // namespace

Json mesh_summary(const surface::TriangleMesh& mesh) {
  const auto curvature = surface::discrete_curvature(mesh);
  const int chi = mesh.euler_characteristic();
  const double total = curvature.total_defect();
  return {
      {"vertices", mesh.vertex_count()},
      {"edges", mesh.edge_count()},
      {"faces", mesh.face_count()},
      {"euler_characteristic", chi},
      {"area", mesh.total_area()},
      {"total_defect", total},
      {"gauss_bonnet_error", total - 2.0 * std::numbers::pi * chi},
      {"embedded", mesh.positions().has_value()},
  };
}

Json to_json(const spectral::EigenPair& pair, bool include_values) {
  Json j = {{"lambda", pair.lambda}, {"residual", pair.residual}};
  if (include_values)
    j["values"] = std::vector<double>(pair.f.data(), pair.f.data() + pair.f.size());
  return j;
}

Json to_json(const nodal::NodalDecomposition& dec) {
  Json domains = Json::array();
  for (const auto& d : dec.domains) {
    domains.push_back({
        {"sign", d.sign},
        {"euler_characteristic", d.euler_characteristic},
        {"boundary_components", d.boundary_components},
        {"is_disc", d.is_disc()},
        {"is_annulus", d.is_annulus()},
        {"area", d.area},
        {"curvature_positive_part_integral", d.curvature_positive_part_integral},
        {"face_count", d.faces.size()},
    });
  }
  Json snapped = Json::array();
  for (const auto& s : dec.snapped)
    snapped.push_back({{"vertex", s.vertex},
                       {"original_value", s.original_value},
                       {"snapped_value", s.snapped_value},
                       {"reference_neighbor", s.reference_neighbor}});
  return {
      {"zero_tol", dec.zero_tol},
      {"domain_count", dec.domain_count()},
      {"has_disc_domain", dec.has_disc_domain()},
      {"surface_euler_characteristic", dec.surface_euler_characteristic},
      {"refined_vertex_count", dec.refined_mesh.vertex_count()},
      {"refined_face_count", dec.refined_mesh.face_count()},
      {"domains", domains},
      {"dividing_set", dec.dividing_set},
      {"snapped", snapped},
  };
}

Json to_json(const nodal::GaussBonnetBalance& b) {
  return {{"curvature_integral", b.curvature_integral},
          {"turning_integral", b.turning_integral},
          {"defect", b.defect}};
}

Json to_json(const nodal::CourantReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"index", e.index},
                       {"lambda", e.lambda},
                       {"domains", e.domains},
                       {"bound", e.bound},
                       {"ok", e.ok}});
  return {{"all_ok", report.all_ok()}, {"entries", entries}};
}

Json to_json(const nodal::PolylineGeometry& g) {
  Json j = {{"length", g.length},
            {"total_turning", g.total_turning},
            {"vertex_count", g.curvature_samples.size()},
            {"curvature_samples", g.curvature_samples}};
  if (!g.normal_derivative_samples.empty())
    j["normal_derivative_log_norm_samples"] = g.normal_derivative_samples;
  return j;
}

Json to_json(const contact::Certificate& cert) {
  Json criteria = Json::array();
  for (const auto& c : cert.criteria)
    criteria.push_back({
        {"name", c.name},
        {"paper_ref", c.reference},
        {"role", contact::to_string(c.role)},
        {"applicable", c.applicable},
        {"lhs", number(c.lhs)},
        {"rhs", number(c.rhs)},
        {"margin", number(c.margin)},
        {"pass", c.pass},
        {"note", c.note},
    });
  Json preconditions = Json::array();
  for (const auto& p : cert.preconditions)
    preconditions.push_back({{"name", p.name},
                             {"status", contact::to_string(p.status)},
                             {"value", number(p.value)},
                             {"note", p.note}});
  Json j = {
      {"verdict", contact::to_string(cert.verdict)},
      {"giroux_verdict",
       cert.giroux_verdict ? Json(contact::to_string(*cert.giroux_verdict)) : Json(nullptr)},
      {"criteria", criteria},
      {"preconditions", preconditions},
      {"reasons", cert.reasons},
      {"consistency_failures", cert.consistency_failures},
      {"inputs",
       {{"cover_degree", cert.cover_degree},
        {"euler_number", cert.euler_number},
        {"fiber_length_min", cert.fiber_length_min},
        {"E", cert.E},
        {"formal", cert.formal_inputs}}},
      {"surface_area", cert.surface_area},
      {"volume", cert.volume},
      {"surface_euler_characteristic", cert.surface_euler_characteristic},
      {"m_alpha_main", cert.m_alpha_main},
      {"m_alpha_ver2", cert.m_alpha_ver2},
  };
  return j;
}

Json to_json(const torus3::CharacteristicSurface& s) {
  Json comps = Json::array();
  for (const auto& c : s.components)
    comps.push_back({{"vertices", c.vertices},
                     {"edges", c.edges},
                     {"faces", c.faces},
                     {"euler_characteristic", c.euler_characteristic}});
  return {{"component_count", s.components.size()},
          {"all_tori", s.all_tori()},
          {"ambiguous_faces", s.ambiguous_faces},
          {"singular_faces", s.singular_faces},
          {"snapped_values", s.snapped_values},
          {"components", comps}};
}

} // namespace tightcert::io
