#pragma once

#include <json.hpp>

#include "tightcert/contact.hpp"
#include "tightcert/nodal.hpp"
#include "tightcert/spectral.hpp"
#include "tightcert/surface.hpp"
#include "tightcert/torus3.hpp"

namespace tightcert::io {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

Json mesh_summary(const surface::TriangleMesh& mesh);

/// {"lambda", "residual", "values"} with values in vertex order.
Json to_json(const spectral::EigenPair& pair, bool include_values = true);

Json to_json(const nodal::NodalDecomposition& dec);
Json to_json(const nodal::GaussBonnetBalance& balance);
Json to_json(const nodal::CourantReport& report);
Json to_json(const nodal::PolylineGeometry& geometry);

/// {"verdict", "criteria": [{"name", "paper_ref", "lhs", "rhs", "margin",
/// "pass", ...}], "preconditions": [...], ...}
Json to_json(const contact::Certificate& cert);

Json to_json(const torus3::CharacteristicSurface& surface);

} // namespace tightcert::io
