#pragma once

#include <stdexcept>
#include <string>

#include "tightcert/nodal.hpp"

namespace tightcert::cli {

enum class Layout { torus_rect, sphere_hammer, none };

const char* to_string(Layout layout);

class LayoutError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// torus_rect for meshes with a flat chart, sphere_hammer for other embedded
/// meshes, none for intrinsic-only meshes.
Layout choose_layout(const surface::TriangleMesh& mesh);

/// Domains filled by sign, dividing polylines stroked in black. `mesh` is the
/// mesh the decomposition was computed on. Throws LayoutError when `layout`
/// is none or the mesh lacks the data it needs.
std::string emit_svg(const nodal::NodalDecomposition& dec, const surface::TriangleMesh& mesh,
                     Layout layout);

} // namespace tightcert::cli
