#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "svg.hpp"

namespace tightcert::cli {

namespace {

constexpr const char* positive_fill = "#d95f02";
constexpr const char* negative_fill = "#1b9e77";

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  // Avoid "-0.000" so identical geometry always prints identically.
  if (std::string(buf) == "-0.000")
    return "0.000";
  return buf;
}

// Maps refined vertices back to a point built from input-vertex data.
template <class Point, class Lerp>
std::vector<Point> refined_points(const nodal::NodalDecomposition& dec,
                                  const std::vector<Point>& input, Lerp lerp) {
  std::vector<Point> out(input.begin(), input.end());
  out.reserve(dec.refined_mesh.vertex_count());
  for (const auto& z : dec.zero_points)
    out.push_back(lerp(input[z.first], input[z.second], z.t));
  return out;
}

double wrap(double d, double period) { return d - period * std::round(d / period); }

std::string torus_svg(const nodal::NodalDecomposition& dec, const surface::FlatChart& chart) {
  const double px = chart.period_x, py = chart.period_y;
  const double scale = 600.0 / std::max(px, py);
  const double width = px * scale, height = py * scale;
  const auto uv = refined_points<Eigen::Vector2d>(
      dec, chart.uv, [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b, double t) {
        const Eigen::Vector2d d(wrap(b.x() - a.x(), px), wrap(b.y() - a.y(), py));
        return Eigen::Vector2d(a + t * d);
      });
  const auto unwrap = [&](const Eigen::Vector2d& base, const Eigen::Vector2d& p) {
    return Eigen::Vector2d(base.x() + wrap(p.x() - base.x(), px),
                           base.y() + wrap(p.y() - base.y(), py));
  };
  const auto point = [&](const Eigen::Vector2d& p) {
    return fmt(p.x() * scale) + "," + fmt((py - p.y()) * scale);
  };
  // Shifted copies needed so a shape straddling the seam shows on both sides.
  const auto shifts = [&](std::initializer_list<Eigen::Vector2d> pts) {
    const auto offsets = [](double lo, double hi, double period) {
      std::vector<double> o{0.0};
      if (hi > period)
        o.push_back(-period);
      if (lo < 0.0)
        o.push_back(period);
      return o;
    };
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x());
      x1 = std::max(x1, p.x());
      y0 = std::min(y0, p.y());
      y1 = std::max(y1, p.y());
    }
    std::vector<Eigen::Vector2d> s;
    for (double ox : offsets(x0, x1, px))
      for (double oy : offsets(y0, y1, py))
        s.emplace_back(ox, oy);
    return s;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
     << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
  os << "<clipPath id=\"domain\"><rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\""
     << fmt(height) << "\"/></clipPath>\n<g clip-path=\"url(#domain)\">\n";
  const auto& faces = dec.refined_mesh.faces();
  for (int f = 0; f < dec.refined_mesh.face_count(); ++f) {
    const auto& t = faces[f];
    const Eigen::Vector2d a = uv[t[0]];
    const Eigen::Vector2d b = unwrap(a, uv[t[1]]);
    const Eigen::Vector2d c = unwrap(a, uv[t[2]]);
    const char* fill = dec.domains[dec.face_domain[f]].sign > 0 ? positive_fill : negative_fill;
    for (const auto& s : shifts({a, b, c}))
      os << "<polygon points=\"" << point(a + s) << ' ' << point(b + s) << ' ' << point(c + s)
         << "\" fill=\"" << fill << "\" stroke=\"" << fill << "\" stroke-width=\"0.5\"/>\n";
  }
  for (const auto& cycle : dec.dividing_set) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const Eigen::Vector2d p = uv[cycle[i]];
      const Eigen::Vector2d q = unwrap(p, uv[cycle[(i + 1) % cycle.size()]]);
      for (const auto& s : shifts({p, q}))
        os << "<path d=\"M" << point(p + s) << " L" << point(q + s)
           << "\" stroke=\"black\" stroke-width=\"2\" fill=\"none\"/>\n";
    }
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string sphere_svg(const nodal::NodalDecomposition& dec,
                       const std::vector<Eigen::Vector3d>& positions) {
  Eigen::Vector3d centre = Eigen::Vector3d::Zero();
  for (const auto& p : positions)
    centre += p;
  centre /= static_cast<double>(positions.size());
  const auto dir = refined_points<Eigen::Vector3d>(
      dec, positions, [](const Eigen::Vector3d& a, const Eigen::Vector3d& b, double t) {
        return Eigen::Vector3d((1.0 - t) * a + t * b);
      });
  struct Projected {
    double lon, x, y;
  };
  std::vector<Projected> proj(dir.size());
  const double r = 150.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    const Eigen::Vector3d d = (dir[i] - centre).normalized();
    const double lon = std::atan2(d.y(), d.x());
    const double lat = std::asin(std::clamp(d.z(), -1.0, 1.0));
    const double denom = std::sqrt(1.0 + std::cos(lat) * std::cos(lon / 2.0));
    proj[i] = {lon, 2.0 * std::numbers::sqrt2 * std::cos(lat) * std::sin(lon / 2.0) / denom,
               std::numbers::sqrt2 * std::sin(lat) / denom};
  }
  const double width = 4.0 * std::numbers::sqrt2 * r + 20.0;
  const double height = 2.0 * std::numbers::sqrt2 * r + 20.0;
  const auto point = [&](const Projected& p) {
    return fmt(width / 2.0 + r * p.x) + "," + fmt(height / 2.0 - r * p.y);
  };
  // Shapes crossing the antimeridian would smear across the map; they are
  // left out.
  const auto crosses_seam = [&](std::initializer_list<int> ids) {
    double lo = 10.0, hi = -10.0;
    for (int i : ids) {
      lo = std::min(lo, proj[i].lon);
      hi = std::max(hi, proj[i].lon);
    }
    return hi - lo > std::numbers::pi;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
     << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
  const auto& faces = dec.refined_mesh.faces();
  for (int f = 0; f < dec.refined_mesh.face_count(); ++f) {
    const auto& t = faces[f];
    if (crosses_seam({t[0], t[1], t[2]}))
      continue;
    const char* fill = dec.domains[dec.face_domain[f]].sign > 0 ? positive_fill : negative_fill;
    os << "<polygon points=\"" << point(proj[t[0]]) << ' ' << point(proj[t[1]]) << ' '
       << point(proj[t[2]]) << "\" fill=\"" << fill << "\" stroke=\"" << fill
       << "\" stroke-width=\"0.5\"/>\n";
  }
  for (const auto& cycle : dec.dividing_set) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const int a = cycle[i], b = cycle[(i + 1) % cycle.size()];
      if (crosses_seam({a, b}))
        continue;
      os << "<path d=\"M" << point(proj[a]) << " L" << point(proj[b])
         << "\" stroke=\"black\" stroke-width=\"2\" fill=\"none\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace

const char* to_string(Layout layout) {
  switch (layout) {
  case Layout::torus_rect:
    return "torus_rect";
  case Layout::sphere_hammer:
    return "sphere_hammer";
  case Layout::none:
    break;
  }
  return "none";
}

Layout choose_layout(const surface::TriangleMesh& mesh) {
  if (mesh.chart())
    return Layout::torus_rect;
  if (mesh.positions())
    return Layout::sphere_hammer;
  return Layout::none;
}

std::string emit_svg(const nodal::NodalDecomposition& dec, const surface::TriangleMesh& mesh,
                     Layout layout) {
  if (dec.input_vertex_count != mesh.vertex_count())
    throw std::invalid_argument("svg: decomposition does not belong to this mesh");
  switch (layout) {
  case Layout::torus_rect:
    if (!mesh.chart())
      throw LayoutError("svg: torus_rect layout needs a flat chart");
    return torus_svg(dec, *mesh.chart());
  case Layout::sphere_hammer:
    if (!mesh.positions())
      throw LayoutError("svg: sphere_hammer layout needs vertex positions");
    return sphere_svg(dec, *mesh.positions());
  case Layout::none:
    break;
  }
  throw LayoutError("svg: no planar layout for an intrinsic-only mesh");
}

} // namespace tightcert::cli
