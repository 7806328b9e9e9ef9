#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "tightcert/surface.hpp"

namespace tightcert::surface {

namespace {

// Yields significant lines (non-blank, not starting with '#') together
// with their 1-based line numbers.
class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::istringstream& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#')
        continue;
      out.clear();
      out.str(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshError(MeshErrorKind::parse, "line " + std::to_string(line_no_) + ": " + what);
  }

  int line() const { return line_no_; }

private:
  std::istream& in_;
  int line_no_ = 0;
};

template <typename... T>
void read_fields(LineReader& reader, std::istringstream& ls, const char* what, T&... fields) {
  ((ls >> fields), ...);
  if (ls.fail())
    reader.fail(std::string("expected ") + what);
  std::string extra;
  if (ls >> extra)
    reader.fail(std::string("trailing token '") + extra + "' after " + what);
}

void expect_header(LineReader& reader, const char* magic) {
  std::istringstream ls;
  if (!reader.next(ls))
    reader.fail(std::string("missing '") + magic + "' header");
  std::string word;
  ls >> word;
  if (word != magic)
    reader.fail(std::string("expected header '") + magic + "', found '" + word + "'");
}

} // namespace

TriangleMesh read_ioff(std::istream& in) {
  LineReader reader(in);
  expect_header(reader, "IOFF");
  std::istringstream ls;
  if (!reader.next(ls))
    reader.fail("missing counts line 'V F E'");
  long long nv = 0, nf = 0, ne = 0;
  read_fields(reader, ls, "counts 'V F E'", nv, nf, ne);
  if (nv <= 0 || nf <= 0 || ne <= 0 || nv > std::numeric_limits<int>::max())
    reader.fail("counts must be positive");

  std::vector<Face> faces(nf);
  for (auto& face : faces) {
    if (!reader.next(ls))
      reader.fail("unexpected end of file in face list");
    read_fields(reader, ls, "face 'i j k'", face[0], face[1], face[2]);
  }
  std::vector<std::pair<Edge, double>> lengths(ne);
  for (auto& [edge, length] : lengths) {
    if (!reader.next(ls))
      reader.fail("unexpected end of file in edge list");
    read_fields(reader, ls, "edge 'i j length'", edge.first, edge.second, length);
  }
  if (reader.next(ls))
    reader.fail("content after the declared edge list");
  return TriangleMesh::from_intrinsic(static_cast<int>(nv), std::move(faces), lengths);
}

void write_ioff(const TriangleMesh& mesh, std::ostream& out) {
  out << "IOFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << ' ' << mesh.edge_count()
      << '\n';
  for (const Face& f : mesh.faces())
    out << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (int e = 0; e < mesh.edge_count(); ++e)
    out << mesh.edges()[e].first << ' ' << mesh.edges()[e].second << ' ' << mesh.edge_lengths()[e]
        << '\n';
}

TriangleMesh read_off(std::istream& in) {
  LineReader reader(in);
  expect_header(reader, "OFF");
  std::istringstream ls;
  if (!reader.next(ls))
    reader.fail("missing counts line 'V F E'");
  long long nv = 0, nf = 0, ne = 0;
  read_fields(reader, ls, "counts 'V F E'", nv, nf, ne);
  if (nv <= 0 || nf <= 0 || nv > std::numeric_limits<int>::max())
    reader.fail("counts must be positive");
  std::vector<Eigen::Vector3d> positions(nv);
  for (auto& p : positions) {
    if (!reader.next(ls))
      reader.fail("unexpected end of file in vertex list");
    read_fields(reader, ls, "vertex 'x y z'", p.x(), p.y(), p.z());
  }
  std::vector<Face> faces(nf);
  for (auto& face : faces) {
    if (!reader.next(ls))
      reader.fail("unexpected end of file in face list");
    int arity = 0;
    ls >> arity;
    if (ls.fail() || arity != 3)
      reader.fail("only triangle faces ('3 i j k') are supported");
    read_fields(reader, ls, "face '3 i j k'", face[0], face[1], face[2]);
  }
  return TriangleMesh::from_positions(std::move(positions), std::move(faces));
}

void write_off(const TriangleMesh& mesh, std::ostream& out) {
  if (!mesh.positions())
    throw MeshError(MeshErrorKind::invalid_parameter,
                    "OFF output needs vertex positions; use .ioff for intrinsic meshes");
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << ' ' << mesh.edge_count()
      << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : *mesh.positions())
    out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& f : mesh.faces())
    out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw MeshError(MeshErrorKind::parse, "cannot open " + path.string());
  const auto ext = path.extension().string();
  try {
    if (ext == ".off")
      return read_off(in);
    if (ext == ".ioff")
      return read_ioff(in);
  } catch (const MeshError& e) {
    throw MeshError(e.kind(), path.string() + ": " + e.what());
  }
  throw MeshError(MeshErrorKind::parse, path.string() + ": unknown mesh extension '" + ext + "'");
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext != ".off" && ext != ".ioff")
    throw MeshError(MeshErrorKind::invalid_parameter, "unknown mesh extension '" + ext + "'");
  std::ofstream out(path);
  if (!out)
    throw MeshError(MeshErrorKind::parse, "cannot write " + path.string());
  if (ext == ".off")
    write_off(mesh, out);
  else
    write_ioff(mesh, out);
}

} // namespace tightcert::surface
