#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tightcert/torus3.hpp"

namespace tightcert::torus3 {

namespace {

constexpr char magic[8] = {'T', 'C', 'G', 'R', 'I', 'D', '3', '\0'};

void require_grid(int n, double L) {
  if (n < 8)
    throw std::invalid_argument("torus3: grid resolution must be >= 8");
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("torus3: period must be positive");
}

void check_field(const Grid3Field& a) {
  require_grid(a.n, a.L);
  const std::size_t size = static_cast<std::size_t>(a.n) * a.n * a.n;
  if (a.ax.size() != size || a.ay.size() != size || a.az.size() != size)
    throw std::invalid_argument("torus3: component arrays must have n^3 entries");
}

struct Vec3 {
  double x, y, z;
};

// *d_h alpha at (i, j, k).
Vec3 star_d(const Grid3Field& a, int i, int j, int k, double o) {
  const double inv = 1.0 / (2.0 * a.spacing());
  const auto d = [&](const std::vector<double>& c, int di, int dj, int dk) {
    return (c[a.index(i + di, j + dj, k + dk)] - c[a.index(i - di, j - dj, k - dk)]) * inv;
  };
  return {o * (d(a.az, 0, 1, 0) - d(a.ay, 0, 0, 1)), o * (d(a.ax, 0, 0, 1) - d(a.az, 1, 0, 0)),
          o * (d(a.ay, 1, 0, 0) - d(a.ax, 0, 1, 0))};
}

template <class T>
void write_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in)
    throw std::runtime_error("read_grid3: truncated file");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

} // namespace

Grid3Field sample_alpha_n(int mode, int n, double L) {
  if (mode == 0)
    throw std::invalid_argument("sample_alpha_n: mode must be nonzero");
  require_grid(n, L);
  Grid3Field a;
  a.n = n;
  a.L = L;
  const std::size_t size = static_cast<std::size_t>(n) * n * n;
  a.ax.resize(size);
  a.ay.resize(size);
  a.az.assign(size, 0.0);
  const double h = L / n;
  for (int k = 0; k < n; ++k) {
    const double phase = mode * 2.0 * std::numbers::pi * (k * h) / L;
    const double c = std::cos(phase), s = std::sin(phase);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        a.ax[a.index(i, j, k)] = c;
        a.ay[a.index(i, j, k)] = s;
      }
    }
  }
  return a;
}

Grid3Scalar sample_cos_z(int mode, int n, double L) {
  require_grid(n, L);
  Grid3Scalar f;
  f.n = n;
  f.L = L;
  f.values.resize(static_cast<std::size_t>(n) * n * n);
  const double h = L / n;
  for (int k = 0; k < n; ++k) {
    const double v = std::cos(mode * 2.0 * std::numbers::pi * (k * h) / L);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        f.values[f.index(i, j, k)] = v;
  }
  return f;
}

double curl_residual(const Grid3Field& field, double mu, Orientation orientation) {
  check_field(field);
  const double o = static_cast<double>(orientation);
  double worst = 0.0, scale = 0.0;
  const int n = field.n;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int p = field.index(i, j, k);
        const Vec3 c = star_d(field, i, j, k, o);
        const double rx = c.x - mu * field.ax[p];
        const double ry = c.y - mu * field.ay[p];
        const double rz = c.z - mu * field.az[p];
        worst = std::max(worst, std::sqrt(rx * rx + ry * ry + rz * rz));
        scale = std::max(scale, std::sqrt(field.ax[p] * field.ax[p] + field.ay[p] * field.ay[p] +
                                          field.az[p] * field.az[p]));
      }
    }
  }
  if (!(scale > 0.0))
    throw std::invalid_argument("curl_residual: field is identically zero");
  return worst / scale;
}

double fit_mu(const Grid3Field& field, Orientation orientation) {
  check_field(field);
  const double o = static_cast<double>(orientation);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < field.n; ++k) {
    for (int j = 0; j < field.n; ++j) {
      for (int i = 0; i < field.n; ++i) {
        const int p = field.index(i, j, k);
        const Vec3 c = star_d(field, i, j, k, o);
        num += c.x * field.ax[p] + c.y * field.ay[p] + c.z * field.az[p];
        den += field.ax[p] * field.ax[p] + field.ay[p] * field.ay[p] + field.az[p] * field.az[p];
      }
    }
  }
  if (!(den > 0.0))
    throw std::invalid_argument("fit_mu: field is identically zero");
  return num / den;
}

Hamiltonian contact_hamiltonian(const Grid3Field& field, Axis direction) {
  check_field(field);
  Hamiltonian h;
  h.f.n = field.n;
  h.f.L = field.L;
  h.f.values = direction == Axis::x ? field.ax : (direction == Axis::y ? field.ay : field.az);
  double fmax = 0.0, amax = 0.0;
  for (std::size_t p = 0; p < h.f.values.size(); ++p) {
    fmax = std::max(fmax, std::abs(h.f.values[p]));
    amax = std::max(amax, std::sqrt(field.ax[p] * field.ax[p] + field.ay[p] * field.ay[p] +
                                    field.az[p] * field.az[p]));
  }
  h.degenerate = fmax <= 1e-12 * amax;
  return h;
}

double gener_lap_residual(const Grid3Scalar& f, double mu) {
  require_grid(f.n, f.L);
  const double inv_h2 = 1.0 / (f.spacing() * f.spacing());
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < f.n; ++k) {
    for (int j = 0; j < f.n; ++j) {
      for (int i = 0; i < f.n; ++i) {
        const double c = f.at(i, j, k);
        const double lap = (6.0 * c - f.at(i + 1, j, k) - f.at(i - 1, j, k) - f.at(i, j + 1, k) -
                            f.at(i, j - 1, k) - f.at(i, j, k + 1) - f.at(i, j, k - 1)) *
                           inv_h2;
        worst = std::max(worst, std::abs(lap - mu * mu * c));
        scale = std::max(scale, std::abs(c));
      }
    }
  }
  if (!(scale > 0.0))
    throw std::invalid_argument("gener_lap_residual: f is identically zero");
  return worst / scale;
}

ReebTangency reeb_tangency(const Grid3Field& field, const Grid3Scalar& f, double tol) {
  check_field(field);
  if (f.n != field.n || f.L != field.L)
    throw std::invalid_argument("reeb_tangency: grids differ");
  const int n = field.n;
  const std::size_t size = field.ax.size();
  std::vector<double> norm2(size);
  double top = 0.0;
  for (std::size_t p = 0; p < size; ++p) {
    norm2[p] = field.ax[p] * field.ax[p] + field.ay[p] * field.ay[p] + field.az[p] * field.az[p];
    top = std::max(top, norm2[p]);
  }
  for (std::size_t p = 0; p < size; ++p)
    if (!(std::sqrt(norm2[p]) > tol * std::sqrt(top)))
      throw std::domain_error("reeb_tangency: |alpha| vanishes at grid point " +
                              std::to_string(p));

  const double inv = 1.0 / (2.0 * field.spacing());
  ReebTangency out;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double c = f.at(i, j, k);
        const bool crossing = c * f.at(i + 1, j, k) <= 0.0 || c * f.at(i - 1, j, k) <= 0.0 ||
                              c * f.at(i, j + 1, k) <= 0.0 || c * f.at(i, j - 1, k) <= 0.0 ||
                              c * f.at(i, j, k + 1) <= 0.0 || c * f.at(i, j, k - 1) <= 0.0;
        if (!crossing)
          continue;
        const int p = field.index(i, j, k);
        const double gx = (f.at(i + 1, j, k) - f.at(i - 1, j, k)) * inv;
        const double gy = (f.at(i, j + 1, k) - f.at(i, j - 1, k)) * inv;
        const double gz = (f.at(i, j, k + 1) - f.at(i, j, k - 1)) * inv;
        const double value = (field.ax[p] * gx + field.ay[p] * gy + field.az[p] * gz) / norm2[p];
        out.max_abs = std::max(out.max_abs, std::abs(value));
        ++out.samples;
      }
    }
  }
  return out;
}

void write_grid3(const Grid3Field& field, const std::filesystem::path& path) {
  check_field(field);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_grid3: cannot open " + path.string());
  out.write(magic, sizeof(magic));
  write_le<std::int64_t>(out, field.n);
  write_le<double>(out, field.L);
  for (const auto* comp : {&field.ax, &field.ay, &field.az})
    for (double v : *comp)
      write_le<double>(out, v);
  if (!out)
    throw std::runtime_error("write_grid3: write failed for " + path.string());

  const nlohmann::ordered_json sidecar = {
      {"schema", 1},
      {"format", "TCGRID3"},
      {"n", field.n},
      {"L", field.L},
      {"components", {"ax", "ay", "az"}},
      {"dtype", "float64"},
      {"byte_order", "little"},
      {"layout", "z-major: index = (k * n + j) * n + i"},
      {"header_bytes", 24},
  };
  std::ofstream side(path.string() + ".json");
  side << sidecar.dump(2) << '\n';
  if (!side)
    throw std::runtime_error("write_grid3: cannot write sidecar for " + path.string());
}

Grid3Field read_grid3(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("read_grid3: cannot open " + path.string());
  char head[8];
  in.read(head, sizeof(head));
  if (!in || std::memcmp(head, magic, sizeof(magic)) != 0)
    throw std::runtime_error("read_grid3: " + path.string() + " is not a TCGRID3 file");
  Grid3Field a;
  const auto n = read_le<std::int64_t>(in);
  if (n < 8 || n > 4096)
    throw std::runtime_error("read_grid3: implausible resolution " + std::to_string(n));
  a.n = static_cast<int>(n);
  a.L = read_le<double>(in);
  require_grid(a.n, a.L);
  const std::size_t size = static_cast<std::size_t>(a.n) * a.n * a.n;
  for (auto* comp : {&a.ax, &a.ay, &a.az}) {
    comp->resize(size);
    for (double& v : *comp)
      v = read_le<double>(in);
  }
  return a;
}

} // namespace tightcert::torus3
