#include "gradon/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace gradon {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need swapping");

namespace {

constexpr std::uint8_t kFormatVersion = 1;

void put_bytes(std::ofstream& out, const void* p, std::size_t count) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(count));
}

void get_bytes(std::ifstream& in, void* p, std::size_t count, const char* what) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    throw ConfigError(std::string("truncated file while reading ") + what);
}

template <typename T>
void put(std::ofstream& out, T v) {
  put_bytes(out, &v, sizeof v);
}

template <typename T>
T get(std::ifstream& in, const char* what) {
  T v;
  get_bytes(in, &v, sizeof v, what);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  return in;
}

void check_magic(std::ifstream& in, const char* magic, const std::string& path) {
  char buf[4];
  get_bytes(in, buf, 4, "magic");
  if (std::memcmp(buf, magic, 4) != 0)
    throw ConfigError("not a " + std::string(magic) + " file: " + path);
  const auto version = get<std::uint8_t>(in, "version");
  if (version != kFormatVersion)
    throw ConfigError("unsupported format version in " + path);
}

int checked_dim(std::uint8_t n, const std::string& path) {
  if (n != 2 && n != 3) throw ConfigError("bad dimension in " + path);
  return n;
}

}  // namespace

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field(const std::string& path, const ScalarField& f) {
  auto out = open_out(path);
  put_bytes(out, "GRTF", 4);
  put<std::uint8_t>(out, kFormatVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.grid.n));
  for (int a = 0; a < f.grid.n; ++a)
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.shape[a]));
  for (int a = 0; a < f.grid.n; ++a) put<double>(out, f.grid.origin[a]);
  put<double>(out, f.grid.h);
  put_bytes(out, f.values.data(), f.values.size() * sizeof(double));
  if (!out) throw ConfigError("write failed: " + path);
}

ScalarField read_field(const std::string& path) {
  auto in = open_in(path);
  check_magic(in, "GRTF", path);
  GridLayout g;
  g.n = checked_dim(get<std::uint8_t>(in, "dimension"), path);
  g.shape = {1, 1, 1};
  for (int a = 0; a < g.n; ++a) {
    const auto s = get<std::uint32_t>(in, "shape");
    if (s < 1 || s > (1u << 24)) throw ConfigError("bad shape in " + path);
    g.shape[a] = static_cast<int>(s);
  }
  g.origin = Vec::zero(g.n);
  for (int a = 0; a < g.n; ++a) g.origin[a] = get<double>(in, "origin");
  g.h = get<double>(in, "spacing");
  if (!(g.h > 0.0)) throw ConfigError("bad spacing in " + path);
  ScalarField f = ScalarField::zeros(g);
  get_bytes(in, f.values.data(), f.values.size() * sizeof(double), "values");
  return f;
}

void write_sinogram(const std::string& path, const Sinogram& g) {
  auto out = open_out(path);
  put_bytes(out, "GRTS", 4);
  put<std::uint8_t>(out, kFormatVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(g.layout.n));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.layout.n_s));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.layout.thetas.size()));
  put<double>(out, g.layout.s0);
  put<double>(out, g.layout.ds);
  for (const auto& th : g.layout.thetas)
    for (int a = 0; a < g.layout.n; ++a) put<double>(out, th.u[a]);
  put_bytes(out, g.values.data(), g.values.size() * sizeof(double));
  if (!out) throw ConfigError("write failed: " + path);
}

Sinogram read_sinogram(const std::string& path) {
  auto in = open_in(path);
  check_magic(in, "GRTS", path);
  SinogramLayout l;
  l.n = checked_dim(get<std::uint8_t>(in, "dimension"), path);
  const auto n_s = get<std::uint32_t>(in, "n_s");
  const auto n_th = get<std::uint32_t>(in, "n_theta");
  if (n_s < 1 || n_s > (1u << 24) || n_th < 1 || n_th > (1u << 24))
    throw ConfigError("bad sinogram shape in " + path);
  l.n_s = static_cast<int>(n_s);
  l.s0 = get<double>(in, "s0");
  l.ds = get<double>(in, "ds");
  if (!(l.ds > 0.0)) throw ConfigError("bad s spacing in " + path);
  l.thetas.resize(n_th);
  for (auto& th : l.thetas) {
    th.u = Vec::zero(l.n);
    for (int a = 0; a < l.n; ++a) th.u[a] = get<double>(in, "direction");
  }
  l.theta_weight = direction_quadrature_weight(l.n, static_cast<int>(n_th));
  Sinogram g = Sinogram::zeros(l);
  get_bytes(in, g.values.data(), g.values.size() * sizeof(double), "values");
  return g;
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  auto out = open_out(path);
  out << (f.grid.n == 2 ? "x0,x1,value\n" : "x0,x1,x2,value\n");
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const Vec x = f.grid.point(i);
    for (int a = 0; a < f.grid.n; ++a) out << csv_number(x[a]) << ',';
    out << csv_number(f.values[i]) << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path);
}

void write_sinogram_csv(const std::string& path, const Sinogram& g) {
  auto out = open_out(path);
  out << (g.layout.n == 2 ? "s,theta0,theta1,value\n" : "s,theta0,theta1,theta2,value\n");
  const std::size_t nk = g.layout.thetas.size();
  for (int j = 0; j < g.layout.n_s; ++j)
    for (std::size_t k = 0; k < nk; ++k) {
      out << csv_number(g.layout.s(j)) << ',';
      for (int a = 0; a < g.layout.n; ++a)
        out << csv_number(g.layout.thetas[k].u[a]) << ',';
      out << csv_number(g.values[static_cast<std::size_t>(j) * nk + k]) << '\n';
    }
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace gradon
