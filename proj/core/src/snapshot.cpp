#include "fput2d/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "fput2d/errors.hpp"

namespace fput2d {

namespace {

constexpr std::array<char, 7> kMagic{'F', 'P', 'U', 'T', '2', 'D', '\0'};

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw Error(ErrorKind::Io, "truncated snapshot");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

void write_header(std::ostream& out, SnapshotForm form, std::uint32_t n, double time) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(form));
  put_le<std::uint32_t>(out, n);
  put_le<double>(out, time);
}

struct Header {
  SnapshotForm form;
  std::uint32_t n;
  double time;
};

Header read_header(std::istream& in) {
  std::array<char, 7> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error(ErrorKind::Io, "not a snapshot file");
  if (get_le<std::uint32_t>(in) != kSnapshotVersion) throw Error(ErrorKind::Io, "unsupported snapshot version");
  const auto form = get_le<std::uint8_t>(in);
  if (form > 2) throw Error(ErrorKind::Io, "unknown snapshot form tag");
  const auto n = get_le<std::uint32_t>(in);
  const auto time = get_le<double>(in);
  return {static_cast<SnapshotForm>(form), n, time};
}

void write_grid(std::ostream& out, const RealGrid& g) {
  for (double x : g) put_le<double>(out, x);
}

RealGrid read_grid(std::istream& in, std::size_t n) {
  RealGrid g(n);
  for (double& x : g) x = get_le<double>(in);
  return g;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::ostream& fmt(std::ostream& out) { return out << std::setprecision(17); }

}  // namespace

void write_snapshot(const std::filesystem::path& path, const LatticeState& s) {
  auto out = open_out(path);
  const auto n = static_cast<std::uint32_t>(s.n_side);
  if (s.form == LatticeForm::displacement) {
    write_header(out, SnapshotForm::displacement, n, s.time);
    write_grid(out, s.q);
    write_grid(out, s.w);
  } else {
    write_header(out, SnapshotForm::strain, n, s.time);
    write_grid(out, s.u);
    write_grid(out, s.v);
    write_grid(out, s.ut);
    write_grid(out, s.vt);
  }
  finish(out, path);
}

void write_snapshot(const std::filesystem::path& path, const EnvelopeField& f) {
  auto out = open_out(path);
  write_header(out, SnapshotForm::envelope, static_cast<std::uint32_t>(f.grid_side), f.slow_time);
  for (const cplx& z : f.a) {
    put_le<double>(out, z.real());
    put_le<double>(out, z.imag());
  }
  finish(out, path);
}

LatticeState read_lattice_snapshot(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = read_header(in);
  if (h.form == SnapshotForm::envelope) throw Error(ErrorKind::FormMismatch, "snapshot holds an envelope");
  LatticeState s;
  if (h.form == SnapshotForm::displacement) {
    s = LatticeState::displacement(h.n);
    s.q = read_grid(in, h.n);
    s.w = read_grid(in, h.n);
  } else {
    s = LatticeState::strain(h.n);
    s.u = read_grid(in, h.n);
    s.v = read_grid(in, h.n);
    s.ut = read_grid(in, h.n);
    s.vt = read_grid(in, h.n);
  }
  s.time = h.time;
  return s;
}

EnvelopeSnapshot read_envelope_snapshot(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = read_header(in);
  if (h.form != SnapshotForm::envelope) throw Error(ErrorKind::FormMismatch, "snapshot holds a lattice state");
  EnvelopeSnapshot e{h.time, ComplexGrid(h.n)};
  for (cplx& z : e.a) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    z = {re, im};
  }
  return e;
}

LatticeDiagnosticsCsv::LatticeDiagnosticsCsv(std::ostream& out) : out_(out) {
  out_ << "t,energy,compat_defect,max_amp\n";
}

void LatticeDiagnosticsCsv::row(double t, double energy, double compat_defect, double max_amp) {
  fmt(out_) << t << ',' << energy << ',' << compat_defect << ',' << max_amp << '\n';
}

EnvelopeDiagnosticsCsv::EnvelopeDiagnosticsCsv(std::ostream& out) : out_(out) { out_ << "T,mass,h4proxy,max_amp\n"; }

void EnvelopeDiagnosticsCsv::row(double slow_time, double mass, double h4proxy, double max_amp) {
  fmt(out_) << slow_time << ',' << mass << ',' << h4proxy << ',' << max_amp << '\n';
}

}  // namespace fput2d
