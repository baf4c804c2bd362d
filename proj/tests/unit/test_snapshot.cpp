#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fput2d/snapshot.hpp"
#include "expect_error.hpp"
#include "oracles.hpp"

using namespace fput2d;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fput2d_snapshot_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<char> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::vector<char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST(Snapshot, DisplacementRoundTrip) {
  auto s = oracle::random_displacement(16, 0.3, 7);
  s.time = 12.375;
  const auto p = temp_file("disp.bin");
  write_snapshot(p, s);
  EXPECT_EQ(fs::file_size(p), 7u + 4 + 1 + 4 + 8 + 2 * 16 * 16 * 8);
  const auto r = read_lattice_snapshot(p);
  EXPECT_EQ(r.form, LatticeForm::displacement);
  EXPECT_EQ(r.n_side, 16u);
  EXPECT_EQ(r.time, 12.375);
  EXPECT_EQ(r.q, s.q);
  EXPECT_EQ(r.w, s.w);
}

TEST(Snapshot, StrainRoundTrip) {
  auto s = LatticeState::strain_from_displacement(oracle::random_displacement(8, 0.3, 3));
  s.time = 0.5;
  const auto p = temp_file("strain.bin");
  write_snapshot(p, s);
  const auto r = read_lattice_snapshot(p);
  EXPECT_EQ(r.form, LatticeForm::strain);
  EXPECT_EQ(r.u, s.u);
  EXPECT_EQ(r.v, s.v);
  EXPECT_EQ(r.ut, s.ut);
  EXPECT_EQ(r.vt, s.vt);
  EXPECT_EQ(r.time, 0.5);
}

TEST(Snapshot, EnvelopeRoundTrip) {
  auto f = gaussian_envelope(32, 10, EnvelopeVariant::strain_u, 1.0, 2.0);
  for (std::size_t k = 0; k < f.a.size(); ++k) f.a[k] *= std::polar(1.0, 0.01 * static_cast<double>(k));
  f.slow_time = 0.25;
  const auto p = temp_file("env.bin");
  write_snapshot(p, f);
  const auto r = read_envelope_snapshot(p);
  EXPECT_EQ(r.slow_time, 0.25);
  EXPECT_EQ(r.a, f.a);
  expect_kind(ErrorKind::FormMismatch, [&] { read_lattice_snapshot(p); });
  const auto q = temp_file("disp2.bin");
  write_snapshot(q, oracle::random_displacement(8, 0.1, 1));
  expect_kind(ErrorKind::FormMismatch, [&] { read_envelope_snapshot(q); });
}

TEST(Snapshot, HeaderLayout) {
  auto s = LatticeState::displacement(8);
  s.time = 1.0;
  const auto p = temp_file("hdr.bin");
  write_snapshot(p, s);
  const auto b = read_bytes(p);
  ASSERT_GE(b.size(), 24u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 6), "FPUT2D");
  EXPECT_EQ(b[6], '\0');
  EXPECT_EQ(b[7], 1);  // version, little endian
  EXPECT_EQ(b[8] | b[9] | b[10], 0);
  EXPECT_EQ(b[11], 0);  // displacement tag
  EXPECT_EQ(b[12], 8);  // N
}

TEST(Snapshot, RejectsCorruptFiles) {
  auto s = LatticeState::displacement(8);
  const auto p = temp_file("bad.bin");
  write_snapshot(p, s);
  auto b = read_bytes(p);
  auto bad_magic = b;
  bad_magic[0] = 'X';
  write_bytes(p, bad_magic);
  expect_kind(ErrorKind::Io, [&] { read_lattice_snapshot(p); });
  auto bad_version = b;
  bad_version[7] = 9;
  write_bytes(p, bad_version);
  expect_kind(ErrorKind::Io, [&] { read_lattice_snapshot(p); });
  auto truncated = b;
  truncated.resize(b.size() - 5);
  write_bytes(p, truncated);
  expect_kind(ErrorKind::Io, [&] { read_lattice_snapshot(p); });
  expect_kind(ErrorKind::Io, [&] { read_lattice_snapshot(temp_file("missing.bin")); });
}

TEST(DiagnosticsCsv, HeadersAndRows) {
  std::ostringstream lat, env;
  {
    LatticeDiagnosticsCsv c(lat);
    c.row(0.5, 1.25, std::nan(""), 0.1);
    EnvelopeDiagnosticsCsv e(env);
    e.row(0.01, 2.0, 3.0, 0.75);
  }
  EXPECT_EQ(lat.str(), "t,energy,compat_defect,max_amp\n0.5,1.25,nan,0.10000000000000001\n");
  EXPECT_EQ(env.str(), "T,mass,h4proxy,max_amp\n0.01,2,3,0.75\n");
}
