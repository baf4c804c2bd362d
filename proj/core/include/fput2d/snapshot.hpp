#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "fput2d/lattice.hpp"
#include "fput2d/nls.hpp"

namespace fput2d {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Form tag stored in the snapshot header.
enum class SnapshotForm : std::uint8_t { displacement = 0, strain = 1, envelope = 2 };

/// Binary snapshot: little-endian header
///   magic "FPUT2D\0" (7 bytes), version u32, form u8, N u32, time f64
/// followed by row-major f64 arrays (q, w or u, v, ut, vt). Envelope
/// snapshots store one complex array as interleaved (re, im) pairs and use
/// the slow time.
void write_snapshot(const std::filesystem::path& path, const LatticeState& s);
void write_snapshot(const std::filesystem::path& path, const EnvelopeField& f);

LatticeState read_lattice_snapshot(const std::filesystem::path& path);

struct EnvelopeSnapshot {
  double slow_time = 0.0;
  ComplexGrid a;
};
EnvelopeSnapshot read_envelope_snapshot(const std::filesystem::path& path);

/// CSV stream "t,energy,compat_defect,max_amp". Missing quantities are
/// written as nan.
class LatticeDiagnosticsCsv {
 public:
  explicit LatticeDiagnosticsCsv(std::ostream& out);
  void row(double t, double energy, double compat_defect, double max_amp);

 private:
  std::ostream& out_;
};

/// CSV stream "T,mass,h4proxy,max_amp".
class EnvelopeDiagnosticsCsv {
 public:
  explicit EnvelopeDiagnosticsCsv(std::ostream& out);
  void row(double slow_time, double mass, double h4proxy, double max_amp);

 private:
  std::ostream& out_;
};

}  // namespace fput2d
