#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "fput2d/grid.hpp"

namespace fput2d {

enum class LatticeForm : std::uint8_t { displacement = 0, strain = 1 };

inline constexpr std::size_t kMinLatticeSide = 8;
inline constexpr double kMaxLatticeStep = 0.5;
inline constexpr double kOverflowGuard = 1e6;

/// Periodic N x N FPUT lattice. In displacement form q, w = dq/dt are used; in
/// strain form u = q(m+1,n) - q(m,n), v = q(m,n+1) - q(m,n) and their
/// velocities. Fields of the other form stay empty.
struct LatticeState {
  LatticeForm form = LatticeForm::displacement;
  std::size_t n_side = 0;
  double time = 0.0;
  RealGrid q, w;
  RealGrid u, v, ut, vt;

  static LatticeState displacement(std::size_t n_side);
  static LatticeState strain(std::size_t n_side);

  /// Strain state obtained by differencing a displacement state.
  static LatticeState strain_from_displacement(const LatticeState& disp);
};

enum class ForceKind { cubic_baseline, perturbed, linear };

/// Per-bond perturbation coefficients; the x-bond at (m, n) joins (m, n) to
/// (m+1, n), the y-bond joins (m, n) to (m, n+1).
struct BondPerturbation {
  RealGrid alpha_x, alpha_y, beta_x, beta_y, gamma_x, gamma_y;

  /// Uniform samples in [-bound, bound] from a seeded 64-bit Mersenne twister.
  static BondPerturbation random(std::size_t n_side, double bound, std::uint64_t seed);
  static BondPerturbation zero(std::size_t n_side);
  double max_abs() const;
};

/// Interaction force of a bond with strain s:
///   cubic_baseline  W'(s) = s - s^3
///   perturbed       W'(s) = s + alpha eps^3 s + beta eps^2 s^2 - s^3 + gamma eps s^3
///   linear          W'(s) = s
class ForceLaw {
 public:
  static ForceLaw cubic();
  static ForceLaw linear();
  /// Throws InvalidArgument unless eps is in (0, 1) and every coefficient is
  /// bounded by coeff_bound.
  static ForceLaw perturbed(double eps, BondPerturbation coeffs, double coeff_bound);

  ForceKind kind() const noexcept { return kind_; }
  double eps() const noexcept { return eps_; }
  const std::optional<BondPerturbation>& perturbation() const noexcept { return coeffs_; }

  struct BondPoly {
    double c1, c2, c3;  // W'(s) = c1 s + c2 s^2 + c3 s^3
  };
  /// Polynomial coefficients of the x-bond (axis 0) or y-bond (axis 1) at site k.
  BondPoly bond(int axis, std::size_t k) const noexcept;

 private:
  ForceKind kind_ = ForceKind::cubic_baseline;
  double eps_ = 0.0;
  std::optional<BondPerturbation> coeffs_;
  RealGrid c1x_, c2x_, c3x_, c1y_, c2y_, c3y_;
};

/// Accelerations of the displacement system. FormMismatch unless form = displacement.
RealGrid rhs_displacement(const LatticeState& s, const ForceLaw& f);

struct StrainAcceleration {
  RealGrid utt, vtt;
};
/// Accelerations of the strain system. FormMismatch unless form = strain.
StrainAcceleration rhs_strain(const LatticeState& s, const ForceLaw& f);

/// Velocity Verlet; the force evaluation at the end of one step is reused at
/// the start of the next within a single advance() call. Owns its scratch
/// buffers, so an instance must not be shared between threads.
class VerletIntegrator {
 public:
  VerletIntegrator(ForceLaw force, double dt);

  double dt() const noexcept { return dt_; }
  const ForceLaw& force() const noexcept { return force_; }

  /// Advances by n steps of size dt. Throws UnstableStep when any position or
  /// velocity leaves [-kOverflowGuard, kOverflowGuard] or becomes non-finite.
  void advance(LatticeState& s, std::size_t steps);

 private:
  void accelerate(const LatticeState& s);

  ForceLaw force_;
  double dt_;
  RealGrid fx_, fy_, site_;
  RealGrid acc0_, acc1_;
};

/// One Stormer-Verlet step. dt may be negative (time reversal); |dt| <= kMaxLatticeStep.
LatticeState verlet_step(const LatticeState& s, const ForceLaw& f, double dt);

/// Kinetic plus bond potential energy; displacement form only.
double energy(const LatticeState& s, const ForceLaw& f);

/// max |u(m,n+1) - u(m,n) - v(m+1,n) + v(m,n)| plus the same maximum for (ut, vt).
double compatibility_defect(const LatticeState& s);

/// Largest absolute position value (q, or max(|u|, |v|)).
double max_amplitude(const LatticeState& s);

}  // namespace fput2d
