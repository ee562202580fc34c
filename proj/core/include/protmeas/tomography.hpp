#pragma once

// Qubit tomography from three protective measurements of sigma_x, sigma_y,
// sigma_z, with rho = (1 + n . sigma) / 2.

#include <array>
#include <cstdint>
#include <vector>

#include "protmeas/apparatus.hpp"
#include "protmeas/linalg.hpp"
#include "protmeas/protective.hpp"

namespace protmeas {

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const noexcept;
  double operator[](int axis) const noexcept { return axis == 0 ? x : axis == 1 ? y : z; }
  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// Scales vectors outside the unit ball (beyond 1e-12 slack) back onto the
/// sphere; identity inside.
BlochVector project_to_ball(const BlochVector& n);

/// (1 + n . sigma) / 2, after project_to_ball.
DensityMatrix reconstruct_density(const BlochVector& n);

/// n_i = Tr[sigma_i rho].
BlochVector bloch_of(const DensityMatrix& rho);

BlochVector bloch_of(const Ket& psi);

enum class TomographyMode { IdealMean, Sampled };

struct AxisRecord {
  char axis = 'x';
  double estimate = 0.0;
  double x_sampled = 0.0;  // sampled mode only
  std::uint64_t seed = 0;
  /// <psi|rho_S|psi> after this axis' interaction, starting from psi.
  double survival_probability = 1.0;
  bool survived = true;  // sampled mode: projective test result
};

struct TomographyResult {
  BlochVector bloch;      // after projection to the unit ball
  BlochVector raw;        // pointer estimates as measured
  bool clipped = false;   // raw.norm() > 1
  DensityMatrix rho_hat;
  double fidelity_true = 0.0;
  TomographyMode mode = TomographyMode::IdealMean;
  std::vector<AxisRecord> per_axis;
  /// Sampled mode: every per-axis test found the system in psi_true.
  bool survived = true;
  /// Sampled mode: system state after the last axis.
  Ket final_system;
};

struct TomographyOptions {
  ApparatusSpec apparatus{};
  EvolutionOptions evolution{};
};

/// Holds one diagonalized evolver per axis so repeated runs on the same
/// (psi_true, gap, T) share the expensive part.
class TomographyEngine {
 public:
  TomographyEngine(const Ket& psi_true, double gap, double T, const TomographyOptions& options = {});

  /// Ideal-mean mode: each estimate is the exact pointer shift.
  /// Sampled mode: each axis reads a single pointer position from a fresh
  /// pointer; the conditional system state carries over to the next axis after
  /// a projective test against psi_true, recorded in AxisRecord::survived.
  TomographyResult run(TomographyMode mode, std::uint64_t seed) const;

  /// Per-axis survival probabilities <psi|rho_S|psi> from the exact states.
  const std::array<double, 3>& survival_probabilities() const noexcept { return survival_; }
  const Ket& target() const noexcept { return psi_true_; }

 private:
  Ket psi_true_;
  std::vector<ExactEvolver> evolvers_;
  std::array<double, 3> exact_shift_{};
  std::array<double, 3> survival_{};
};

TomographyResult protective_tomography(const Ket& psi_true, double gap, double T,
                                       TomographyMode mode, std::uint64_t seed,
                                       const TomographyOptions& options = {});

}  // namespace protmeas
