#pragma once

// Single-mode Lindblad dynamics under sublattice loss.
//
// Each momentum sector lives in the Fock space {|0>, a†|0>, b†|0>, a†b†|0>} and
// the density matrix keeps only rho11, rho22, rho33, rho44 and rho23 = conj(rho32).

#include <array>
#include <complex>
#include <vector>

#include "openkz/models.hpp"

namespace openkz {

struct ModeState {
  double rho11 = 0.0;
  double rho22 = 0.0;
  double rho33 = 0.0;
  double rho44 = 0.0;
  cplx rho23{0.0, 0.0};

  double trace() const { return rho11 + rho22 + rho33 + rho44; }
  /// R_q = rho33 - rho22.
  double population_imbalance() const { return rho33 - rho22; }

  std::array<double, 6> to_array() const {
    return {rho11, rho22, rho33, rho44, rho23.real(), rho23.imag()};
  }
  static ModeState from_array(const std::array<double, 6>& y) {
    return {y[0], y[1], y[2], y[3], {y[4], y[5]}};
  }
};

struct DissipationConfig {
  double gamma_a = 0.0;
  double gamma_b = 0.0;

  double gamma() const { return gamma_a + gamma_b; }
  double delta() const { return gamma_a - gamma_b; }
  /// Limit of loss difference: exactly one sublattice is lossless and gamma > 0.
  bool is_lld() const { return gamma() > 0.0 && (gamma_a == 0.0 || gamma_b == 0.0); }
  void validate() const;
};

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Absolute ceiling on the step; the oscillation cap 0.1 / max(1, |dz|, |Delta|, gamma)
  /// is applied on top of it.
  double max_step = 0.1;
  int sample_count = 2;

  void validate() const;
};

enum class Variant { full, no_jump };
enum class InitialStateMode { exact_ground_state, b_polarized };

struct ModeTrajectory {
  std::vector<double> times;
  std::vector<ModeState> states;

  const ModeState& final_state() const { return states.back(); }
};

ModeState initial_state(const BlochVector& b, InitialStateMode mode);

ModeState rhs(const ModeState& s, const BlochVector& b, const DissipationConfig& d);
ModeState rhs_no_jump(const ModeState& s, const BlochVector& b, const DissipationConfig& d);

/// Integrates one momentum sector over the quench with an adaptive Dormand-Prince 5(4)
/// pair, sampling `cfg.sample_count` uniformly spaced times on [0, t_f].
ModeTrajectory evolve_mode(const ModelSpec& model, Momentum q, const QuenchProtocol& protocol,
                           const DissipationConfig& d, const IntegratorConfig& cfg,
                           Variant variant = Variant::full,
                           InitialStateMode init = InitialStateMode::exact_ground_state);

/// Same integration driven directly by a mode's (Delta_q, dz offset).
ModeTrajectory evolve_drive(const ModeDrive& drive, const QuenchProtocol& protocol,
                            const DissipationConfig& d, const IntegratorConfig& cfg,
                            Variant variant = Variant::full,
                            InitialStateMode init = InitialStateMode::exact_ground_state);

/// Smallest eigenvalue of the reconstructed 4x4 density matrix (its central 2x2 block
/// and the two diagonal corners).
double min_eigenvalue(const ModeState& s);

}  // namespace openkz
