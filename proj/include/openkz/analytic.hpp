#pragma once

// Closed-form predictions used as oracles for the simulator: uniform-loss solutions,
// loss-difference corrections, LLD Gaussian decay and the KZ / pseudo-KZ laws.
//
// Rice-Mele formulas assume the normalization v = -w = 1 (critical mode q_c = 0,
// unit slope), for which the KZ prefactors are A = 1/(2 pi) and A' = 1/(4 pi).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "openkz/lindblad.hpp"
#include "openkz/models.hpp"

namespace openkz {

enum class CornerBehaviour { none, kz, pkz };

struct CornerContribution {
  std::string label;
  CornerBehaviour behaviour = CornerBehaviour::none;
  /// Contribution = prefactor * tau_Q^{-beta}.
  double prefactor = 0.0;
};

struct ScalingPrediction {
  /// beta = d nu / (1 + z nu) with z = nu = 1.
  double beta = 0.5;
  double prefactor = 0.0;
  std::string formula_id;
  /// Set when |u_i| or |u_f| < 5 max(1, gamma): the asymptotic regime is doubtful.
  bool regime_warning = false;
  std::vector<CornerContribution> corners;

  double value(double tau_q) const;
};

struct FermionDensities {
  double total = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// 2 e^{-pi tau |Delta|^2} + 2 |u_q|^2 - 1 with (Delta, u_q) from the final Bloch vector.
double rq_isolated(const BlochVector& b_final, double tau_q);

/// e^{-u_bar gamma tau} * rq_isolated. Requires delta = 0.
double rq_uniform_loss(const BlochVector& b_final, const QuenchProtocol& protocol,
                       const DissipationConfig& d);

/// Excitation density of the Rice-Mele chain for arbitrary (gamma_a, gamma_b).
double n_closed_form(const QuenchProtocol& protocol, const DissipationConfig& d);

/// First two terms of n_closed_form: suppressed KZ plus the AKZ saturation.
double n_uniform_loss(const QuenchProtocol& protocol, const DissipationConfig& d);

/// Residual fermion densities of the Rice-Mele chain. Ground-state sublattice
/// occupations at u_f are integrated on a `gs_grid` point BZ grid.
FermionDensities fermion_density_closed_form(const QuenchProtocol& protocol,
                                             const DissipationConfig& d, int gs_grid = 2048);

/// Ground-state sublattice densities (N_a^GS, N_b^GS) at on-site energy u.
std::pair<double, double> ground_state_sublattice_densities(const ModelSpec& model, double u,
                                                            int n_per_dim);

/// Pseudo-KZ residual density from one critical corner at the LLD. With `t` set, the
/// time-resolved value with u_f replaced by u(t).
double pkz_prediction(const ModelSpec& model, const CriticalMode& corner,
                      const QuenchProtocol& protocol, const DissipationConfig& d,
                      std::optional<double> t = std::nullopt);

/// Sum of per-corner KZ / pKZ contributions at the LLD.
ScalingPrediction kz_prediction(const ModelSpec& model, const QuenchProtocol& protocol,
                                const DissipationConfig& d);

/// KZ density of one crossing corner, A_corner * tau^{-beta} (f = pi).
double kz_corner_density(const ModelSpec& model, const CriticalMode& corner, double tau_q);

/// Gaussian-integrated corner density e^{-f tau |Delta|^2} with the exact arctan f.
double corner_density_exact_f(const ModelSpec& model, const CriticalMode& corner,
                              const QuenchProtocol& protocol, const DissipationConfig& d);

/// Excitation density of the Rice-Mele chain without quantum-jump terms.
double no_jump_n(const QuenchProtocol& protocol, const DissipationConfig& d);

/// Predicted (g, h) = (e^{-pi tau q^2}, -e^{-pi tau q^2}). Requires delta != 0.
std::pair<double, double> gh_functions(double q, double tau_q, const DissipationConfig& d);

/// (g, h) rebuilt from two ODE runs (the given loss and its delta = 0 counterpart with the
/// same gamma).
std::pair<double, double> reconstruct_gh(const ModelSpec& model, Momentum q,
                                         const QuenchProtocol& protocol,
                                         const DissipationConfig& d, const IntegratorConfig& cfg);

bool regime_warning(const QuenchProtocol& protocol, const DissipationConfig& d);

}  // namespace openkz
