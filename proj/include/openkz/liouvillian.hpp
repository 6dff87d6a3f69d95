#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "openkz/lindblad.hpp"
#include "openkz/models.hpp"

namespace openkz {

/// 6x6 Liouvillian acting on (rho11, rho22, rho33, rho44, rho23, rho32).
using LiouvillianMatrix = Eigen::Matrix<cplx, 6, 6>;
using VectorizedState = Eigen::Matrix<cplx, 6, 1>;

struct SpectrumResult {
  cplx lambda0;
  cplx lambda1_plus;
  cplx lambda2_plus;
  cplx lambda2_minus;
  cplx lambda1_minus;
  cplx lambda3;
  double A = 0.0;
  double B = 0.0;

  /// All six eigenvalues, descending real part with ties broken by descending imaginary part.
  std::array<cplx, 6> sorted() const;
};

VectorizedState vectorize(const ModeState& s);

LiouvillianMatrix assemble(const BlochVector& b, const DissipationConfig& d);

SpectrumResult eigenvalues_closed_form(const BlochVector& b, const DissipationConfig& d);

/// Eigenvalues of the assembled matrix from a dense complex eigendecomposition.
std::array<cplx, 6> eigenvalues_numeric(const LiouvillianMatrix& L);

/// Exact Liouvillian gap lambda0 - lambda1_plus.
double spectral_gap(const BlochVector& b, const DissipationConfig& d);

/// Small-|Delta_q| expansion of the gap:
/// gamma/2 - |delta|/2 + 4|delta| |Delta|^2 / (16 dz^2 + delta^2).
double spectral_gap_expansion(const BlochVector& b, const DissipationConfig& d);

struct GapIntegral {
  /// arctan(4 dz(t_i)/gamma) - arctan(4 dz(t_f)/gamma).
  double f = 0.0;
  /// f * tau_Q * |Delta_q|^2.
  double exponent = 0.0;
};

/// Closed-form time integral of the LLD gap over the quench for one momentum sector.
GapIntegral gap_integral(const ModelSpec& model, Momentum q, const QuenchProtocol& protocol,
                         const DissipationConfig& d);

/// f for a mode with dz(t) = u(t) + dz_offset; requires the LLD.
double gap_factor(double dz_offset, const QuenchProtocol& protocol, const DissipationConfig& d);

/// Instantaneous decay rate integrated by the LLD propagator. The exact eigenvalue
/// lambda1_plus is only followed adiabatically while |Delta_q| << gamma; the small-|Delta_q|
/// gap expansion tracks the full dynamics over the whole Gaussian window.
enum class LldRate { gap_expansion, exact_eigenvalue };

/// Long-time state of one sector at the LLD from the commuting-Liouvillian propagator.
/// The occupied lossless sublattice carries y = exp(int lambda dt) when
/// dz(t_i) * delta > 0; otherwise the sector empties.
ModeState lld_long_time_state(const ModelSpec& model, Momentum q, const QuenchProtocol& protocol,
                              const DissipationConfig& d, LldRate rate = LldRate::gap_expansion);

/// int_0^{t_f} lambda(t) dt by adaptive Gauss-Kronrod quadrature, lambda = -gap.
double integrated_lambda1_plus(const ModeDrive& drive, const QuenchProtocol& protocol,
                               const DissipationConfig& d,
                               LldRate rate = LldRate::exact_eigenvalue);

}  // namespace openkz
