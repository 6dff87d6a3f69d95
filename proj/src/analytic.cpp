#include "openkz/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "openkz/errors.hpp"
#include "openkz/liouvillian.hpp"

namespace openkz {

namespace {

constexpr double kPi = std::numbers::pi;

void require_lld(const DissipationConfig& d) {
  d.validate();
  if (!d.is_lld()) {
    throw PreconditionError("prediction requires the limit of loss difference (|delta| = gamma > 0)");
  }
}

// Brillouin-zone measure per unit of the d-dimensional momentum integral:
// 1/(2 pi) in 1D and A_cell/(2 pi)^2 in 2D.
double bz_measure(const ModelSpec& model) {
  if (model.dimension() == 1) return 1.0 / (2.0 * kPi);
  return honeycomb::cell_area() / (4.0 * kPi * kPi);
}

// Integral of e^{-a c^2 |k|^2} over d-dimensional k, times the BZ measure.
double gaussian_corner_integral(const ModelSpec& model, double a, double slope) {
  if (!(a > 0.0)) return std::numeric_limits<double>::infinity();
  if (model.dimension() == 1) return bz_measure(model) * std::sqrt(kPi / a) / slope;
  return bz_measure(model) * kPi / (a * slope * slope);
}

double loss_difference_weight(const QuenchProtocol& p, const DissipationConfig& d) {
  // (e^{u_bar delta tau} - 1) e^{-u_bar gamma tau}, written without overflow.
  const double s = p.u_bar() * p.tau_q;
  return std::exp(s * (d.delta() - d.gamma())) - std::exp(-s * d.gamma());
}

}  // namespace

double ScalingPrediction::value(double tau_q) const { return prefactor * std::pow(tau_q, -beta); }

bool regime_warning(const QuenchProtocol& protocol, const DissipationConfig& d) {
  const double floor = 5.0 * std::max(1.0, d.gamma());
  return std::abs(protocol.u_i) < floor || std::abs(protocol.u_f) < floor;
}

double rq_isolated(const BlochVector& b_final, double tau_q) {
  const Bogoliubov bg = bogoliubov(b_final);
  return 2.0 * std::exp(-kPi * tau_q * b_final.delta_norm_sq()) + 2.0 * std::norm(bg.u) - 1.0;
}

double rq_uniform_loss(const BlochVector& b_final, const QuenchProtocol& protocol,
                       const DissipationConfig& d) {
  d.validate();
  if (d.delta() != 0.0) throw PreconditionError("uniform-loss solution requires gamma_a = gamma_b");
  return std::exp(-protocol.u_bar() * d.gamma() * protocol.tau_q) *
         rq_isolated(b_final, protocol.tau_q);
}

double n_uniform_loss(const QuenchProtocol& protocol, const DissipationConfig& d) {
  const double e = std::exp(-protocol.u_bar() * d.gamma() * protocol.tau_q);
  return e / (2.0 * kPi * std::sqrt(protocol.tau_q)) + 0.5 * (1.0 - e);
}

double n_closed_form(const QuenchProtocol& protocol, const DissipationConfig& d) {
  return n_uniform_loss(protocol, d) +
         loss_difference_weight(protocol, d) / (4.0 * kPi * std::sqrt(protocol.tau_q));
}

std::pair<double, double> ground_state_sublattice_densities(const ModelSpec& model, double u,
                                                            int n_per_dim) {
  const MomentumGrid grid = bz_grid(model, n_per_dim);
  double na = 0.0;
  double nb = 0.0;
  for (const Momentum& q : grid.points) {
    const Bogoliubov bg = bogoliubov(bloch_vector(model, q, u));
    na += std::norm(bg.v);
    nb += std::norm(bg.u);
  }
  return {na * grid.weight, nb * grid.weight};
}

FermionDensities fermion_density_closed_form(const QuenchProtocol& protocol,
                                             const DissipationConfig& d, int gs_grid) {
  const auto [na_gs, nb_gs] = ground_state_sublattice_densities(rice_mele(), protocol.u_f, gs_grid);
  const double e = std::exp(-protocol.u_bar() * d.gamma() * protocol.tau_q);
  const double kz = 1.0 / (2.0 * kPi * std::sqrt(protocol.tau_q));
  const double ld = loss_difference_weight(protocol, d);
  FermionDensities out;
  out.a = e * (na_gs - kz);
  out.b = e * (nb_gs + kz) + ld * kz;
  out.total = e + ld * kz;
  return out;
}

double pkz_prediction(const ModelSpec& model, const CriticalMode& corner,
                      const QuenchProtocol& protocol, const DissipationConfig& d,
                      std::optional<double> t) {
  require_lld(d);
  protocol.validate();
  const double d_i = protocol.u_i - corner.u_c;
  const double u_end = t ? protocol.u_at(*t) : protocol.u_f;
  const double d_end = u_end - corner.u_c;
  if (!(d_i * d.delta() > 0.0)) {
    throw PreconditionError("pKZ requires the initially occupied sublattice to be lossless");
  }
  if (!(d_i * d_end > 0.0)) {
    throw PreconditionError("dz changes sign at corner " + corner.label + "; this corner is KZ");
  }
  const double x = 1.0 / d_end - 1.0 / d_i;
  const double f = 0.25 * d.gamma() * x;
  return gaussian_corner_integral(model, f * protocol.tau_q, corner.slope);
}

double kz_corner_density(const ModelSpec& model, const CriticalMode& corner, double tau_q) {
  return gaussian_corner_integral(model, kPi * tau_q, corner.slope);
}

double corner_density_exact_f(const ModelSpec& model, const CriticalMode& corner,
                              const QuenchProtocol& protocol, const DissipationConfig& d) {
  const double f = gap_factor(-corner.u_c, protocol, d);
  return gaussian_corner_integral(model, f * protocol.tau_q, corner.slope);
}

ScalingPrediction kz_prediction(const ModelSpec& model, const QuenchProtocol& protocol,
                                const DissipationConfig& d) {
  require_lld(d);
  protocol.validate();
  ScalingPrediction out;
  out.beta = model.dimension() == 1 ? 0.5 : 1.0;
  out.regime_warning = regime_warning(protocol, d);
  // Prefactors are tau-independent: evaluate at tau = 1 on a rescaled protocol.
  QuenchProtocol unit = protocol;
  unit.tau_q = 1.0;
  std::string id;
  for (const CriticalMode& cm : critical_modes(model)) {
    CornerContribution c;
    c.label = cm.label;
    const double d_i = protocol.u_i - cm.u_c;
    const double d_f = protocol.u_f - cm.u_c;
    if (d_i * d.delta() > 0.0) {
      if (d_i * d_f < 0.0) {
        c.behaviour = CornerBehaviour::kz;
        c.prefactor = kz_corner_density(model, cm, 1.0);
      } else if (d_i * d_f > 0.0) {
        c.behaviour = CornerBehaviour::pkz;
        c.prefactor = pkz_prediction(model, cm, unit, d);
      }
    }
    if (c.behaviour != CornerBehaviour::none) {
      if (!id.empty()) id += "+";
      id += (c.behaviour == CornerBehaviour::kz ? "KZ[" : "pKZ[") + cm.label + "]";
      out.prefactor += c.prefactor;
    }
    out.corners.push_back(c);
  }
  out.formula_id = id.empty() ? "none: no eligible corner" : id;
  return out;
}

double no_jump_n(const QuenchProtocol& protocol, const DissipationConfig& d) {
  const double e = std::exp(-protocol.u_bar() * d.gamma() * protocol.tau_q);
  const double kz = 1.0 / (2.0 * kPi * std::sqrt(protocol.tau_q));
  return e * kz + loss_difference_weight(protocol, d) * kz;
}

std::pair<double, double> gh_functions(double q, double tau_q, const DissipationConfig& d) {
  if (d.delta() == 0.0) throw PreconditionError("g and h are undefined for delta = 0");
  const double g = std::exp(-kPi * tau_q * q * q);
  return {g, -g};
}

std::pair<double, double> reconstruct_gh(const ModelSpec& model, Momentum q,
                                         const QuenchProtocol& protocol,
                                         const DissipationConfig& d, const IntegratorConfig& cfg) {
  if (d.delta() == 0.0) throw PreconditionError("g and h are undefined for delta = 0");
  const DissipationConfig uniform{0.5 * d.gamma(), 0.5 * d.gamma()};
  IntegratorConfig endpoint = cfg;
  endpoint.sample_count = 2;
  const ModeState s = evolve_mode(model, q, protocol, d, endpoint).final_state();
  const ModeState s0 = evolve_mode(model, q, protocol, uniform, endpoint).final_state();
  const double t_f = protocol.t_final();
  const double lift = std::exp(0.5 * d.gamma() * t_f);
  const double denom = std::expm1(0.5 * d.delta() * t_f);
  const double g = lift * (s.population_imbalance() - s0.population_imbalance()) / denom;
  const double h = lift * ((s.rho11 - s.rho44) - (s0.rho11 - s0.rho44)) / denom;
  return {g, h};
}

}  // namespace openkz
