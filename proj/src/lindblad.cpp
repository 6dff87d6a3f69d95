#include "openkz/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "openkz/errors.hpp"

namespace openkz {

namespace {

using State = std::array<double, 6>;

struct Coefficients {
  double gamma_a;
  double gamma_b;
  double dr;
  double di;
};

// Equations of motion on the packed state (rho11, rho22, rho33, rho44, Re rho23, Im rho23).
template <bool kJumps>
inline void derivative(const State& y, double dz, const Coefficients& c, State& out) {
  const double gamma = c.gamma_a + c.gamma_b;
  const double xr = y[4];
  const double xi = y[5];
  // i Delta rho23 + c.c.
  const double transfer = -2.0 * (c.dr * xi + c.di * xr);
  const double imbalance = y[2] - y[1];
  if constexpr (kJumps) {
    out[0] = c.gamma_a * y[1] + c.gamma_b * y[2];
    out[1] = -c.gamma_a * y[1] + c.gamma_b * y[3] + transfer;
    out[2] = -c.gamma_b * y[2] + c.gamma_a * y[3] - transfer;
  } else {
    out[0] = 0.0;
    out[1] = -c.gamma_a * y[1] + transfer;
    out[2] = -c.gamma_b * y[2] - transfer;
  }
  out[3] = -gamma * y[3];
  // -(gamma/2) rho23 - 2i dz rho23 - i conj(Delta) R
  out[4] = -0.5 * gamma * xr + 2.0 * dz * xi - c.di * imbalance;
  out[5] = -0.5 * gamma * xi - 2.0 * dz * xr - c.dr * imbalance;
}

template <bool kJumps>
ModeState rhs_impl(const ModeState& s, const BlochVector& b, const DissipationConfig& d) {
  State out{};
  derivative<kJumps>(s.to_array(), b.dz, {d.gamma_a, d.gamma_b, b.dx, b.dy}, out);
  return ModeState::from_array(out);
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

template <bool kJumps>
ModeTrajectory integrate(const ModeDrive& drive, const QuenchProtocol& protocol,
                         const DissipationConfig& d, const IntegratorConfig& cfg,
                         InitialStateMode init) {
  const double t_final = protocol.t_final();
  const double tau = protocol.tau_q;
  const Coefficients coeff{d.gamma_a, d.gamma_b, drive.delta.real(), drive.delta.imag()};
  const double delta_abs = std::abs(drive.delta);
  const double gamma = d.gamma();
  auto dz_at = [&](double t) { return protocol.u_i - t / tau + drive.dz_offset; };
  auto step_cap = [&](double t) {
    const double scale = std::max({1.0, std::abs(dz_at(t)), delta_abs, gamma});
    return std::min(cfg.max_step, 0.1 / scale);
  };

  const int samples = cfg.sample_count;
  ModeTrajectory traj;
  traj.times.reserve(samples);
  traj.states.reserve(samples);

  State y = initial_state(drive.at(protocol.u_i), init).to_array();
  traj.times.push_back(0.0);
  traj.states.push_back(ModeState::from_array(y));

  State k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, tmp{}, y_new{};
  double t = 0.0;
  derivative<kJumps>(y, dz_at(t), coeff, k1);
  double h = 0.1 * step_cap(0.0);

  for (int k = 1; k < samples; ++k) {
    const double t_target = (k == samples - 1) ? t_final : t_final * k / (samples - 1);
    while (t < t_target) {
      const double cap = step_cap(t);
      h = std::min(h, cap);
      const bool last = (t + h >= t_target);
      const double h_try = last ? t_target - t : h;
      const double tiny = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t);
      if (h_try < tiny && !last) {
        std::ostringstream os;
        os << "step size underflow at t=" << t;
        throw StiffnessError(os.str(), t);
      }

      for (int i = 0; i < 6; ++i) tmp[i] = y[i] + h_try * a21 * k1[i];
      derivative<kJumps>(tmp, dz_at(t + c2 * h_try), coeff, k2);
      for (int i = 0; i < 6; ++i) tmp[i] = y[i] + h_try * (a31 * k1[i] + a32 * k2[i]);
      derivative<kJumps>(tmp, dz_at(t + c3 * h_try), coeff, k3);
      for (int i = 0; i < 6; ++i)
        tmp[i] = y[i] + h_try * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      derivative<kJumps>(tmp, dz_at(t + c4 * h_try), coeff, k4);
      for (int i = 0; i < 6; ++i)
        tmp[i] = y[i] + h_try * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      derivative<kJumps>(tmp, dz_at(t + c5 * h_try), coeff, k5);
      for (int i = 0; i < 6; ++i)
        tmp[i] = y[i] +
                 h_try * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      derivative<kJumps>(tmp, dz_at(t + h_try), coeff, k6);
      for (int i = 0; i < 6; ++i)
        y_new[i] =
            y[i] + h_try * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      derivative<kJumps>(y_new, dz_at(t + h_try), coeff, k7);

      double err_sq = 0.0;
      for (int i = 0; i < 6; ++i) {
        const double e = h_try * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
        const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err_sq += (e / sc) * (e / sc);
      }
      const double err = std::sqrt(err_sq / 6.0);

      if (err <= 1.0) {
        t = last ? t_target : t + h_try;
        y = y_new;
        k1 = k7;
        const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A clipped final step says nothing about the natural step; keep h.
        if (!last) h = h_try * grow;
      } else {
        h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        if (h < tiny) {
          std::ostringstream os;
          os << "step size underflow at t=" << t;
          throw StiffnessError(os.str(), t);
        }
      }
    }
    traj.times.push_back(t_target);
    traj.states.push_back(ModeState::from_array(y));
  }
  return traj;
}

}  // namespace

void DissipationConfig::validate() const {
  if (!std::isfinite(gamma_a) || !std::isfinite(gamma_b) || gamma_a < 0.0 || gamma_b < 0.0) {
    throw PreconditionError("loss rates gamma_a, gamma_b must be finite and nonnegative");
  }
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0) || !(max_step > 0.0)) {
    throw PreconditionError("integrator tolerances and max_step must be positive");
  }
  if (sample_count < 2) throw PreconditionError("sample_count must be at least 2");
}

ModeState initial_state(const BlochVector& b, InitialStateMode mode) {
  if (!(b.omega() > 0.0)) throw SingularPointError("initial Hamiltonian is gapless");
  if (mode == InitialStateMode::b_polarized) return {0.0, 0.0, 1.0, 0.0, {0.0, 0.0}};
  // Lower band eta_2^dagger|0> = (-v a^dagger + u b^dagger)|0>.
  const Bogoliubov bg = bogoliubov(b);
  ModeState s;
  s.rho22 = std::norm(bg.v);
  s.rho33 = std::norm(bg.u);
  s.rho23 = -bg.v * std::conj(bg.u);
  return s;
}

ModeState rhs(const ModeState& s, const BlochVector& b, const DissipationConfig& d) {
  return rhs_impl<true>(s, b, d);
}

ModeState rhs_no_jump(const ModeState& s, const BlochVector& b, const DissipationConfig& d) {
  return rhs_impl<false>(s, b, d);
}

ModeTrajectory evolve_drive(const ModeDrive& drive, const QuenchProtocol& protocol,
                            const DissipationConfig& d, const IntegratorConfig& cfg,
                            Variant variant, InitialStateMode init) {
  protocol.validate();
  d.validate();
  cfg.validate();
  if (variant == Variant::full) return integrate<true>(drive, protocol, d, cfg, init);
  return integrate<false>(drive, protocol, d, cfg, init);
}

ModeTrajectory evolve_mode(const ModelSpec& model, Momentum q, const QuenchProtocol& protocol,
                           const DissipationConfig& d, const IntegratorConfig& cfg,
                           Variant variant, InitialStateMode init) {
  const ModeDrive drive = mode_drive(model, q);
  try {
    return evolve_drive(drive, protocol, d, cfg, variant, init);
  } catch (const StiffnessError& e) {
    std::ostringstream os;
    os << e.what() << " (q=" << q.x;
    if (model.dimension() == 2) os << ", " << q.y;
    os << ", tau_Q=" << protocol.tau_q << ")";
    throw StiffnessError(os.str(), e.time());
  }
}

double min_eigenvalue(const ModeState& s) {
  const double mean = 0.5 * (s.rho22 + s.rho33);
  const double half_gap = std::hypot(0.5 * (s.rho22 - s.rho33), std::abs(s.rho23));
  return std::min({s.rho11, s.rho44, mean - half_gap});
}

}  // namespace openkz
