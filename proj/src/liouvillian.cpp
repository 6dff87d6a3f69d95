#include "openkz/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "openkz/errors.hpp"

namespace openkz {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_lld(const DissipationConfig& d) {
  d.validate();
  if (!d.is_lld()) {
    throw PreconditionError("operation requires the limit of loss difference (|delta| = gamma > 0)");
  }
}

// -A + sqrt(B) >= 0, evaluated without cancellation for A > 0.
double lambda1_radicand(double A, double sqrt_B, double dz, double delta) {
  if (A > 0.0) return 64.0 * dz * dz * delta * delta / (A + sqrt_B);
  return sqrt_B - A;
}

double lambda1_plus(double dz, double delta_sq_norm, const DissipationConfig& d) {
  const double delta = d.delta();
  const double A = 16.0 * (dz * dz + delta_sq_norm) - delta * delta;
  const double sqrt_B = std::hypot(A, 8.0 * dz * delta);
  const double radicand = lambda1_radicand(A, sqrt_B, dz, delta);
  return -0.5 * d.gamma() + (std::numbers::sqrt2 / 4.0) * std::sqrt(radicand);
}

}  // namespace

std::array<cplx, 6> SpectrumResult::sorted() const {
  std::array<cplx, 6> out{lambda0, lambda1_plus, lambda2_plus, lambda2_minus, lambda1_minus, lambda3};
  std::sort(out.begin(), out.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

VectorizedState vectorize(const ModeState& s) {
  VectorizedState v;
  v << s.rho11, s.rho22, s.rho33, s.rho44, s.rho23, std::conj(s.rho23);
  return v;
}

LiouvillianMatrix assemble(const BlochVector& b, const DissipationConfig& d) {
  const double ga = d.gamma_a;
  const double gb = d.gamma_b;
  const double g = d.gamma();
  const cplx delta = b.delta();
  const cplx delta_c = std::conj(delta);
  LiouvillianMatrix L = LiouvillianMatrix::Zero();
  L(0, 1) = ga;
  L(0, 2) = gb;
  L(1, 1) = -ga;
  L(1, 3) = gb;
  L(1, 4) = kI * delta;
  L(1, 5) = -kI * delta_c;
  L(2, 2) = -gb;
  L(2, 3) = ga;
  L(2, 4) = -kI * delta;
  L(2, 5) = kI * delta_c;
  L(3, 3) = -g;
  L(4, 1) = kI * delta_c;
  L(4, 2) = -kI * delta_c;
  L(4, 4) = -2.0 * kI * b.dz - 0.5 * g;
  L(5, 1) = -kI * delta;
  L(5, 2) = kI * delta;
  L(5, 5) = 2.0 * kI * b.dz - 0.5 * g;
  return L;
}

SpectrumResult eigenvalues_closed_form(const BlochVector& b, const DissipationConfig& d) {
  const double g = d.gamma();
  const double delta = d.delta();
  const double dz = b.dz;
  SpectrumResult r;
  r.A = 16.0 * (dz * dz + b.delta_norm_sq()) - delta * delta;
  r.B = r.A * r.A + 64.0 * dz * dz * delta * delta;
  const double sqrt_B = std::hypot(r.A, 8.0 * dz * delta);
  // B >= A^2, so -A + sqrt(B) >= 0 and -A - sqrt(B) <= 0.
  const double plus_radicand = lambda1_radicand(r.A, sqrt_B, dz, delta);
  const double minus_radicand = r.A + sqrt_B;
  if (plus_radicand < 0.0 || minus_radicand < 0.0) {
    throw Error("Liouvillian radicands violate B >= A^2");
  }
  const double k = std::numbers::sqrt2 / 4.0;
  const double s1 = k * std::sqrt(plus_radicand);
  const double s2 = k * std::sqrt(minus_radicand);
  r.lambda0 = 0.0;
  r.lambda1_plus = -0.5 * g + s1;
  r.lambda1_minus = -0.5 * g - s1;
  r.lambda2_plus = cplx{-0.5 * g, s2};
  r.lambda2_minus = cplx{-0.5 * g, -s2};
  r.lambda3 = -g;
  return r;
}

std::array<cplx, 6> eigenvalues_numeric(const LiouvillianMatrix& L) {
  Eigen::ComplexEigenSolver<LiouvillianMatrix> solver(L, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed to converge");
  std::array<cplx, 6> out{};
  for (int i = 0; i < 6; ++i) out[i] = solver.eigenvalues()[i];
  return out;
}

double spectral_gap(const BlochVector& b, const DissipationConfig& d) {
  return -lambda1_plus(b.dz, b.delta_norm_sq(), d);
}

double spectral_gap_expansion(const BlochVector& b, const DissipationConfig& d) {
  const double ad = std::abs(d.delta());
  return 0.5 * d.gamma() - 0.5 * ad +
         4.0 * ad * b.delta_norm_sq() / (16.0 * b.dz * b.dz + d.delta() * d.delta());
}

double gap_factor(double dz_offset, const QuenchProtocol& protocol, const DissipationConfig& d) {
  require_lld(d);
  const double g = d.gamma();
  const double dz_i = protocol.u_i + dz_offset;
  const double dz_f = protocol.u_f + dz_offset;
  return std::atan(4.0 * dz_i / g) - std::atan(4.0 * dz_f / g);
}

GapIntegral gap_integral(const ModelSpec& model, Momentum q, const QuenchProtocol& protocol,
                         const DissipationConfig& d) {
  protocol.validate();
  const ModeDrive drive = mode_drive(model, q);
  GapIntegral out;
  out.f = gap_factor(drive.dz_offset, protocol, d);
  out.exponent = out.f * protocol.tau_q * std::norm(drive.delta);
  return out;
}

double integrated_lambda1_plus(const ModeDrive& drive, const QuenchProtocol& protocol,
                               const DissipationConfig& d, LldRate rate) {
  protocol.validate();
  const double delta_sq = std::norm(drive.delta);
  auto integrand = [&](double u) {
    const BlochVector b = drive.at(u);
    if (rate == LldRate::gap_expansion) return -spectral_gap_expansion(b, d);
    return lambda1_plus(b.dz, delta_sq, d);
  };
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  // dt = tau_Q du; the integrand has a feature of width ~gamma/4 around dz = 0.
  std::vector<double> breaks{protocol.u_f};
  const double u_zero = -drive.dz_offset;
  const double width = std::max(0.25 * d.gamma(), 1e-3);
  for (double p : {u_zero - 4.0 * width, u_zero, u_zero + 4.0 * width}) {
    if (p > protocol.u_f && p < protocol.u_i) breaks.push_back(p);
  }
  breaks.push_back(protocol.u_i);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += Quadrature::integrate(integrand, breaks[i], breaks[i + 1], 20, 1e-13);
  }
  return protocol.tau_q * total;
}

ModeState lld_long_time_state(const ModelSpec& model, Momentum q, const QuenchProtocol& protocol,
                              const DissipationConfig& d, LldRate rate) {
  require_lld(d);
  protocol.validate();
  const ModeDrive drive = mode_drive(model, q);
  const double dz_i = protocol.u_i + drive.dz_offset;
  const double sign = dz_i * d.delta();
  if (sign == 0.0) {
    throw PreconditionError("initial dz vanishes; the occupied sublattice is undefined");
  }
  ModeState s;
  if (sign < 0.0) {
    s.rho11 = 1.0;
    return s;
  }
  const double y = std::exp(integrated_lambda1_plus(drive, protocol, d, rate));
  s.rho11 = 1.0 - y;
  if (d.delta() > 0.0) {
    s.rho33 = y;
  } else {
    s.rho22 = y;
  }
  return s;
}

}  // namespace openkz
