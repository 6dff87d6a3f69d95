#include "openkz/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "openkz/errors.hpp"

namespace openkz {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = std::numbers::sqrt3;
// Slack on BZ-boundary membership tests.
constexpr double kBoundaryTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::array<double, 2> fractional(Momentum q) {
  // f_j = q . A_j / 2pi with A_1 = a1 - a3, A_2 = a2 - a3.
  const double f1 = (q.x * (kSqrt3 / 2.0) + q.y * 1.5) / (2.0 * kPi);
  const double f2 = (q.x * kSqrt3) / (2.0 * kPi);
  return {f1, f2};
}

void check_momentum(const ModelSpec& model, Momentum q) {
  if (!std::isfinite(q.x) || !std::isfinite(q.y)) {
    throw DomainError("momentum is not finite");
  }
  if (model.dimension() == 1) {
    if (q.y != 0.0 || q.x < -kPi - kBoundaryTol || q.x > kPi + kBoundaryTol) {
      std::ostringstream os;
      os << "momentum q=" << q.x << " lies outside the 1D Brillouin zone [-pi, pi]";
      throw DomainError(os.str());
    }
    return;
  }
  const auto f = fractional(q);
  for (double fj : f) {
    if (fj < -1.0 - kBoundaryTol || fj > 1.0 + kBoundaryTol) {
      std::ostringstream os;
      os << "momentum (" << q.x << ", " << q.y
         << ") lies outside the sampled Brillouin-zone cells";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

int ModelSpec::dimension() const {
  return std::holds_alternative<Haldane>(variant) ? 2 : 1;
}

std::string ModelSpec::name() const {
  return std::visit(overloaded{[](const RiceMele&) { return std::string("rice_mele"); },
                               [](const Shockley&) { return std::string("shockley"); },
                               [](const Haldane&) { return std::string("haldane"); }},
                    variant);
}

void ModelSpec::validate() const {
  std::visit(overloaded{[](const RiceMele& m) {
                          if (!std::isfinite(m.v) || !std::isfinite(m.w)) {
                            throw PreconditionError("Rice-Mele hoppings must be finite");
                          }
                        },
                        [](const Shockley& m) {
                          if (!(m.v >= 0.0) || !(m.w >= 0.0) || !std::isfinite(m.v) ||
                              !std::isfinite(m.w)) {
                            throw PreconditionError("Shockley model requires v >= 0 and w >= 0");
                          }
                        },
                        [](const Haldane& m) {
                          if (!std::isfinite(m.t1) || !std::isfinite(m.t2) ||
                              !std::isfinite(m.phi)) {
                            throw PreconditionError("Haldane parameters must be finite");
                          }
                        }},
             variant);
}

ModelSpec rice_mele(double v, double w) { return ModelSpec{RiceMele{v, w}}; }
ModelSpec shockley(double v, double w) { return ModelSpec{Shockley{v, w}}; }
ModelSpec haldane(double t1, double t2, double phi) { return ModelSpec{Haldane{t1, t2, phi}}; }

double BlochVector::omega() const { return std::sqrt(dx * dx + dy * dy + dz * dz); }

double QuenchProtocol::u_bar() const { return std::abs(u_i - u_f) / 2.0; }

double QuenchProtocol::u_at(double t) const {
  if (t >= t_final()) return u_f;
  return u_i - t / tau_q;
}

void QuenchProtocol::validate() const {
  if (!std::isfinite(u_i) || !std::isfinite(u_f) || !std::isfinite(tau_q)) {
    throw PreconditionError("quench protocol parameters must be finite");
  }
  if (!(u_i > u_f)) {
    throw PreconditionError("quench protocol requires u_i > u_f (u decreases in time)");
  }
  const double floor =
      10.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(u_i) + std::abs(u_f));
  if (!(tau_q > floor)) {
    throw PreconditionError("quench time tau_Q must be positive; sudden quenches are not supported");
  }
}

namespace honeycomb {

std::array<std::array<double, 2>, 3> bond_vectors() {
  return {{{0.0, 1.0}, {kSqrt3 / 2.0, -0.5}, {-kSqrt3 / 2.0, -0.5}}};
}

std::array<std::array<double, 2>, 3> second_neighbour_vectors() {
  const auto a = bond_vectors();
  auto diff = [](const std::array<double, 2>& p, const std::array<double, 2>& q) {
    return std::array<double, 2>{p[0] - q[0], p[1] - q[1]};
  };
  return {diff(a[1], a[2]), diff(a[2], a[0]), diff(a[0], a[1])};
}

std::array<std::array<double, 2>, 2> reciprocal_basis() {
  return {{{0.0, 4.0 * kPi / 3.0}, {2.0 * kPi / kSqrt3, -2.0 * kPi / 3.0}}};
}

Momentum corner(int i) {
  if (i < 1 || i > 6) throw DomainError("Brillouin-zone corner index must be in 1..6");
  const double k = 4.0 * kPi / (3.0 * kSqrt3);
  const double angle = static_cast<double>(i) * kPi / 3.0;
  return {k * std::cos(angle), k * std::sin(angle)};
}

double cell_area() { return 1.5 * kSqrt3; }

}  // namespace honeycomb

ModeDrive mode_drive(const ModelSpec& model, Momentum q) {
  check_momentum(model, q);
  return std::visit(
      overloaded{[&](const RiceMele& m) {
                   return ModeDrive{{m.v + m.w * std::cos(q.x), m.w * std::sin(q.x)}, 0.0};
                 },
                 [&](const Shockley& m) {
                   return ModeDrive{{0.0, 2.0 * m.w * std::sin(q.x)}, -2.0 * m.v * std::cos(q.x)};
                 },
                 [&](const Haldane& m) {
                   double cx = 0.0;
                   double cy = 0.0;
                   for (const auto& a : honeycomb::bond_vectors()) {
                     const double phase = q.x * a[0] + q.y * a[1];
                     cx += std::cos(phase);
                     cy += std::sin(phase);
                   }
                   double s = 0.0;
                   for (const auto& b : honeycomb::second_neighbour_vectors()) {
                     s += std::sin(q.x * b[0] + q.y * b[1]);
                   }
                   // The t2 cos(phi) term is proportional to the identity and drops out.
                   return ModeDrive{{-m.t1 * cx, -m.t1 * cy}, -2.0 * m.t2 * std::sin(m.phi) * s};
                 }},
      model.variant);
}

BlochVector bloch_vector(const ModelSpec& model, Momentum q, double u) {
  return mode_drive(model, q).at(u);
}

Bogoliubov bogoliubov(const BlochVector& b) {
  const double omega = b.omega();
  if (!(omega > 0.0)) throw SingularPointError("Bogoliubov rotation undefined at a gapless point");
  // |u|^2 = (omega + dz) / 2 omega, |v|^2 = (omega - dz) / 2 omega; the phase of v
  // follows conj(Delta). Written this way the limit dz -> -omega stays regular.
  const double u_abs = std::sqrt(std::max(0.0, (omega + b.dz) / (2.0 * omega)));
  const double v_abs = std::sqrt(std::max(0.0, (omega - b.dz) / (2.0 * omega)));
  const double delta_abs = std::hypot(b.dx, b.dy);
  cplx phase{1.0, 0.0};
  if (delta_abs > 0.0) phase = cplx{b.dx, -b.dy} / delta_abs;
  return {cplx{u_abs, 0.0}, v_abs * phase, omega};
}

std::vector<CriticalMode> critical_modes(const ModelSpec& model) {
  return std::visit(
      overloaded{[](const RiceMele& m) {
                   std::vector<CriticalMode> out;
                   if (m.w == 0.0 || std::abs(m.v) != std::abs(m.w)) return out;
                   // Delta_q = v + w e^{iq} vanishes at q = 0 (v = -w) or q = pi (v = w).
                   const bool at_zero = (m.v == -m.w);
                   out.push_back({{at_zero ? 0.0 : kPi, 0.0},
                                  0.0,
                                  std::abs(m.w),
                                  at_zero ? "q_c=0" : "q_c=pi"});
                   return out;
                 },
                 [](const Shockley& m) {
                   return std::vector<CriticalMode>{
                       {{0.0, 0.0}, 2.0 * m.v, 2.0 * m.w, "q_c=0"},
                       {{kPi, 0.0}, -2.0 * m.v, 2.0 * m.w, "q_c=pi"}};
                 },
                 [](const Haldane& m) {
                   const double uc = 3.0 * kSqrt3 * m.t2 * std::sin(m.phi);
                   const double slope = 1.5 * std::abs(m.t1);
                   return std::vector<CriticalMode>{{honeycomb::corner(1), uc, slope, "odd"},
                                                    {honeycomb::corner(2), -uc, slope, "even"}};
                 }},
      model.variant);
}

int winding_number(const ModelSpec& model, double u, int n_points) {
  if (model.dimension() != 1) throw DomainError("winding number is defined for 1D models only");
  if (n_points < 16) throw DomainError("winding number needs at least 16 loop points");
  for (const auto& cm : critical_modes(model)) {
    if (u == cm.u_c) throw SingularPointError("winding number undefined on a critical point");
  }
  const bool rice_mele = std::holds_alternative<RiceMele>(model.variant);
  if (rice_mele && u != 0.0) {
    throw DomainError("Rice-Mele Bloch vector is not planar for u != 0; winding undefined");
  }
  // Planar components: (dy, dz) for Shockley, (dx, dy) for chiral Rice-Mele.
  auto plane = [&](double q) {
    const BlochVector b = bloch_vector(model, {q, 0.0}, u);
    return rice_mele ? std::array<double, 2>{b.dx, b.dy} : std::array<double, 2>{b.dy, b.dz};
  };
  double total = 0.0;
  double min_norm = std::numeric_limits<double>::infinity();
  auto prev = plane(-kPi);
  for (int j = 1; j <= n_points; ++j) {
    const double q = -kPi + 2.0 * kPi * j / n_points;
    const auto cur = plane(std::min(q, kPi));
    min_norm = std::min(min_norm, std::hypot(cur[0], cur[1]));
    // Signed angle between consecutive planar vectors.
    const double cross = prev[0] * cur[1] - prev[1] * cur[0];
    const double dot = prev[0] * cur[0] + prev[1] * cur[1];
    total += std::atan2(cross, dot);
    prev = cur;
  }
  if (min_norm < 1e-9) throw SingularPointError("Bloch vector vanishes on the loop; model is gapless");
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

MomentumGrid bz_grid(const ModelSpec& model, int n_per_dim) {
  if (n_per_dim < 2) throw DomainError("grid needs at least 2 points per dimension");
  MomentumGrid grid;
  grid.dimension = model.dimension();
  grid.n_per_dim = n_per_dim;
  const double n = static_cast<double>(n_per_dim);
  if (grid.dimension == 1) {
    grid.points.reserve(n_per_dim);
    for (int j = 0; j < n_per_dim; ++j) grid.points.push_back({-kPi + 2.0 * kPi * j / n, 0.0});
    grid.weight = 1.0 / n;
    return grid;
  }
  const auto recip = honeycomb::reciprocal_basis();
  grid.points.reserve(static_cast<std::size_t>(n_per_dim) * n_per_dim);
  for (int i = 0; i < n_per_dim; ++i) {
    for (int j = 0; j < n_per_dim; ++j) {
      const double f1 = i / n;
      const double f2 = j / n;
      grid.points.push_back(
          {f1 * recip[0][0] + f2 * recip[1][0], f1 * recip[0][1] + f2 * recip[1][1]});
    }
  }
  grid.weight = 1.0 / (n * n);
  return grid;
}

int default_grid_size(const ModelSpec& model) { return model.dimension() == 1 ? 2048 : 140; }

}  // namespace openkz
