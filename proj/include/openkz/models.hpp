#pragma once

// Two-band lattice models: Bloch vectors, Bogoliubov rotation, critical modes,
// Brillouin-zone grids and the linear quench protocol.

#include <array>
#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace openkz {

using cplx = std::complex<double>;

/// Rice-Mele chain: d = (v + w cos q, w sin q, u).
struct RiceMele {
  double v = 1.0;
  double w = -1.0;
};

/// Shockley chain: d = (0, 2w sin q, u - 2v cos q). Requires v, w >= 0.
struct Shockley {
  double v = 0.5;
  double w = 0.5;
};

/// Haldane honeycomb model with nearest (t1) and complex next-nearest (t2, phi) hopping.
struct Haldane {
  double t1 = 1.0;
  double t2 = 0.5;
  double phi = 1.5707963267948966;
};

struct ModelSpec {
  std::variant<RiceMele, Shockley, Haldane> variant;

  /// Spatial dimension of the Brillouin zone (1 or 2).
  int dimension() const;
  std::string name() const;
  /// Throws PreconditionError if the parameters violate the model's invariants.
  void validate() const;
};

ModelSpec rice_mele(double v = 1.0, double w = -1.0);
ModelSpec shockley(double v = 0.5, double w = 0.5);
ModelSpec haldane(double t1 = 1.0, double t2 = 0.5, double phi = 1.5707963267948966);

/// Crystal momentum. 1D models use only `x`; Haldane uses Cartesian (x, y).
struct Momentum {
  double x = 0.0;
  double y = 0.0;
};

struct BlochVector {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;

  cplx delta() const { return {dx, dy}; }
  double delta_norm_sq() const { return dx * dx + dy * dy; }
  double omega() const;
};

/// Time-independent part of one momentum sector: the transverse field Delta_q
/// and the constant offset so that dz(t) = u(t) + dz_offset.
struct ModeDrive {
  cplx delta;
  double dz_offset = 0.0;

  BlochVector at(double u) const { return {delta.real(), delta.imag(), u + dz_offset}; }
};

struct Bogoliubov {
  cplx u;
  cplx v;
  double omega = 0.0;
};

struct CriticalMode {
  Momentum q;
  double u_c = 0.0;
  /// |d|Delta_q|/dq| at q_c (radial derivative in 2D).
  double slope = 0.0;
  /// "q_c=0", "q_c=pi", "odd" (corners 1/3/5) or "even" (corners 2/4/6).
  std::string label;
};

struct MomentumGrid {
  int dimension = 1;
  int n_per_dim = 0;
  std::vector<Momentum> points;
  double weight = 0.0;

  std::size_t size() const { return points.size(); }
};

/// Linear ramp u(t) = u_i - t / tau_Q on 0 <= t <= t_f.
struct QuenchProtocol {
  double u_i = 2.0;
  double u_f = -2.0;
  double tau_q = 50.0;

  double t_final() const { return (u_i - u_f) * tau_q; }
  double u_bar() const;
  /// u(t); returns u_f exactly at t >= t_f.
  double u_at(double t) const;
  /// Throws PreconditionError unless u_i > u_f and tau_Q is a usable positive time.
  void validate() const;
};

BlochVector bloch_vector(const ModelSpec& model, Momentum q, double u);
ModeDrive mode_drive(const ModelSpec& model, Momentum q);

/// Bogoliubov coefficients (u_q, v_q) with |u_q|^2 + |v_q|^2 = 1; u_q is real and nonnegative.
Bogoliubov bogoliubov(const BlochVector& b);

std::vector<CriticalMode> critical_modes(const ModelSpec& model);

/// Winding number of the unit Bloch vector of a gapped 1D model at on-site energy u.
int winding_number(const ModelSpec& model, double u, int n_points = 4096);

MomentumGrid bz_grid(const ModelSpec& model, int n_per_dim);

/// Default grid size per dimension: 2048 points in 1D, 140 x 140 in 2D.
int default_grid_size(const ModelSpec& model);

namespace honeycomb {

/// Nearest-neighbour vectors from a b site to its three a neighbours (unit bond length).
std::array<std::array<double, 2>, 3> bond_vectors();
/// Next-nearest-neighbour vectors b1 = a2 - a3, b2 = a3 - a1, b3 = a1 - a2.
std::array<std::array<double, 2>, 3> second_neighbour_vectors();
/// Reciprocal basis dual to the lattice vectors a1 - a3 and a2 - a3.
std::array<std::array<double, 2>, 2> reciprocal_basis();
/// Corner i in 1..6 of the hexagonal first Brillouin zone. Odd i close the gap at
/// u = +3 sqrt(3) t2 sin(phi), even i at u = -3 sqrt(3) t2 sin(phi).
Momentum corner(int i);
/// Unit-cell area of the honeycomb lattice with unit bond length.
double cell_area();

}  // namespace honeycomb

}  // namespace openkz
