#include "openkz/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "openkz/analytic.hpp"
#include "openkz/errors.hpp"
#include "openkz/liouvillian.hpp"
#include "openkz/observables.hpp"
#include "openkz/scaling.hpp"

namespace openkz {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest entrywise distance after matching two 6-element multisets by permutation.
double multiset_distance(std::array<cplx, 6> a, const std::array<cplx, 6>& b) {
  std::sort(a.begin(), a.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int i = 0; i < 6 && worst < best; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(a.begin(), a.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  }));
  return best;
}

struct Sampler {
  std::mt19937_64 rng;
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  BlochVector bloch() {
    const double mag = uniform(0.0, 2.0);
    const double phase = uniform(-kPi, kPi);
    return {mag * std::cos(phase), mag * std::sin(phase), uniform(-5.0, 5.0)};
  }
  DissipationConfig dissipation() { return {uniform(0.0, 1.0), uniform(0.0, 1.0)}; }
  ModeState state() {
    // Random physical state: block weights plus a coherence inside the 2x2 bound.
    const double empty = uniform(0, 1);
    const double full = uniform(0, 1);
    const double mid = uniform(0, 1);
    const double sum = empty + full + mid;
    const double p2 = mid / sum * uniform(0, 1);
    const double p3 = mid / sum - p2;
    const double c = std::sqrt(p2 * p3) * uniform(0, 1);
    return {empty / sum, p2, p3, full / sum, std::polar(c, uniform(-kPi, kPi))};
  }
};

CheckResult make(std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(name), measured <= tol, measured, tol, std::move(detail)};
}

CheckResult check_generator_spectrum(const ValidationOptions& opt, Sampler& s, int count) {
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const BlochVector b = s.bloch();
    const DissipationConfig d = s.dissipation();
    const auto g = generator_matrix(opt.rhs, b, d);
    Eigen::Matrix<double, 6, 6> m;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) m(i, j) = g[i][j];
    Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(m, false);
    std::array<cplx, 6> numeric{};
    for (int i = 0; i < 6; ++i) numeric[i] = es.eigenvalues()[i];
    const double scale = 1.0 + assemble(b, d).norm();
    worst = std::max(worst, multiset_distance(numeric, eigenvalues_closed_form(b, d).sorted()) / scale);
  }
  return make("eigenvalues_vs_ode_generator", worst, 1e-9,
              "closed-form spectrum vs eigenvalues of the integrated generator");
}

CheckResult check_closed_vs_numeric(Sampler& s, int count) {
  double worst = 0.0;
  double max_re = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    const BlochVector b = s.bloch();
    const DissipationConfig d = s.dissipation();
    const LiouvillianMatrix L = assemble(b, d);
    const SpectrumResult r = eigenvalues_closed_form(b, d);
    const double dist = multiset_distance(eigenvalues_numeric(L), r.sorted()) / (1.0 + L.norm());
    worst = std::max(worst, dist);
    for (const cplx& z : r.sorted()) max_re = std::max(max_re, z.real());
  }
  std::ostringstream os;
  os << "max Re(lambda) = " << max_re;
  CheckResult c = make("liouvillian_closed_vs_numeric", worst, 1e-9, os.str());
  c.passed = c.passed && max_re <= 0.0;
  return c;
}

CheckResult check_assemble_vs_rhs(const ValidationOptions& opt, Sampler& s, int count) {
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const BlochVector b = s.bloch();
    const DissipationConfig d = s.dissipation();
    const ModeState st = s.state();
    const VectorizedState lv = assemble(b, d) * vectorize(st);
    const ModeState r = opt.rhs(st, b, d);
    const double err = std::max({std::abs(lv[0] - r.rho11), std::abs(lv[1] - r.rho22),
                                 std::abs(lv[2] - r.rho33), std::abs(lv[3] - r.rho44),
                                 std::abs(lv[4] - r.rho23), std::abs(lv[5] - std::conj(r.rho23))});
    worst = std::max(worst, err);
  }
  return make("assemble_vs_rhs", worst, 1e-12);
}

CheckResult check_trace_and_positivity(Sampler& s, int count) {
  double trace_err = 0.0;
  double violation = 0.0;
  IntegratorConfig cfg;
  cfg.sample_count = 21;
  for (int k = 0; k < count; ++k) {
    const QuenchProtocol p{2.0, -2.0, s.uniform(5.0, 40.0)};
    const DissipationConfig d = s.dissipation();
    const Momentum q{s.uniform(-kPi, kPi), 0.0};
    for (const ModeState& st : evolve_mode(rice_mele(), q, p, d, cfg).states) {
      trace_err = std::max(trace_err, std::abs(st.trace() - 1.0));
      violation = std::max(violation, -min_eigenvalue(st));
    }
  }
  std::ostringstream os;
  os << "positivity violation " << violation;
  CheckResult c = make("trace_and_positivity", trace_err, 1e-9, os.str());
  c.passed = c.passed && violation < 1e-8;
  return c;
}

CheckResult check_uniform_factorization(Sampler& s, int count) {
  double worst = 0.0;
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  cfg.sample_count = 11;
  for (int k = 0; k < count; ++k) {
    const QuenchProtocol p{2.0, -2.0, s.uniform(5.0, 40.0)};
    const double g = s.uniform(0.0, 0.2);
    const Momentum q{s.uniform(-kPi, kPi), 0.0};
    const auto lossy = evolve_mode(rice_mele(), q, p, {0.5 * g, 0.5 * g}, cfg);
    const auto closed = evolve_mode(rice_mele(), q, p, {0.0, 0.0}, cfg);
    for (std::size_t i = 0; i < lossy.times.size(); ++i) {
      const double decay = std::exp(-0.5 * g * lossy.times[i]);
      worst = std::max(worst, std::abs(lossy.states[i].population_imbalance() -
                                       decay * closed.states[i].population_imbalance()));
      worst = std::max(worst, std::abs(lossy.states[i].rho23 - decay * closed.states[i].rho23));
    }
  }
  return make("uniform_loss_factorization", worst, 1e-6,
              "R_q and rho23 under gamma_a = gamma_b equal e^{-gamma t/2} times the closed system");
}

CheckResult check_lld_gaussian() {
  const DissipationConfig d{0.08, 0.0};
  const QuenchProtocol p{2.0, -2.0, 20.0 / 0.08};
  const double f = gap_integral(rice_mele(), {0.0, 0.0}, p, d).f;
  const double q_max = 2.0 / std::sqrt(f * p.tau_q);
  double worst = 0.0;
  for (int i = 0; i <= 8; ++i) {
    const Momentum q{q_max * i / 8.0, 0.0};
    const ModeState st = evolve_mode(rice_mele(), q, p, d, {}).final_state();
    const auto [na, nb] = mode_fermion_numbers(st);
    const double ref = std::exp(-gap_integral(rice_mele(), q, p, d).exponent);
    worst = std::max(worst, std::abs((na + nb) / ref - 1.0));
  }
  return make("lld_gaussian_decay", worst, 0.03, "per-mode N_q vs exp(-f tau q^2), |q| <= 2/sqrt(f tau)");
}

CheckResult check_uniform_density(int workers) {
  QuenchSetup setup;
  setup.protocol = {2.0, -2.0, 30.0};
  setup.dissipation = {0.025, 0.025};
  setup.grid_size = 512;
  setup.workers = workers;
  const double n = run_quench(setup).points.back().n;
  const double ref = n_uniform_loss(setup.protocol, setup.dissipation);
  return make("uniform_loss_density", std::abs(n / ref - 1.0), 0.02,
              "BZ-averaged n vs suppressed KZ plus saturation");
}

CheckResult check_gh() {
  const QuenchProtocol p{2.0, -2.0, 30.0};
  const DissipationConfig d{0.1, 0.0};
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  double worst = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double q = 0.05 * i;
    const auto [g, h] = reconstruct_gh(rice_mele(), {q, 0.0}, p, d, cfg);
    const auto [g0, h0] = gh_functions(q, p.tau_q, d);
    worst = std::max({worst, std::abs(g - g0), std::abs(h - h0)});
  }
  return make("gh_reconstruction", worst, 0.03, "absolute error over |q| <= 0.5");
}

CheckResult check_sweep(const std::string& name, const ModelSpec& model, QuenchProtocol p,
                        DissipationConfig d, int grid, std::vector<double> taus, double beta,
                        double slope_tol, double prefactor_tol, int workers) {
  QuenchSetup setup;
  setup.model = model;
  setup.protocol = p;
  setup.dissipation = d;
  setup.grid_size = grid;
  setup.workers = workers;
  const ObservableSeries series = sweep(setup, taus);
  const FitResult fit = powerlaw_fit(series, Observable::n_total);
  p.tau_q = taus.back();
  const ScalingPrediction pred = kz_prediction(model, p, d);
  const double rel = std::abs(series.points.back().n_total / pred.value(taus.back()) - 1.0);
  std::ostringstream os;
  os << pred.formula_id << ": slope " << fit.exponent << ", last-point relative error " << rel;
  CheckResult c = make(name, rel, prefactor_tol, os.str());
  c.passed = c.passed && std::abs(fit.exponent + beta) <= slope_tol;
  return c;
}

}  // namespace

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::array<std::array<double, 6>, 6> generator_matrix(const RhsFunction& rhs, const BlochVector& b,
                                                      const DissipationConfig& d) {
  std::array<std::array<double, 6>, 6> g{};
  for (int j = 0; j < 6; ++j) {
    std::array<double, 6> e{};
    e[j] = 1.0;
    const auto col = rhs(ModeState::from_array(e), b, d).to_array();
    for (int i = 0; i < 6; ++i) g[i][j] = col[i];
  }
  return g;
}

ValidationReport run_validation(const ValidationOptions& opt) {
  Sampler s{std::mt19937_64(opt.seed)};
  const bool full = opt.level == ValidationLevel::full;
  ValidationReport report;
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      report.checks.push_back(fn());
    } catch (const std::exception& e) {
      report.checks.push_back({name, false, std::numeric_limits<double>::quiet_NaN(), 0.0,
                               std::string("exception: ") + e.what()});
    }
  };
  guarded("eigenvalues_vs_ode_generator",
          [&] { return check_generator_spectrum(opt, s, full ? 2000 : 200); });
  guarded("liouvillian_closed_vs_numeric",
          [&] { return check_closed_vs_numeric(s, full ? 10000 : 1000); });
  guarded("assemble_vs_rhs", [&] { return check_assemble_vs_rhs(opt, s, 1000); });
  guarded("trace_and_positivity", [&] { return check_trace_and_positivity(s, full ? 40 : 10); });
  guarded("uniform_loss_factorization",
          [&] { return check_uniform_factorization(s, full ? 20 : 5); });
  guarded("lld_gaussian_decay", [&] { return check_lld_gaussian(); });
  guarded("uniform_loss_density", [&] { return check_uniform_density(opt.workers); });
  guarded("gh_reconstruction", [&] { return check_gh(); });
  if (full) {
    guarded("rice_mele_kz_sweep", [&] {
      return check_sweep("rice_mele_kz_sweep", rice_mele(), {2.0, -2.0, 1.0}, {0.08, 0.0}, 512,
                         {100, 200, 400, 800}, 0.5, 0.05, 0.10, opt.workers);
    });
    guarded("shockley_protocol_I_sweep", [&] {
      return check_sweep("shockley_protocol_I_sweep", shockley(), {3.0, -3.0, 1.0}, {0.2, 0.0},
                         1024, {100, 200, 400, 800}, 0.5, 0.07, 0.10, opt.workers);
    });
    guarded("haldane_kz_sweep", [&] {
      return check_sweep("haldane_kz_sweep", haldane(), {0.0, -5.2, 1.0}, {0.5, 0.0}, 140,
                         {25, 50, 100, 200}, 1.0, 0.1, 0.15, opt.workers);
    });
  }
  return report;
}

}  // namespace openkz
