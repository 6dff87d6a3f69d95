// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "openkz/analytic.hpp"
#include "openkz/liouvillian.hpp"
#include "openkz/observables.hpp"
#include "openkz/scaling.hpp"

using namespace openkz;
using std::numbers::pi;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream log;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    log << "\n    " << (ok ? "ok   " : "FAIL ") << what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string rel(double got, double want) { return fmt("%.3e", std::abs(got / want - 1.0)); }

QuenchSetup setup(ModelSpec model, QuenchProtocol p, DissipationConfig d, int grid) {
  QuenchSetup s;
  s.model = model;
  s.protocol = p;
  s.dissipation = d;
  s.grid_size = grid;
  s.workers = 0;
  return s;
}

double mode_number(const ModeState& s) { return s.rho22 + s.rho33 + 2.0 * s.rho44; }

// 1. Uniform loss: BZ-aggregated n against the suppressed-KZ plus saturation terms.
void uniform_loss_closed_form(Outcome& o) {
  double worst = 0.0;
  for (double rate : {0.0, 0.025, 0.05}) {
    const DissipationConfig d{rate, rate};
    const std::vector<double> taus{10.0, 30.0, 100.0, 300.0};
    const ObservableSeries s = sweep(setup(rice_mele(), {2.0, -2.0, 10.0}, d, 2048), taus);
    for (const ObservablePoint& pt : s.points) {
      const double want = n_uniform_loss({2.0, -2.0, pt.axis}, d);
      worst = std::max(worst, std::abs(pt.n / want - 1.0));
    }
  }
  o.require(worst < 0.02, "max relative error vs two-term closed form " + fmt("%.3e", worst) +
                              " (tol 2e-2)");
  o.require(worst < 0.01, "max relative error vs equal-loss table column " + fmt("%.3e", worst) +
                              " (tol 1e-2)");
}

// 2. Anti-KZ: more defects for slower drives with jumps, none without.
void akz_signature(Outcome& o) {
  const std::vector<double> taus{10.0, 30.0, 100.0, 300.0};
  QuenchSetup s = setup(rice_mele(), {2.0, -2.0, 10.0}, {0.025, 0.025}, 2048);
  const ObservableSeries full = sweep(s, taus);
  s.variant = Variant::no_jump;
  const ObservableSeries nj = sweep(s, taus);
  std::ostringstream ns;
  std::ostringstream js;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    ns << fmt("%.4f ", full.points[k].n);
    js << fmt("%.4f ", nj.points[k].n);
  }
  const double n10 = full.points.front().n;
  const double n100 = full.points[2].n;
  const double n300 = full.points.back().n;
  bool monotone_down = true;
  for (std::size_t k = 1; k < taus.size(); ++k) {
    monotone_down = monotone_down && nj.points[k].n < nj.points[k - 1].n;
  }
  o.require(n300 - n10 > 0.0, "full n(tau) = [ " + ns.str() + "], n(300) - n(10) = " +
                                  fmt("%.4f", n300 - n10) + " > 0");
  o.require(n300 > n100 && std::abs(0.5 - n300) < std::abs(0.5 - n10),
            "full n saturates toward 1/2 at large tau_Q");
  o.require(monotone_down, "no_jump n(tau) = [ " + js.str() + "] strictly decreasing");
}

// 3. Liouvillian spectrum on random inputs.
void liouvillian_spectrum(Outcome& o) {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> dz(-5.0, 5.0);
  std::uniform_real_distribution<double> mag(0.0, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
  std::uniform_real_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  double lambda0 = 0.0;
  double max_re = -1.0;
  for (int k = 0; k < 10000; ++k) {
    const double r = mag(rng);
    const double a = ang(rng);
    const BlochVector b{r * std::cos(a), r * std::sin(a), dz(rng)};
    const DissipationConfig d{g(rng), g(rng)};
    const LiouvillianMatrix L = assemble(b, d);
    const SpectrumResult sr = eigenvalues_closed_form(b, d);
    const auto closed = sr.sorted();
    const auto numeric = eigenvalues_numeric(L);
    std::array<int, 6> perm;
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      double w = 0.0;
      for (int i = 0; i < 6; ++i) w = std::max(w, std::abs(closed[i] - numeric[perm[i]]));
      best = std::min(best, w);
    } while (std::next_permutation(perm.begin(), perm.end()));
    worst = std::max(worst, best / (1.0 + L.norm()));
    lambda0 = std::max(lambda0, std::abs(sr.lambda0));
    for (const cplx& z : closed) max_re = std::max(max_re, z.real());
  }
  o.require(worst < 1e-9, "multiset distance / (1 + |L|) " + fmt("%.3e", worst) + " (tol 1e-9)");
  o.require(lambda0 == 0.0, "lambda0 = 0 (max |lambda0| " + fmt("%.1e", lambda0) + ")");
  o.require(max_re <= 0.0, "max Re(lambda) = " + fmt("%.3e", max_re) + " <= 0");
}

// 4. Per-mode Gaussian decay at the loss-difference limit.
void lld_gaussian(Outcome& o) {
  const ModelSpec m = rice_mele();
  const DissipationConfig d{0.08, 0.0};
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  const double f = std::atan(4.0 * 2.0 / 0.08) - std::atan(4.0 * -2.0 / 0.08);
  for (double gt : {20.0, 50.0}) {
    const double tau = gt / d.gamma();
    const QuenchProtocol p{2.0, -2.0, tau};
    const double qmax = 2.0 / std::sqrt(f * tau);
    double worst = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const double q = -qmax + 2.0 * qmax * k / 40.0;
      const double got = mode_number(evolve_mode(m, {q, 0.0}, p, d, cfg).final_state());
      worst = std::max(worst, std::abs(got / std::exp(-f * tau * q * q) - 1.0));
    }
    o.require(worst < 0.03, "gamma tau_Q = " + fmt("%g", gt) + ": max relative error over |q| <= " +
                                fmt("%.3f", qmax) + " is " + fmt("%.3e", worst) + " (tol 3e-2)");
  }
}

// 5. KZ scaling of the residual fermion density at the loss-difference limit.
void kz_scaling_lld(Outcome& o) {
  const std::vector<double> taus{50.0, 100.0, 200.0, 400.0, 800.0};
  for (double g : {0.04, 0.08}) {
    const ObservableSeries s = sweep(setup(rice_mele(), {2.0, -2.0, 50.0}, {g, 0.0}, 512), taus);
    const FitResult fit = powerlaw_fit(s, Observable::n_total);
    const double a = 1.0 / (2.0 * pi);
    o.require(std::abs(fit.exponent + 0.5) <= 0.05,
              "gamma = " + fmt("%g", g) + ": exponent " + fmt("%.4f", fit.exponent) + " (-0.5 +- 0.05)");
    o.require(std::abs(fit.prefactor / a - 1.0) <= 0.10,
              "gamma = " + fmt("%g", g) + ": prefactor " + fmt("%.5f", fit.prefactor) +
                  " vs 1/(2 pi), rel " + rel(fit.prefactor, a) + " (tol 0.10)");
  }
}

// 6. Pseudo-KZ scaling without a critical crossing.
void pkz_scaling(Outcome& o) {
  const ModelSpec m = rice_mele();
  const CriticalMode corner = critical_modes(m).front();
  const DissipationConfig d{0.0, 0.1};
  const double g = d.gamma();
  const std::vector<double> gts{20.0, 50.0, 100.0, 200.0};
  std::vector<double> taus;
  for (double gt : gts) taus.push_back(gt / g);

  for (double uf : {-3.0, -4.0, -6.0}) {
    const ObservableSeries s = sweep(setup(m, {-2.0, uf, taus.front()}, d, 256), taus);
    std::ostringstream errs;
    double worst = 0.0;
    for (const ObservablePoint& pt : s.points) {
      const double want = pkz_prediction(m, corner, {-2.0, uf, pt.axis}, d);
      const double e = std::abs(pt.n_total / want - 1.0);
      worst = std::max(worst, e);
      errs << fmt("%.3f ", e);
    }
    o.require(worst <= 0.05, "u_f = " + fmt("%g", uf) + ": relative error at gamma tau_Q = 20/50/100/200: [ " +
                                 errs.str() + "] (tol 0.05)");
  }

  {
    QuenchSetup s = setup(m, {-2.0, -6.0, 200.0 / g}, d, 256);
    s.integrator.sample_count = 201;
    const ObservableSeries series = run_quench(s);
    double worst = 0.0;
    double at = 0.0;
    for (const ObservablePoint& pt : series.points) {
      if (g * pt.axis <= 10.0) continue;
      const double want = pkz_prediction(m, corner, s.protocol, d, pt.axis);
      const double e = std::abs(pt.n_total / want - 1.0);
      if (e > worst) {
        worst = e;
        at = g * pt.axis;
      }
    }
    o.require(worst <= 0.05, "time series, u_f = -6, gamma tau_Q = 200: max relative error for gamma t > 10 is " +
                                 fmt("%.3f", worst) + " at gamma t = " + fmt("%.1f", at) + " (tol 0.05)");
  }

  {
    const double gt = 100.0;
    QuenchSetup s = setup(m, {-2.0, -60.0, gt / g}, d, 48);
    s.integrator.sample_count = 201;
    const ObservableSeries series = run_quench(s);
    const auto plateau = plateau_detect(series, Observable::n_total);
    const double want = std::sqrt(2.0) / std::sqrt(pi * gt);
    if (!plateau) {
      o.require(false, "plateau, u_f = -60, gamma tau_Q = 100: no plateau detected");
    } else {
      o.require(std::abs(plateau->value / want - 1.0) <= 0.05,
                "plateau, u_f = -60, gamma tau_Q = 100: " + fmt("%.5f", plateau->value) + " vs sqrt|u_i|/sqrt(pi gamma tau_Q) = " +
                    fmt("%.5f", want) + ", rel " + rel(plateau->value, want) + " (tol 0.05)");
    }
  }
}

// 7. Shockley chain, all protocols of the corner table.
void shockley_table(Outcome& o) {
  const ModelSpec m = shockley(0.5, 0.5);
  const double g = 0.2;
  struct Row {
    const char* name;
    QuenchProtocol p;
    DissipationConfig d;
  };
  const Row rows[] = {{"I (3 -> -3, delta = gamma)", {3.0, -3.0, 100.0}, {g, 0.0}},
                      {"II (0 -> -3, delta = gamma)", {0.0, -3.0, 100.0}, {g, 0.0}},
                      {"II (0 -> -3, delta = -gamma)", {0.0, -3.0, 100.0}, {0.0, g}},
                      {"III (3 -> 0, delta = gamma)", {3.0, 0.0, 100.0}, {g, 0.0}}};
  const std::vector<double> taus{100.0, 200.0, 400.0, 800.0};
  for (const Row& r : rows) {
    const ObservableSeries s = sweep(setup(m, r.p, r.d, 1024), taus);
    QuenchProtocol last = r.p;
    last.tau_q = taus.back();
    const ScalingPrediction pred = kz_prediction(m, last, r.d);
    const double want = pred.value(taus.back());
    const double got = s.points.back().n_total;
    const FitResult fit = powerlaw_fit(s, Observable::n_total);
    o.require(std::abs(got / want - 1.0) <= 0.10,
              std::string(r.name) + " [" + pred.formula_id + "]: N(800) rel " + rel(got, want) + " (tol 0.10)");
    o.require(std::abs(fit.exponent + 0.5) <= 0.07,
              std::string(r.name) + ": slope " + fmt("%.4f", fit.exponent) + " (-0.5 +- 0.07)");
  }
}

// 8. Haldane model on the 140 x 140 grid.
void haldane_2d(Outcome& o) {
  const ModelSpec m = haldane(1.0, 0.5, pi / 2);
  const QuenchProtocol p{0.0, -5.2, 25.0};
  const double g = 0.5;
  {
    const std::vector<double> taus{12.5, 25.0, 50.0, 100.0, 200.0};
    const ObservableSeries s = sweep(setup(m, p, {g, 0.0}, 140), taus);
    const FitResult fit = powerlaw_fit(s, Observable::n_total);
    const double a = 1.0 / (2.0 * std::sqrt(3.0) * pi * pi);
    o.require(std::abs(fit.exponent + 1.0) <= 0.1,
              "KZ: exponent " + fmt("%.4f", fit.exponent) + " (-1 +- 0.1)");
    o.require(std::abs(fit.prefactor / a - 1.0) <= 0.15,
              "KZ: prefactor " + fmt("%.5f", fit.prefactor) + " vs 1/(2 sqrt3 pi^2), rel " +
                  rel(fit.prefactor, a) + " (tol 0.15)");
  }
  {
    const std::vector<double> taus{100.0, 200.0, 400.0};
    const DissipationConfig d{0.0, g};
    const ObservableSeries s = sweep(setup(m, p, d, 140), taus);
    std::ostringstream errs;
    for (const ObservablePoint& pt : s.points) {
      QuenchProtocol q = p;
      q.tau_q = pt.axis;
      errs << fmt("%.3f ", pt.n_total / kz_prediction(m, q, d).value(pt.axis) - 1.0);
    }
    QuenchProtocol q = p;
    q.tau_q = taus.back();
    const ScalingPrediction pred = kz_prediction(m, q, d);
    const double want = pred.value(taus.back());
    o.require(std::abs(s.points.back().n_total / want - 1.0) <= 0.10,
              "pKZ [" + pred.formula_id + "]: signed error at tau_Q = 100/200/400: [ " + errs.str() +
                  "], tol 0.10 at tau_Q = 400");
  }
}

// 9. g and h rebuilt from the ODE.
void gh_reconstruction(Outcome& o) {
  const ModelSpec m = rice_mele();
  const QuenchProtocol p{2.0, -2.0, 30.0};
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  for (double g : {0.01, 0.1}) {
    const DissipationConfig d{g, 0.0};
    double worst = 0.0;
    double worst_rel = 0.0;
    for (int k = -25; k <= 25; ++k) {
      const double q = 0.5 * k / 25.0;
      const auto [gn, hn] = reconstruct_gh(m, {q, 0.0}, p, d, cfg);
      const auto [ga, ha] = gh_functions(q, p.tau_q, d);
      worst = std::max({worst, std::abs(gn - ga), std::abs(hn - ha)});
      if (std::abs(ga) > 0.05) worst_rel = std::max(worst_rel, std::abs(gn / ga - 1.0));
    }
    o.require(worst <= 0.03, "gamma = " + fmt("%g", g) + ": max |error| of g, h over |q| <= 0.5 is " +
                                 fmt("%.4f", worst) + " (tol 0.03); relative where g > 0.05: " +
                                 fmt("%.3f", worst_rel));
  }
}

// 10. Property suite.
void properties(Outcome& o) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  IntegratorConfig cfg;
  cfg.sample_count = 51;
  double trace_err = 0.0;
  double violation = 0.0;
  double factor_err = 0.0;
  const ModelSpec models[] = {rice_mele(), shockley(), haldane()};
  for (int k = 0; k < 60; ++k) {
    const ModelSpec& m = models[k % 3];
    const DissipationConfig d{0.3 * u01(rng), 0.3 * u01(rng)};
    const QuenchProtocol p =
        m.dimension() == 2 ? QuenchProtocol{5.2, -5.2, 2.0 + 20.0 * u01(rng)}
                           : QuenchProtocol{3.0, -3.0, 2.0 + 40.0 * u01(rng)};
    const Momentum q = m.dimension() == 2 ? Momentum{4.0 * u01(rng) - 2.0, 4.0 * u01(rng) - 2.0}
                                          : Momentum{2.0 * pi * u01(rng) - pi, 0.0};
    for (const ModeState& s : evolve_mode(m, q, p, d, cfg).states) {
      trace_err = std::max(trace_err, std::abs(s.trace() - 1.0));
      violation = std::max(violation, -min_eigenvalue(s));
    }
    const double rate = 0.2 * u01(rng);
    const auto lossy = evolve_mode(m, q, p, {rate, rate}, cfg);
    const auto closed = evolve_mode(m, q, p, {0.0, 0.0}, cfg);
    for (std::size_t i = 0; i < lossy.times.size(); ++i) {
      const double lift = std::exp(rate * lossy.times[i]);
      factor_err = std::max(factor_err, std::abs(lift * lossy.states[i].population_imbalance() -
                                                 closed.states[i].population_imbalance()));
    }
  }
  o.require(trace_err < 1e-9, "trace deviation " + fmt("%.2e", trace_err) + " (tol 1e-9)");
  o.require(violation < 1e-8, "positivity violation " + fmt("%.2e", std::max(0.0, violation)) + " (tol 1e-8)");
  o.require(factor_err < 1e-6, "uniform-loss factorization " + fmt("%.2e", factor_err) + " (tol 1e-6)");

  double spread = 0.0;
  QuenchSetup s = setup(haldane(), {0.0, -5.2, 5.0}, {0.3, 0.1}, 24);
  s.integrator.sample_count = 6;
  s.workers = 1;
  const ObservableSeries ref = run_quench(s);
  for (int w : {2, 3, 8}) {
    s.workers = w;
    const ObservableSeries other = run_quench(s);
    for (std::size_t i = 0; i < ref.points.size(); ++i) {
      for (Observable ob : {Observable::n, Observable::n_total, Observable::n_a, Observable::n_b}) {
        spread = std::max(spread, std::abs(select(ref.points[i], ob) - select(other.points[i], ob)));
      }
    }
  }
  o.require(spread < 1e-12, "worker-count spread " + fmt("%.2e", spread) + " (tol 1e-12)");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Outcome&)> run;
    double budget_seconds;
  };
  const Criterion criteria[] = {
      {"1 uniform-loss closed form", uniform_loss_closed_form, 120.0},
      {"2 anti-KZ signature", akz_signature, 0.0},
      {"3 Liouvillian spectrum", liouvillian_spectrum, 30.0},
      {"4 LLD Gaussian decay", lld_gaussian, 0.0},
      {"5 KZ scaling at the LLD", kz_scaling_lld, 300.0},
      {"6 pKZ scaling", pkz_scaling, 0.0},
      {"7 Shockley corner table", shockley_table, 0.0},
      {"8 Haldane 2D", haldane_2d, 1800.0},
      {"9 g/h reconstruction", gh_reconstruction, 0.0},
      {"10 property suite", properties, 0.0},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0.0) {
      o.require(secs < c.budget_seconds, "runtime " + fmt("%.1f", secs) + " s (budget " +
                                             fmt("%g", c.budget_seconds) + " s)");
    }
    if (!o.passed) ++failed;
    std::printf("%s AC%s (%.1f s)%s\n", o.passed ? "PASS" : "FAIL", c.name, secs, o.log.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
