#include "openkz/observables.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "openkz/errors.hpp"

namespace openkz {

namespace {

// Neumaier's compensated sum; additions happen in caller order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

constexpr double kKeyScale = 1e11;

double band_excitation(const ModeState& s, double uu, double vv, cplx u_conj_v) {
  return 0.5 * (s.rho11 + s.rho44) + uu * s.rho22 + vv * s.rho33 +
         2.0 * std::real(u_conj_v * s.rho23);
}

}  // namespace

double excitation_probability(const ModeState& s, const BlochVector& b_final) {
  const Bogoliubov bg = bogoliubov(b_final);
  return band_excitation(s, std::norm(bg.u), std::norm(bg.v), bg.u * std::conj(bg.v));
}

std::pair<double, double> mode_fermion_numbers(const ModeState& s) {
  return {s.rho22 + s.rho44, s.rho33 + s.rho44};
}

ObservableSeries aggregate(const std::vector<ModeTrajectory>& trajectories,
                           const std::vector<BlochVector>& b_finals,
                           const std::vector<double>& weights) {
  if (trajectories.empty()) throw ShapeError("aggregate needs at least one trajectory");
  if (b_finals.size() != trajectories.size() || weights.size() != trajectories.size()) {
    throw ShapeError("trajectories, final Bloch vectors and weights differ in length");
  }
  const std::vector<double>& times = trajectories.front().times;
  for (std::size_t m = 0; m < trajectories.size(); ++m) {
    const ModeTrajectory& tr = trajectories[m];
    if (tr.times != times || tr.states.size() != times.size()) {
      std::ostringstream os;
      os << "trajectory " << m << " is sampled on a different time grid";
      throw ShapeError(os.str());
    }
  }

  std::vector<Bogoliubov> basis;
  basis.reserve(b_finals.size());
  for (const BlochVector& b : b_finals) basis.push_back(bogoliubov(b));

  ObservableSeries out;
  out.axis = Axis::time;
  out.points.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    CompensatedSum n, na, nb, tr;
    for (std::size_t m = 0; m < trajectories.size(); ++m) {
      const ModeState& s = trajectories[m].states[k];
      const double w = weights[m];
      const Bogoliubov& bg = basis[m];
      n.add(w * band_excitation(s, std::norm(bg.u), std::norm(bg.v), bg.u * std::conj(bg.v)));
      na.add(w * (s.rho22 + s.rho44));
      nb.add(w * (s.rho33 + s.rho44));
      tr.add(w * s.trace());
    }
    ObservablePoint& pt = out.points[k];
    pt.axis = times[k];
    pt.n = n.value();
    pt.n_a = na.value();
    pt.n_b = nb.value();
    pt.n_total = pt.n_a + pt.n_b;
    pt.trace = tr.value();
  }
  return out;
}

void QuenchSetup::validate() const {
  model.validate();
  protocol.validate();
  dissipation.validate();
  integrator.validate();
  if (grid_size != 0 && grid_size < 2) {
    throw PreconditionError("grid_size must be 0 (default) or at least 2");
  }
  if (workers < 0) throw PreconditionError("workers must be nonnegative");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<ModeClass> mode_classes(const ModelSpec& model, const MomentumGrid& grid,
                                    bool deduplicate) {
  std::vector<ModeClass> classes;
  std::map<std::pair<long long, long long>, std::size_t> index;
  for (const Momentum& q : grid.points) {
    const ModeDrive drive = mode_drive(model, q);
    if (deduplicate) {
      const std::pair<long long, long long> key{std::llround(std::abs(drive.delta) * kKeyScale),
                                                std::llround(drive.dz_offset * kKeyScale)};
      const auto [it, inserted] = index.emplace(key, classes.size());
      if (!inserted) {
        classes[it->second].weight += grid.weight;
        continue;
      }
    }
    classes.push_back({q, drive, grid.weight});
  }
  return classes;
}

ObservableSeries run_quench(const QuenchSetup& setup) {
  setup.validate();
  const int n = setup.grid_size == 0 ? default_grid_size(setup.model) : setup.grid_size;
  const MomentumGrid grid = bz_grid(setup.model, n);
  const std::vector<ModeClass> classes = mode_classes(setup.model, grid, setup.deduplicate);

  std::vector<ModeTrajectory> trajectories(classes.size());
  std::vector<BlochVector> b_finals(classes.size());
  std::vector<double> weights(classes.size());
  for (std::size_t m = 0; m < classes.size(); ++m) {
    b_finals[m] = classes[m].drive.at(setup.protocol.u_f);
    weights[m] = classes[m].weight;
  }
  parallel_for(classes.size(), resolve_workers(setup.workers), [&](std::size_t m) {
    trajectories[m] = evolve_mode(setup.model, classes[m].representative, setup.protocol,
                                  setup.dissipation, setup.integrator, setup.variant, setup.init);
  });

  ObservableSeries out = aggregate(trajectories, b_finals, weights);
  out.metadata = {setup.model.name(), setup.protocol,  setup.dissipation, n,
                  classes.size(),     setup.variant,   setup.init,        setup.integrator};
  return out;
}

ObservableSeries sweep(const QuenchSetup& setup, const std::vector<double>& tau_list) {
  if (tau_list.empty()) throw PreconditionError("tau_Q list is empty");
  for (std::size_t i = 1; i < tau_list.size(); ++i) {
    if (!(tau_list[i] > tau_list[i - 1])) {
      throw PreconditionError("tau_Q list must be strictly ascending");
    }
  }
  ObservableSeries out;
  out.axis = Axis::tau_q;
  for (double tau : tau_list) {
    QuenchSetup run = setup;
    run.protocol.tau_q = tau;
    run.integrator.sample_count = 2;
    const ObservableSeries series = run_quench(run);
    ObservablePoint pt = series.points.back();
    pt.axis = tau;
    out.points.push_back(pt);
    out.metadata = series.metadata;
  }
  return out;
}

}  // namespace openkz
