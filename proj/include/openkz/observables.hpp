#pragma once

// Mode-level observables and their Brillouin-zone averages.

#include <string>
#include <utility>
#include <vector>

#include "openkz/lindblad.hpp"
#include "openkz/models.hpp"

namespace openkz {

/// p_q = 1/2 Tr(rho eta1^dag eta1) + 1/2 Tr[rho (1 - eta2^dag eta2)] in the band basis of b_final.
double excitation_probability(const ModeState& s, const BlochVector& b_final);

/// (N_a_q, N_b_q) = (rho22 + rho44, rho33 + rho44).
std::pair<double, double> mode_fermion_numbers(const ModeState& s);

enum class Axis { time, tau_q };

struct ObservablePoint {
  double axis = 0.0;
  double n = 0.0;
  double n_total = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  /// Grid-averaged trace of the mode density matrices (diagnostic).
  double trace = 0.0;
};

struct SeriesMetadata {
  std::string model;
  QuenchProtocol protocol;
  DissipationConfig dissipation;
  int grid_size = 0;
  std::size_t unique_modes = 0;
  Variant variant = Variant::full;
  InitialStateMode init = InitialStateMode::exact_ground_state;
  IntegratorConfig integrator;
};

struct ObservableSeries {
  Axis axis = Axis::time;
  std::vector<ObservablePoint> points;
  SeriesMetadata metadata;
};

/// Weighted BZ sums at every shared sample time, reduced in mode order with
/// compensated summation.
ObservableSeries aggregate(const std::vector<ModeTrajectory>& trajectories,
                           const std::vector<BlochVector>& b_finals,
                           const std::vector<double>& weights);

struct QuenchSetup {
  ModelSpec model = rice_mele();
  QuenchProtocol protocol;
  DissipationConfig dissipation;
  int grid_size = 0;  // 0 selects default_grid_size(model)
  IntegratorConfig integrator;
  Variant variant = Variant::full;
  InitialStateMode init = InitialStateMode::exact_ground_state;
  int workers = 0;  // 0 selects hardware concurrency
  /// Merge modes with identical (|Delta_q|, dz offset); each sector's populations
  /// depend on Delta_q only through its modulus.
  bool deduplicate = true;

  void validate() const;
};

/// Distinct mode sectors of a grid with their total BZ weight, in first-seen grid order.
struct ModeClass {
  Momentum representative;
  ModeDrive drive;
  double weight = 0.0;
};
std::vector<ModeClass> mode_classes(const ModelSpec& model, const MomentumGrid& grid,
                                    bool deduplicate);

/// Runs every mode of the grid over the quench and aggregates on the time axis.
ObservableSeries run_quench(const QuenchSetup& setup);

/// Final-time observables for each tau_Q of an ascending list.
ObservableSeries sweep(const QuenchSetup& setup, const std::vector<double>& tau_list);

/// Maps f over [0, count) on `workers` threads with contiguous static blocks. The first
/// exception in index order is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t count, int workers, F&& f);

int resolve_workers(int requested);

}  // namespace openkz

#include "openkz/detail/parallel.hpp"
