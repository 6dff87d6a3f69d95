#pragma once

// Power-law fits on tau_Q sweeps and plateau detection on time series.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "openkz/observables.hpp"

namespace openkz {

enum class Observable { n, n_total, n_a, n_b };

double select(const ObservablePoint& p, Observable which);
std::string observable_name(Observable which);

struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double exponent_stderr = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Window [tau_min, tau_max] covering the upper half of the sweep (at least 3 points).
std::pair<double, double> default_window(const ObservableSeries& series);

/// Least-squares line through (log tau_Q, log value) over the points inside `window`.
FitResult powerlaw_fit(const ObservableSeries& series, Observable which,
                       std::optional<std::pair<double, double>> window = std::nullopt);

/// Geometric-mean prefactor A of value = A tau^{-beta} with beta held fixed.
double fixed_exponent_prefactor(const ObservableSeries& series, Observable which, double beta,
                                std::optional<std::pair<double, double>> window = std::nullopt);

struct PlateauOptions {
  double trailing_fraction = 0.2;
  double max_drift = 0.005;
};

struct Plateau {
  double value = 0.0;
  double onset = 0.0;
};

/// Mean of the trailing window when its relative drift is below the threshold. The onset
/// is the earliest sample from which every later value stays within the same band.
std::optional<Plateau> plateau_detect(const ObservableSeries& series, Observable which,
                                      const PlateauOptions& opt = {});

}  // namespace openkz
