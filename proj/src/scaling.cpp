#include "openkz/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "openkz/errors.hpp"

namespace openkz {

namespace {

struct LogPoints {
  std::vector<double> x;
  std::vector<double> y;
};

LogPoints log_window(const ObservableSeries& series, Observable which,
                     std::pair<double, double> window) {
  if (series.axis != Axis::tau_q) throw PreconditionError("power-law fit needs a tau_Q series");
  LogPoints lp;
  for (const ObservablePoint& p : series.points) {
    if (p.axis < window.first || p.axis > window.second) continue;
    const double v = select(p, which);
    if (!(v > 0.0) || !(p.axis > 0.0)) {
      std::ostringstream os;
      os << observable_name(which) << " = " << v << " at tau_Q = " << p.axis
         << " is not positive; a log-log fit is undefined";
      throw DomainError(os.str());
    }
    lp.x.push_back(std::log(p.axis));
    lp.y.push_back(std::log(v));
  }
  if (lp.x.size() < 3) throw PreconditionError("power-law fit needs at least 3 points in the window");
  return lp;
}

}  // namespace

double select(const ObservablePoint& p, Observable which) {
  switch (which) {
    case Observable::n: return p.n;
    case Observable::n_total: return p.n_total;
    case Observable::n_a: return p.n_a;
    case Observable::n_b: return p.n_b;
  }
  return p.n;
}

std::string observable_name(Observable which) {
  switch (which) {
    case Observable::n: return "n";
    case Observable::n_total: return "N_total";
    case Observable::n_a: return "N_a";
    case Observable::n_b: return "N_b";
  }
  return "n";
}

std::pair<double, double> default_window(const ObservableSeries& series) {
  const std::size_t count = series.points.size();
  if (count == 0) throw PreconditionError("empty series");
  const std::size_t take = std::min(count, std::max<std::size_t>(3, (count + 1) / 2));
  return {series.points[count - take].axis, series.points.back().axis};
}

FitResult powerlaw_fit(const ObservableSeries& series, Observable which,
                       std::optional<std::pair<double, double>> window) {
  const auto win = window.value_or(default_window(series));
  const LogPoints lp = log_window(series, which, win);
  const double m = static_cast<double>(lp.x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lp.x.size(); ++i) {
    mx += lp.x[i];
    my += lp.y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lp.x.size(); ++i) {
    const double dx = lp.x[i] - mx;
    const double dy = lp.y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw PreconditionError("fit window has no spread in tau_Q");
  FitResult fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  double sse = 0.0;
  for (std::size_t i = 0; i < lp.x.size(); ++i) {
    const double r = lp.y[i] - (intercept + fit.exponent * lp.x[i]);
    sse += r * r;
  }
  fit.exponent_stderr = m > 2.0 ? std::sqrt(sse / (m - 2.0) / sxx) : 0.0;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.window = win;
  fit.points = lp.x.size();
  return fit;
}

double fixed_exponent_prefactor(const ObservableSeries& series, Observable which, double beta,
                                std::optional<std::pair<double, double>> window) {
  const LogPoints lp = log_window(series, which, window.value_or(default_window(series)));
  double acc = 0.0;
  for (std::size_t i = 0; i < lp.x.size(); ++i) acc += lp.y[i] + beta * lp.x[i];
  return std::exp(acc / static_cast<double>(lp.x.size()));
}

std::optional<Plateau> plateau_detect(const ObservableSeries& series, Observable which,
                                      const PlateauOptions& opt) {
  const std::size_t count = series.points.size();
  if (count < 10) throw PreconditionError("plateau detection needs at least 10 samples");
  const std::size_t tail = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(opt.trailing_fraction * static_cast<double>(count))));
  double lo = select(series.points[count - tail], which);
  double hi = lo;
  double sum = 0.0;
  for (std::size_t i = count - tail; i < count; ++i) {
    const double v = select(series.points[i], which);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  const double mean = sum / static_cast<double>(tail);
  const double scale = std::abs(mean);
  if (scale == 0.0 ? hi != lo : (hi - lo) / scale >= opt.max_drift) return std::nullopt;

  const double band = opt.max_drift * scale;
  std::size_t onset = count - 1;
  while (onset > 0 && std::abs(select(series.points[onset - 1], which) - mean) <= band) --onset;
  return Plateau{mean, series.points[onset].axis};
}

}  // namespace openkz
