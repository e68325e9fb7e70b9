#pragma once

// Search for the interaction time that maximises atom-field concurrence.
// A uniform coarse scan locates the global peak; golden-section search then
// refines inside the neighbouring samples.

#include "cavityqed/analytic.hpp"
#include "cavityqed/metrics.hpp"
#include "cavityqed/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cavityqed {

/// k = 0: concurrence rises to a plateau and has no interior maximum.
class PlateauError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The coarse maximum sits on the edge of the scan window.
class BoundaryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Optimum {
  double t_opt;
  double c_max;
  double t_lo;
  double t_hi;
  int evaluations;
};

inline constexpr int kDefaultCoarseSamples = 201;

inline Optimum find_optimal_time(const SystemParams& params, double t_max, double resolution,
                                 int coarse_samples = kDefaultCoarseSamples) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be > 0");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("resolution must be > 0");
  }
  if (coarse_samples < 200) throw std::invalid_argument("coarse scan needs at least 200 samples");
  if (params.g() == 0.0) throw std::invalid_argument("g = 0 never entangles atom and field");
  if (params.k() == 0.0) {
    throw PlateauError(
        "k = 0: concurrence approaches a plateau with no finite maximum; report the plateau onset "
        "instead");
  }

  auto value = [&](double t) { return concurrence(effective_density(params, t).rho_eff); };

  const double step = t_max / (coarse_samples - 1);
  const std::vector<double> coarse = parallel_map(
      static_cast<std::size_t>(coarse_samples),
      [&](std::size_t i) { return value(i == static_cast<std::size_t>(coarse_samples - 1)
                                            ? t_max
                                            : static_cast<double>(i) * step); });
  int evaluations = coarse_samples;

  int best = 0;
  for (int i = 1; i < coarse_samples; ++i) {
    if (coarse[i] > coarse[best]) best = i;
  }
  if (best == coarse_samples - 1) {
    throw BoundaryError(detail::concat("concurrence still rising at t_max=", t_max,
                                       "; increase t_max"));
  }
  if (best == 0) {
    throw BoundaryError("concurrence maximal at t=0; no entangling interval in the scan window");
  }

  double lo = (best - 1) * step;
  double hi = (best + 1) * step;
  double t_best = best * step;
  double c_best = coarse[best];
  auto consider = [&](double t, double c) {
    if (c > c_best || (c == c_best && t < t_best)) {
      t_best = t;
      c_best = c;
    }
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = value(x1);
  double f2 = value(x2);
  evaluations += 2;
  consider(x1, f1);
  consider(x2, f2);
  while (hi - lo > resolution) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = value(x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = value(x2);
      consider(x2, f2);
    }
    ++evaluations;
  }

  if (t_best < lo || t_best > hi) {
    // Only reachable when the peak is not locally unimodal; centre the
    // reported bracket on the best point seen.
    lo = t_best - 0.5 * resolution;
    hi = t_best + 0.5 * resolution;
  }
  return Optimum{t_best, c_best, lo, hi, evaluations};
}

}  // namespace cavityqed
