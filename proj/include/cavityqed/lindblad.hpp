#pragma once

// Brute-force reference solution: the master equation
//   d rho/dt = -i[V, rho] + k (2 a rho a^dag - a^dag a rho - rho a^dag a),
//   V = g (a + a^dag)(sigma_+ + sigma_-),
// integrated with classic fixed-step RK4 on atom (x) truncated Fock space.
// Shares nothing with the closed-form path beyond coherent_fock_vector for
// the initial state, so it can arbitrate the analytic formulas.

#include "cavityqed/analytic.hpp"
#include "cavityqed/core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace cavityqed {

struct IntegratorConfig {
  int n_max = 10;
  /// Base step; halved until two consecutive runs agree.
  double dt = 1e-3;
  /// Acceptance threshold on the trace distance between the dt and dt/2 runs.
  double rtol = 1e-9;
  double t_final = 0.0;

  void validate() const {
    if (n_max < 10) throw std::invalid_argument(detail::concat("n_max must be >= 10, got ", n_max));
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (!(rtol > 0.0 && rtol <= 1e-3)) {
      throw std::invalid_argument(detail::concat("rtol must lie in (0, 1e-3], got ", rtol));
    }
    if (!std::isfinite(t_final) || t_final < 0.0) {
      throw std::invalid_argument("t_final must be finite and non-negative");
    }
  }
};

inline constexpr int kMaxHalvings = 12;

/// Smallest Fock cutoff the integrator accepts for a run up to t_final:
/// A^2 + 8A + 20 with A = |alpha| + g (1 - e^{-k t_final}) / k, which bounds
/// |alpha_pm(t)| over the whole run.
inline int required_n_max(const SystemParams& params, double t_final) {
  detail::require_time(t_final);
  const double a =
      std::abs(params.alpha()) + params.g() * detail::decay_integral(params.k(), t_final);
  return static_cast<int>(std::ceil(a * a + 8.0 * a + 20.0));
}

inline IntegratorConfig default_config(const SystemParams& params, double t_final) {
  IntegratorConfig cfg;
  cfg.n_max = std::max(10, required_n_max(params, t_final));
  cfg.dt = params.g() > 0.0 ? 1e-3 / params.g() : 1e-3;
  cfg.rtol = 1e-9;
  cfg.t_final = t_final;
  return cfg;
}

/// |excited> (x) |alpha> on the truncated space.
inline FockDensity initial_state(const SystemParams& params, int n_max,
                                 double tol = kDefaultTol) {
  const Vector field = coherent_fock_vector(CoherentLabel(params.alpha()), n_max);
  Vector psi = Vector::Zero(2 * (n_max + 1));
  psi.head(n_max + 1) = field;
  return FockDensity(psi * psi.adjoint(), n_max, tol);
}

namespace detail {

/// out = L(rho) for the truncated generator; O(dim^2), no operator matrices.
class Liouvillian {
 public:
  Liouvillian(const SystemParams& params, int n_max)
      : g_(params.g()), k_(params.k()), n_max_(n_max), root_(n_max + 2) {
    for (int n = 0; n < n_max + 2; ++n) root_[n] = std::sqrt(static_cast<double>(n));
  }

  int dim() const { return 2 * (n_max_ + 1); }

  void apply(const Matrix& rho, Matrix& out) const {
    const int d = n_max_ + 1;
    const int D = 2 * d;
    if (rho.rows() != D || rho.cols() != D) {
      throw std::invalid_argument(concat("Liouvillian: expected ", D, "x", D, " matrix, got ",
                                         rho.rows(), "x", rho.cols()));
    }
    out.resize(D, D);
    const Complex* in = rho.data();
    Complex* res = out.data();
    const Complex minus_ig(0.0, -g_);
    const double* r = root_.data();
    const int top = n_max_;

    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        const int ib = (1 - i) * d;  // row offset of the flipped-atom block
        const int jb = (1 - j) * d;  // column offset of the flipped-atom block
        for (int n = 0; n < d; ++n) {
          const int col = j * d + n;
          const Complex* same = in + static_cast<std::ptrdiff_t>(col) * D + i * d;
          const Complex* row_flip = in + static_cast<std::ptrdiff_t>(col) * D + ib;
          const Complex* c_lo = n > 0 ? in + static_cast<std::ptrdiff_t>(jb + n - 1) * D + i * d
                                      : nullptr;
          const Complex* c_hi = n < top ? in + static_cast<std::ptrdiff_t>(jb + n + 1) * D + i * d
                                        : nullptr;
          const Complex* diag_next =
              n < top ? in + static_cast<std::ptrdiff_t>(col + 1) * D + i * d : nullptr;
          Complex* dst = res + static_cast<std::ptrdiff_t>(col) * D + i * d;
          for (int m = 0; m < d; ++m) {
            // (X rho_{i' j})_{mn} - (rho_{i j'} X)_{mn}, X = a + a^dag
            Complex comm(0.0);
            if (m > 0) comm += r[m] * row_flip[m - 1];
            if (m < top) comm += r[m + 1] * row_flip[m + 1];
            if (c_lo) comm -= r[n] * c_lo[m];
            if (c_hi) comm -= r[n + 1] * c_hi[m];
            Complex v = minus_ig * comm;
            if (k_ != 0.0) {
              Complex diss = -static_cast<double>(m + n) * same[m];
              if (diag_next && m < top) diss += 2.0 * r[m + 1] * r[n + 1] * diag_next[m + 1];
              v += k_ * diss;
            }
            dst[m] = v;
          }
        }
      }
    }
  }

 private:
  double g_;
  double k_;
  int n_max_;
  std::vector<double> root_;
};

struct Rk4Workspace {
  Matrix k1, k2, k3, k4, stage;
};

/// One RK4 step followed by Hermitian symmetrisation. Returns false when the
/// step breaks trace or Hermiticity, which marks the run as unusable.
inline bool rk4_step(const Liouvillian& gen, Matrix& rho, double h, Rk4Workspace& w) {
  gen.apply(rho, w.k1);
  w.stage = rho + (0.5 * h) * w.k1;
  gen.apply(w.stage, w.k2);
  w.stage = rho + (0.5 * h) * w.k2;
  gen.apply(w.stage, w.k3);
  w.stage = rho + h * w.k3;
  gen.apply(w.stage, w.k4);
  rho += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);

  if (!rho.allFinite()) return false;
  if (hermiticity_defect(rho) > 1e-10) return false;
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return std::abs(rho.trace() - Complex(1.0)) <= 1e-9;
}

/// Integrates through the sample times using steps_per_segment[i] * 2^level
/// equal steps on each segment. nullopt if any step misbehaved.
inline std::optional<std::vector<Matrix>> fixed_step_run(const Liouvillian& gen,
                                                         const Matrix& initial,
                                                         std::span<const double> times,
                                                         std::span<const long> base_steps,
                                                         int level) {
  std::vector<Matrix> out;
  out.reserve(times.size());
  Matrix rho = initial;
  Rk4Workspace w;
  double t_prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const long steps = base_steps[i] << level;
    const double h = steps > 0 ? (times[i] - t_prev) / static_cast<double>(steps) : 0.0;
    for (long s = 0; s < steps; ++s) {
      if (!rk4_step(gen, rho, h, w)) return std::nullopt;
    }
    out.push_back(rho);
    t_prev = times[i];
  }
  return out;
}

}  // namespace detail

/// -i[V, rho] + D rho for the truncated operators.
inline Matrix liouvillian_apply(const FockDensity& rho, const SystemParams& params) {
  Matrix out;
  detail::Liouvillian(params, rho.n_max()).apply(rho.matrix(), out);
  return out;
}

/// States at each requested sample time from an accepted (converged) run.
struct OracleRun {
  std::vector<FockDensity> states;
  /// Step length of the accepted run on the longest segment.
  double dt_used;
  int halvings;
  /// Largest trace distance between the accepted run and the one at twice the step.
  double step_change;
};

/// Integrates from the initial state through the ascending sample `times`
/// (all within [0, cfg.t_final]). The step is halved until every sample of
/// the dt and dt/2 runs agrees to cfg.rtol in trace distance.
inline OracleRun integrate_trajectory(const SystemParams& params, const IntegratorConfig& cfg,
                                      std::span<const double> times) {
  cfg.validate();
  if (times.empty()) throw std::invalid_argument("integrate_trajectory: no sample times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    detail::require_time(times[i]);
    if (i > 0 && times[i] < times[i - 1]) {
      throw std::invalid_argument("integrate_trajectory: sample times must be ascending");
    }
  }
  if (times.back() > cfg.t_final) {
    throw std::invalid_argument("integrate_trajectory: sample time beyond t_final");
  }
  if (const int need = required_n_max(params, cfg.t_final); cfg.n_max < need) {
    throw TruncationError(detail::concat("n_max=", cfg.n_max, " inadequate up to t=", cfg.t_final,
                                         "; need at least ", need));
  }

  const double out_tol = 10.0 * cfg.rtol;
  const FockDensity start = initial_state(params, cfg.n_max, out_tol);

  std::vector<long> base_steps(times.size());
  double t_prev = 0.0;
  double longest = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double span = times[i] - t_prev;
    base_steps[i] = span > 0.0 ? std::max(1L, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)))
                               : 0L;
    if (base_steps[i] > 0) longest = std::max(longest, span / static_cast<double>(base_steps[i]));
    t_prev = times[i];
  }

  auto wrap = [&](const std::vector<Matrix>& mats) {
    std::vector<FockDensity> states;
    states.reserve(mats.size());
    for (const Matrix& m : mats) states.emplace_back(m, cfg.n_max, out_tol);
    return states;
  };

  if (times.back() == 0.0) {
    return OracleRun{wrap(std::vector<Matrix>(times.size(), start.matrix())), 0.0, 0, 0.0};
  }

  const detail::Liouvillian gen(params, cfg.n_max);
  auto coarse = detail::fixed_step_run(gen, start.matrix(), times, base_steps, 0);
  for (int level = 1; level <= kMaxHalvings; ++level) {
    auto fine = detail::fixed_step_run(gen, start.matrix(), times, base_steps, level);
    if (coarse && fine) {
      double change = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        change = std::max(change, trace_distance((*coarse)[i], (*fine)[i], 1e-9));
      }
      if (change <= cfg.rtol) {
        return OracleRun{wrap(*fine), std::ldexp(longest, -level), level, change};
      }
    }
    coarse = std::move(fine);
  }
  throw ConvergenceError(detail::concat("integrator did not converge to rtol=", cfg.rtol, " after ",
                                        kMaxHalvings, " step halvings"));
}

inline FockDensity integrate(const SystemParams& params, const IntegratorConfig& cfg) {
  const double t = cfg.t_final;
  return integrate_trajectory(params, cfg, std::span<const double>(&t, 1)).states.front();
}

/// Compressed two-qubit form of a Fock-space state, plus the population that
/// fell outside span{|alpha_+>, |alpha_->}.
struct Projection {
  EffectiveDensity rho;
  double leakage;
};

/// Largest leakage for which a projected state is still meaningful.
inline constexpr double kMaxLeakage = 0.01;

/// Orthonormal Fock vectors |up>, |down> spanning {|aplus>, |aminus>}, with
/// |up> proportional to |aplus>. In the degenerate case |down> is the
/// displaced one-photon state D(aplus)|1>.
inline Eigen::Matrix<Complex, Eigen::Dynamic, 2> field_basis_vectors(const CoherentLabel& aplus,
                                                                     const CoherentLabel& aminus,
                                                                     int n_max) {
  const Vector plus = coherent_fock_vector(aplus, n_max);
  const Vector minus = coherent_fock_vector(aminus, n_max);
  const Vector up = plus.normalized();
  Vector down;
  const double mu2 = -std::expm1(-std::norm(aplus.beta - aminus.beta));
  if (mu2 < kDegenerateOverlap) {
    down = -std::conj(aplus.beta) * plus;
    for (int n = 1; n <= n_max; ++n) down(n) += std::sqrt(static_cast<double>(n)) * plus(n - 1);
  } else {
    down = minus;
  }
  down -= up * up.dot(down);
  down.normalize();

  Eigen::Matrix<Complex, Eigen::Dynamic, 2> basis(n_max + 1, 2);
  basis.col(0) = up;
  basis.col(1) = down;
  return basis;
}

inline Projection project_to_effective(const FockDensity& rho, const CoherentLabel& aplus,
                                       const CoherentLabel& aminus) {
  const int d = rho.field_dim();
  const auto basis = field_basis_vectors(aplus, aminus, rho.n_max());
  Matrix4 eff;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      eff.block<2, 2>(2 * i, 2 * j) = basis.adjoint() * rho.matrix().block(i * d, j * d, d, d) * basis;
    }
  }
  const double captured = eff.trace().real();
  const double leakage = 1.0 - captured;
  if (leakage > kMaxLeakage) {
    throw InvalidStateError(detail::concat("project_to_effective: leakage ", leakage,
                                           " exceeds ", kMaxLeakage,
                                           "; state is not representable in the two-qubit span"));
  }
  eff /= captured;
  return Projection{EffectiveDensity(eff, std::max(kDefaultTol, rho.tol())), leakage};
}

}  // namespace cavityqed
