#pragma once

// Closed-form evolution of the driven atom in a damped cavity, starting from
// |alpha> (x) |excited>. The field only ever occupies the two coherent states
// |alpha_+(t)>, |alpha_-(t)>, so the full state is an exact two-qubit state
// once those are orthonormalised.

#include "cavityqed/core.hpp"

#include <cmath>
#include <utility>

namespace cavityqed {

/// Below this value of k*t, expressions with 1/k or 1/k^2 use their Taylor
/// series (kept through fourth order) instead of the exact form.
inline constexpr double kSeriesThreshold = 1e-4;

/// Below this value of 1 - |lambda|^2 the field basis is degenerate and the
/// |down> direction carries no population.
inline constexpr double kDegenerateOverlap = 1e-14;

namespace detail {

/// (1 - e^{-kt}) / k, continuous through k = 0.
inline double decay_integral(double k, double t) {
  const double x = k * t;
  if (x < kSeriesThreshold) {
    return t * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 + x * x * x * x / 120.0);
  }
  return -std::expm1(-x) / k;
}

/// -(4 g^2 / k^2)(e^{-kt} - 1 + kt), continuous through k = 0.
inline double f1_exponent(double g, double k, double t) {
  const double x = k * t;
  if (x < kSeriesThreshold) {
    const double series =
        0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 + x * x * x * x / 720.0;
    return -4.0 * g * g * t * t * series;
  }
  return -4.0 * g * g / (k * k) * (std::expm1(-x) + x);
}

}  // namespace detail

struct AmplitudePair {
  CoherentLabel plus;
  CoherentLabel minus;
};

/// alpha_pm(t) = alpha e^{-kt} pm i (g/k)(1 - e^{-kt}).
inline AmplitudePair displaced_amplitudes(const SystemParams& params, double t) {
  detail::require_time(t);
  const Complex centre = params.alpha() * std::exp(-params.k() * t);
  const Complex shift(0.0, params.g() * detail::decay_integral(params.k(), t));
  return {CoherentLabel(centre + shift), CoherentLabel(centre - shift)};
}

/// Scalar functions of time that determine the analytic state.
struct EvolutionEnvelope {
  CoherentLabel alpha_plus;
  CoherentLabel alpha_minus;
  double f1;
  Complex f2;
  Complex f_plus;
  Complex f_minus;
  /// <alpha_+(t)|alpha_-(t)>
  Complex lam;
};

inline EvolutionEnvelope envelope(const SystemParams& params, double t) {
  const auto [plus, minus] = displaced_amplitudes(params, t);
  const double g = params.g();
  const double k = params.k();
  const double f1 = detail::f1_exponent(g, k, t);
  const Complex f2(0.0, g * detail::decay_integral(k, t));
  const double two_re_alpha = 2.0 * params.alpha().real();
  const Complex cross = f2 * two_re_alpha * (2.0 - std::exp(-k * t));
  const double common = f1 + 2.0 * std::norm(f2);
  return EvolutionEnvelope{plus,
                           minus,
                           f1,
                           f2,
                           std::exp(common + cross),
                           std::exp(common - cross),
                           coherent_overlap(plus, minus)};
}

/// Coordinates of |alpha_-> in the orthonormal field basis
/// |up> = |alpha_+>, |down> = (|alpha_-> - lam |alpha_+>) / mu.
struct FieldQubitBasis {
  Complex lam;
  double mu;
  bool degenerate;
};

inline FieldQubitBasis field_qubit_basis(const EvolutionEnvelope& env) {
  // 1 - |lam|^2 = 1 - exp(-|alpha_+ - alpha_-|^2), evaluated without cancellation.
  const double mu2 = -std::expm1(-std::norm(env.alpha_plus.beta - env.alpha_minus.beta));
  if (mu2 < kDegenerateOverlap) return {env.lam, 0.0, true};
  return {env.lam, std::sqrt(mu2), false};
}

/// Evaluated closed-form state at one time.
struct AnalyticState {
  SystemParams params;
  double t;
  EvolutionEnvelope env;
  EffectiveDensity rho_eff;
};

namespace detail {

/// Assembles the four atomic blocks from the field operators
/// P = |a+><a+|, M = |a-><a-|, X = |a+><a-| and Y = X^dag.
template <typename Block>
void assemble_blocks(const Block& P, const Block& M, const Block& X, const Block& Y, Complex fp,
                     Complex fm, Block& r00, Block& r01, Block& r10, Block& r11) {
  r00 = 0.25 * (P + M + fp * X + fm * Y);
  r11 = 0.25 * (P + M - fp * X - fm * Y);
  r01 = -0.25 * (P - M - fp * X + fm * Y);
  r10 = r01.adjoint();
}

}  // namespace detail

inline AnalyticState effective_density(const SystemParams& params, double t,
                                       double tol = kDefaultTol) {
  EvolutionEnvelope env = envelope(params, t);
  const FieldQubitBasis basis = field_qubit_basis(env);

  const Eigen::Vector2cd up(1.0, 0.0);
  const Eigen::Vector2cd down(basis.lam, basis.mu);
  const Matrix2 P = up * up.adjoint();
  const Matrix2 M = down * down.adjoint();
  const Matrix2 X = up * down.adjoint();
  const Matrix2 Y = X.adjoint();

  Matrix2 r00, r01, r10, r11;
  detail::assemble_blocks(P, M, X, Y, env.f_plus, env.f_minus, r00, r01, r10, r11);

  Matrix4 rho;
  rho << r00, r01, r10, r11;
  return AnalyticState{params, t, env, EffectiveDensity(rho, tol)};
}

/// The alpha = k = 0 state (|-igt>|+> - |igt>|->)/sqrt(2), with
/// |pm> = (|1> pm |0>)/sqrt(2), in the effective basis built from
/// displaced_amplitudes at alpha = k = 0.
inline Vector4 cat_state_vector(double g, double t) {
  const SystemParams params(g, 0.0, 0.0);
  const FieldQubitBasis basis = field_qubit_basis(envelope(params, t));
  // |igt> = |up>, |-igt> = lam |up> + mu |down>
  const Complex lam = basis.lam;
  const Complex mu = basis.mu;
  return 0.5 * Vector4(1.0 + lam, mu, lam - 1.0, mu);
}

/// The closed-form state written out on atom (x) Fock space.
inline FockDensity fock_density(const SystemParams& params, double t, int n_max,
                                double tol = kDefaultTol) {
  const EvolutionEnvelope env = envelope(params, t);
  const Vector plus = coherent_fock_vector(env.alpha_plus, n_max);
  const Vector minus = coherent_fock_vector(env.alpha_minus, n_max);

  const Matrix P = plus * plus.adjoint();
  const Matrix M = minus * minus.adjoint();
  const Matrix X = plus * minus.adjoint();
  const Matrix Y = X.adjoint();

  Matrix r00, r01, r10, r11;
  detail::assemble_blocks(P, M, X, Y, env.f_plus, env.f_minus, r00, r01, r10, r11);

  const int d = n_max + 1;
  Matrix rho(2 * d, 2 * d);
  rho << r00, r01, r10, r11;
  return FockDensity(std::move(rho), n_max, tol);
}

}  // namespace cavityqed
