#pragma once

// Entanglement (concurrence, negativity) and mixedness (linear entropy) of
// the atom-field state, both from density matrices and in closed form.

#include "cavityqed/analytic.hpp"
#include "cavityqed/core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace cavityqed {

/// Trace out the field factor of a (2 x field_dim)-dimensional matrix with
/// atom-major ordering.
template <typename Derived>
Matrix2 partial_trace_field(const Eigen::MatrixBase<Derived>& rho) {
  const Eigen::Index d = rho.rows() / 2;
  if (rho.rows() != rho.cols() || 2 * d != rho.rows()) {
    throw std::invalid_argument("partial_trace_field: expected a square matrix of even size");
  }
  Matrix2 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out(i, j) = rho.block(i * d, j * d, d, d).trace();
  }
  return out;
}

/// Trace out the atom, leaving the field_dim x field_dim field operator.
template <typename Derived>
Matrix partial_trace_atom(const Eigen::MatrixBase<Derived>& rho) {
  const Eigen::Index d = rho.rows() / 2;
  if (rho.rows() != rho.cols() || 2 * d != rho.rows()) {
    throw std::invalid_argument("partial_trace_atom: expected a square matrix of even size");
  }
  return rho.block(0, 0, d, d) + rho.block(d, d, d, d);
}

/// Wootters concurrence max(0, l1 - l2 - l3 - l4).
///
/// The l_i are the square roots of the eigenvalues of
/// R = rho (sy x sy) rho* (sy x sy). They are obtained as the singular values
/// of sqrt(rho) (sy x sy) sqrt(rho)*, which has the same spectrum squared but
/// keeps the small l_i accurate to machine precision rather than to its
/// square root.
inline double concurrence(const EffectiveDensity& state) {
  const Matrix4& rho = state.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix4> eig(0.5 * (rho + rho.adjoint()));
  Eigen::Vector4d p = eig.eigenvalues();
  if (p.minCoeff() < -state.tol()) {
    throw InvalidStateError(detail::concat("concurrence: eigenvalue ", p.minCoeff(),
                                           " below -", state.tol()));
  }
  p = p.cwiseMax(0.0).cwiseSqrt();
  const Matrix4 sqrt_rho = eig.eigenvectors() * p.asDiagonal() * eig.eigenvectors().adjoint();

  Matrix4 flip = Matrix4::Zero();
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;

  const Matrix4 m = sqrt_rho * flip * sqrt_rho.conjugate();
  const Eigen::Vector4d l = Eigen::JacobiSVD<Matrix4>(m).singularValues();
  return std::clamp(l(0) - l(1) - l(2) - l(3), 0.0, 1.0);
}

/// Partial transpose over the atom (outer) factor of a 4x4 matrix.
inline Matrix4 partial_transpose_atom(const Matrix4& rho) {
  Matrix4 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int f = 0; f < 2; ++f)
        for (int h = 0; h < 2; ++h) out(2 * a + f, 2 * b + h) = rho(2 * b + f, 2 * a + h);
  return out;
}

/// Negativity normalised so that a Bell state gives 1: twice the absolute
/// sum of the negative eigenvalues of the atom-partial-transpose.
inline double negativity(const EffectiveDensity& state) {
  const Matrix4 pt = partial_transpose_atom(state.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix4> eig(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
  double neg = 0.0;
  for (int i = 0; i < 4; ++i) neg += std::min(eig.eigenvalues()(i), 0.0);
  return std::clamp(-2.0 * neg, 0.0, 1.0);
}

/// 1 - Tr(rho^2).
template <typename Derived>
double linear_entropy(const Eigen::MatrixBase<Derived>& rho, double tol = kDefaultTol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument("linear_entropy: expected a non-empty square matrix");
  }
  if (detail::hermiticity_defect(rho) > tol) {
    throw InvalidStateError("linear_entropy: matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > tol) {
    throw InvalidStateError("linear_entropy: trace is not 1");
  }
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return 1.0 - rho.squaredNorm();
}

inline double linear_entropy(const EffectiveDensity& rho) {
  return linear_entropy(rho.matrix(), rho.tol());
}

/// S = (1 - |f_+|^2) / 2
inline double total_entropy_closed(const SystemParams& params, double t) {
  return 0.5 * (1.0 - std::norm(envelope(params, t).f_plus));
}

/// S_A = (1 - |f_+ lam|^2) / 2
inline double atom_entropy_closed(const SystemParams& params, double t) {
  const EvolutionEnvelope env = envelope(params, t);
  return 0.5 * (1.0 - std::norm(env.f_plus * env.lam));
}

/// S_F = (1 - |lam|^2) / 2
inline double field_entropy_closed(const SystemParams& params, double t) {
  return 0.5 * (1.0 - std::norm(envelope(params, t).lam));
}

inline Matrix2 reduced_atom_density(const AnalyticState& state) {
  return partial_trace_field(state.rho_eff.matrix());
}

/// Field state in the {|up>, |down>} basis.
inline Matrix2 reduced_field_density(const AnalyticState& state) {
  return partial_trace_atom(state.rho_eff.matrix());
}

/// All metrics at one time.
struct MetricSample {
  double t;
  double concurrence;
  double negativity;
  double s_total;
  double s_atom;
  double s_field;
};

/// Lower bound sqrt((1-C)^2 + C^2) - (1-C) on the negativity of a two-qubit
/// state with concurrence C; C itself is the upper bound.
inline double negativity_lower_bound(double c) {
  return std::sqrt((1.0 - c) * (1.0 - c) + c * c) - (1.0 - c);
}

inline MetricSample sample_metrics(const SystemParams& params, double t,
                                   double tol = kDefaultTol) {
  const AnalyticState state = effective_density(params, t, tol);
  MetricSample s{t,
                 concurrence(state.rho_eff),
                 negativity(state.rho_eff),
                 total_entropy_closed(params, t),
                 atom_entropy_closed(params, t),
                 field_entropy_closed(params, t)};
  const double lo = negativity_lower_bound(s.concurrence);
  if (s.negativity < lo - tol || s.negativity > s.concurrence + tol) {
    throw InvalidStateError(detail::concat("negativity ", s.negativity,
                                           " outside the concurrence bounds [", lo, ", ",
                                           s.concurrence, "] at t=", t));
  }
  for (double entropy : {s.s_total, s.s_atom, s.s_field}) {
    if (!(entropy >= -tol && entropy <= 0.5 + tol)) {
      throw InvalidStateError(detail::concat("linear entropy ", entropy, " outside [0, 0.5]"));
    }
  }
  return s;
}

}  // namespace cavityqed
