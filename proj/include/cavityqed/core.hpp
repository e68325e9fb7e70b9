#pragma once

// Shared domain types for the driven atom / dissipative cavity model:
// physical parameters, coherent-state labels, validated density matrices,
// coherent-state arithmetic and the trace distance.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cavityqed {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

/// Construction tolerance for Hermiticity, trace and positivity checks.
inline constexpr double kDefaultTol = 1e-9;

/// A density matrix failed a Hermiticity / trace / positivity check, or a
/// numerical cross-validation did not agree.
class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Fock-space truncation cannot represent the requested state.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The numerical integrator did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << parts);
  return os.str();
}

inline void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw std::invalid_argument(concat("time must be finite and non-negative, got ", t));
  }
}

}  // namespace detail

/// Physical inputs of one evolution problem.
///
/// `g` is the effective atom-cavity coupling of the interaction-picture
/// Hamiltonian V = g (a + a^dag)(sigma_+ + sigma_-), i.e. already half the
/// bare coupling. `k` is the cavity amplitude decay constant of the
/// dissipator k (2 a rho a^dag - a^dag a rho - rho a^dag a); photon number
/// decays at rate 2k. `alpha` is the initial coherent amplitude of the field.
class SystemParams {
 public:
  SystemParams(double g, double k, Complex alpha) : g_(g), k_(k), alpha_(alpha) {
    if (!std::isfinite(g) || g < 0.0) {
      throw std::invalid_argument(detail::concat("coupling g must be finite and >= 0, got ", g));
    }
    if (!std::isfinite(k) || k < 0.0) {
      throw std::invalid_argument(detail::concat("decay k must be finite and >= 0, got ", k));
    }
    if (!detail::finite(alpha)) {
      throw std::invalid_argument("initial amplitude alpha must be finite");
    }
  }

  double g() const { return g_; }
  double k() const { return k_; }
  Complex alpha() const { return alpha_; }

 private:
  double g_;
  double k_;
  Complex alpha_;
};

/// Complex amplitude labelling the coherent state |beta>.
struct CoherentLabel {
  Complex beta;

  explicit CoherentLabel(Complex b) : beta(b) {
    if (!detail::finite(b)) throw std::invalid_argument("coherent amplitude must be finite");
  }
};

namespace detail {

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Eigenvalues of a Hermitian matrix, ascending, with entries in [-tol, 0)
/// clamped to zero. Anything more negative is a genuine positivity failure.
template <typename Derived>
Eigen::VectorXd clamped_eigenvalues(const Eigen::MatrixBase<Derived>& m, double tol,
                                    const char* what) {
  Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = solver.eigenvalues();
  if (ev.size() > 0 && ev(0) < -tol) {
    throw InvalidStateError(concat(what, ": negative eigenvalue ", ev(0), " below -", tol));
  }
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), 0.0);
  return ev;
}

template <typename Derived>
void check_density(const Eigen::MatrixBase<Derived>& m, double tol, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(concat(what, ": density matrix must be square and non-empty"));
  }
  if (!m.allFinite()) throw InvalidStateError(concat(what, ": non-finite entries"));
  if (const double h = hermiticity_defect(m); h > tol) {
    throw InvalidStateError(concat(what, ": Hermiticity defect ", h, " exceeds ", tol));
  }
  if (const double tr = std::abs(m.trace() - Complex(1.0)); tr > tol) {
    throw InvalidStateError(concat(what, ": trace deviates from 1 by ", tr));
  }
  clamped_eigenvalues(m, tol, what);
}

}  // namespace detail

/// 4x4 density matrix of atom (x) effective field qubit.
///
/// Basis order: |0,up>, |0,down>, |1,up>, |1,down> where atom |0> is the
/// excited level and |1> the ground level; up/down span the two coherent
/// states the field can occupy.
class EffectiveDensity {
 public:
  explicit EffectiveDensity(const Matrix4& entries, double tol = kDefaultTol)
      : entries_(entries), tol_(tol) {
    detail::check_density(entries_, tol_, "EffectiveDensity");
  }

  const Matrix4& matrix() const { return entries_; }
  double tol() const { return tol_; }

 private:
  Matrix4 entries_;
  double tol_;
};

/// Density matrix of atom (x) Fock space truncated at n_max photons.
/// Basis order |atom> (x) |n>, atom index major, n = 0..n_max.
class FockDensity {
 public:
  FockDensity(Matrix entries, int n_max, double tol = kDefaultTol)
      : entries_(std::move(entries)), n_max_(n_max), tol_(tol) {
    if (n_max < 0 || entries_.rows() != 2 * (n_max + 1) || entries_.cols() != entries_.rows()) {
      throw std::invalid_argument(
          detail::concat("FockDensity: expected ", 2 * (n_max + 1), " square matrix for n_max=",
                         n_max, ", got ", entries_.rows(), "x", entries_.cols()));
    }
    detail::check_density(entries_, tol_, "FockDensity");
    if (const double tail = tail_population(); tail > 10.0 * tol_) {
      throw TruncationError(detail::concat("FockDensity: population ", tail,
                                           " in the top three Fock levels exceeds ", 10.0 * tol_));
    }
  }

  const Matrix& matrix() const { return entries_; }
  int n_max() const { return n_max_; }
  double tol() const { return tol_; }
  int field_dim() const { return n_max_ + 1; }

  /// Total population of Fock levels n in [n_max - 2, n_max].
  double tail_population() const {
    const int d = field_dim();
    double sum = 0.0;
    for (int atom = 0; atom < 2; ++atom) {
      for (int n = std::max(0, n_max_ - 2); n <= n_max_; ++n) {
        sum += entries_(atom * d + n, atom * d + n).real();
      }
    }
    return sum;
  }

 private:
  Matrix entries_;
  int n_max_;
  double tol_;
};

/// <b1|b2> = exp(-|b1|^2/2 - |b2|^2/2 + conj(b1) b2).
inline Complex coherent_overlap(const CoherentLabel& b1, const CoherentLabel& b2) {
  return std::exp(-0.5 * std::norm(b1.beta) - 0.5 * std::norm(b2.beta) +
                  std::conj(b1.beta) * b2.beta);
}

/// Smallest cutoff accepted by coherent_fock_vector for amplitude `beta`.
inline int min_fock_cutoff(Complex beta) {
  if (beta == Complex(0.0)) return 0;
  const double r = std::abs(beta);
  return static_cast<int>(std::ceil(r * r + 6.0 * r + 10.0));
}

/// Number-basis components exp(-|b|^2/2) b^n / sqrt(n!), n = 0..n_max.
inline Vector coherent_fock_vector(const CoherentLabel& label, int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  if (n_max < min_fock_cutoff(label.beta)) {
    throw TruncationError(detail::concat("n_max=", n_max, " too small for |beta|=",
                                         std::abs(label.beta), "; need at least ",
                                         min_fock_cutoff(label.beta)));
  }
  Vector out = Vector::Zero(n_max + 1);
  const double r = std::abs(label.beta);
  if (r == 0.0) {
    out(0) = 1.0;
    return out;
  }
  const double log_r = std::log(r);
  const double phase = std::arg(label.beta);
  double log_fact = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) log_fact += std::log(static_cast<double>(n));
    const double log_mag = -0.5 * r * r + n * log_r - 0.5 * log_fact;
    out(n) = std::polar(std::exp(log_mag), n * phase);
  }
  return out;
}

/// Half the sum of absolute eigenvalues of a - b.
template <typename DA, typename DB>
double trace_distance(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                      double tol = kDefaultTol) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw std::invalid_argument(detail::concat("trace_distance: dimension mismatch ", a.rows(), "x",
                                               a.cols(), " vs ", b.rows(), "x", b.cols()));
  }
  if (detail::hermiticity_defect(a) > tol || detail::hermiticity_defect(b) > tol) {
    throw std::invalid_argument("trace_distance: inputs must be Hermitian");
  }
  Matrix diff = a - b;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const EffectiveDensity& a, const EffectiveDensity& b) {
  return trace_distance(a.matrix(), b.matrix(), std::max(a.tol(), b.tol()));
}

inline double trace_distance(const FockDensity& a, const FockDensity& b) {
  return trace_distance(a.matrix(), b.matrix(), std::max(a.tol(), b.tol()));
}

}  // namespace cavityqed
