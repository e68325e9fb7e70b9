#include "cavityqed/lindblad.hpp"
#include "cavityqed/metrics.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cavityqed;

namespace {

/// Random state supported on the lowest `levels` Fock states.
Matrix low_photon_density(std::mt19937_64& rng, int n_max, int levels) {
  const int d = n_max + 1;
  const Matrix small = testsupport::random_density(rng, 2 * levels, 3);
  Matrix rho = Matrix::Zero(2 * d, 2 * d);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      rho.block(a * d, b * d, levels, levels) = small.block(a * levels, b * levels, levels, levels);
  return rho;
}

IntegratorConfig config(int n_max, double dt, double rtol, double t_final) {
  IntegratorConfig cfg;
  cfg.n_max = n_max;
  cfg.dt = dt;
  cfg.rtol = rtol;
  cfg.t_final = t_final;
  return cfg;
}

}  // namespace

TEST(Liouvillian, MatchesDenseKroneckerForm) {
  std::mt19937_64 rng(1);
  for (double g : {0.0, 0.7, 1.5}) {
    for (double k : {0.0, 0.3, 2.0}) {
      const int n_max = 12;
      const Matrix rho = testsupport::random_density(rng, 2 * (n_max + 1), 4);
      Matrix fast;
      detail::Liouvillian(SystemParams(g, k, 0.0), n_max).apply(rho, fast);
      const Matrix dense = testsupport::dense_liouvillian(rho, g, k, n_max);
      EXPECT_LT((fast - dense).cwiseAbs().maxCoeff(), 1e-12) << "g=" << g << " k=" << k;
    }
  }
}

TEST(Liouvillian, MaximallyMixedGivesTracelessHermitianDerivative) {
  const int n_max = 10;
  const int dim = 2 * (n_max + 1);
  const Matrix rho = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  Matrix out;
  detail::Liouvillian(SystemParams(0.0, 0.8, 0.0), n_max).apply(rho, out);
  EXPECT_LE(std::abs(out.trace()), 1e-12);
  EXPECT_LE((out - out.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Liouvillian, GeneratorIsTracelessAndHermitian) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    const FockDensity rho(low_photon_density(rng, 15, 8), 15);
    const Matrix out = liouvillian_apply(rho, SystemParams(1.2, 0.4, 0.0));
    EXPECT_LE(std::abs(out.trace()), 1e-12);
    EXPECT_LE((out - out.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Liouvillian, SinglePhotonDecaysAtTwiceK) {
  const int n_max = 10;
  const int d = n_max + 1;
  for (double k : {0.1, 0.5, 2.0}) {
    for (int atom : {0, 1}) {
      Matrix rho = Matrix::Zero(2 * d, 2 * d);
      rho(atom * d + 1, atom * d + 1) = 1.0;
      const Matrix out = liouvillian_apply(FockDensity(rho, n_max), SystemParams(0.0, k, 0.0));
      EXPECT_NEAR(out(atom * d + 1, atom * d + 1).real(), -2.0 * k, 1e-15);
      EXPECT_NEAR(out(atom * d, atom * d).real(), 2.0 * k, 1e-15);
    }
  }
}

TEST(Liouvillian, RejectsMismatchedDimension) {
  Matrix out;
  EXPECT_THROW(detail::Liouvillian(SystemParams(1.0, 0.1, 0.0), 10).apply(Matrix::Zero(4, 4), out),
               std::invalid_argument);
}

TEST(IntegratorConfig, Validation) {
  EXPECT_THROW(config(9, 1e-3, 1e-9, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(config(20, 0.0, 1e-9, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(config(20, 1e-3, 2e-3, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(config(20, 1e-3, 0.0, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(config(20, 1e-3, 1e-9, -1.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(config(20, 1e-3, 1e-3, 0.0).validate());
}

TEST(Integrate, ReturnsInitialStateAtTimeZero) {
  const SystemParams p(1.0, 0.1, Complex(1.0, 1.0));
  const FockDensity rho = integrate(p, default_config(p, 0.0));
  const FockDensity start = initial_state(p, rho.n_max());
  EXPECT_EQ((rho.matrix() - start.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Integrate, AgreesWithClosedFormAtUnitTime) {
  const SystemParams p(1.0, 0.1, 1.0);
  const IntegratorConfig cfg = default_config(p, 1.0);
  const FockDensity oracle = integrate(p, cfg);
  EXPECT_LE(trace_distance(oracle, fock_density(p, 1.0, cfg.n_max)), 1e-6);
  EXPECT_NEAR(oracle.matrix().trace().real(), 1.0, 1e-9);
}

TEST(Integrate, PureLossKeepsCoherentField) {
  for (double k : {0.2, 1.0}) {
    const SystemParams p(0.0, k, 1.0);
    const double t = 1.5;
    const FockDensity oracle = integrate(p, default_config(p, t));
    EXPECT_NEAR((oracle.matrix() * oracle.matrix()).trace().real(), 1.0, 1e-8);
    const Vector field =
        coherent_fock_vector(CoherentLabel(std::exp(-k * t)), oracle.n_max());
    Vector psi = Vector::Zero(2 * (oracle.n_max() + 1));
    psi.head(oracle.n_max() + 1) = field;
    EXPECT_LE(trace_distance(oracle.matrix(), Matrix(psi * psi.adjoint())), 1e-8);
  }
}

TEST(Integrate, ConservesInteractionEnergyWithoutDamping) {
  const SystemParams p(1.0, 0.0, Complex(0.5, 0.5));
  const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
  const IntegratorConfig cfg = default_config(p, 1.0);
  const OracleRun run = integrate_trajectory(p, cfg, times);
  const Matrix V = testsupport::dense_interaction(p.g(), cfg.n_max);
  const Complex e0 = (initial_state(p, cfg.n_max).matrix() * V).trace();
  for (const FockDensity& rho : run.states) {
    EXPECT_NEAR(std::abs((rho.matrix() * V).trace() - e0), 0.0, 1e-9);
  }
}

TEST(Integrate, FourthOrderConvergence) {
  // Hamiltonian-dominated regime: each halving shrinks the error ~16x.
  const SystemParams p(1.0, 0.0, Complex(1.0, 1.0));
  const double t = 2.0;
  const int n_max = required_n_max(p, t);
  const detail::Liouvillian gen(p, n_max);
  const Matrix start = initial_state(p, n_max).matrix();
  const Matrix exact = fock_density(p, t, n_max).matrix();
  const std::vector<double> times{t};
  const std::vector<long> steps{25};  // dt = 0.08
  double previous = 0.0;
  for (int level = 0; level < 3; ++level) {
    const auto run = detail::fixed_step_run(gen, start, times, steps, level);
    ASSERT_TRUE(run.has_value());
    const double err = trace_distance(run->front(), exact);
    if (level > 0) {
      const double ratio = previous / err;
      EXPECT_GT(ratio, 13.0) << "level " << level;
      EXPECT_LT(ratio, 19.0) << "level " << level;
    }
    previous = err;
  }
}

TEST(Integrate, StableUnderLargerCutoff) {
  const SystemParams p(1.0, 0.5, Complex(1.0, 1.0));
  const double t = 1.0;
  IntegratorConfig cfg = default_config(p, t);
  cfg.dt = 5e-3;
  const double base = trace_distance(integrate(p, cfg), fock_density(p, t, cfg.n_max));
  cfg.n_max += 10;
  const double wider = trace_distance(integrate(p, cfg), fock_density(p, t, cfg.n_max));
  EXPECT_LE(std::abs(wider - base), 1e-9);
}

TEST(Integrate, RejectsInadequateCutoff) {
  const SystemParams p(1.0, 0.0, 1.0);
  IntegratorConfig cfg = default_config(p, 3.0);
  cfg.n_max -= 1;
  EXPECT_THROW(integrate(p, cfg), TruncationError);
}

TEST(Integrate, ReportsNonConvergence) {
  const SystemParams p(0.5, 0.1, 0.0);
  const IntegratorConfig cfg = config(required_n_max(p, 0.5), 0.5, 1e-300, 0.5);
  EXPECT_THROW(integrate(p, cfg), ConvergenceError);
}

TEST(Integrate, RejectsUnorderedSamples) {
  const SystemParams p(1.0, 0.1, 0.0);
  const IntegratorConfig cfg = default_config(p, 1.0);
  const std::vector<double> bad{0.5, 0.25};
  EXPECT_THROW(integrate_trajectory(p, cfg, bad), std::invalid_argument);
  const std::vector<double> beyond{2.0};
  EXPECT_THROW(integrate_trajectory(p, cfg, beyond), std::invalid_argument);
}

TEST(ProjectToEffective, ClosedFormLivesInTwoStateSpan) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> ug(0.1, 2.0), uk(0.0, 2.0), ut(0.0, 5.0);
  for (int i = 0; i < 30; ++i) {
    const SystemParams p(ug(rng), uk(rng), testsupport::random_complex(rng, 2.0));
    const double t = ut(rng);
    const AnalyticState s = effective_density(p, t);
    const int n_max = required_n_max(p, t);
    const Projection proj =
        project_to_effective(fock_density(p, t, n_max), s.env.alpha_plus, s.env.alpha_minus);
    EXPECT_LE(proj.leakage, 1e-8);
    EXPECT_LE(trace_distance(proj.rho, s.rho_eff), 1e-9);
  }
}

TEST(ProjectToEffective, InitialStateIsUnentangled) {
  const SystemParams p(1.0, 0.1, 1.0);
  const AnalyticState s = effective_density(p, 0.0);
  const Projection proj =
      project_to_effective(initial_state(p, 30), s.env.alpha_plus, s.env.alpha_minus);
  EXPECT_LE(proj.leakage, 1e-12);
  EXPECT_NEAR(std::abs(proj.rho.matrix()(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(concurrence(proj.rho), 0.0, 1e-12);
}

TEST(ProjectToEffective, OracleConcurrenceAtOptimalTime) {
  const SystemParams p(1.0, 0.1, 1.0);
  const double t = 0.83;
  const FockDensity oracle = integrate(p, default_config(p, t));
  const AnalyticState s = effective_density(p, t);
  const Projection proj = project_to_effective(oracle, s.env.alpha_plus, s.env.alpha_minus);
  EXPECT_LE(proj.leakage, 1e-6);
  EXPECT_NEAR(concurrence(proj.rho), concurrence(s.rho_eff), 1e-5);
}

TEST(ProjectToEffective, RejectsStatesOutsideSpan) {
  const int n_max = 20;
  const int d = n_max + 1;
  Matrix rho = Matrix::Zero(2 * d, 2 * d);
  rho(5, 5) = 1.0;  // five photons, far from the vacuum-centred span
  EXPECT_THROW(project_to_effective(FockDensity(rho, n_max), CoherentLabel(0.0),
                                    CoherentLabel(Complex(0.0, 0.1))),
               InvalidStateError);
}
