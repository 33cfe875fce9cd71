#include <doctest.h>

#include <cmath>
#include <random>

#include "salsa/bench.hpp"
#include "salsa/solver.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace salsa;
namespace oracle = salsa::oracle;

namespace {

// Dense model of the 8x8 / one-level problem with an asymmetric 3x3 blur.
struct DenseProblem {
  Shape shape{8, 8};
  FrameSpec frame{1};
  Psf psf;
  FreqFilter otf;
  oracle::Matrix hw;  // H W

  explicit DenseProblem(std::mt19937_64& rng) : psf(testing::random_psf(3, 3, rng)), otf(psf_to_otf(psf, shape)) {
    hw = oracle::convolution_matrix(psf, shape) * oracle::analysis_matrix(shape, 1).transpose();
  }

  oracle::Vector solve(const oracle::Vector& r, double mu) const {
    const oracle::Matrix a = hw.transpose() * hw + mu * oracle::Matrix::Identity(hw.cols(), hw.cols());
    return a.ldlt().solve(r);
  }
};

FrameCoeffs coeffs_from(const oracle::Vector& v, Shape shape, int levels) {
  FrameCoeffs c(shape, levels);
  std::copy(v.data(), v.data() + v.size(), c.values().begin());
  return c;
}

}  // namespace

TEST_CASE("beta_update solves the regularized normal equations (dense)") {
  std::mt19937_64 rng(41);
  const DenseProblem p(rng);
  for (double mu : {0.01, 0.1, 1.0, 10.0, 1e8}) {
    const FreqFilter inv = build_inversion_filter(p.otf, mu);
    for (int trial = 0; trial < 5; ++trial) {
      const FrameCoeffs r = testing::random_coeffs(p.shape, 1, rng, 10.0);
      const oracle::Vector want = p.solve(oracle::to_vector(r.values()), mu);
      const FrameCoeffs got = beta_update(r, inv, p.frame, mu);
      CHECK(oracle::relative_error(oracle::to_vector(got.values()), want) <= 1e-8);
    }
  }
}

TEST_CASE("beta_update edge cases") {
  const Shape shape{8, 8};
  const FrameSpec frame{1};
  const FreqFilter inv = build_inversion_filter(testing::all_ones_filter(shape), 1.0);
  const FrameCoeffs zero = beta_update(FrameCoeffs(shape, 1), inv, frame, 1.0);
  for (double v : zero.values()) CHECK(v == 0.0);
  // Identity blur, mu = 1: (W^T W + I) beta = r.
  std::mt19937_64 rng(42);
  const FrameCoeffs r = testing::random_coeffs(shape, 1, rng);
  const oracle::Matrix wt = oracle::analysis_matrix(shape, 1);
  const oracle::Matrix a = wt * wt.transpose() + oracle::Matrix::Identity(wt.rows(), wt.rows());
  const oracle::Vector want = a.ldlt().solve(oracle::to_vector(r.values()));
  CHECK(oracle::relative_error(oracle::to_vector(beta_update(r, inv, frame, 1.0).values()), want) <= 1e-10);
  CHECK_THROWS_AS(beta_update(r, inv, frame, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(beta_update(r, inv, FrameSpec{2}, 1.0), std::invalid_argument);
}

TEST_CASE("beta_update satisfies the normal equations on a larger problem") {
  std::mt19937_64 rng(43);
  const Shape shape{64, 64};
  const FrameSpec frame{4};
  const FreqFilter otf = psf_to_otf(build_psf(BlurKind::Uniform9), shape);
  for (double mu : {0.01, 1.0}) {
    const FrameCoeffs r = testing::random_coeffs(shape, 4, rng, 5.0);
    const FrameCoeffs b = beta_update(r, build_inversion_filter(otf, mu), frame, mu);
    // (W^T H^T H W + mu I) b
    FrameCoeffs lhs = analysis(adjoint_filter(otf, apply_filter(otf, synthesis(b, frame))), frame);
    coeffs_axpy(mu, b, lhs);
    coeffs_axpy(-1.0, r, lhs);
    CHECK(coeffs_norm2(lhs) <= 1e-8 * coeffs_norm2(r));
  }
}

TEST_CASE("every SALSA iteration matches the dense update and the documented ordering") {
  std::mt19937_64 rng(44);
  const DenseProblem p(rng);
  const ImageBuffer y = testing::random_image(p.shape, rng);
  const double tau = 2.0, mu = 0.5;
  const Regularizer reg;
  SalsaIteration it(y, p.otf, p.frame, reg, tau, mu);

  const oracle::Vector ybar = p.hw.transpose() * oracle::to_vector(y);
  CHECK(oracle::relative_error(oracle::to_vector(it.projected_observation().values()), ybar) <= 1e-12);
  CHECK(oracle::max_abs_diff(it.state().theta.values(), analysis(y, p.frame).values()) == 0.0);
  for (double v : it.state().d.values()) CHECK(v == 0.0);

  for (int k = 1; k <= 25; ++k) {
    const FrameCoeffs theta = it.state().theta, d = it.state().d;
    it.step();
    const SolverState& s = it.state();
    CHECK(s.k == k);
    const oracle::Vector r = ybar + mu * (oracle::to_vector(theta.values()) + oracle::to_vector(d.values()));
    CHECK(oracle::relative_error(oracle::to_vector(s.beta.values()), p.solve(r, mu)) <= 1e-8);
    for (std::size_t i = 0; i < s.d.size(); ++i) {
      const double v = s.beta.values()[i] - d.values()[i];
      CHECK(s.theta.values()[i] == soft_threshold(v, tau / mu));
      const double diff = s.beta.values()[i] - s.theta.values()[i];
      CHECK(s.d.values()[i] == d.values()[i] - diff);
    }
  }
}

TEST_CASE("identity blur with negligible tau reproduces the observation") {
  std::mt19937_64 rng(45);
  const Shape shape{16, 16};
  const ImageBuffer y = testing::random_image(shape, rng);
  const FreqFilter one = testing::all_ones_filter(shape);
  // tau only enters SALSA through tau / mu, so mu is fixed rather than 0.1 tau.
  SolverConfig cfg = SolverConfig::with_default_mu(1e-12);
  cfg.mu = 1.0;
  cfg.max_iters = 50;
  for (auto solve : {salsa_solve, ist_solve, fista_solve}) {
    const SolverResult res = solve(y, one, FrameSpec{2}, Regularizer{}, cfg);
    CHECK(oracle::max_abs_diff(res.image.values(), y.values()) <= 1e-6);
  }
}

TEST_CASE("IST objective is monotone and FISTA gets there sooner") {
  const ImageBuffer x = testing::phantom(Shape{128, 128});
  const ExperimentSpec spec = benchmark_experiment("1");
  const ImageBuffer y = degrade(x, build_psf(spec.blur), spec.noise_variance, spec.seed);
  const FreqFilter otf = psf_to_otf(build_psf(spec.blur), y.shape());
  const FrameSpec frame{4};

  SolverConfig cfg = SolverConfig::with_default_mu(spec.tau);
  cfg.max_iters = 200;
  cfg.objective_rel_tol = 0.0;
  const SolverResult ist = ist_solve(y, otf, frame, Regularizer{}, cfg);
  REQUIRE(ist.trace.records.size() == 201);
  for (std::size_t k = 1; k < ist.trace.records.size(); ++k) {
    const double prev = ist.trace.records[k - 1].objective, cur = ist.trace.records[k].objective;
    CHECK(cur <= prev * (1.0 + 1e-12));
  }

  cfg.target_objective = ist.objective;
  const SolverResult fista = fista_solve(y, otf, frame, Regularizer{}, cfg);
  CHECK(fista.stop_reason == StopReason::TargetReached);
  CHECK(fista.iterations < 200);
}

TEST_CASE("FISTA momentum sequence") {
  CHECK(fista_next_t(1.0) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  double t = 1.0;
  for (int k = 0; k < 100; ++k) {
    const double next = fista_next_t(t);
    CHECK(next > t);
    CHECK(next * next - next == doctest::Approx(t * t).epsilon(1e-12));
    t = next;
  }
}

TEST_CASE("all three solvers satisfy the optimality certificate") {
  // Even with a well-conditioned kernel the redundant frame leaves directions
  // that only the l1 term pins down, so first-order methods need many steps.
  std::mt19937_64 rng(46);
  const Shape shape{16, 16};
  const FrameSpec frame{2};
  std::vector<double> taps(9);
  const double k1[] = {0.1, 0.8, 0.1};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) taps[i * 3 + j] = k1[i] * k1[j];
  const Psf psf = Psf::from_taps(3, 3, taps);
  const ImageBuffer y = degrade(testing::random_image(shape, rng), psf, 4.0, 7);
  const FreqFilter otf = psf_to_otf(psf, shape);
  const double tau = 2.0;
  SolverConfig cfg = SolverConfig::with_default_mu(tau);
  cfg.objective_rel_tol = 0.0;
  cfg.record_trace = false;
  std::vector<double> objectives;
  for (auto [solve, iters] : {std::pair{salsa_solve, 20000}, std::pair{ist_solve, 100000},
                              std::pair{fista_solve, 20000}}) {
    cfg.max_iters = iters;
    const SolverResult res = solve(y, otf, frame, Regularizer{}, cfg);
    CHECK(subgradient_residual(y, otf, frame, Regularizer{}, res.coeffs, tau) <= 1e-3 * tau);
    objectives.push_back(res.objective);
  }
  CHECK(objectives[1] == doctest::Approx(objectives[0]).epsilon(1e-6));
  CHECK(objectives[2] == doctest::Approx(objectives[0]).epsilon(1e-6));
}

TEST_CASE("subgradient residual of a non-optimal point is large") {
  std::mt19937_64 rng(47);
  const Shape shape{8, 8};
  const ImageBuffer y = testing::random_image(shape, rng);
  const FreqFilter one = testing::all_ones_filter(shape);
  CHECK(subgradient_residual(y, one, FrameSpec{1}, Regularizer{}, FrameCoeffs(shape, 1), 0.1) > 1.0);
}

TEST_CASE("runs are deterministic") {
  std::mt19937_64 rng(48);
  const Shape shape{32, 32};
  const Psf psf = build_psf(BlurKind::InverseQuadratic);
  const ImageBuffer y = degrade(testing::random_image(shape, rng), psf, 2.0, 9);
  const FreqFilter otf = psf_to_otf(psf, shape);
  SolverConfig cfg = SolverConfig::with_default_mu(1.0);
  cfg.max_iters = 40;
  for (auto solve : {salsa_solve, ist_solve, fista_solve}) {
    const SolverResult a = solve(y, otf, FrameSpec{3}, Regularizer{}, cfg);
    const SolverResult b = solve(y, otf, FrameSpec{3}, Regularizer{}, cfg);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (std::size_t k = 0; k < a.trace.records.size(); ++k) {
      CHECK(a.trace.records[k].objective == b.trace.records[k].objective);
    }
    CHECK(oracle::max_abs_diff(a.coeffs.values(), b.coeffs.values()) == 0.0);
  }
}

TEST_CASE("trace layout and stop reasons") {
  std::mt19937_64 rng(49);
  const Shape shape{16, 16};
  const Psf psf = build_psf(BlurKind::Uniform9, {.size = 3});
  const ImageBuffer x = testing::random_image(shape, rng);
  const ImageBuffer y = degrade(x, psf, 1.0, 3);
  const FreqFilter otf = psf_to_otf(psf, shape);
  SolverConfig cfg = SolverConfig::with_default_mu(0.5);
  cfg.max_iters = 7;
  cfg.objective_rel_tol = 0.0;
  cfg.reference = x;
  const SolverResult res = salsa_solve(y, otf, FrameSpec{1}, Regularizer{}, cfg);
  CHECK(res.stop_reason == StopReason::MaxIterations);
  CHECK(res.iterations == 7);
  REQUIRE(res.trace.records.size() == 8);
  for (std::size_t k = 0; k < res.trace.records.size(); ++k) {
    CHECK(res.trace.records[k].iter == static_cast<int>(k));
    CHECK(res.trace.records[k].isnr_db.has_value());
    if (k > 0) CHECK(res.trace.records[k].elapsed_seconds >= res.trace.records[k - 1].elapsed_seconds);
  }
  CHECK(res.trace.records.back().objective == res.objective);
  CHECK(res.wall_seconds >= res.elapsed_seconds);

  cfg.objective_rel_tol = 1e-3;
  cfg.max_iters = 10000;
  CHECK(salsa_solve(y, otf, FrameSpec{1}, Regularizer{}, cfg).stop_reason == StopReason::RelativeTolerance);

  cfg.record_trace = false;
  CHECK(salsa_solve(y, otf, FrameSpec{1}, Regularizer{}, cfg).trace.records.empty());
}

TEST_CASE("SALSA converges to a consistent split") {
  std::mt19937_64 rng(50);
  const Shape shape{32, 32};
  const Psf psf = build_psf(BlurKind::GaussianExp2);
  const ImageBuffer y = degrade(testing::phantom(shape), psf, 2.0, 1);
  SolverConfig cfg = SolverConfig::with_default_mu(0.5);
  cfg.objective_rel_tol = 1e-6;
  cfg.max_iters = 5000;
  const SolverResult res = salsa_solve(y, psf_to_otf(psf, shape), FrameSpec{2}, Regularizer{}, cfg);
  CHECK(res.splitting_residual <= 1e-2);
}

TEST_CASE("solver input validation") {
  const Shape shape{16, 16};
  const ImageBuffer y(shape, 1.0);
  const FreqFilter otf = testing::all_ones_filter(shape);
  SolverConfig cfg = SolverConfig::with_default_mu(1.0);
  cfg.tau = 0.0;
  CHECK_THROWS_AS(salsa_solve(y, otf, FrameSpec{1}, Regularizer{}, cfg), std::invalid_argument);
  cfg = SolverConfig::with_default_mu(1.0);
  cfg.mu = -1.0;
  CHECK_THROWS_AS(salsa_solve(y, otf, FrameSpec{1}, Regularizer{}, cfg), std::invalid_argument);
  cfg = SolverConfig::with_default_mu(1.0);
  cfg.max_iters = 0;
  CHECK_THROWS_AS(ist_solve(y, otf, FrameSpec{1}, Regularizer{}, cfg), std::invalid_argument);
  cfg = SolverConfig::with_default_mu(1.0);
  cfg.step_size = 1.5;  // 1/L = 1 for the identity
  CHECK_THROWS_AS(ist_solve(y, otf, FrameSpec{1}, Regularizer{}, cfg), std::invalid_argument);
  cfg.step_size = 0.5;
  CHECK_NOTHROW(ist_solve(y, otf, FrameSpec{1}, Regularizer{}, cfg));
  CHECK_THROWS_AS(salsa_solve(ImageBuffer(Shape{16, 8}), otf, FrameSpec{1}, Regularizer{},
                              SolverConfig::with_default_mu(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(salsa_solve(ImageBuffer(Shape{12, 12}), testing::all_ones_filter(Shape{12, 12}), FrameSpec{3},
                              Regularizer{}, SolverConfig::with_default_mu(1.0)),
                  std::invalid_argument);
}

TEST_CASE("non-finite data raises a divergence error naming the iteration") {
  const Shape shape{8, 8};
  ImageBuffer y(shape, 1.0);
  y(3, 3) = std::numeric_limits<double>::quiet_NaN();
  const FreqFilter otf = testing::all_ones_filter(shape);
  for (auto solve : {salsa_solve, ist_solve, fista_solve}) {
    try {
      solve(y, otf, FrameSpec{1}, Regularizer{}, SolverConfig::with_default_mu(1.0));
      FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
      CHECK(e.iteration() == 1);
      CHECK(std::string(e.what()).find("iteration 1") != std::string::npos);
    }
  }
}
