#include "salsa/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "salsa/metrics.hpp"

namespace salsa {

void SolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("solver config: tau must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("solver config: mu must be positive");
  if (max_iters < 1) throw std::invalid_argument("solver config: max_iters must be >= 1");
  if (!(objective_rel_tol >= 0.0)) throw std::invalid_argument("solver config: objective_rel_tol must be >= 0");
  if (step_size && !(*step_size > 0.0)) throw std::invalid_argument("solver config: step_size must be positive");
  if (target_objective && !std::isfinite(*target_objective)) {
    throw std::invalid_argument("solver config: target_objective must be finite");
  }
}

DivergenceError::DivergenceError(const std::string& solver, int iteration)
    : std::runtime_error(solver + " diverged: non-finite iterate at iteration " + std::to_string(iteration)),
      iteration_(iteration) {}

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  void resume() {
    if (!running_) {
      start_ = Clock::now();
      running_ = true;
    }
  }
  void pause() {
    if (running_) {
      total_ += Clock::now() - start_;
      running_ = false;
    }
  }
  double seconds() const {
    auto t = total_;
    if (running_) t += Clock::now() - start_;
    return std::chrono::duration<double>(t).count();
  }

 private:
  Clock::time_point start_{};
  Clock::duration total_{};
  bool running_ = false;
};

void validate_problem(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const SolverConfig& cfg) {
  cfg.validate();
  require_same_shape(y.shape(), otf.shape(), "solver");
  frame.validate_for(y.shape());
}

// Evaluates the objective between iterations with the work clock paused,
// records the trace and decides when to stop.
class RunMonitor {
 public:
  RunMonitor(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const Regularizer& reg,
             const SolverConfig& cfg)
      : y_(y), otf_(otf), frame_(frame), reg_(reg), cfg_(cfg) {
    wall_start_ = Clock::now();
    work_.resume();
  }

  bool observe(int k, const FrameCoeffs& estimate) {
    work_.pause();
    bool stop = false;
    const bool need_objective = cfg_.record_trace || cfg_.objective_rel_tol > 0.0 || cfg_.target_objective;
    if (need_objective) {
      const double f = objective(y_, otf_, frame_, reg_, estimate, cfg_.tau);
      if (cfg_.record_trace) {
        TraceRecord rec{k, work_.seconds(), f, std::nullopt};
        if (cfg_.reference) rec.isnr_db = isnr(*cfg_.reference, y_, synthesis(estimate, frame_));
        trace_.records.push_back(rec);
      }
      if (cfg_.target_objective && f <= *cfg_.target_objective) {
        reason_ = StopReason::TargetReached;
        stop = true;
      } else if (k > 0 && cfg_.objective_rel_tol > 0.0 && last_objective_) {
        const double prev = *last_objective_;
        const double change = std::abs(f - prev);
        if (prev == 0.0 ? change == 0.0 : change / std::abs(prev) <= cfg_.objective_rel_tol) {
          reason_ = StopReason::RelativeTolerance;
          stop = true;
        }
      }
      last_objective_ = f;
    }
    if (!stop && k >= cfg_.max_iters) {
      reason_ = StopReason::MaxIterations;
      stop = true;
    }
    if (!stop) work_.resume();
    return stop;
  }

  SolverResult finish(FrameCoeffs coeffs, int iterations) {
    work_.pause();
    SolverResult out;
    out.elapsed_seconds = work_.seconds();
    out.image = synthesis(coeffs, frame_);
    // observe() runs after every iteration, so a cached value is always the
    // objective of the final iterate.
    out.objective = last_objective_ ? *last_objective_ : objective(y_, otf_, frame_, reg_, coeffs, cfg_.tau);
    out.coeffs = std::move(coeffs);
    out.iterations = iterations;
    out.stop_reason = reason_;
    out.trace = std::move(trace_);
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - wall_start_).count();
    return out;
  }

 private:
  const ImageBuffer& y_;
  const FreqFilter& otf_;
  const FrameSpec& frame_;
  const Regularizer& reg_;
  const SolverConfig& cfg_;
  Stopwatch work_;
  Clock::time_point wall_start_;
  SolverTrace trace_;
  std::optional<double> last_objective_;
  StopReason reason_ = StopReason::MaxIterations;
};

void beta_update_into(const FrameCoeffs& r, const FreqFilter& inv_filter, const FrameSpec& frame, double mu,
                      ImageBuffer& image, FrameCoeffs& scratch, FrameCoeffs& out) {
  synthesis_into(r, frame, image);
  analysis_into(apply_filter(inv_filter, image), frame, scratch);
  if (!out.same_layout(r)) out = FrameCoeffs(r.shape(), r.levels());
  const auto rv = r.values();
  const auto sv = scratch.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < rv.size(); ++i) ov[i] = (rv[i] - sv[i]) / mu;
}

double max_step(const FreqFilter& otf) {
  const double lipschitz = otf.max_squared_gain();
  if (!(lipschitz > 0.0)) throw std::invalid_argument("blur operator has zero gain everywhere");
  return 1.0 / lipschitz;
}

double resolve_step(const FreqFilter& otf, const SolverConfig& cfg) {
  const double limit = max_step(otf);
  if (!cfg.step_size) return limit;
  if (*cfg.step_size > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument("step size " + std::to_string(*cfg.step_size) + " exceeds 1/L = " +
                                std::to_string(limit));
  }
  return *cfg.step_size;
}

// W^T H^T H W x - ybar, with the H^T H product done as one |d|^2 filter pass.
void gradient_into(const FrameCoeffs& x, const FreqFilter& gram, const FrameCoeffs& ybar, const FrameSpec& frame,
                   ImageBuffer& image, FrameCoeffs& out) {
  synthesis_into(x, frame, image);
  analysis_into(apply_filter(gram, image), frame, out);
  auto ov = out.values();
  const auto yv = ybar.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] -= yv[i];
}

}  // namespace

FrameCoeffs beta_update(const FrameCoeffs& r, const FreqFilter& inv_filter, const FrameSpec& frame, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("beta_update: mu must be positive");
  require_same_shape(r.shape(), inv_filter.shape(), "beta_update");
  if (r.levels() != frame.levels) throw std::invalid_argument("beta_update: coefficient levels do not match the frame");
  ImageBuffer image;
  FrameCoeffs scratch, out;
  beta_update_into(r, inv_filter, frame, mu, image, scratch, out);
  return out;
}

SalsaIteration::SalsaIteration(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame,
                               const Regularizer& reg, double tau, double mu)
    : frame_(frame), reg_(reg), tau_(tau), mu_(mu) {
  if (!(tau > 0.0) || !(mu > 0.0)) throw std::invalid_argument("SALSA requires tau > 0 and mu > 0");
  require_same_shape(y.shape(), otf.shape(), "SalsaIteration");
  frame.validate_for(y.shape());
  ybar_ = analysis(adjoint_filter(otf, y), frame_);
  inv_filter_ = build_inversion_filter(otf, mu_);
  state_.theta = analysis(y, frame_);
  state_.beta = state_.theta;
  state_.d = FrameCoeffs(y.shape(), frame_.levels);
  r_ = FrameCoeffs(y.shape(), frame_.levels);
}

void SalsaIteration::step() {
  auto& st = state_;
  {
    auto r = r_.values();
    const auto yb = ybar_.values();
    const auto th = st.theta.values();
    const auto d = st.d.values();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = yb[i] + mu_ * (th[i] + d[i]);
  }
  beta_update_into(r_, inv_filter_, frame_, mu_, image_, scratch_, st.beta);
  {
    auto th = st.theta.values();
    const auto b = st.beta.values();
    const auto d = st.d.values();
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = b[i] - d[i];
  }
  prox_inplace(reg_, st.theta, tau_ / mu_);
  {
    auto d = st.d.values();
    const auto b = st.beta.values();
    const auto th = st.theta.values();
    // The shrinkage maps NaN to zero, so theta alone would hide a blow-up;
    // d carries beta forward and is checked instead.
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = d[i] - (b[i] - th[i]);
      sum += d[i];
    }
    ++st.k;
    if (!std::isfinite(sum)) throw DivergenceError("SALSA", st.k);
  }
}

double SalsaIteration::splitting_residual() const {
  const double num = std::sqrt(squared_norm(coeffs_axpy(-1.0, state_.theta, state_.beta).values()));
  const double den = coeffs_norm2(state_.theta);
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

SolverResult salsa_solve(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const Regularizer& reg,
                         const SolverConfig& cfg) {
  validate_problem(y, otf, frame, cfg);
  RunMonitor monitor(y, otf, frame, reg, cfg);
  SalsaIteration salsa(y, otf, frame, reg, cfg.tau, cfg.mu);
  if (!monitor.observe(0, salsa.state().theta)) {
    do {
      salsa.step();
    } while (!monitor.observe(salsa.state().k, salsa.state().theta));
  }
  const double split = salsa.splitting_residual();
  SolverResult out = monitor.finish(salsa.state().theta, salsa.state().k);
  out.splitting_residual = split;
  return out;
}

SolverResult ist_solve(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const Regularizer& reg,
                       const SolverConfig& cfg) {
  validate_problem(y, otf, frame, cfg);
  const double step = resolve_step(otf, cfg);
  RunMonitor monitor(y, otf, frame, reg, cfg);
  const FreqFilter gram = gram_filter(otf);
  const FrameCoeffs ybar = analysis(adjoint_filter(otf, y), frame);
  FrameCoeffs beta = analysis(y, frame);
  FrameCoeffs grad;
  ImageBuffer image;

  int k = 0;
  if (!monitor.observe(0, beta)) {
    do {
      gradient_into(beta, gram, ybar, frame, image, grad);
      coeffs_axpy(-step, grad, beta);
      ++k;
      // Checked before the shrinkage, which would map NaN to zero.
      if (!beta.all_finite()) throw DivergenceError("IST", k);
      prox_inplace(reg, beta, cfg.tau * step);
    } while (!monitor.observe(k, beta));
  }
  return monitor.finish(std::move(beta), k);
}

double fista_next_t(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

SolverResult fista_solve(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const Regularizer& reg,
                         const SolverConfig& cfg) {
  validate_problem(y, otf, frame, cfg);
  const double step = resolve_step(otf, cfg);
  RunMonitor monitor(y, otf, frame, reg, cfg);
  const FreqFilter gram = gram_filter(otf);
  const FrameCoeffs ybar = analysis(adjoint_filter(otf, y), frame);
  FrameCoeffs x = analysis(y, frame);
  FrameCoeffs z = x;
  FrameCoeffs x_next, grad;
  ImageBuffer image;
  double t = 1.0;

  int k = 0;
  if (!monitor.observe(0, x)) {
    do {
      gradient_into(z, gram, ybar, frame, image, grad);
      x_next = z;
      coeffs_axpy(-step, grad, x_next);
      if (!x_next.all_finite()) throw DivergenceError("FISTA", k + 1);
      prox_inplace(reg, x_next, cfg.tau * step);
      const double t_next = fista_next_t(t);
      const double momentum = (t - 1.0) / t_next;
      auto zv = z.values();
      const auto xn = x_next.values();
      const auto xv = x.values();
      for (std::size_t i = 0; i < zv.size(); ++i) zv[i] = xn[i] + momentum * (xn[i] - xv[i]);
      std::swap(x, x_next);
      t = t_next;
      ++k;
    } while (!monitor.observe(k, x));
  }
  return monitor.finish(std::move(x), k);
}

double subgradient_residual(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame,
                            const Regularizer& reg, const FrameCoeffs& coeffs, double tau) {
  require_same_shape(y.shape(), otf.shape(), "subgradient_residual");
  require_same_shape(y.shape(), coeffs.shape(), "subgradient_residual");
  ImageBuffer residual = apply_filter(otf, synthesis(coeffs, frame));
  auto rv = residual.values();
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] -= y.data()[i];
  const FrameCoeffs g = analysis(adjoint_filter(otf, residual), frame);

  const std::size_t penalized = reg.penalize_approximation ? coeffs.size() : coeffs.size() - coeffs.shape().size();
  const auto gv = g.values();
  const auto bv = coeffs.values();
  double worst = 0.0;
  for (std::size_t i = 0; i < bv.size(); ++i) {
    const double w = i < penalized ? tau : 0.0;
    const double v = bv[i] != 0.0 ? std::abs(gv[i] + w * (bv[i] > 0.0 ? 1.0 : -1.0))
                                  : std::max(std::abs(gv[i]) - w, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace salsa
