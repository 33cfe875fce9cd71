#pragma once

// Solvers for the synthesis problem
//
//   min_beta  1/2 ||H W beta - y||^2 + tau * phi(beta)
//
// with H a periodic convolution (given by its OTF) and W the Parseval Haar
// frame. SALSA is the split augmented Lagrangian method; IST and FISTA are
// first-order baselines that share the same stopping rules and trace format.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "salsa/convolution.hpp"
#include "salsa/frame.hpp"
#include "salsa/prox.hpp"

namespace salsa {

/// mu = 0.1 * tau is the default AL penalty.
inline constexpr double kDefaultMuRatio = 0.1;

struct SolverConfig {
  double tau = 0.0;
  double mu = 0.0;
  int max_iters = 500;
  /// Stop when |f_k - f_{k-1}| / f_{k-1} <= objective_rel_tol. Zero disables.
  double objective_rel_tol = 1e-5;
  bool record_trace = true;
  /// Stop as soon as the objective drops to this value.
  std::optional<double> target_objective;
  /// IST/FISTA step; defaults to 1 / max|d|^2. Larger steps are rejected.
  std::optional<double> step_size;
  /// Ground truth used only to fill the ISNR column of the trace.
  std::optional<ImageBuffer> reference;

  static SolverConfig with_default_mu(double tau) {
    SolverConfig cfg;
    cfg.tau = tau;
    cfg.mu = kDefaultMuRatio * tau;
    return cfg;
  }

  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double elapsed_seconds = 0.0;
  double objective = 0.0;
  std::optional<double> isnr_db;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
};

/// beta, theta and the scaled multiplier d all share one layout.
struct SolverState {
  FrameCoeffs beta;
  FrameCoeffs theta;
  FrameCoeffs d;
  int k = 0;
};

enum class StopReason { RelativeTolerance, TargetReached, MaxIterations };

struct SolverResult {
  FrameCoeffs coeffs;  ///< theta for SALSA, the prox iterate for IST/FISTA
  ImageBuffer image;   ///< synthesis(coeffs)
  SolverTrace trace;
  int iterations = 0;
  double objective = 0.0;
  StopReason stop_reason = StopReason::MaxIterations;
  /// Solver work only; objective/ISNR evaluation for the trace is excluded.
  double elapsed_seconds = 0.0;
  /// Everything, including trace bookkeeping.
  double wall_seconds = 0.0;
  /// ||beta - theta|| / ||theta|| at termination (SALSA only; 0 otherwise).
  double splitting_residual = 0.0;
};

/// A non-finite value appeared in the iterate.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& solver, int iteration);
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// (1/mu) (r - W^T F W r): the exact minimizer of
/// ||H W beta - y||^2 + mu ||beta - beta'||^2 for r = W^T H^T y + mu beta',
/// given the inversion filter F = build_inversion_filter(otf, mu).
FrameCoeffs beta_update(const FrameCoeffs& r, const FreqFilter& inv_filter, const FrameSpec& frame, double mu);

/// One SALSA run, advanced an iteration at a time.
///
/// Initial point: theta_0 = W^T y, beta_0 = theta_0, d_0 = 0. Each step:
///   r       = ybar + mu (theta + d)
///   beta    = beta_update(r)
///   theta   = prox(beta - d, tau / mu)
///   d       = d - (beta - theta)
/// The multiplier update is evaluated in exactly that order (difference
/// first) for every element.
class SalsaIteration {
 public:
  SalsaIteration(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const Regularizer& reg,
                 double tau, double mu);

  /// Throws DivergenceError if theta becomes non-finite.
  void step();

  const SolverState& state() const { return state_; }
  /// W^T H^T y
  const FrameCoeffs& projected_observation() const { return ybar_; }
  const FreqFilter& inversion_filter() const { return inv_filter_; }
  double splitting_residual() const;

 private:
  FrameSpec frame_;
  Regularizer reg_;
  double tau_;
  double mu_;
  FrameCoeffs ybar_;
  FreqFilter inv_filter_;
  SolverState state_;
  FrameCoeffs r_;
  FrameCoeffs scratch_;
  ImageBuffer image_;
};

SolverResult salsa_solve(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const Regularizer& reg,
                         const SolverConfig& cfg);
SolverResult ist_solve(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const Regularizer& reg,
                       const SolverConfig& cfg);
SolverResult fista_solve(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame, const Regularizer& reg,
                         const SolverConfig& cfg);

/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2
double fista_next_t(double t);

/// Largest violation of the optimality conditions of the objective at `coeffs`.
/// With g = W^T H^T (H W beta - y) and w_i the penalty weight (tau, or 0 on an
/// unpenalized band): |g_i + w_i sign(beta_i)| where beta_i != 0, and
/// max(|g_i| - w_i, 0) where beta_i == 0.
double subgradient_residual(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame,
                            const Regularizer& reg, const FrameCoeffs& coeffs, double tau);

}  // namespace salsa
