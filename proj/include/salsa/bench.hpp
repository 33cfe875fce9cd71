#pragma once

// Deblurring benchmark harness: degradation, solver orchestration, reports.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salsa/convolution.hpp"
#include "salsa/frame.hpp"
#include "salsa/image.hpp"
#include "salsa/prox.hpp"
#include "salsa/solver.hpp"

namespace salsa {

enum class SolverKind { Salsa, Ist, Fista };

std::string_view to_string(SolverKind kind);
/// "salsa", "ist" or "fista".
SolverKind parse_solver_kind(std::string_view name);

enum class StopMode {
  RelativeTolerance,  ///< stop on rel_tol or max_iters
  TargetObjective,    ///< stop when the objective reaches a common target
};

struct StopRule {
  StopMode mode = StopMode::TargetObjective;
  double rel_tol = 1e-5;
  int max_iters = 500;
  /// Target mode only. When absent the target is the objective SALSA reaches
  /// with rel_tol = reference_rel_tol (capped at reference_max_iters).
  std::optional<double> target;
  double reference_rel_tol = 1e-6;
  int reference_max_iters = 5000;
};

struct ExperimentSpec {
  std::string id;
  BlurKind blur = BlurKind::Uniform9;
  PsfParams blur_params;
  double noise_variance = 0.0;  ///< sigma^2 in intensity^2 units, images in [0, 255]
  double tau = 1.0;
  std::optional<double> mu;  ///< absent means kDefaultMuRatio * tau
  std::uint64_t seed = 0;
  std::vector<SolverKind> solvers{SolverKind::Salsa, SolverKind::Ist, SolverKind::Fista};
  StopRule stop;
  int levels = 4;
  Regularizer regularizer;

  double resolved_mu() const { return mu.value_or(kDefaultMuRatio * tau); }
  void validate() const;
};

inline constexpr std::uint64_t kDefaultSeed = 20090101;

/// Ids "1", "2A", "2B", "3A", "3B" of the standard five-problem benchmark.
const std::vector<std::string>& benchmark_ids();
/// Preset for one benchmark problem, including the frozen default tau.
/// Throws std::invalid_argument("unknown experiment id ...").
ExperimentSpec benchmark_experiment(std::string_view id);

/// Circular blur of x plus i.i.d. N(0, noise_variance) noise drawn from
/// GaussianNoise(seed) in row-major pixel order.
ImageBuffer degrade(const ImageBuffer& x, const Psf& blur, double noise_variance, std::uint64_t seed);

struct SolverSummary {
  SolverKind solver = SolverKind::Salsa;
  bool diverged = false;
  std::string error;
  double final_objective = 0.0;
  int iterations = 0;
  double solver_seconds = 0.0;  ///< work time, objective evaluation excluded
  double wall_seconds = 0.0;
  bool reached_target = false;
  std::optional<double> seconds_to_target;
  std::optional<double> isnr_db;  ///< only when ground truth is known
  double splitting_residual = 0.0;
  StopReason stop_reason = StopReason::MaxIterations;
  /// Hash of the (y, otf, tau, frame, regularizer) instance this solver saw.
  std::string problem_hash;
};

struct ExperimentReport {
  ExperimentSpec spec;
  double mu = 0.0;
  std::string image_hash;
  std::string observation_hash;
  std::string problem_hash;
  std::optional<double> target_objective;
  ImageBuffer observation;
  std::vector<SolverSummary> summaries;
  std::vector<SolverTrace> traces;           ///< parallel to summaries
  std::vector<ImageBuffer> reconstructions;  ///< parallel to summaries
};

/// 64-bit FNV-1a over the raw bytes, as 16 lowercase hex digits.
std::string hash_image(const ImageBuffer& image);
std::string hash_problem(const ImageBuffer& y, const FreqFilter& otf, double tau, const FrameSpec& frame,
                         const Regularizer& reg);

/// Degrades x_true, then runs every requested solver in order. Divergence is
/// recorded in the summary rather than thrown.
ExperimentReport run_experiment(const ExperimentSpec& spec, const ImageBuffer& x_true);

/// Runs the requested solvers on an existing observation y. The noise fields
/// of `spec` are ignored; ISNR is reported only when x_true is given.
ExperimentReport solve_observation(const ExperimentSpec& spec, const ImageBuffer& y,
                                   const std::optional<ImageBuffer>& x_true = std::nullopt);

/// CSV with header `iter,elapsed_s,objective,isnr_db`, 17 significant digits,
/// LF line endings. A missing ISNR is an empty field.
void write_trace_csv(const SolverTrace& trace, std::ostream& out);
SolverTrace parse_trace_csv(std::istream& in);

std::string trace_filename(SolverKind kind);           ///< trace_<solver>.csv
std::string reconstruction_filename(SolverKind kind);  ///< reconstruction_<solver>.pgm
inline constexpr std::string_view kReportFilename = "report.json";
inline constexpr std::string_view kObservationFilename = "observed.pgm";

/// Writes one trace CSV per solver into `directory` (created if needed).
void export_trace(const ExperimentReport& report, const std::filesystem::path& directory);

/// JSON summary: spec echo, input hashes and one block per solver.
std::string report_to_json(const ExperimentReport& report);
void write_report_json(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace salsa
