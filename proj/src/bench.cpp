#include "salsa/bench.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "salsa/metrics.hpp"
#include "salsa/noise.hpp"

namespace salsa {

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Salsa:
      return "salsa";
    case SolverKind::Ist:
      return "ist";
    case SolverKind::Fista:
      return "fista";
  }
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view name) {
  if (name == "salsa") return SolverKind::Salsa;
  if (name == "ist") return SolverKind::Ist;
  if (name == "fista") return SolverKind::Fista;
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

namespace {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::RelativeTolerance:
      return "relative_tolerance";
    case StopReason::TargetReached:
      return "target_reached";
    case StopReason::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

struct Preset {
  const char* id;
  BlurKind blur;
  double noise_variance;
  double tau;
};

// Default tau per problem: the ISNR-maximizing value over {2^k * 1e-3 : k = 0..10}
// on the bundled 256x256 camera image (see tools/tune_tau).
constexpr Preset kPresets[] = {
    {"1", BlurKind::Uniform9, 0.56 * 0.56, 0.016},
    {"2A", BlurKind::GaussianExp2, 2.0, 0.064},
    {"2B", BlurKind::GaussianExp2, 8.0, 0.128},
    {"3A", BlurKind::InverseQuadratic, 2.0, 0.128},
    {"3B", BlurKind::InverseQuadratic, 8.0, 0.256},
};

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <class T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (id.empty()) throw std::invalid_argument("experiment id must not be empty");
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("noise variance must be nonnegative");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (mu && !(*mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (levels < 1) throw std::invalid_argument("frame levels must be >= 1");
  if (solvers.empty()) throw std::invalid_argument("at least one solver must be requested");
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    for (std::size_t j = i + 1; j < solvers.size(); ++j) {
      if (solvers[i] == solvers[j]) {
        throw std::invalid_argument("solver '" + std::string(to_string(solvers[i])) + "' requested twice");
      }
    }
  }
  if (stop.max_iters < 1 || stop.reference_max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(stop.rel_tol >= 0.0) || !(stop.reference_rel_tol >= 0.0)) {
    throw std::invalid_argument("relative tolerance must be nonnegative");
  }
}

const std::vector<std::string>& benchmark_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.id);
    return out;
  }();
  return ids;
}

ExperimentSpec benchmark_experiment(std::string_view id) {
  for (const auto& p : kPresets) {
    if (id == p.id) {
      ExperimentSpec spec;
      spec.id = p.id;
      spec.blur = p.blur;
      spec.noise_variance = p.noise_variance;
      spec.tau = p.tau;
      spec.seed = kDefaultSeed;
      return spec;
    }
  }
  throw std::invalid_argument("unknown experiment id '" + std::string(id) + "'");
}

ImageBuffer degrade(const ImageBuffer& x, const Psf& blur, double noise_variance, std::uint64_t seed) {
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("noise variance must be a finite nonnegative number");
  }
  ImageBuffer y = apply_filter(psf_to_otf(blur, x.shape()), x);
  if (noise_variance > 0.0) {
    const double sigma = std::sqrt(noise_variance);
    GaussianNoise noise(seed);
    for (double& v : y.values()) v += sigma * noise.next();
  }
  return y;
}

std::string hash_image(const ImageBuffer& image) {
  Fnv1a h;
  h.value(image.height());
  h.value(image.width());
  h.bytes(image.data().data(), image.size() * sizeof(double));
  return h.hex();
}

std::string hash_problem(const ImageBuffer& y, const FreqFilter& otf, double tau, const FrameSpec& frame,
                         const Regularizer& reg) {
  Fnv1a h;
  h.value(y.height());
  h.value(y.width());
  h.bytes(y.data().data(), y.size() * sizeof(double));
  h.bytes(otf.values().data(), otf.values().size() * sizeof(std::complex<double>));
  h.value(tau);
  h.value(frame.levels);
  h.value(static_cast<int>(reg.kind));
  h.value(static_cast<int>(reg.penalize_approximation));
  return h.hex();
}

namespace {

SolverResult run_solver(SolverKind kind, const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& frame,
                        const Regularizer& reg, const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::Salsa:
      return salsa_solve(y, otf, frame, reg, cfg);
    case SolverKind::Ist:
      return ist_solve(y, otf, frame, reg, cfg);
    case SolverKind::Fista:
      return fista_solve(y, otf, frame, reg, cfg);
  }
  throw std::logic_error("unhandled solver kind");
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec, const ImageBuffer& x_true) {
  spec.validate();
  FrameSpec{spec.levels}.validate_for(x_true.shape());
  const Psf psf = build_psf(spec.blur, spec.blur_params);
  return solve_observation(spec, degrade(x_true, psf, spec.noise_variance, spec.seed), x_true);
}

ExperimentReport solve_observation(const ExperimentSpec& spec, const ImageBuffer& y,
                                   const std::optional<ImageBuffer>& x_true) {
  spec.validate();
  const FrameSpec frame{spec.levels};
  frame.validate_for(y.shape());
  if (x_true) require_same_shape(x_true->shape(), y.shape(), "solve_observation");

  ExperimentReport report;
  report.spec = spec;
  report.mu = spec.resolved_mu();
  const FreqFilter otf = psf_to_otf(build_psf(spec.blur, spec.blur_params), y.shape());
  report.observation = y;
  if (x_true) report.image_hash = hash_image(*x_true);
  report.observation_hash = hash_image(y);
  report.problem_hash = hash_problem(y, otf, spec.tau, frame, spec.regularizer);

  SolverConfig base;
  base.tau = spec.tau;
  base.mu = report.mu;
  base.max_iters = spec.stop.max_iters;
  base.record_trace = true;
  base.reference = x_true;

  if (spec.stop.mode == StopMode::TargetObjective) {
    if (spec.stop.target) {
      report.target_objective = spec.stop.target;
    } else {
      SolverConfig ref = base;
      ref.record_trace = false;
      ref.reference.reset();
      ref.max_iters = spec.stop.reference_max_iters;
      ref.objective_rel_tol = spec.stop.reference_rel_tol;
      report.target_objective = salsa_solve(y, otf, frame, spec.regularizer, ref).objective;
    }
    base.target_objective = report.target_objective;
    base.objective_rel_tol = 0.0;
  } else {
    base.objective_rel_tol = spec.stop.rel_tol;
  }

  for (SolverKind kind : spec.solvers) {
    SolverSummary s;
    s.solver = kind;
    s.problem_hash = hash_problem(y, otf, base.tau, frame, spec.regularizer);
    try {
      SolverResult r = run_solver(kind, y, otf, frame, spec.regularizer, base);
      s.final_objective = r.objective;
      s.iterations = r.iterations;
      s.solver_seconds = r.elapsed_seconds;
      s.wall_seconds = r.wall_seconds;
      s.stop_reason = r.stop_reason;
      s.reached_target = r.stop_reason == StopReason::TargetReached;
      if (s.reached_target) s.seconds_to_target = r.elapsed_seconds;
      if (x_true) s.isnr_db = isnr(*x_true, y, r.image);
      s.splitting_residual = r.splitting_residual;
      report.traces.push_back(std::move(r.trace));
      report.reconstructions.push_back(std::move(r.image));
    } catch (const DivergenceError& e) {
      s.diverged = true;
      s.error = e.what();
      report.traces.emplace_back();
      report.reconstructions.push_back(ImageBuffer(y.shape()));
    }
    report.summaries.push_back(std::move(s));
  }
  return report;
}

void write_trace_csv(const SolverTrace& trace, std::ostream& out) {
  out << "iter,elapsed_s,objective,isnr_db\n";
  for (const auto& r : trace.records) {
    out << r.iter << ',' << format_double(r.elapsed_seconds) << ',' << format_double(r.objective) << ',';
    if (r.isnr_db) out << format_double(*r.isnr_db);
    out << '\n';
  }
}

SolverTrace parse_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "iter,elapsed_s,objective,isnr_db") {
    throw std::runtime_error("trace CSV: missing or unexpected header");
  }
  SolverTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 4) {
      throw std::runtime_error("trace CSV line " + std::to_string(line_no) + ": expected 4 fields");
    }
    try {
      TraceRecord r;
      r.iter = std::stoi(fields[0]);
      r.elapsed_seconds = std::stod(fields[1]);
      r.objective = std::stod(fields[2]);
      if (!fields[3].empty()) r.isnr_db = std::stod(fields[3]);
      trace.records.push_back(r);
    } catch (const std::logic_error&) {
      throw std::runtime_error("trace CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return trace;
}

std::string trace_filename(SolverKind kind) { return "trace_" + std::string(to_string(kind)) + ".csv"; }

std::string reconstruction_filename(SolverKind kind) {
  return "reconstruction_" + std::string(to_string(kind)) + ".pgm";
}

void export_trace(const ExperimentReport& report, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create directory " + directory.string() + ": " + ec.message());
  for (std::size_t i = 0; i < report.summaries.size(); ++i) {
    const auto path = directory / trace_filename(report.summaries[i].solver);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_trace_csv(report.traces[i], out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
  }
}

std::string report_to_json(const ExperimentReport& report) {
  using nlohmann::json;
  const auto& spec = report.spec;
  json j;
  j["intensity_scale"] = "[0, 255]";
  json s;
  s["id"] = spec.id;
  s["blur"] = std::string(to_string(spec.blur));
  if (spec.blur_params.size) s["blur_size"] = *spec.blur_params.size;
  if (spec.blur_params.gaussian_std) s["gaussian_std"] = *spec.blur_params.gaussian_std;
  s["noise_variance"] = spec.noise_variance;
  s["tau"] = spec.tau;
  s["mu"] = report.mu;
  s["mu_auto"] = !spec.mu.has_value();
  s["seed"] = spec.seed;
  s["levels"] = spec.levels;
  s["penalize_approximation"] = spec.regularizer.penalize_approximation;
  json solvers = json::array();
  for (SolverKind k : spec.solvers) solvers.push_back(std::string(to_string(k)));
  s["solvers"] = solvers;
  json stop;
  stop["mode"] = spec.stop.mode == StopMode::TargetObjective ? "target_objective" : "relative_tolerance";
  stop["max_iters"] = spec.stop.max_iters;
  if (spec.stop.mode == StopMode::RelativeTolerance) stop["rel_tol"] = spec.stop.rel_tol;
  s["stop"] = stop;
  j["spec"] = s;

  j["hashes"] = {{"image", report.image_hash.empty() ? json(nullptr) : json(report.image_hash)},
                 {"observation", report.observation_hash},
                 {"problem", report.problem_hash}};
  j["target_objective"] = report.target_objective ? json(*report.target_objective) : json(nullptr);

  json per = json::array();
  for (const auto& r : report.summaries) {
    json b;
    b["solver"] = std::string(to_string(r.solver));
    b["diverged"] = r.diverged;
    if (r.diverged) b["error"] = r.error;
    b["final_objective"] = r.final_objective;
    b["iterations"] = r.iterations;
    b["solver_seconds"] = r.solver_seconds;
    b["wall_seconds"] = r.wall_seconds;
    b["reached_target"] = r.reached_target;
    b["seconds_to_target"] = r.seconds_to_target ? json(*r.seconds_to_target) : json(nullptr);
    b["isnr_db"] = r.isnr_db && std::isfinite(*r.isnr_db) ? json(*r.isnr_db) : json(nullptr);
    b["splitting_residual"] = r.splitting_residual;
    b["stop_reason"] = std::string(to_string(r.stop_reason));
    b["problem_hash"] = r.problem_hash;
    b["trace_file"] = trace_filename(r.solver);
    b["reconstruction_file"] = reconstruction_filename(r.solver);
    per.push_back(b);
  }
  j["solvers"] = per;
  return j.dump(2) + "\n";
}

void write_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << report_to_json(report);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace salsa
