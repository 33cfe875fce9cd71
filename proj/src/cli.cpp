#include "salsa/cli.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "salsa/pgm.hpp"

namespace salsa::cli {

namespace {

[[noreturn]] void usage(const std::string& flag, const std::string& message) {
  throw UsageError(flag + ": " + message, 2);
}

double parse_real(const std::string& flag, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
    usage(flag, "expected a real number, got '" + text + "'");
  }
  return v;
}

double parse_positive(const std::string& flag, const std::string& text) {
  const double v = parse_real(flag, text);
  if (!(v > 0.0)) usage(flag, "must be positive, got '" + text + "'");
  return v;
}

double parse_nonnegative(const std::string& flag, const std::string& text) {
  const double v = parse_real(flag, text);
  if (!(v >= 0.0)) usage(flag, "must be nonnegative, got '" + text + "'");
  return v;
}

// Integers also accept scientific notation as long as the value is integral.
std::uint64_t parse_unsigned(const std::string& flag, const std::string& text) {
  if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
    errno = 0;
    const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
    if (errno == ERANGE) usage(flag, "value out of range: '" + text + "'");
    return v;
  }
  const double v = parse_real(flag, text);
  if (v < 0.0 || v != std::floor(v) || v >= 18446744073709551616.0) {
    usage(flag, "expected a nonnegative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

int parse_positive_int(const std::string& flag, const std::string& text) {
  const std::uint64_t v = parse_unsigned(flag, text);
  if (v < 1 || v > 1'000'000'000) usage(flag, "expected a positive integer, got '" + text + "'");
  return static_cast<int>(v);
}

struct RawOptions {
  std::string image;
  std::string experiment;
  std::string blur;
  std::string psf_size;
  std::string psf_std;
  std::string sigma2;
  std::string tau;
  std::string mu;
  std::vector<std::string> solvers;
  std::string max_iters;
  std::string rel_tol;
  std::string target;
  std::string seed;
  std::string out;
  bool keep_approximation = false;
};

const std::vector<std::string> kBlurNames{"uniform9", "gaussian", "invquad"};
const std::vector<std::string> kSolverNames{"salsa", "ist", "fista"};

struct OptionHandles {
  CLI::Option* image = nullptr;
  CLI::Option* experiment = nullptr;
  CLI::Option* blur = nullptr;
  CLI::Option* psf_size = nullptr;
  CLI::Option* psf_std = nullptr;
  CLI::Option* sigma2 = nullptr;
  CLI::Option* tau = nullptr;
  CLI::Option* mu = nullptr;
  CLI::Option* solvers = nullptr;
  CLI::Option* max_iters = nullptr;
  CLI::Option* rel_tol = nullptr;
  CLI::Option* target = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
};

OptionHandles add_solver_options(CLI::App* sub, RawOptions& raw) {
  OptionHandles h;
  h.blur = sub->add_option("--blur", raw.blur, "Blur kernel")->check(CLI::IsMember(kBlurNames));
  h.psf_size = sub->add_option("--psf-size", raw.psf_size, "Odd kernel support override");
  h.psf_std = sub->add_option("--psf-std", raw.psf_std, "Gaussian kernel standard deviation override");
  h.tau = sub->add_option("--tau", raw.tau, "Regularization weight");
  h.mu = sub->add_option("--mu", raw.mu, "AL penalty, or 'auto' for 0.1*tau");
  h.solvers = sub->add_option("--solver", raw.solvers, "Solver (repeatable)")->check(CLI::IsMember(kSolverNames));
  h.max_iters = sub->add_option("--max-iters", raw.max_iters, "Iteration cap");
  h.rel_tol = sub->add_option("--rel-tol", raw.rel_tol, "Relative objective change stopping threshold");
  h.target = sub->add_option("--target-objective", raw.target, "Stop when the objective reaches this value");
  h.out = sub->add_option("--out", raw.out, "Output directory");
  sub->add_flag("--keep-approximation", raw.keep_approximation, "Do not threshold the approximation subband");
  return h;
}

void fill_common(const OptionHandles& h, const RawOptions& raw, CliConfig& cfg) {
  if (h.blur && h.blur->count()) cfg.blur = parse_blur_kind(raw.blur);
  if (h.psf_size && h.psf_size->count()) {
    const int size = parse_positive_int("--psf-size", raw.psf_size);
    if (size % 2 == 0) usage("--psf-size", "must be odd, got " + raw.psf_size);
    cfg.psf_params.size = size;
  }
  if (h.psf_std && h.psf_std->count()) cfg.psf_params.gaussian_std = parse_positive("--psf-std", raw.psf_std);
  if (h.sigma2 && h.sigma2->count()) cfg.sigma2 = parse_nonnegative("--sigma2", raw.sigma2);
  if (h.tau && h.tau->count()) cfg.tau = parse_positive("--tau", raw.tau);
  if (h.mu && h.mu->count()) {
    if (raw.mu == "auto") {
      cfg.mu_auto = true;
    } else {
      cfg.mu = parse_positive("--mu", raw.mu);
    }
  }
  if (cfg.mu_auto && cfg.tau) cfg.mu = kDefaultMuRatio * *cfg.tau;
  if (h.solvers && h.solvers->count()) {
    for (const auto& s : raw.solvers) {
      const SolverKind kind = parse_solver_kind(s);
      for (SolverKind existing : cfg.solvers) {
        if (existing == kind) usage("--solver", "'" + s + "' given more than once");
      }
      cfg.solvers.push_back(kind);
    }
  }
  if (h.max_iters && h.max_iters->count()) cfg.max_iters = parse_positive_int("--max-iters", raw.max_iters);
  if (h.rel_tol && h.rel_tol->count()) cfg.rel_tol = parse_nonnegative("--rel-tol", raw.rel_tol);
  if (h.target && h.target->count()) cfg.target_objective = parse_real("--target-objective", raw.target);
  if (h.seed && h.seed->count()) cfg.seed = parse_unsigned("--seed", raw.seed);
  if (h.out && h.out->count()) cfg.out_dir = raw.out;
  cfg.penalize_approximation = !raw.keep_approximation;
  if (cfg.rel_tol && cfg.target_objective) {
    usage("--rel-tol", "cannot be combined with --target-objective");
  }
}

std::string format_seconds(const std::optional<double>& s) {
  if (!s) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *s);
  return buf;
}

void print_summary(const ExperimentReport& report, std::ostream& out) {
  out << "experiment " << report.spec.id << ": blur=" << to_string(report.spec.blur)
      << " sigma2=" << report.spec.noise_variance << " tau=" << report.spec.tau << " mu=" << report.mu << "\n";
  if (report.target_objective) {
    out << "target objective " << std::setprecision(10) << *report.target_objective << "\n";
  }
  out << std::left << std::setw(8) << "solver" << std::setw(8) << "iters" << std::setw(20) << "objective"
      << std::setw(12) << "seconds" << std::setw(12) << "to-target" << "isnr_db\n";
  for (const auto& s : report.summaries) {
    out << std::setw(8) << to_string(s.solver);
    if (s.diverged) {
      out << "DIVERGED: " << s.error << "\n";
      continue;
    }
    char obj[32];
    std::snprintf(obj, sizeof obj, "%.10g", s.final_objective);
    out << std::setw(8) << s.iterations << std::setw(20) << obj << std::setw(12)
        << format_seconds(s.solver_seconds) << std::setw(12) << format_seconds(s.seconds_to_target);
    if (s.isnr_db) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", *s.isnr_db);
      out << buf;
    } else {
      out << "-";
    }
    out << "\n";
  }
}

int write_outputs(const ExperimentReport& report, const std::filesystem::path& dir, std::ostream& out) {
  export_trace(report, dir);
  for (std::size_t i = 0; i < report.summaries.size(); ++i) {
    if (!report.summaries[i].diverged) {
      write_image(report.reconstructions[i], dir / reconstruction_filename(report.summaries[i].solver));
    }
  }
  write_image(report.observation, dir / kObservationFilename);
  write_report_json(report, dir / kReportFilename);
  print_summary(report, out);
  out << "outputs written to " << dir.string() << "\n";
  for (const auto& s : report.summaries) {
    if (s.diverged) return 1;
  }
  return 0;
}

}  // namespace

CliConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Frame-based image deconvolution with SALSA, IST and FISTA", args.empty() ? "salsa" : args[0]};
  app.require_subcommand(1);

  RawOptions raw;
  CLI::App* run_cmd = app.add_subcommand("run", "Degrade an image per a benchmark experiment and restore it");
  OptionHandles run_h = add_solver_options(run_cmd, raw);
  run_h.experiment = run_cmd->add_option("--experiment", raw.experiment, "Experiment id: 1, 2A, 2B, 3A, 3B")
                         ->required();
  run_h.image = run_cmd->add_option("--image", raw.image, "Ground-truth PGM image")->required()->check(CLI::ExistingFile);
  run_h.sigma2 = run_cmd->add_option("--sigma2", raw.sigma2, "Noise variance override");
  run_h.seed = run_cmd->add_option("--seed", raw.seed, "Noise seed");

  CLI::App* deblur_cmd = app.add_subcommand("deblur", "Restore an already blurred, noisy PGM image");
  OptionHandles deblur_h = add_solver_options(deblur_cmd, raw);
  deblur_h.image = deblur_cmd->add_option("--image", raw.image, "Observed PGM image")->required()->check(CLI::ExistingFile);
  deblur_h.blur->required();
  deblur_h.tau->required();

  CLI::App* psf_cmd = app.add_subcommand("psf-dump", "Print the taps of a blur kernel");
  OptionHandles psf_h;
  psf_h.blur = psf_cmd->add_option("--blur", raw.blur, "Blur kernel")->required()->check(CLI::IsMember(kBlurNames));
  psf_h.psf_size = psf_cmd->add_option("--psf-size", raw.psf_size, "Odd kernel support override");
  psf_h.psf_std = psf_cmd->add_option("--psf-std", raw.psf_std, "Gaussian kernel standard deviation override");
  psf_h.out = psf_cmd->add_option("--out", raw.out, "Write psf_<kind>.csv into this directory instead of stdout");

  std::vector<std::string> storage(args.begin(), args.end());
  if (storage.empty()) storage.emplace_back("salsa");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError(app.help("", CLI::AppFormatMode::All), 0);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), 2);
  }

  CliConfig cfg;
  try {
    if (run_cmd->parsed()) {
      cfg.subcommand = Subcommand::Run;
      cfg.image_path = raw.image;
      try {
        (void)benchmark_experiment(raw.experiment);
      } catch (const std::invalid_argument&) {
        usage("--experiment", "unknown experiment id '" + raw.experiment + "'");
      }
      cfg.experiment_id = raw.experiment;
      fill_common(run_h, raw, cfg);
    } else if (deblur_cmd->parsed()) {
      cfg.subcommand = Subcommand::Deblur;
      cfg.image_path = raw.image;
      fill_common(deblur_h, raw, cfg);
    } else {
      cfg.subcommand = Subcommand::PsfDump;
      fill_common(psf_h, raw, cfg);
      if (!psf_h.out->count()) cfg.out_dir.clear();
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what(), 2);
  }
  return cfg;
}

ExperimentSpec build_experiment_spec(const CliConfig& config) {
  ExperimentSpec spec;
  if (config.subcommand == Subcommand::Run) {
    spec = benchmark_experiment(config.experiment_id.value_or(""));
  } else {
    spec.id = "deblur";
    spec.solvers = {SolverKind::Salsa};
    spec.stop.mode = StopMode::RelativeTolerance;
  }
  if (config.blur) spec.blur = *config.blur;
  spec.blur_params = config.psf_params;
  if (config.sigma2) spec.noise_variance = *config.sigma2;
  if (config.tau) spec.tau = *config.tau;
  if (config.mu_auto) {
    spec.mu.reset();
  } else if (config.mu) {
    spec.mu = *config.mu;
  }
  if (!config.solvers.empty()) spec.solvers = config.solvers;
  if (config.seed) spec.seed = *config.seed;
  if (config.max_iters) spec.stop.max_iters = *config.max_iters;
  if (config.rel_tol) {
    spec.stop.mode = StopMode::RelativeTolerance;
    spec.stop.rel_tol = *config.rel_tol;
  }
  if (config.target_objective) {
    spec.stop.mode = StopMode::TargetObjective;
    spec.stop.target = *config.target_objective;
  }
  spec.regularizer.penalize_approximation = config.penalize_approximation;
  spec.validate();
  return spec;
}

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.subcommand == Subcommand::PsfDump) {
      const BlurKind kind = config.blur.value_or(BlurKind::Uniform9);
      const Psf psf = build_psf(kind, config.psf_params);
      std::ofstream file;
      std::ostream* dst = &out;
      if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        const auto path = config.out_dir / ("psf_" + std::string(to_string(kind)) + ".csv");
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
        dst = &file;
      }
      char buf[40];
      for (std::size_t r = 0; r < psf.support_height(); ++r) {
        for (std::size_t c = 0; c < psf.support_width(); ++c) {
          std::snprintf(buf, sizeof buf, "%.17g", psf.tap(r, c));
          *dst << (c ? "," : "") << buf;
        }
        *dst << "\n";
      }
      return 0;
    }

    const ExperimentSpec spec = build_experiment_spec(config);
    const ImageBuffer image = read_image(config.image_path);
    std::filesystem::create_directories(config.out_dir);
    const ExperimentReport report =
        config.subcommand == Subcommand::Run ? run_experiment(spec, image) : solve_observation(spec, image);
    return write_outputs(report, config.out_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig config;
  try {
    config = parse_args(args);
  } catch (const UsageError& e) {
    (e.exit_code() == 0 ? out : err) << e.what() << (e.exit_code() == 0 ? "" : "\nRun with --help for usage.\n");
    return e.exit_code();
  }
  return run(config, out, err);
}

}  // namespace salsa::cli
