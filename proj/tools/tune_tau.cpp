// Grid search for the default tau of each benchmark experiment: runs SALSA
// for tau in {2^k * 1e-3 : k = 0..10} and reports the ISNR-maximizing value.
//
//   tune_tau --image cameraman.pgm [--experiment 2B ...] [--rel-tol 1e-5] [--max-iters 2000]

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "salsa/bench.hpp"
#include "salsa/pgm.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Grid-search the default tau of the benchmark experiments"};
  std::string image_path;
  std::vector<std::string> ids;
  double rel_tol = 1e-5;
  int max_iters = 2000;
  app.add_option("--image", image_path, "Ground-truth PGM image")->required()->check(CLI::ExistingFile);
  app.add_option("--experiment", ids, "Experiment ids (default: all)");
  app.add_option("--rel-tol", rel_tol, "SALSA relative objective tolerance");
  app.add_option("--max-iters", max_iters, "SALSA iteration cap");
  CLI11_PARSE(app, argc, argv);
  if (ids.empty()) ids = salsa::benchmark_ids();

  const salsa::ImageBuffer x = salsa::read_image(image_path);
  for (const auto& id : ids) {
    salsa::ExperimentSpec spec = salsa::benchmark_experiment(id);
    spec.solvers = {salsa::SolverKind::Salsa};
    spec.stop.mode = salsa::StopMode::RelativeTolerance;
    spec.stop.rel_tol = rel_tol;
    spec.stop.max_iters = max_iters;
    double best_tau = 0.0, best_isnr = -INFINITY;
    for (int k = 0; k <= 10; ++k) {
      spec.tau = std::ldexp(1e-3, k);
      const auto report = salsa::run_experiment(spec, x);
      const auto& s = report.summaries.front();
      const double isnr = s.isnr_db.value_or(-INFINITY);
      std::printf("%-3s tau=%-8.4g isnr=%7.3f dB  iters=%d\n", id.c_str(), spec.tau, isnr, s.iterations);
      if (isnr > best_isnr) best_isnr = isnr, best_tau = spec.tau;
    }
    std::printf("%-3s best tau=%g (%.3f dB)\n", id.c_str(), best_tau, best_isnr);
  }
  return 0;
}
