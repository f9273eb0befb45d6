#include <fmt/core.h>

#include "cli_common.hpp"
#include "mixdyn/errors.hpp"
#include "mixdyn/spectral.hpp"

namespace mixdyn::cli {

namespace {

void emit_report(Csv& spectrum, Csv& eigenvalues, Csv& hist,
                 const std::string& kind, const SpectrumReport& report) {
  spectrum.row({Csv::cell(kind), Csv::cell(report.gamma), Csv::cell(report.ks)});
  for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
    eigenvalues.row({Csv::cell(kind), Csv::cell(static_cast<long>(i)),
                     Csv::cell(report.eigenvalues[i])});
  }
  for (std::size_t b = 0; b < report.hist.counts.size(); ++b) {
    hist.row({Csv::cell(kind), Csv::cell(static_cast<long>(b)),
              Csv::cell(report.hist.edges[b]), Csv::cell(report.hist.edges[b + 1]),
              Csv::cell(report.hist.counts[b])});
  }
}

}  // namespace

int cmd_spectrum(const CliOptions& options) {
  StrictConfig config(load_config(options.config_path));

  const int n = static_cast<int>(config.integer("n", 45));
  const int d0 = static_cast<int>(config.integer("d0", 10));
  const int d = static_cast<int>(config.integer("d", 200));
  const double lambda = config.number("lambda", 0.5);
  std::uint64_t seed = static_cast<std::uint64_t>(config.integer("seed", 0));
  const int bins = static_cast<int>(config.integer("bins", 40));
  config.reject_unknown();

  if (n < 1 || d0 < 1 || d < 1) throw ConfigError("n, d0, d must be positive");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0,1]");
  if (bins < 1) throw ConfigError("bins must be positive");
  if (options.seed_set) {
    seed = options.seed;
    config.override_echo("seed", seed);
  }
  ensure_out_dir(options.out_dir);

  const MixupSpectrumResult result =
      mixup_spectrum_experiment(n, d0, d, lambda, seed, bins);

  Csv spectrum(options.out_dir, "spectrum.csv");
  spectrum.row({"kind", "gamma", "ks"});
  Csv eigenvalues(options.out_dir, "eigenvalues.csv");
  eigenvalues.row({"kind", "index", "eigenvalue"});
  Csv hist(options.out_dir, "histogram.csv");
  hist.row({"kind", "bin", "bin_lo", "bin_hi", "count"});

  emit_report(spectrum, eigenvalues, hist, "mixup", result.mixup);
  emit_report(spectrum, eigenvalues, hist, "control", result.control);

  write_manifest(options, "spectrum", config.echo(), seed,
                 {spectrum.filename(), eigenvalues.filename(), hist.filename()});
  return 0;
}

}  // namespace mixdyn::cli
