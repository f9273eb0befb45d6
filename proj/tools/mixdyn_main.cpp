#include <CLI11.hpp>
#include <cstdio>
#include <functional>

#include "cli_common.hpp"
#include "mixdyn/errors.hpp"

namespace {

using mixdyn::cli::CliOptions;

void add_subcommand(CLI::App& app, const std::string& name,
                    const std::string& description, CliOptions& options,
                    int& exit_code,
                    const std::function<int(const CliOptions&)>& handler) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", options.config_path, "JSON config file")
      ->required();
  CLI::Option* seed_opt =
      sub->add_option("--seed", options.seed, "override the config seed");
  sub->add_option("--out", options.out_dir, "output directory");
  sub->callback([&options, &exit_code, handler, seed_opt]() {
    options.seed_set = seed_opt->count() > 0;
    exit_code = handler(options);
  });
}

}  // namespace

int main(int argc, char** argv) {
  mixdyn::cli::setup_threads();

  CLI::App app{"mixdyn: mixup label-noise and training-dynamics experiments"};
  app.require_subcommand(1);

  CliOptions options;
  int exit_code = 0;
  add_subcommand(app, "teacher-student", "teacher-student training curves",
                 options, exit_code, mixdyn::cli::cmd_teacher_student);
  add_subcommand(app, "flow", "gradient-flow risk curve and bound", options,
                 exit_code, mixdyn::cli::cmd_flow);
  add_subcommand(app, "noise", "mixup label-noise fraction over a lambda grid",
                 options, exit_code, mixdyn::cli::cmd_noise);
  add_subcommand(app, "spectrum", "feature-matrix spectrum vs the MP law",
                 options, exit_code, mixdyn::cli::cmd_spectrum);
  add_subcommand(app, "lossbound", "mixup cross-entropy lower bound", options,
                 exit_code, mixdyn::cli::cmd_lossbound);
  add_subcommand(app, "render", "render a CSV as an SVG line chart", options,
                 exit_code, mixdyn::cli::cmd_render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex) == 0 ? 0 : 2;
  } catch (const mixdyn::ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return 2;
  } catch (const mixdyn::NumericError& ex) {
    std::fprintf(stderr, "numerical failure: %s\n", ex.what());
    return 3;
  } catch (const mixdyn::IoError& ex) {
    std::fprintf(stderr, "i/o error: %s\n", ex.what());
    return 4;
  }
  return exit_code;
}
