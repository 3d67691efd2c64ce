// Command-line entry point: run, suite, plots, oracle.
#include "evplane/data/binary_image.hpp"
#include "evplane/harness/experiment.hpp"
#include "evplane/harness/format.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code(const evplane::Error& e) {
  switch (e.category()) {
    case evplane::Error::Category::data: return kExitData;
    case evplane::Error::Category::numeric: return kExitNumeric;
    case evplane::Error::Category::config:
    case evplane::Error::Category::usage: return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace evplane;
  CLI::App app{"Evidence-error plane experiments for dense and spiking classifiers"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  app.add_option("--seed", seed, "Override the master seed");
  app.add_option("--out", out, "Override the output directory");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment from a config file");
  run->add_option("config", config_path, "Config file")->required();

  std::string suite_dir;
  auto* suite = app.add_subcommand("suite", "Run every .cfg in a directory and summarise");
  suite->add_option("dir", suite_dir, "Directory of configs")->required();

  std::string run_dir;
  auto* plots = app.add_subcommand("plots", "Regenerate plot tables for a run directory");
  plots->add_option("run_dir", run_dir, "Run directory")->required();

  auto* oracle = app.add_subcommand("oracle", "Analytic reference values");
  oracle->require_subcommand(1);
  oracle->fallthrough();
  int side = 8;
  double flip = 0.1;
  std::optional<long> mc;
  auto* bikl = oracle->add_subcommand("binary-image-kl", "Row-vs-column Binary Image KL in bits");
  bikl->add_option("--d", side, "Image side")->required();
  bikl->add_option("--p", flip, "Flip probability")->required();
  bikl->add_option("--mc", mc, "Monte Carlo sample count (exact enumeration when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const harness::RunOverrides overrides{seed, out};
  try {
    if (*run) {
      const auto result = harness::run_experiment(harness::load_config(config_path, overrides));
      const auto& last = result.trajectory.back();
      std::printf("%s: epoch %d  test_acc %.4f  D_theta %.3f bits  P_theta %.3f bits\n",
                  result.dir.string().c_str(), last.epoch, last.test_acc, last.d_theta_bits,
                  last.p_theta_bits);
    } else if (*suite) {
      const auto rows = harness::run_suite(suite_dir, overrides);
      int failed = 0;
      for (const auto& r : rows) {
        std::printf("%-24s %-8s %-13s %s\n", r.run.c_str(), r.model.c_str(), r.dataset.c_str(),
                    r.status.c_str());
        failed += r.status != "ok";
      }
      std::printf("%zu runs, %d failed\n", rows.size(), failed);
    } else if (*plots) {
      harness::emit_plots(run_dir);
    } else if (*bikl) {
      data::BinaryImageSpec spec{side, flip};
      spec.validate();
      const data::KlMethod method =
          mc ? data::KlMethod{data::MonteCarloKl{*mc, seed.value_or(0x42494E494D47)}}
             : data::KlMethod{data::ExactKl{}};
      const auto value = data::binary_image_analytic_kl(spec, method);
      std::printf("%s\t%s\n", harness::format_double(value.bits).c_str(),
                  harness::format_double(value.standard_error).c_str());
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
