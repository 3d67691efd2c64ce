#include "evplane/harness/config.hpp"
#include "evplane/harness/experiment.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace evplane;
using namespace evplane::harness;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(# tiny gaussian run
seed = 5
dataset.kind = gaussian
dataset.gaussian.dimension = 2
dataset.gaussian.samples_per_class = 300
model.hidden = 8
training.epochs = 2
estimation.k = 5
estimation.max_per_class = 200
estimation.dinp_max_per_class = 200
analysis.vote_n = 1,3
analysis.vote_groups = 200
analysis.alpha_grid = 9
)";

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("evplane_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string message_of(const std::string& text) {
  try {
    parse(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EVPLANE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing reports the offending line") {
  const auto cfg = parse(kSmall);
  CHECK(cfg.seed == 5u);
  CHECK(cfg.model.hidden == std::vector<int>{8});
  CHECK(cfg.estimation.knn.k == 5);
  CHECK(message_of("seed = 1\nbogus.key = 3\n").find("test.cfg:2") != std::string::npos);
  CHECK(message_of("seed = 1\nseed = 2\n").find("test.cfg:2") != std::string::npos);
  CHECK(message_of("seed = 1\ntraining.epochs = many\n").find("test.cfg:2") != std::string::npos);
  CHECK(message_of("seed = 1\nmodel.kind = quantum\n").find("test.cfg:2") != std::string::npos);
  CHECK_FALSE(message_of("dataset.kind = gaussian\n").empty());
  CHECK_FALSE(message_of("seed = 1\ndataset.kind = gaussian\nmodel.kind = spiking\n").empty());
  CHECK_FALSE(message_of("seed = 1\ndataset.kind = mnist\n").empty());
  CHECK_FALSE(message_of("seed = 1\ntraining.learning_rate = -1\n").empty());
}

TEST_CASE("config entries round-trip through the parser") {
  auto cfg = parse(kSmall);
  cfg.analysis.noise_sigmas = {1e-6, 0.1};
  cfg.training.learning_rate = 0.1 + 0.2;
  std::string text;
  for (const auto& [key, value] : config_entries(cfg)) text += key + " = " + value + "\n";
  const auto back = parse(text);
  CHECK(config_entries(back) == config_entries(cfg));
  CHECK(back.training.learning_rate == cfg.training.learning_rate);
  CHECK(back.analysis.noise_sigmas == cfg.analysis.noise_sigmas);
}

TEST_CASE("seed plan streams are distinct and fixed by the master seed") {
  const auto a = SeedPlan::from_master(7);
  CHECK(a.entries(2) == SeedPlan::from_master(7).entries(2));
  const std::vector<std::uint64_t> streams{a.data, a.split, a.init, a.training, a.evaluation,
                                           a.estimator, a.input_estimator, a.votes, a.noise_sweep};
  for (std::size_t i = 0; i < streams.size(); ++i)
    for (std::size_t j = i + 1; j < streams.size(); ++j) CHECK(streams[i] != streams[j]);
  CHECK(SeedPlan::from_master(8).data != a.data);
}

TEST_CASE("a small run writes its artefacts and is reproducible") {
  auto cfg = parse(kSmall);
  cfg.output_dir = scratch("run_a").string();
  const auto res = run_experiment(cfg);
  REQUIRE(res.trajectory.size() == 3);
  CHECK(res.trajectory[0].epoch == 0);
  CHECK(res.trajectory[2].epoch == 2);
  CHECK(res.dinp_analytic_bits.has_value());
  CHECK(res.dinp_bits == *res.dinp_analytic_bits);
  for (const char* f : {"manifest.json", "trajectory.csv", "trajectory.json", "model.slnn",
                        "votes.tsv", "plane.tsv", "region.tsv", "envelope.tsv"})
    CHECK_MESSAGE(fs::exists(res.dir / f), f);
  CHECK_FALSE(fs::exists(res.dir / "FAILED"));
  CHECK(slurp(res.dir / "manifest.json").find("\"completed\"") != std::string::npos);

  const auto read = read_trajectory_csv(res.dir / "trajectory.csv");
  REQUIRE(read.size() == 3);
  CHECK(read[2].d_theta_bits == res.trajectory[2].d_theta_bits);
  CHECK(read[2].alpha == res.trajectory[2].alpha);

  cfg.output_dir = scratch("run_b").string();
  const auto again = run_experiment(cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    auto x = res.trajectory[i], y = again.trajectory[i];
    x.wall_ms = y.wall_ms = 0.0;
    CHECK(trajectory_csv_row(x) == trajectory_csv_row(y));
  }
}

TEST_CASE("zero epochs record only the baseline") {
  auto cfg = parse(kSmall);
  cfg.training.epochs = 0;
  cfg.output_dir = scratch("run_zero").string();
  const auto res = run_experiment(cfg);
  REQUIRE(res.trajectory.size() == 1);
  CHECK(res.trajectory[0].epoch == 0);
}

TEST_CASE("a truncated trajectory keeps its complete rows") {
  const auto dir = scratch("partial");
  TrajectoryRecord r;
  r.alpha = {0.1, 0.2};
  r.beta = {0.2, 0.1};
  r.d_class = {1.0, 1.5};
  r.k_used = 5;
  std::string header;
  for (const auto& c : trajectory_columns(2)) header += (header.empty() ? "" : ",") + c;
  {
    std::ofstream out(dir / "trajectory.csv");
    out << header << "\n" << trajectory_csv_row(r) << "\n";
    r.epoch = 1;
    const std::string row = trajectory_csv_row(r);
    out << row.substr(0, row.size() / 2);
  }
  const auto back = read_trajectory_csv(dir / "trajectory.csv");
  REQUIRE(back.size() == 1);
  CHECK(back[0].d_class == r.d_class);
  CHECK_THROWS_AS(read_trajectory_csv(dir / "missing.csv"), IngestionError);
  CHECK_THROWS_AS(emit_plots(dir / "nowhere"), IngestionError);
}

TEST_CASE("a suite runs every config and records failures as rows") {
  const auto dir = scratch("suite");
  {
    std::ofstream(dir / "a.cfg") << kSmall;
    std::ofstream(dir / "b.cfg") << kSmall << "model.kind = linear\n";
    // too few samples for k = 5 once split and capped
    std::string tiny(kSmall);
    tiny.replace(tiny.find("= 300"), 5, "= 4");
    std::ofstream(dir / "c.cfg") << tiny;
  }
  const auto rows = run_suite(dir, {});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].run == "a");
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].model == "linear");
  CHECK(rows[1].d_theta_bits.has_value());
  CHECK(rows[2].status != "ok");
  const std::string summary = slurp(dir / "results" / "summary.csv");
  CHECK(summary.rfind("run,model,dataset,d_theta,p_theta,status\n", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);
  CHECK(fs::exists(dir / "results" / "c" / "FAILED"));
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  std::ofstream(dir / "ok.cfg") << kSmall;
  std::ofstream(dir / "bad.cfg") << "seed = 1\nnot.a.key = 2\n";
  CHECK(run_cli("run " + (dir / "ok.cfg").string() + " --out " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "trajectory.csv"));
  CHECK(run_cli("plots " + (dir / "out").string()) == 0);
  CHECK(run_cli("run " + (dir / "bad.cfg").string()) == 2);
  CHECK(run_cli("run " + (dir / "absent.cfg").string()) == 2);
  CHECK(run_cli("plots " + (dir / "absent").string()) == 3);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("oracle binary-image-kl --d 2 --p 0.1") == 0);
  CHECK(run_cli("oracle binary-image-kl --d 2 --p 1.5") == 2);
  CHECK(run_cli("--seed 3 oracle binary-image-kl --d 3 --p 0.2 --mc 1000") == 0);
}
