#include "evplane/harness/experiment.hpp"

#include "evplane/data/mnist.hpp"
#include "evplane/harness/format.hpp"
#include "evplane/nn/snapshot.hpp"
#include "evplane/nn/train.hpp"
#include "evplane/plane/envelope.hpp"
#include "evplane/plane/voting.hpp"
#include "evplane/snn/snn_train.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <sstream>

namespace evplane::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

SeedPlan SeedPlan::from_master(std::uint64_t master) {
  SeedPlan s;
  s.master = master;
  s.data = derive_seed(master, 1);
  s.split = derive_seed(master, 2);
  s.init = derive_seed(master, 3);
  s.training = derive_seed(master, 4);
  s.evaluation = derive_seed(master, 5);
  s.estimator = derive_seed(master, 6);
  s.input_estimator = derive_seed(master, 7);
  s.votes = derive_seed(master, 8);
  s.noise_sweep = derive_seed(master, 9);
  return s;
}

std::vector<std::pair<std::string, std::uint64_t>> SeedPlan::entries(int class_count) const {
  std::vector<std::pair<std::string, std::uint64_t>> out = {
      {"master", master},
      {"data", data},
      {"split", split},
      {"init", init},
      {"training", training},
      {"training.spike_encoding", derive_seed(training, 0x5350494b)},
      {"evaluation", evaluation},
      {"estimator", estimator},
      {"estimator.null_splits", derive_seed(estimator, 1)},
      {"input_estimator", input_estimator},
      {"input_estimator.null_splits", derive_seed(input_estimator, 1)},
      {"votes", votes},
      {"noise_sweep", noise_sweep},
      {"noise_sweep.null_splits", derive_seed(noise_sweep, 1)},
  };
  for (int c = 0; c < class_count; ++c) {
    const auto stream = static_cast<std::uint64_t>(100 + c);
    const std::string tag = ".noise_class_" + std::to_string(c);
    out.emplace_back("estimator" + tag, derive_seed(estimator, stream));
    out.emplace_back("input_estimator" + tag, derive_seed(input_estimator, stream));
    out.emplace_back("noise_sweep" + tag, derive_seed(noise_sweep, stream));
  }
  return out;
}

std::vector<std::string> trajectory_columns(int class_count) {
  std::vector<std::string> cols = {"epoch",        "train_acc",    "test_acc",
                                   "d_theta_bits", "p_theta_bits", "k_used"};
  for (const char* prefix : {"alpha_", "beta_", "d_class_"})
    for (int c = 0; c < class_count; ++c) cols.push_back(prefix + std::to_string(c));
  cols.push_back("wall_ms");
  return cols;
}

std::string trajectory_csv_row(const TrajectoryRecord& r) {
  std::string row = std::to_string(r.epoch) + ',' + format_double(r.train_acc) + ',' +
                    format_double(r.test_acc) + ',' + format_double(r.d_theta_bits) + ',' +
                    format_double(r.p_theta_bits) + ',' + std::to_string(r.k_used);
  for (const auto* v : {&r.alpha, &r.beta, &r.d_class})
    for (double x : *v) row += ',' + format_double(x);
  row += ',' + format_double(r.wall_ms);
  return row;
}

namespace {

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw IngestionError("bad number '" + s + "' in trajectory");
  return v;
}

}  // namespace

std::vector<TrajectoryRecord> read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("missing trajectory " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  // a line without its newline is an interrupted write
  if (const auto last = text.rfind('\n'); last == std::string::npos) text.clear();
  else text.resize(last + 1);
  std::istringstream lines(text);
  std::string line;
  if (!std::getline(lines, line)) throw IngestionError("empty trajectory " + path.string());
  const auto header = split_on(line, ',');
  if (header.size() < 7 || (header.size() - 7) % 3 != 0)
    throw IngestionError("unexpected trajectory header in " + path.string());
  const int k = static_cast<int>((header.size() - 7) / 3);
  if (header != trajectory_columns(k))
    throw IngestionError("unexpected trajectory header in " + path.string());
  std::vector<TrajectoryRecord> out;
  while (std::getline(lines, line)) {
    const auto cells = split_on(line, ',');
    if (cells.size() != header.size())
      throw IngestionError("ragged trajectory row in " + path.string());
    TrajectoryRecord r;
    r.epoch = static_cast<int>(to_double(cells[0]));
    r.train_acc = to_double(cells[1]);
    r.test_acc = to_double(cells[2]);
    r.d_theta_bits = to_double(cells[3]);
    r.p_theta_bits = to_double(cells[4]);
    r.k_used = static_cast<int>(to_double(cells[5]));
    for (int c = 0; c < k; ++c) {
      r.alpha.push_back(to_double(cells[static_cast<std::size_t>(6 + c)]));
      r.beta.push_back(to_double(cells[static_cast<std::size_t>(6 + k + c)]));
      r.d_class.push_back(to_double(cells[static_cast<std::size_t>(6 + 2 * k + c)]));
    }
    r.wall_ms = to_double(cells.back());
    out.push_back(std::move(r));
  }
  return out;
}

ExperimentConfig load_config(const std::string& path, const RunOverrides& overrides) {
  ExperimentConfig cfg = load_config(path);
  if (overrides.seed) cfg.seed = overrides.seed;
  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
  cfg.validate();
  return cfg;
}

namespace {

struct LoadedData {
  data::TrainTestSplit split;
  std::optional<double> analytic_bits;
  std::string id;
};

LoadedData load_data(const ExperimentConfig& cfg, const SeedPlan& seeds) {
  const auto& d = cfg.dataset;
  auto with_split = [&](data::LabeledDataset all, std::string id) {
    LoadedData out;
    out.analytic_bits = all.analytic_divergence;
    out.split = data::split_train_test(all, d.test_fraction, seeds.split);
    out.id = std::move(id);
    return out;
  };
  switch (d.kind) {
    case DatasetKind::gaussian:
      return with_split(data::gen_gaussian_pair(d.gaussian, seeds.data),
                        "gaussian_d" + std::to_string(d.gaussian.dimension) + "_shift" +
                            format_double(d.gaussian.mean_shift));
    case DatasetKind::binary_image:
      return with_split(
          data::gen_binary_image(d.binary_image, d.binary_samples_per_class, seeds.data),
          "binary_image_d" + std::to_string(d.binary_image.side) + "_p" +
              format_double(d.binary_image.flip_prob));
    case DatasetKind::yin_yang:
      return with_split(data::gen_yin_yang(d.yin_yang, seeds.data), "yin_yang");
    case DatasetKind::mnist: {
      LoadedData out;
      out.split.train = data::load_mnist(d.mnist_train_images, d.mnist_train_labels);
      out.split.test = data::load_mnist(d.mnist_test_images, d.mnist_test_labels);
      out.id = "mnist";
      return out;
    }
  }
  throw ConfigError("unknown dataset kind");
}

std::vector<int> layer_dims(const ExperimentConfig& cfg, int input_dim, int class_count) {
  std::vector<int> dims{input_dim};
  if (cfg.model.kind != ModelKind::linear)
    dims.insert(dims.end(), cfg.model.hidden.begin(), cfg.model.hidden.end());
  dims.push_back(class_count);
  return dims;
}

std::string model_id(ModelKind kind, const std::vector<int>& dims) {
  std::string id = to_string(kind);
  for (std::size_t i = 1; i + 1 < dims.size(); ++i)
    id += (i == 1 ? "_" : "-") + std::to_string(dims[i]);
  return id;
}

json optional_number(std::optional<double> v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IngestionError("cannot write " + path.string());
}

json record_json(const TrajectoryRecord& r) {
  return json{{"epoch", r.epoch},         {"train_acc", r.train_acc},
              {"test_acc", r.test_acc},   {"d_theta_bits", r.d_theta_bits},
              {"p_theta_bits", r.p_theta_bits}, {"k_used", r.k_used},
              {"alpha", r.alpha},         {"beta", r.beta},
              {"d_class", r.d_class},     {"wall_ms", r.wall_ms}};
}

// Logits of either network family, with the SNN evaluated on a fresh spike
// encoding per call.
class Evaluator {
 public:
  Evaluator(ModelKind kind, const snn::SNNConfig& snn_cfg, std::uint64_t seed)
      : kind_(kind), snn_(snn_cfg), seed_(seed) {}

  MatrixXd logits(const nn::DenseNetworkd& net, const MatrixXd& x) const {
    if (kind_ != ModelKind::spiking) return nn::logits(net, x);
    return snn::snn_logits(net, x.cwiseMax(0.0).cwiseMin(1.0), snn_, derive_seed(seed_, calls_++));
  }

  void reset() const { calls_ = 0; }

 private:
  ModelKind kind_;
  snn::SNNConfig snn_;
  std::uint64_t seed_;
  mutable std::uint64_t calls_ = 0;
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };

  RunResult result;
  result.dir = cfg.output_dir;
  fs::create_directories(result.dir);
  fs::remove(result.dir / "FAILED");
  const SeedPlan seeds = SeedPlan::from_master(*cfg.seed);

  json manifest;
  json config_json = json::object();
  for (const auto& [key, value] : config_entries(cfg)) config_json[key] = value;
  manifest["status"] = "running";
  manifest["config"] = config_json;
  manifest["evaluation_split"] = "test";
  auto write_manifest = [&] { write_text(result.dir / "manifest.json", manifest.dump(2) + "\n"); };
  write_manifest();

  std::ofstream csv;
  auto write_json_trajectory = [&] {
    json rows = json::array();
    for (const auto& r : result.trajectory) rows.push_back(record_json(r));
    write_text(result.dir / "trajectory.json", rows.dump(2) + "\n");
  };

  try {
    LoadedData loaded = load_data(cfg, seeds);
    const auto& train = loaded.split.train;
    const auto& test = loaded.split.test;
    train.validate();
    test.validate();
    const int k_classes = std::max(train.class_count, test.class_count);
    result.class_count = k_classes;
    result.dataset_id = loaded.id;
    result.dinp_analytic_bits = loaded.analytic_bits;

    const auto dims = layer_dims(cfg, static_cast<int>(train.dim()), k_classes);
    result.model_id = model_id(cfg.model.kind, dims);

    json seed_json = json::object();
    for (const auto& [name, value] : seeds.entries(k_classes)) seed_json[name] = value;
    manifest["seeds"] = seed_json;
    manifest["dataset"] = {{"id", result.dataset_id},
                           {"kind", to_string(cfg.dataset.kind)},
                           {"class_count", k_classes},
                           {"dimension", train.dim()},
                           {"train_size", train.size()},
                           {"test_size", test.size()}};
    if (cfg.dataset.kind == DatasetKind::gaussian)
      manifest["dataset"]["mean_shift"] = cfg.dataset.gaussian.mean_shift;
    manifest["model"] = {{"id", result.model_id},
                         {"kind", to_string(cfg.model.kind)},
                         {"layer_dims", dims}};

    // input divergence: analytic when known, kNN estimate when enabled, both logged
    if (cfg.estimation.estimate_dinp) {
      auto knn = cfg.estimation.knn;
      knn.seed = seeds.input_estimator;
      const auto est = divergence::class_conditional_divergence(
          divergence::ClassConditionalBundle::from_dataset(test, cfg.estimation.dinp_max_per_class),
          knn);
      result.dinp_estimate_bits = est.bits;
      manifest["d_inp"]["estimate_k"] = est.k_used;
    }
    if (result.dinp_analytic_bits) {
      result.dinp_bits = *result.dinp_analytic_bits;
      manifest["d_inp"]["source"] = "analytic";
    } else if (result.dinp_estimate_bits) {
      result.dinp_bits = *result.dinp_estimate_bits;
      manifest["d_inp"]["source"] = "estimate";
    } else {
      result.dinp_bits = std::numeric_limits<double>::infinity();
      manifest["d_inp"]["source"] = "none";
    }
    manifest["d_inp"]["analytic_bits"] = optional_number(result.dinp_analytic_bits);
    manifest["d_inp"]["estimate_bits"] = optional_number(result.dinp_estimate_bits);
    manifest["d_inp"]["used_bits"] = optional_number(result.dinp_bits);
    write_manifest();

    csv.open(result.dir / "trajectory.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw IngestionError("cannot write trajectory.csv");
    {
      const auto cols = trajectory_columns(k_classes);
      for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
      csv << '\n' << std::flush;
    }

    snn::SNNConfig snn_cfg = cfg.snn;
    snn_cfg.training = cfg.training;
    snn_cfg.training.seed = seeds.training;
    nn::TrainingConfig dense_cfg = cfg.training;
    dense_cfg.seed = seeds.training;

    const Evaluator eval(cfg.model.kind, snn_cfg, seeds.evaluation);
    auto est_cfg = cfg.estimation.knn;
    est_cfg.seed = seeds.estimator;
    const auto bundle =
        divergence::ClassConditionalBundle::from_dataset(test, cfg.estimation.max_per_class);

    auto record_epoch = [&](int epoch, const nn::DenseNetworkd& net) {
      eval.reset();
      TrajectoryRecord r;
      r.epoch = epoch;
      r.train_acc = nn::accuracy(nn::argmax_rows(eval.logits(net, train.features)), train.labels);
      const Labels test_pred = nn::argmax_rows(eval.logits(net, test.features));
      r.test_acc = nn::accuracy(test_pred, test.labels);
      const auto rates = plane::per_class_error_rates(test_pred, test.labels, k_classes);
      const auto div = divergence::class_conditional_divergence(
          bundle, est_cfg,
          [&](const MatrixXd& x) { return divergence::project_logits(eval.logits(net, x)); });
      r.d_theta_bits = div.bits;
      r.p_theta_bits = plane::p_theta(rates);
      r.k_used = div.k_used;
      r.alpha = rates.alpha;
      r.beta = rates.beta;
      for (const auto& e : div.per_class) r.d_class.push_back(e.bits);
      r.wall_ms = elapsed_ms();
      csv << trajectory_csv_row(r) << '\n' << std::flush;
      if (!csv) throw IngestionError("cannot append to trajectory.csv");
      result.trajectory.push_back(std::move(r));
    };

    nn::DenseNetworkd net = nn::init_network<double>(dims, seeds.init);
    record_epoch(0, net);
    auto hook = [&](const nn::EpochSummary& s, const nn::DenseNetworkd& current) {
      record_epoch(s.epoch, current);
    };
    if (cfg.model.kind == ModelKind::spiking) {
      net = snn::snn_train(std::move(net), train, snn_cfg, hook);
      snn::save_snapshot(snn::SpikingNetwork{net, snn_cfg}, (result.dir / "model.slsn").string());
    } else {
      net = nn::train(std::move(net), train, dense_cfg, hook);
      nn::save_snapshot(net, (result.dir / "model.slnn").string());
    }
    write_json_trajectory();

    // majority-vote curve of the final model on test-set bootstrap groups
    if (!cfg.analysis.vote_n.empty()) {
      eval.reset();
      const plane::Classifier classify = [&](const MatrixXd& x) {
        return nn::argmax_rows(eval.logits(net, x));
      };
      const auto curve = plane::majority_vote_error_curve(classify, test, cfg.analysis.vote_n,
                                                          cfg.analysis.vote_groups, seeds.votes);
      std::string tsv = "n\tgroups_per_class\terror\tp_theta_bits";
      for (const char* prefix : {"alpha_", "beta_"})
        for (int c = 0; c < k_classes; ++c) tsv += '\t' + (prefix + std::to_string(c));
      tsv += '\n';
      for (const auto& point : curve) {
        tsv += std::to_string(point.n) + '\t' + std::to_string(cfg.analysis.vote_groups) + '\t' +
               format_double(1.0 - point.rates.accuracy) + '\t' +
               format_double(plane::p_theta(point.rates));
        for (const auto* v : {&point.rates.alpha, &point.rates.beta})
          for (double x : *v) tsv += '\t' + format_double(x);
        tsv += '\n';
      }
      write_text(result.dir / "votes.tsv", tsv);
    }

    // noise sweep on the inputs and on the final representation
    if (!cfg.analysis.noise_sigmas.empty()) {
      auto sweep_cfg = cfg.estimation.knn;
      sweep_cfg.seed = seeds.noise_sweep;
      eval.reset();
      const auto inputs = divergence::noise_sweep(
          divergence::ClassConditionalBundle::from_dataset(test, cfg.estimation.dinp_max_per_class),
          cfg.analysis.noise_sigmas, sweep_cfg);
      const auto reps = divergence::noise_sweep(
          bundle, cfg.analysis.noise_sigmas, sweep_cfg,
          [&](const MatrixXd& x) { return divergence::project_logits(eval.logits(net, x)); });
      std::string tsv = "sigma\td_input_bits\tk_input\td_theta_bits\tk_theta\n";
      for (std::size_t i = 0; i < inputs.size(); ++i)
        tsv += format_double(inputs[i].sigma) + '\t' + format_double(inputs[i].bits) + '\t' +
               std::to_string(inputs[i].k_used) + '\t' + format_double(reps[i].bits) + '\t' +
               std::to_string(reps[i].k_used) + '\n';
      write_text(result.dir / "noise.tsv", tsv);
    }

    manifest["status"] = "completed";
    manifest["epochs_logged"] = result.trajectory.size();
    write_manifest();
    emit_plots(result.dir);
  } catch (const std::exception& e) {
    csv.close();
    write_text(result.dir / "FAILED", std::string(e.what()) + "\n");
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    manifest["epochs_logged"] = result.trajectory.size();
    try {
      write_manifest();
      write_json_trajectory();
    } catch (const std::exception&) {
      // the marker is the record of last resort
    }
    throw;
  }
  return result;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace

std::vector<SuiteRow> run_suite(const fs::path& dir, const RunOverrides& overrides) {
  if (!fs::is_directory(dir)) throw IngestionError("not a directory: " + dir.string());
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg")
      configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) throw ConfigError("no .cfg files in " + dir.string());

  const fs::path base = overrides.output_dir ? fs::path(*overrides.output_dir) : dir / "results";
  fs::create_directories(base);
  std::vector<SuiteRow> rows;
  for (const auto& path : configs) {
    SuiteRow row;
    row.run = path.stem().string();
    try {
      RunOverrides run_overrides{overrides.seed, (base / row.run).string()};
      const auto cfg = load_config(path.string(), run_overrides);
      row.model = to_string(cfg.model.kind);
      row.dataset = to_string(cfg.dataset.kind);
      const auto result = run_experiment(cfg);
      if (!result.trajectory.empty()) {
        row.d_theta_bits = result.trajectory.back().d_theta_bits;
        row.p_theta_bits = result.trajectory.back().p_theta_bits;
      }
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  }

  std::string csv = "run,model,dataset,d_theta,p_theta,status\n";
  for (const auto& r : rows)
    csv += csv_cell(r.run) + ',' + r.model + ',' + r.dataset + ',' +
           (r.d_theta_bits ? format_double(*r.d_theta_bits) : "") + ',' +
           (r.p_theta_bits ? format_double(*r.p_theta_bits) : "") + ',' + csv_cell(r.status) + '\n';
  write_text(base / "summary.csv", csv);
  return rows;
}

void emit_plots(const fs::path& run_dir) {
  const auto trajectory = read_trajectory_csv(run_dir / "trajectory.csv");
  std::ifstream manifest_in(run_dir / "manifest.json");
  if (!manifest_in) throw IngestionError("missing manifest in " + run_dir.string());
  json manifest;
  try {
    manifest = json::parse(manifest_in);
  } catch (const json::exception& e) {
    throw IngestionError("unreadable manifest: " + std::string(e.what()));
  }
  const auto& used = manifest["d_inp"]["used_bits"];
  const double d_inp = used.is_number() ? used.get<double>() : std::numeric_limits<double>::infinity();
  const auto& config = manifest["config"];
  const double tol = to_double(config["analysis.region_tol_bits"].get<std::string>());

  // evidence-error plane: trajectory, the P = D line and the D_inp ceiling
  std::string plane_tsv = "series\tepoch\td_bits\tp_bits\n";
  double d_max = std::isfinite(d_inp) ? d_inp : 0.0;
  for (const auto& r : trajectory) {
    plane_tsv += "trajectory\t" + std::to_string(r.epoch) + '\t' + format_double(r.d_theta_bits) +
                 '\t' + format_double(r.p_theta_bits) + '\n';
    if (std::isfinite(r.d_theta_bits)) d_max = std::max(d_max, r.d_theta_bits);
  }
  constexpr int kLineSamples = 51;
  for (int i = 0; i < kLineSamples; ++i) {
    const double v = d_max * i / (kLineSamples - 1);
    plane_tsv += "stein_line\t-1\t" + format_double(v) + '\t' + format_double(v) + '\n';
  }
  if (std::isfinite(d_inp))
    for (int i = 0; i < kLineSamples; ++i)
      plane_tsv += "dpi_line\t-1\t" + format_double(d_inp) + '\t' +
                   format_double(d_inp * i / (kLineSamples - 1)) + '\n';
  write_text(run_dir / "plane.tsv", plane_tsv);

  std::string region_tsv = "epoch\td_theta_bits\tp_theta_bits\td_inp_bits\ttol_bits\tstatus\n";
  for (const auto& r : trajectory) {
    const plane::EvidenceErrorPoint point{r.p_theta_bits, r.d_theta_bits, r.epoch, {}, {}};
    region_tsv += std::to_string(r.epoch) + '\t' + format_double(r.d_theta_bits) + '\t' +
                  format_double(r.p_theta_bits) + '\t' + format_double(d_inp) + '\t' +
                  format_double(tol) + '\t' +
                  plane::to_string(plane::region_check(point, {d_inp}, tol)) + '\n';
  }
  write_text(run_dir / "region.tsv", region_tsv);

  if (manifest["dataset"]["kind"] == "gaussian") {
    const double shift = manifest["dataset"]["mean_shift"].get<double>();
    const int grid = static_cast<int>(to_double(config["analysis.alpha_grid"].get<std::string>()));
    std::string env_tsv = "alpha\tbeta_star\tdiagonal\n";
    for (const auto& row : plane::np_plane_data(shift, plane::alpha_grid(grid)))
      env_tsv += format_double(row.alpha) + '\t' + format_double(row.beta_star) + '\t' +
                 format_double(row.diagonal) + '\n';
    write_text(run_dir / "envelope.tsv", env_tsv);
  }
}

}  // namespace evplane::harness
