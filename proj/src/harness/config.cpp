#include "evplane/harness/config.hpp"

#include "evplane/harness/format.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace evplane::harness {

const char* to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::gaussian: return "gaussian";
    case DatasetKind::binary_image: return "binary_image";
    case DatasetKind::yin_yang: return "yin_yang";
    case DatasetKind::mnist: return "mnist";
  }
  return "unknown";
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::dense: return "dense";
    case ModelKind::spiking: return "spiking";
    case ModelKind::linear: return "linear";
  }
  return "unknown";
}

namespace {

const char* method_name(divergence::NeighborMethod m) {
  switch (m) {
    case divergence::NeighborMethod::automatic: return "auto";
    case divergence::NeighborMethod::brute_force: return "brute_force";
    case divergence::NeighborMethod::kd_tree: return "kd_tree";
  }
  return "auto";
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError("not a number: '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("expected true or false, got '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number<T>(trim(std::string_view(text).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start))));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) out += format_double(values[i]);
    else out += std::to_string(values[i]);
  }
  return out;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T, typename Member>
Field number_field(Member member) {
  return {[member](ExperimentConfig& c, const std::string& v) { member(c) = parse_number<T>(v); },
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
              return format_double(member(c));
            else
              return std::to_string(member(c));
          }};
}

template <typename T, typename Member>
Field list_field(Member member) {
  return {[member](ExperimentConfig& c, const std::string& v) { member(c) = parse_list<T>(v); },
          [member](const ExperimentConfig& c) {
            return join(member(c));
          }};
}

template <typename Member>
Field string_field(Member member) {
  return {[member](ExperimentConfig& c, const std::string& v) { member(c) = v; },
          [member](const ExperimentConfig& c) {
            return std::string(member(c));
          }};
}

template <typename Member>
Field bool_field(Member member) {
  return {[member](ExperimentConfig& c, const std::string& v) { member(c) = parse_bool(v); },
          [member](const ExperimentConfig& c) {
            return std::string(member(c) ? "true" : "false");
          }};
}

// Canonical key order; the manifest lists keys in this order.
const std::vector<std::pair<std::string, Field>>& fields() {
  using C = ExperimentConfig;
  static const std::vector<std::pair<std::string, Field>> table = {
      {"seed",
       {[](C& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(v); },
        [](const C& c) { return c.seed ? std::to_string(*c.seed) : std::string(); }}},
      {"output_dir", string_field([](auto& c) -> auto& { return c.output_dir; })},
      {"dataset.kind",
       {[](C& c, const std::string& v) {
          static const std::map<std::string, DatasetKind> kinds = {
              {"gaussian", DatasetKind::gaussian},
              {"binary_image", DatasetKind::binary_image},
              {"yin_yang", DatasetKind::yin_yang},
              {"mnist", DatasetKind::mnist}};
          const auto it = kinds.find(v);
          if (it == kinds.end()) throw ConfigError("unknown dataset kind '" + v + "'");
          c.dataset.kind = it->second;
        },
        [](const C& c) { return std::string(to_string(c.dataset.kind)); }}},
      {"dataset.test_fraction",
       number_field<double>([](auto& c) -> auto& { return c.dataset.test_fraction; })},
      {"dataset.gaussian.dimension",
       number_field<int>([](auto& c) -> auto& { return c.dataset.gaussian.dimension; })},
      {"dataset.gaussian.mean_shift",
       number_field<double>([](auto& c) -> auto& { return c.dataset.gaussian.mean_shift; })},
      {"dataset.gaussian.samples_per_class",
       number_field<int>([](auto& c) -> auto& { return c.dataset.gaussian.samples_per_class; })},
      {"dataset.binary_image.side",
       number_field<int>([](auto& c) -> auto& { return c.dataset.binary_image.side; })},
      {"dataset.binary_image.flip_prob",
       number_field<double>([](auto& c) -> auto& { return c.dataset.binary_image.flip_prob; })},
      {"dataset.binary_image.samples_per_class",
       number_field<int>([](auto& c) -> auto& { return c.dataset.binary_samples_per_class; })},
      {"dataset.yin_yang.big_radius",
       number_field<double>([](auto& c) -> auto& { return c.dataset.yin_yang.big_radius; })},
      {"dataset.yin_yang.dot_radius",
       number_field<double>([](auto& c) -> auto& { return c.dataset.yin_yang.dot_radius; })},
      {"dataset.yin_yang.samples_per_class",
       number_field<int>([](auto& c) -> auto& { return c.dataset.yin_yang.samples_per_class; })},
      {"dataset.mnist.train_images",
       string_field([](auto& c) -> auto& { return c.dataset.mnist_train_images; })},
      {"dataset.mnist.train_labels",
       string_field([](auto& c) -> auto& { return c.dataset.mnist_train_labels; })},
      {"dataset.mnist.test_images",
       string_field([](auto& c) -> auto& { return c.dataset.mnist_test_images; })},
      {"dataset.mnist.test_labels",
       string_field([](auto& c) -> auto& { return c.dataset.mnist_test_labels; })},
      {"model.kind",
       {[](C& c, const std::string& v) {
          if (v == "dense") c.model.kind = ModelKind::dense;
          else if (v == "spiking") c.model.kind = ModelKind::spiking;
          else if (v == "linear") c.model.kind = ModelKind::linear;
          else throw ConfigError("unknown model kind '" + v + "'");
        },
        [](const C& c) { return std::string(to_string(c.model.kind)); }}},
      {"model.hidden", list_field<int>([](auto& c) -> auto& { return c.model.hidden; })},
      {"training.epochs", number_field<int>([](auto& c) -> auto& { return c.training.epochs; })},
      {"training.batch_size",
       number_field<int>([](auto& c) -> auto& { return c.training.batch_size; })},
      {"training.learning_rate",
       number_field<double>([](auto& c) -> auto& { return c.training.learning_rate; })},
      {"training.beta1", number_field<double>([](auto& c) -> auto& { return c.training.beta1; })},
      {"training.beta2", number_field<double>([](auto& c) -> auto& { return c.training.beta2; })},
      {"training.epsilon",
       number_field<double>([](auto& c) -> auto& { return c.training.epsilon; })},
      {"snn.leak", number_field<double>([](auto& c) -> auto& { return c.snn.leak; })},
      {"snn.threshold", number_field<double>([](auto& c) -> auto& { return c.snn.threshold; })},
      {"snn.time_steps", number_field<int>([](auto& c) -> auto& { return c.snn.time_steps; })},
      {"snn.surrogate_slope",
       number_field<double>([](auto& c) -> auto& { return c.snn.surrogate_slope; })},
      {"estimation.k",
       {[](C& c, const std::string& v) {
          if (v == "auto") c.estimation.knn.k.reset();
          else c.estimation.knn.k = parse_number<int>(v);
        },
        [](const C& c) {
          return c.estimation.knn.k ? std::to_string(*c.estimation.knn.k) : std::string("auto");
        }}},
      {"estimation.candidate_ks",
       list_field<int>(
           [](auto& c) -> auto& { return c.estimation.knn.candidate_ks; })},
      {"estimation.null_splits",
       number_field<int>([](auto& c) -> auto& { return c.estimation.knn.null_splits; })},
      {"estimation.noise_sigma",
       number_field<double>([](auto& c) -> auto& { return c.estimation.knn.noise_sigma; })},
      {"estimation.method",
       {[](C& c, const std::string& v) {
          using M = divergence::NeighborMethod;
          if (v == "auto") c.estimation.knn.method = M::automatic;
          else if (v == "brute_force") c.estimation.knn.method = M::brute_force;
          else if (v == "kd_tree") c.estimation.knn.method = M::kd_tree;
          else throw ConfigError("unknown neighbour method '" + v + "'");
        },
        [](const C& c) { return std::string(method_name(c.estimation.knn.method)); }}},
      {"estimation.max_per_class",
       number_field<int>([](auto& c) -> auto& { return c.estimation.max_per_class; })},
      {"estimation.estimate_dinp",
       bool_field([](auto& c) -> auto& { return c.estimation.estimate_dinp; })},
      {"estimation.dinp_max_per_class",
       number_field<int>([](auto& c) -> auto& { return c.estimation.dinp_max_per_class; })},
      {"analysis.vote_n", list_field<int>([](auto& c) -> auto& { return c.analysis.vote_n; })},
      {"analysis.vote_groups",
       number_field<int>([](auto& c) -> auto& { return c.analysis.vote_groups; })},
      {"analysis.noise_sigmas",
       list_field<double>([](auto& c) -> auto& { return c.analysis.noise_sigmas; })},
      {"analysis.alpha_grid", number_field<int>([](auto& c) -> auto& { return c.analysis.alpha_grid; })},
      {"analysis.region_tol_bits",
       number_field<double>([](auto& c) -> auto& { return c.analysis.region_tol_bits; })},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!seed) throw ConfigError("seed is required");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  training.validate();
  snn::SNNConfig neuron = snn;
  neuron.training = training;
  neuron.validate();
  estimation.knn.validate();
  if (estimation.max_per_class < 0 || estimation.dinp_max_per_class < 0)
    throw ConfigError("per-class caps must be non-negative");
  if (!(dataset.test_fraction > 0.0 && dataset.test_fraction < 1.0))
    throw ConfigError("dataset.test_fraction must lie in (0, 1)");
  switch (dataset.kind) {
    case DatasetKind::gaussian: dataset.gaussian.validate(); break;
    case DatasetKind::binary_image:
      dataset.binary_image.validate();
      if (dataset.binary_samples_per_class < 2)
        throw ConfigError("dataset.binary_image.samples_per_class must be at least 2");
      break;
    case DatasetKind::yin_yang: dataset.yin_yang.validate(); break;
    case DatasetKind::mnist:
      if (dataset.mnist_train_images.empty() || dataset.mnist_train_labels.empty() ||
          dataset.mnist_test_images.empty() || dataset.mnist_test_labels.empty())
        throw ConfigError("mnist needs train and test image and label paths");
      break;
  }
  if (model.kind == ModelKind::spiking && dataset.kind == DatasetKind::gaussian)
    throw ConfigError("spiking models need features in [0, 1]; gaussian features are not");
  if (model.kind != ModelKind::linear)
    for (int h : model.hidden)
      if (h < 1) throw ConfigError("model.hidden widths must be positive");
  if (analysis.vote_groups < 1) throw ConfigError("analysis.vote_groups must be positive");
  for (int n : analysis.vote_n)
    if (n < 1) throw ConfigError("analysis.vote_n entries must be positive");
  for (double s : analysis.noise_sigmas)
    if (!(s >= 0.0)) throw ConfigError("analysis.noise_sigmas entries must be non-negative");
  if (analysis.alpha_grid < 1) throw ConfigError("analysis.alpha_grid must be positive");
  if (!(analysis.region_tol_bits >= 0.0))
    throw ConfigError("analysis.region_tol_bits must be non-negative");
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  static const std::map<std::string, const Field*> index = [] {
    std::map<std::string, const Field*> m;
    for (const auto& [key, field] : fields()) m.emplace(key, &field);
    return m;
  }();
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->second->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, path);
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, field] : fields()) out.emplace_back(key, field.get(cfg));
  return out;
}

}  // namespace evplane::harness
