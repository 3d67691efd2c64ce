#include "evplane/divergence/class_conditional.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace evplane::divergence {
namespace {

constexpr std::uint64_t kSelectionStream = 1;
constexpr std::uint64_t kNoiseStream = 100;

MatrixXd stack_rows(const std::vector<const MatrixXd*>& parts) {
  Eigen::Index rows = 0;
  for (const auto* p : parts) rows += p->rows();
  MatrixXd out(rows, parts.empty() ? 0 : parts.front()->cols());
  Eigen::Index at = 0;
  for (const auto* p : parts) {
    out.middleRows(at, p->rows()) = *p;
    at += p->rows();
  }
  return out;
}

}  // namespace

void KnnEstimatorConfig::validate() const {
  if (k && *k < 1) throw ConfigError("k must be at least 1");
  if (!k && candidate_ks.empty()) throw ConfigError("automatic k needs candidate values");
  for (int c : candidate_ks)
    if (c < 1) throw ConfigError("candidate k values must be positive");
  if (null_splits < 1) throw ConfigError("null_splits must be positive");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw ConfigError("noise sigma must be finite and non-negative");
}

NullConsistency null_consistency(const MatrixXd& samples, const KnnEstimatorConfig& cfg) {
  cfg.validate();
  NullConsistency out;
  out.candidates = cfg.candidate_ks;
  std::sort(out.candidates.begin(), out.candidates.end());
  out.candidates.erase(std::unique(out.candidates.begin(), out.candidates.end()),
                       out.candidates.end());
  const Eigen::Index half = samples.rows() / 2;
  if (out.candidates.back() >= half)
    throw ConfigError("candidate k = " + std::to_string(out.candidates.back()) +
                      " needs more than " + std::to_string(2 * half) + " samples");

  out.bias.assign(out.candidates.size(), 0.0);
  const std::uint64_t root = derive_seed(cfg.seed, kSelectionStream);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(samples.rows()));
  for (int s = 0; s < cfg.null_splits; ++s) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(derive_seed(root, static_cast<std::uint64_t>(s)));
    std::shuffle(order.begin(), order.end(), rng);
    const std::vector<Eigen::Index> first(order.begin(), order.begin() + half);
    const std::vector<Eigen::Index> second(order.begin() + half, order.begin() + 2 * half);
    const auto est = knn_kl_multi(data::gather_rows(samples, first),
                                  data::gather_rows(samples, second), out.candidates, cfg.method);
    for (std::size_t i = 0; i < est.size(); ++i) out.bias[i] += est[i];
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < out.bias.size(); ++i) {
    out.bias[i] /= cfg.null_splits;
    if (std::abs(out.bias[i]) < std::abs(out.bias[best])) best = i;
  }
  out.k = out.candidates[best];
  return out;
}

int select_k_null_consistency(const MatrixXd& samples, const KnnEstimatorConfig& cfg) {
  return null_consistency(samples, cfg).k;
}

MatrixXd inject_noise(const MatrixXd& samples, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw DomainError("noise sigma must be non-negative");
  if (sigma == 0.0) return samples;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd out = samples;
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += sigma * normal(rng);
  return out;
}

MatrixXd project_logits(const MatrixXd& logits) {
  if (logits.cols() < 2) throw ShapeError("projection needs at least two logit columns");
  const Eigen::Index k = logits.cols();
  return logits.leftCols(k - 1).colwise() - logits.col(k - 1);
}

void ClassConditionalBundle::validate() const {
  if (groups.size() < 2) throw SampleSizeError("need at least two class groups");
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].rows() == 0) throw SampleSizeError("class " + std::to_string(c) + " is empty");
    if (groups[c].cols() != groups.front().cols())
      throw ShapeError("class groups differ in dimension");
  }
}

ClassConditionalBundle ClassConditionalBundle::from_dataset(const data::LabeledDataset& dataset,
                                                            Eigen::Index max_per_class) {
  ClassConditionalBundle bundle;
  for (int c = 0; c < dataset.class_count; ++c) {
    auto rows = dataset.indices_of(c);
    if (max_per_class > 0 && static_cast<Eigen::Index>(rows.size()) > max_per_class)
      rows.resize(static_cast<std::size_t>(max_per_class));
    bundle.groups.push_back(data::gather_rows(dataset.features, rows));
  }
  return bundle;
}

namespace {

std::vector<MatrixXd> representations(const ClassConditionalBundle& bundle, double sigma,
                                      std::uint64_t seed, const RepresentationMap& map) {
  std::vector<MatrixXd> reps;
  reps.reserve(bundle.groups.size());
  for (std::size_t c = 0; c < bundle.groups.size(); ++c) {
    MatrixXd noisy = inject_noise(bundle.groups[c], sigma, derive_seed(seed, kNoiseStream + c));
    reps.push_back(map ? map(noisy) : std::move(noisy));
  }
  for (const auto& r : reps)
    if (r.cols() != reps.front().cols()) throw ShapeError("representation widths differ");
  return reps;
}

int resolve_k(const std::vector<MatrixXd>& reps, const KnnEstimatorConfig& cfg) {
  if (cfg.k) return *cfg.k;
  std::vector<const MatrixXd*> all;
  for (const auto& r : reps) all.push_back(&r);
  return select_k_null_consistency(stack_rows(all), cfg);
}

ClassConditionalResult estimate_with_k(const std::vector<MatrixXd>& reps, int k,
                                       NeighborMethod method) {
  ClassConditionalResult out;
  out.k_used = k;
  for (std::size_t c = 0; c < reps.size(); ++c)
    if (reps[c].rows() <= k)
      throw SampleSizeError("class " + std::to_string(c) + " has " +
                            std::to_string(reps[c].rows()) + " samples, needs more than k = " +
                            std::to_string(k));
  for (std::size_t c = 0; c < reps.size(); ++c) {
    std::vector<const MatrixXd*> rest;
    for (std::size_t o = 0; o < reps.size(); ++o)
      if (o != c) rest.push_back(&reps[o]);
    out.per_class.push_back(knn_kl(reps[c], stack_rows(rest), k, method));
    out.bits += out.per_class.back().bits;
  }
  out.bits /= static_cast<double>(reps.size());
  return out;
}

}  // namespace

ClassConditionalResult class_conditional_divergence(const ClassConditionalBundle& bundle,
                                                    const KnnEstimatorConfig& cfg,
                                                    const RepresentationMap& map) {
  cfg.validate();
  bundle.validate();
  const auto reps = representations(bundle, cfg.noise_sigma, cfg.seed, map);
  return estimate_with_k(reps, resolve_k(reps, cfg), cfg.method);
}

std::vector<NoisePoint> noise_sweep(const ClassConditionalBundle& bundle,
                                    const std::vector<double>& sigmas,
                                    const KnnEstimatorConfig& cfg,
                                    const RepresentationMap& map) {
  if (sigmas.empty()) throw DomainError("noise sweep needs at least one sigma");
  cfg.validate();
  bundle.validate();
  std::vector<NoisePoint> out;
  std::optional<int> k = cfg.k;
  for (double sigma : sigmas) {
    if (!(sigma >= 0.0)) throw DomainError("noise sigma must be non-negative");
    const auto reps = representations(bundle, sigma, cfg.seed, map);
    if (!k) k = resolve_k(reps, cfg);
    out.push_back({sigma, estimate_with_k(reps, *k, cfg.method).bits, *k});
  }
  return out;
}

}  // namespace evplane::divergence
