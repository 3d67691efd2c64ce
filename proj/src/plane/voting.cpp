#include "evplane/plane/voting.hpp"

#include <algorithm>
#include <random>

namespace evplane::plane {

int majority_vote(const Labels& votes, int class_count) {
  if (votes.empty()) throw EvaluationError("cannot vote on an empty group");
  std::vector<int> tally(static_cast<std::size_t>(class_count), 0);
  for (int v : votes) {
    if (v < 0 || v >= class_count) throw EvaluationError("vote outside the class range");
    ++tally[static_cast<std::size_t>(v)];
  }
  return static_cast<int>(std::max_element(tally.begin(), tally.end()) - tally.begin());
}

int majority_vote_classify(const Classifier& model, const MatrixXd& samples, int class_count) {
  if (samples.rows() == 0) throw EvaluationError("cannot vote on an empty group");
  const Labels votes = model(samples);
  if (static_cast<Eigen::Index>(votes.size()) != samples.rows())
    throw EvaluationError("classifier returned the wrong number of predictions");
  return majority_vote(votes, class_count);
}

std::vector<VoteCurvePoint> majority_vote_error_curve(const Classifier& model,
                                                      const data::LabeledDataset& dataset,
                                                      const std::vector<int>& n_values,
                                                      int groups_per_class, std::uint64_t seed) {
  if (groups_per_class < 1) throw EvaluationError("groups_per_class must be positive");
  std::vector<std::vector<Eigen::Index>> by_class;
  for (int c = 0; c < dataset.class_count; ++c) {
    by_class.push_back(dataset.indices_of(c));
    if (by_class.back().empty())
      throw EvaluationError("class " + std::to_string(c) + " has no samples to resample");
  }
  std::vector<VoteCurvePoint> out;
  for (int n : n_values) {
    if (n < 1) throw EvaluationError("vote size must be at least 1");
    Labels decisions, truth;
    for (int c = 0; c < dataset.class_count; ++c) {
      const auto& pool = by_class[static_cast<std::size_t>(c)];
      std::mt19937_64 rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(n)),
                                      static_cast<std::uint64_t>(c)));
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      std::vector<Eigen::Index> rows(static_cast<std::size_t>(n) * groups_per_class);
      for (auto& r : rows) r = pool[pick(rng)];
      const Labels votes = model(data::gather_rows(dataset.features, rows));
      if (votes.size() != rows.size())
        throw EvaluationError("classifier returned the wrong number of predictions");
      for (int g = 0; g < groups_per_class; ++g) {
        const auto first = votes.begin() + static_cast<std::ptrdiff_t>(g) * n;
        decisions.push_back(majority_vote(Labels(first, first + n), dataset.class_count));
        truth.push_back(c);
      }
    }
    out.push_back({n, per_class_error_rates(decisions, truth, dataset.class_count)});
  }
  return out;
}

double binary_majority_analytic(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("error probability must lie in [0, 1]");
  return 3.0 * p * p - 2.0 * p * p * p;
}

}  // namespace evplane::plane
