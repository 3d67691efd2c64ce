#ifndef EVPLANE_PLANE_VOTING_HPP
#define EVPLANE_PLANE_VOTING_HPP

#include "evplane/data/dataset.hpp"
#include "evplane/plane/error_rates.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace evplane::plane {

/// Per-row class predictions of some model.
using Classifier = std::function<Labels(const MatrixXd&)>;

/// Plurality of per-sample predictions; ties go to the smallest class index.
int majority_vote(const Labels& votes, int class_count);
int majority_vote_classify(const Classifier& model, const MatrixXd& samples, int class_count);

struct VoteCurvePoint {
  int n = 0;
  ErrorRates rates;
};

/// For every n: groups_per_class bootstrap groups of n same-class rows per
/// class, one vote per group, error rates over the group decisions.
std::vector<VoteCurvePoint> majority_vote_error_curve(const Classifier& model,
                                                      const data::LabeledDataset& dataset,
                                                      const std::vector<int>& n_values,
                                                      int groups_per_class, std::uint64_t seed);

/// Error of a three-sample binary majority vote over i.i.d. errors of rate p.
double binary_majority_analytic(double p);

}  // namespace evplane::plane

#endif  // EVPLANE_PLANE_VOTING_HPP
