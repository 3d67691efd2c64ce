#ifndef EVPLANE_PLANE_ENVELOPE_HPP
#define EVPLANE_PLANE_ENVELOPE_HPP

#include <vector>

namespace evplane::plane {

struct EnvelopeRow {
  double alpha = 0.0;
  double beta_star = 0.0;
  double diagonal = 0.0;  // beta = alpha
};

/// NP envelope of the unit-variance Gaussian shift problem on an alpha grid.
std::vector<EnvelopeRow> np_plane_data(double shift, const std::vector<double>& alphas);

/// `count` evenly spaced alphas strictly inside (0, 1).
std::vector<double> alpha_grid(int count);

/// Euclidean distance from (alpha, beta) to the curve beta*(.) for the shift.
double distance_to_envelope(double alpha, double beta, double shift);

/// Equal-prior Bayes operating point: alpha = beta = Phi(-shift / 2).
double bayes_error(double shift);

}  // namespace evplane::plane

#endif  // EVPLANE_PLANE_ENVELOPE_HPP
