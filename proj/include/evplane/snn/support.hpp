#ifndef EVPLANE_SNN_SUPPORT_HPP
#define EVPLANE_SNN_SUPPORT_HPP

#include <cstdint>
#include <vector>

namespace evplane::snn {

/// Upper bound on the number of distinct membrane potentials a single LIF
/// neuron with fixed weight can take over t = 1..tau: (4^(tau+1) - 4) / 3.
std::uint64_t membrane_support_bound(int time_steps);

/// Exhaustive oracle for one neuron driven by one input synapse of weight
/// `weight`: runs every binary input history of length tau through the
/// recurrence and returns the sorted distinct potentials U[t], t = 1..tau.
/// Values closer than 1e-12 (relative) are merged. Limited to tau <= 10.
std::vector<double> enumerate_reachable_potentials(double weight, double threshold, double leak,
                                                   int time_steps);

}  // namespace evplane::snn

#endif  // EVPLANE_SNN_SUPPORT_HPP
