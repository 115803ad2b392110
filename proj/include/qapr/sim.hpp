#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qapr/circuit.hpp"

namespace qapr {

struct Statevector {
  int num_qubits = 0;
  std::vector<std::complex<double>> amplitudes;  // length 2^num_qubits

  bool operator==(const Statevector&) const = default;
};

/// Sampled measurement outcomes. Keys are classical bitstrings, most
/// significant classical bit (highest declaration-order index) first.
struct CountsDistribution {
  int shots = 0;
  std::map<std::string, int> counts;

  bool operator==(const CountsDistribution&) const = default;
};

/// Applies every gate in order to the all-zeros state and returns the final
/// statevector. Qubit k is the k-th least significant bit of the amplitude
/// index. Circuits must be in terminal-measurement form: a gate after a
/// measure raises SimError(unsupported_midcircuit_measure). Barriers are
/// ignored.
Statevector evolve(const Circuit& circuit);

/// Draws `shots` independent outcomes of the measured qubits from the final
/// state. Unmeasured classical bits read 0. Identical (circuit, shots, seed)
/// yield identical counts on every platform; the pinned generator is
/// xoshiro256** seeded via SplitMix64 (see qapr/rng.hpp).
CountsDistribution sample(const Circuit& circuit, int shots, std::uint64_t seed);

std::map<std::string, double> to_probabilities(const CountsDistribution& counts);

/// Total variation distance: 0.5 * sum over the union of keys of |p - q|.
double tvd(const std::map<std::string, double>& p,
           const std::map<std::string, double>& q);

/// Smallest max-norm distance between `actual` and `expected` over global
/// phase rotations of `expected`. Returns +infinity on dimension mismatch.
double phase_aligned_distance(const Statevector& actual,
                              const Statevector& expected);

}  // namespace qapr
