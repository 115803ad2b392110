#include "qapr/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "qapr/rng.hpp"

namespace qapr {

namespace {

using cd = std::complex<double>;

// Applies a 2^k x 2^k unitary to the state on the given global qubits.
// Local basis bit j of the matrix corresponds to qubits[j]. Works by
// enumerating basis groups directly; no 2^n matrix is ever built.
void apply_gate(std::vector<cd>& amps, const GateMatrix& u,
                const std::vector<int>& qubits) {
  const int k = static_cast<int>(qubits.size());
  const int dim = 1 << k;
  std::vector<int> ascending = qubits;
  std::sort(ascending.begin(), ascending.end());

  const std::uint64_t n_groups = amps.size() >> k;
  std::array<cd, 8> in{}, out{};
  std::array<std::uint64_t, 8> idx{};
  for (std::uint64_t g = 0; g < n_groups; ++g) {
    // Deposit g's bits into the positions outside the gate's qubits.
    std::uint64_t base = g;
    for (const int q : ascending) {
      const std::uint64_t low = base & ((std::uint64_t{1} << q) - 1);
      base = ((base >> q) << (q + 1)) | low;
    }
    for (int t = 0; t < dim; ++t) {
      std::uint64_t x = base;
      for (int b = 0; b < k; ++b) {
        if (t >> b & 1) x |= std::uint64_t{1} << qubits[b];
      }
      idx[t] = x;
      in[t] = amps[x];
    }
    for (int r = 0; r < dim; ++r) {
      cd acc = 0;
      const cd* row = u.data() + static_cast<std::size_t>(r) * dim;
      for (int s = 0; s < dim; ++s) acc += row[s] * in[s];
      out[r] = acc;
    }
    for (int t = 0; t < dim; ++t) amps[idx[t]] = out[t];
  }
}

double squared_norm(const std::vector<cd>& amps) {
  double total = 0;
  for (const cd& a : amps) total += std::norm(a);
  return total;
}

}  // namespace

Statevector evolve(const Circuit& circuit) {
  int bad_line = 0;
  if (auto violation = find_invariant_violation(circuit, &bad_line)) {
    throw SimError(SimError::Kind::invalid_circuit, *violation,
                   bad_line > 0 ? std::optional<int>(bad_line) : std::nullopt);
  }
  const int n = circuit.num_qubits();
  std::vector<cd> amps(std::uint64_t{1} << n);
  amps[0] = 1;

  bool measured = false;
  for (const Instruction& instr : circuit.instructions) {
    switch (instr.kind) {
      case InstrKind::barrier:
        break;
      case InstrKind::measure:
        measured = true;
        break;
      case InstrKind::gate: {
        if (measured) {
          throw SimError(SimError::Kind::unsupported_midcircuit_measure,
                         "gate '" + instr.gate_name +
                             "' applied after a measurement",
                         instr.line_number);
        }
        const GateCatalogEntry* entry = find_gate(instr.gate_name);
        const GateMatrix u = entry->unitary(instr.params);
        std::vector<int> targets;
        targets.reserve(instr.qubits.size());
        for (const BitRef& q : instr.qubits) {
          targets.push_back(circuit.global_qubit(q));
        }
        apply_gate(amps, u, targets);
        if (!std::isfinite(squared_norm(amps))) {
          throw SimError(SimError::Kind::numerical_overflow,
                         "state norm is not finite after gate '" +
                             instr.gate_name + "'",
                         instr.line_number);
        }
        break;
      }
    }
  }
  return Statevector{n, std::move(amps)};
}

CountsDistribution sample(const Circuit& circuit, int shots, std::uint64_t seed) {
  if (shots <= 0) {
    throw SimError(SimError::Kind::invalid_circuit, "shots must be positive");
  }
  const Statevector state = evolve(circuit);

  std::vector<std::pair<int, int>> readout;  // (global qubit, global clbit)
  for (const Instruction& instr : circuit.instructions) {
    if (instr.kind != InstrKind::measure) continue;
    readout.emplace_back(circuit.global_qubit(instr.qubits[0]),
                         circuit.global_clbit(instr.clbits[0]));
  }
  if (readout.empty()) {
    throw SimError(SimError::Kind::invalid_circuit,
                   "sampling requires at least one measure instruction");
  }

  std::vector<double> cumulative(state.amplitudes.size());
  double total = 0;
  for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
    total += std::norm(state.amplitudes[i]);
    cumulative[i] = total;
  }

  const int n_clbits = circuit.num_clbits();
  Xoshiro256StarStar rng(seed);
  std::map<std::string, int> counts;
  for (int shot = 0; shot < shots; ++shot) {
    const double u = rng.next_double() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t index = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
    std::string key(static_cast<std::size_t>(n_clbits), '0');
    for (const auto& [qubit, clbit] : readout) {
      key[static_cast<std::size_t>(n_clbits - 1 - clbit)] =
          (index >> qubit & 1) ? '1' : '0';
    }
    ++counts[key];
  }
  return CountsDistribution{shots, std::move(counts)};
}

std::map<std::string, double> to_probabilities(const CountsDistribution& counts) {
  std::map<std::string, double> probs;
  if (counts.shots <= 0) return probs;
  for (const auto& [key, count] : counts.counts) {
    probs[key] = static_cast<double>(count) / counts.shots;
  }
  return probs;
}

double tvd(const std::map<std::string, double>& p,
           const std::map<std::string, double>& q) {
  double sum = 0;
  for (const auto& [key, value] : p) {
    const auto it = q.find(key);
    sum += std::abs(value - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [key, value] : q) {
    if (!p.contains(key)) sum += std::abs(value);
  }
  return 0.5 * sum;
}

double phase_aligned_distance(const Statevector& actual,
                              const Statevector& expected) {
  if (actual.amplitudes.size() != expected.amplitudes.size()) {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t anchor = 0;
  double best = 0;
  for (std::size_t i = 0; i < expected.amplitudes.size(); ++i) {
    const double mag = std::norm(expected.amplitudes[i]);
    if (mag > best) {
      best = mag;
      anchor = i;
    }
  }
  cd phase = 1;
  if (best > 0) {
    const cd ratio =
        actual.amplitudes[anchor] * std::conj(expected.amplitudes[anchor]);
    if (std::abs(ratio) > 1e-15) phase = ratio / std::abs(ratio);
  }
  double dist = 0;
  for (std::size_t i = 0; i < actual.amplitudes.size(); ++i) {
    dist = std::max(dist,
                    std::abs(actual.amplitudes[i] - phase * expected.amplitudes[i]));
  }
  return dist;
}

}  // namespace qapr
