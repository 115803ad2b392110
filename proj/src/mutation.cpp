#include "qapr/mutation.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace qapr {

namespace {

// QGR pools per (qubit_arity, param_arity) class. ch is parsed and simulated
// but intentionally not offered as a replacement; a ch gate draws its
// candidates from the two-qubit pool below.
constexpr std::array<std::string_view, 9> kPool1q0p = {
    "id", "x", "y", "z", "h", "s", "sdg", "t", "tdg"};
constexpr std::array<std::string_view, 4> kPool1q1p = {"rx", "ry", "rz", "p"};
constexpr std::array<std::string_view, 3> kPool2q0p = {"cx", "cz", "swap"};
constexpr std::array<std::string_view, 2> kPool3q0p = {"ccx", "cswap"};

std::string compact_ref(const BitRef& ref) {
  return ref.reg + std::to_string(ref.index);
}

}  // namespace

std::string_view mutation_op_name(MutationOp op) {
  switch (op) {
    case MutationOp::QGD: return "QGD";
    case MutationOp::QGI: return "QGI";
    case MutationOp::QGR: return "QGR";
    case MutationOp::QMD: return "QMD";
    case MutationOp::QMI: return "QMI";
  }
  return "?";
}

std::string_view mutation_op_description(MutationOp op) {
  switch (op) {
    case MutationOp::QGD: return "quantum gate deletion";
    case MutationOp::QGI: return "quantum gate insertion";
    case MutationOp::QGR: return "quantum gate replacement";
    case MutationOp::QMD: return "quantum measurement deletion";
    case MutationOp::QMI: return "quantum measurement insertion";
  }
  return "?";
}

MutationOp mutation_op_from_name(std::string_view name) {
  for (const MutationOp op : {MutationOp::QGD, MutationOp::QGI, MutationOp::QGR,
                              MutationOp::QMD, MutationOp::QMI}) {
    if (mutation_op_name(op) == name) return op;
  }
  throw MutationError(MutationError::Kind::no_mutants_generated,
                      "unknown mutation operator '" + std::string(name) + "'");
}

std::span<const std::string_view> replacement_pool(int qubit_arity,
                                                   int param_arity) {
  if (qubit_arity == 1 && param_arity == 0) return kPool1q0p;
  if (qubit_arity == 1 && param_arity == 1) return kPool1q1p;
  if (qubit_arity == 2 && param_arity == 0) return kPool2q0p;
  if (qubit_arity == 3 && param_arity == 0) return kPool3q0p;
  return {};
}

std::vector<Mutant> enumerate_mutants(const Circuit& circuit) {
  std::vector<Mutant> mutants;

  auto add = [&](MutationOp op, int line, std::string variant, Circuit mutated) {
    Mutant m;
    m.id = "L" + std::to_string(line) + "-" +
           std::string(mutation_op_name(op)) + "-" + variant;
    m.op = op;
    m.line_number = line;
    m.variant = std::move(variant);
    m.circuit = std::move(mutated);
    mutants.push_back(std::move(m));
  };

  for (std::size_t i = 0; i < circuit.instructions.size(); ++i) {
    const Instruction& instr = circuit.instructions[i];
    const int line = instr.line_number;
    if (instr.kind == InstrKind::gate) {
      add(MutationOp::QGD, line, instr.gate_name,
          replace_instruction(circuit, line, std::nullopt));
      add(MutationOp::QGI, line, instr.gate_name,
          insert_instruction(circuit, i + 1, instr));
      const GateCatalogEntry* entry = find_gate(instr.gate_name);
      if (entry) {
        for (const std::string_view candidate :
             replacement_pool(entry->qubit_arity, entry->param_arity)) {
          if (candidate == instr.gate_name) continue;
          Instruction replacement = instr;
          replacement.gate_name = std::string(candidate);
          add(MutationOp::QGR, line, std::string(candidate),
              replace_instruction(circuit, line, replacement));
        }
      }
    } else if (instr.kind == InstrKind::measure) {
      add(MutationOp::QMD, line, compact_ref(instr.qubits[0]),
          replace_instruction(circuit, line, std::nullopt));
    }
  }

  // QMI: a terminal measure for each unmeasured qubit, into the lowest-index
  // free classical bit of the original circuit.
  const int n_qubits = circuit.num_qubits();
  const int n_clbits = circuit.num_clbits();
  std::vector<bool> qubit_measured(static_cast<std::size_t>(n_qubits), false);
  std::vector<bool> clbit_used(static_cast<std::size_t>(n_clbits), false);
  for (const Instruction& instr : circuit.instructions) {
    if (instr.kind != InstrKind::measure) continue;
    const int q = circuit.global_qubit(instr.qubits[0]);
    const int c = circuit.global_clbit(instr.clbits[0]);
    if (q >= 0) qubit_measured[static_cast<std::size_t>(q)] = true;
    if (c >= 0) clbit_used[static_cast<std::size_t>(c)] = true;
  }
  int free_clbit = -1;
  for (int c = 0; c < n_clbits; ++c) {
    if (!clbit_used[static_cast<std::size_t>(c)]) {
      free_clbit = c;
      break;
    }
  }
  if (free_clbit >= 0) {
    for (int q = 0; q < n_qubits; ++q) {
      if (qubit_measured[static_cast<std::size_t>(q)]) continue;
      const BitRef qubit = circuit.qubit_ref_at(q);
      Circuit mutated = insert_instruction(
          circuit, circuit.instructions.size(),
          make_measure(qubit, circuit.clbit_ref_at(free_clbit)));
      const int line = mutated.instructions.back().line_number;
      add(MutationOp::QMI, line, compact_ref(qubit), std::move(mutated));
    }
  }

  std::sort(mutants.begin(), mutants.end(), [](const Mutant& a, const Mutant& b) {
    return std::tie(a.line_number, a.op, a.variant) <
           std::tie(b.line_number, b.op, b.variant);
  });

  if (mutants.empty()) {
    throw MutationError(MutationError::Kind::no_mutants_generated,
                        "no mutants generated: the circuit has no mutatable "
                        "instruction and no insertable measurement");
  }
  return mutants;
}

std::map<MutationOp, int> mutant_count_by_operator(const Circuit& circuit) {
  std::map<MutationOp, int> counts = {{MutationOp::QGD, 0},
                                      {MutationOp::QGI, 0},
                                      {MutationOp::QGR, 0},
                                      {MutationOp::QMD, 0},
                                      {MutationOp::QMI, 0}};
  try {
    for (const Mutant& m : enumerate_mutants(circuit)) ++counts[m.op];
  } catch (const MutationError&) {
    // an unmutatable circuit counts as all zeros
  }
  return counts;
}

}  // namespace qapr
