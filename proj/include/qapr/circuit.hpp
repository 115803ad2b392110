#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qapr/errors.hpp"

namespace qapr {

/// Desk-scale cap on the total qubit count of a circuit.
inline constexpr int kMaxQubits = 16;

struct QuantumRegister {
  std::string name;
  int size = 0;
  bool operator==(const QuantumRegister&) const = default;
};

struct ClassicalRegister {
  std::string name;
  int size = 0;
  bool operator==(const ClassicalRegister&) const = default;
};

/// Reference to one bit of a named register, e.g. q[2].
struct BitRef {
  std::string reg;
  int index = 0;
  bool operator==(const BitRef&) const = default;
};

enum class InstrKind { gate, measure, barrier };

struct Instruction {
  InstrKind kind = InstrKind::gate;
  std::string gate_name;        // empty unless kind == gate
  std::vector<double> params;   // radians
  std::vector<BitRef> qubits;
  std::vector<BitRef> clbits;   // measure target only
  int line_number = 0;          // 1-based line in the canonical printed form

  bool operator==(const Instruction&) const = default;

  /// Field-wise equality ignoring the canonical line number. Used to decide
  /// whether two circuits differ only by position shifts.
  bool same_operation(const Instruction& other) const;
};

Instruction make_gate(std::string name, std::vector<double> params,
                      std::vector<BitRef> qubits);
Instruction make_measure(BitRef qubit, BitRef clbit);
Instruction make_barrier(std::vector<BitRef> qubits);

/// Register declarations plus an ordered instruction list. Values are
/// immutable by convention: every operation returns a new circuit.
struct Circuit {
  std::vector<QuantumRegister> qregs;
  std::vector<ClassicalRegister> cregs;
  std::vector<Instruction> instructions;

  bool operator==(const Circuit&) const = default;

  int num_qubits() const;
  int num_clbits() const;

  const QuantumRegister* find_qreg(std::string_view name) const;
  const ClassicalRegister* find_creg(std::string_view name) const;

  /// Global bit index in declaration order, qubit 0 of the first register
  /// first (little-endian amplitude indexing). Returns -1 when the reference
  /// does not resolve.
  int global_qubit(const BitRef& ref) const;
  int global_clbit(const BitRef& ref) const;

  BitRef qubit_ref_at(int global_index) const;
  BitRef clbit_ref_at(int global_index) const;
};

/// Row-major 2^arity x 2^arity unitary; local basis bit j corresponds to the
/// instruction's j-th qubit operand.
using GateMatrix = std::vector<std::complex<double>>;

struct GateCatalogEntry {
  std::string_view name;
  int qubit_arity = 1;
  int param_arity = 0;
  GateMatrix (*unitary)(std::span<const double> params) = nullptr;
};

/// The fixed gate set: 1-qubit/0-param {id,x,y,z,h,s,sdg,t,tdg},
/// 1-qubit/1-param {rx,ry,rz,p}, 2-qubit/0-param {cx,cz,swap,ch},
/// 3-qubit/0-param {ccx,cswap}.
std::span<const GateCatalogEntry> gate_catalog();
const GateCatalogEntry* find_gate(std::string_view name);

/// Parses the supported OpenQASM 2.0 subset: version header, qreg/creg
/// declarations, catalog gate applications, measure, barrier. Anything else
/// is rejected (see QasmError kinds).
Circuit parse_qasm(std::string_view source);

/// Canonical form: version header, one register declaration per line, one
/// instruction per line, parameters printed with 12 significant digits.
/// parse_qasm(print_qasm(c)) is structurally equal to c for every circuit
/// the parser or the mutation engine can produce.
std::string print_qasm(const Circuit& circuit);

/// Returns a copy with the instruction at `line_number` replaced, or deleted
/// when `replacement` is empty. Line numbers are recomputed. Throws
/// QasmError(no_such_line) when the line does not address an instruction.
Circuit replace_instruction(const Circuit& circuit, int line_number,
                            const std::optional<Instruction>& replacement);

/// Returns a copy with `instr` inserted at `position` (0..instructions.size())
/// and line numbers recomputed.
Circuit insert_instruction(const Circuit& circuit, std::size_t position,
                           Instruction instr);

/// Recomputes every instruction's line_number from the canonical layout.
void renumber(Circuit& circuit);

/// Full invariant check for circuits built outside the parser. Returns a
/// description of the first violation (and the offending canonical line via
/// `line` when known), or std::nullopt when the circuit is well formed.
std::optional<std::string> find_invariant_violation(const Circuit& circuit,
                                                    int* line = nullptr);

}  // namespace qapr
