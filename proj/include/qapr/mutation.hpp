#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qapr/circuit.hpp"

namespace qapr {

/// The five quantum mutation operators.
enum class MutationOp { QGD, QGI, QGR, QMD, QMI };

std::string_view mutation_op_name(MutationOp op);
std::string_view mutation_op_description(MutationOp op);
MutationOp mutation_op_from_name(std::string_view name);

/// One mutant: the original circuit with a single change at a single
/// location. `id` follows the grammar "L<line>-<TAG>-<variant>".
struct Mutant {
  std::string id;
  MutationOp op = MutationOp::QGD;
  int line_number = 0;
  std::string variant;
  Circuit circuit;
};

/// QGR replacement pool for a (qubit_arity, param_arity) class. A gate's
/// candidates are the pool members other than itself. Empty for classes
/// without replacements.
std::span<const std::string_view> replacement_pool(int qubit_arity,
                                                   int param_arity);

/// Enumerates every mutant produced by:
///   QGD - delete each gate instruction;
///   QGI - insert a duplicate of each gate instruction immediately after it;
///   QGR - replace each gate with every other gate in its replacement pool,
///         keeping operands and parameters;
///   QMD - delete each measure instruction;
///   QMI - append a terminal measure for each unmeasured qubit, targeting
///         the lowest-index free classical bit.
/// Ordered by ascending (line_number, operator tag, variant). Throws
/// MutationError(no_mutants_generated) when the list is empty.
std::vector<Mutant> enumerate_mutants(const Circuit& circuit);

/// Histogram over the five operators, consistent with enumerate_mutants.
/// All five keys are always present; an unmutatable circuit yields zeros.
std::map<MutationOp, int> mutant_count_by_operator(const Circuit& circuit);

}  // namespace qapr
