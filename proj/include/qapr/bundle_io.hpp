#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qapr/harness.hpp"

namespace qapr {

/// Defaults applied to tests.json entries that omit the field.
struct BundleLoadOptions {
  int default_shots = kDefaultShots;
  std::uint64_t default_seed = kDefaultSeed;
  double default_tvd_threshold = kDefaultTvdThreshold;
};

/// Loads one bundle directory: buggy.qasm, fixed.qasm, tests.json, meta.json.
/// The bundle id is the directory name.
BugBundle load_bundle(const std::filesystem::path& dir,
                      const BundleLoadOptions& options = {});

/// Loads every subdirectory of `root` that contains a buggy.qasm, sorted by
/// name. A root that is itself a bundle directory yields one bundle.
std::vector<BugBundle> load_bundle_set(const std::filesystem::path& root,
                                       const BundleLoadOptions& options = {});

/// Checks the bundle invariants by running the tests: the reference fix
/// passes everything, the buggy circuit fails something, and the declared
/// symptom matches the baseline (TE iff some test errored). Violations raise
/// BundleError(invariant_violation).
void validate_bundle(const BugBundle& bundle, int time_limit_ms);

}  // namespace qapr
