#pragma once

#include <string>
#include <vector>

namespace relinfo::cli {

struct SelfTestRow {
  std::string check;
  int instances = 0;
  double max_violation = 0.0;
  bool pass = false;
};

/// Compact in-process sweep of the library invariants: discrete loss
/// properties on random joints, the Gaussian PCA bounds and eigenvalue
/// inequalities, the channel closed forms, and greedy-merge optimality.
/// Returns true when every check passes.
bool run_selftest(int instances, std::vector<SelfTestRow>& rows);

}  // namespace relinfo::cli
