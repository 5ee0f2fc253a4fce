#pragma once

/**
 * Discrete signal enhancement by hard clustering of the observation
 * alphabet: scalarized objectives over the (relevant, irrelevant) loss pair
 * and the greedy agglomerative merge procedure with a relevant-loss budget.
 * All quantities are in bits.
 */

#include <vector>

#include "relinfo/discrete.hpp"

namespace relinfo {

/// A surjective assignment of X symbols to cluster labels 0..num_clusters-1.
struct ClusteringState {
  DeterministicMap labels;

  explicit ClusteringState(DeterministicMap map);
  int input_size() const { return labels.domain_size; }
  int num_clusters() const { return labels.codomain_size; }
};

struct ObjectiveParams {
  double beta = 1.0;    // >= 0, compression vs relevance weight
  double gamma = 0.0;   // >= 0, side-information weight
  double alpha = 1.0;   // > 0, relevant-loss penalty in the utility
  double budget = 0.0;  // >= 0, relevant-loss budget in bits

  void validate() const;
};

/// The scalarized objectives for a given clustering. `ib` and `ibsi` are to
/// be minimized, `delta_p` maximized.
struct EnhancementObjectives {
  double ib = 0.0;      // (beta-1) L_S - L_{X|S}
  double ibsi = 0.0;    // (beta-1) L_S - (beta*gamma+1) L_{X|S}
  double delta_p = 0.0; // L_{X|S} - alpha L_S
  double relevant_loss = 0.0;
  double irrelevant_loss = 0.0;
};

EnhancementObjectives enhancement_objectives(const JointDistribution& joint_sx,
                                             const ClusteringState& clustering,
                                             const ObjectiveParams& params);

struct MergeStep {
  int first = 0;       // smaller merged cluster id, before relabeling
  int second = 0;      // larger merged cluster id
  double increment = 0.0;   // relevant-loss increase of this merge, bits
  double cumulative = 0.0;  // relevant loss of the composed map so far, bits
};

struct AgglomerationResult {
  ClusteringState clustering;
  std::vector<MergeStep> trace;  // cumulative column is non-decreasing
};

/// Starts from the identity clustering and greedily merges the pair with the
/// smallest post-merge relevant loss (lexicographic tie-break), committing a
/// merge only while the cumulative relevant loss stays within the budget.
AgglomerationResult agglomerative_enhance(const JointDistribution& joint_sx,
                                          double budget_bits);

}  // namespace relinfo
