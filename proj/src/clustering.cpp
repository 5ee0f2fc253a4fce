#include "relinfo/clustering.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace relinfo {

namespace {

constexpr double kBudgetSlack = 1e-12;

// Merge cluster `b` into cluster `a` (a < b) and close the label gap.
DeterministicMap merge_labels(const DeterministicMap& labels, int a, int b) {
  std::vector<int> img(labels.image);
  for (int& y : img) {
    if (y == b) y = a;
    if (y > b) --y;
  }
  return DeterministicMap(labels.domain_size, labels.codomain_size - 1,
                          std::move(img));
}

}  // namespace

ClusteringState::ClusteringState(DeterministicMap map) : labels(std::move(map)) {
  std::vector<bool> seen(static_cast<size_t>(labels.codomain_size), false);
  for (int y : labels.image) seen[static_cast<size_t>(y)] = true;
  for (bool hit : seen) {
    if (!hit) {
      throw std::invalid_argument("clustering labels must be surjective");
    }
  }
}

void ObjectiveParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must be finite and >= 0");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be finite and >= 0");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be finite and > 0");
  }
  if (!(budget >= 0.0)) {
    throw std::invalid_argument("budget must be >= 0");
  }
}

EnhancementObjectives enhancement_objectives(const JointDistribution& joint_sx,
                                             const ClusteringState& clustering,
                                             const ObjectiveParams& params) {
  params.validate();
  if (joint_sx.num_variables() != 2 ||
      clustering.input_size() != joint_sx.size(1)) {
    throw std::invalid_argument("clustering domain does not match X alphabet");
  }
  const LossReport lr = loss_report(joint_sx, clustering.labels);
  EnhancementObjectives out;
  out.relevant_loss = lr.relevant_loss;
  out.irrelevant_loss = lr.irrelevant_loss;
  out.ib = (params.beta - 1.0) * lr.relevant_loss - lr.irrelevant_loss;
  out.ibsi = (params.beta - 1.0) * lr.relevant_loss -
             (params.beta * params.gamma + 1.0) * lr.irrelevant_loss;
  out.delta_p = lr.irrelevant_loss - params.alpha * lr.relevant_loss;
  return out;
}

AgglomerationResult agglomerative_enhance(const JointDistribution& joint_sx,
                                          double budget_bits) {
  if (joint_sx.num_variables() != 2) {
    throw std::invalid_argument("agglomeration expects a joint over (S, X)");
  }
  if (!(budget_bits >= 0.0)) {
    throw std::invalid_argument("budget must be >= 0");
  }
  const int nx = joint_sx.size(1);
  DeterministicMap labels = DeterministicMap::identity(nx);
  std::vector<MergeStep> trace;
  double cumulative = 0.0;

  while (labels.codomain_size > 1) {
    int best_a = -1, best_b = -1;
    double best_loss = std::numeric_limits<double>::infinity();
    DeterministicMap best_labels = labels;
    for (int a = 0; a < labels.codomain_size - 1; ++a) {
      for (int b = a + 1; b < labels.codomain_size; ++b) {
        DeterministicMap candidate = merge_labels(labels, a, b);
        const double loss = loss_report(joint_sx, candidate).relevant_loss;
        if (loss < best_loss) {
          best_loss = loss;
          best_a = a;
          best_b = b;
          best_labels = std::move(candidate);
        }
      }
    }
    if (best_loss > budget_bits + kBudgetSlack) break;
    trace.push_back({best_a, best_b, best_loss - cumulative, best_loss});
    cumulative = best_loss;
    labels = std::move(best_labels);
  }
  return AgglomerationResult{ClusteringState(std::move(labels)), std::move(trace)};
}

}  // namespace relinfo
