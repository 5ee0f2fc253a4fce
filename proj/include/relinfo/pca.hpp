#pragma once

/**
 * Relevant-loss analysis of dimensionality-reducing PCA on the additive
 * linear-Gaussian model X = S + N with independent S and N. Losses and
 * bounds here are in nats; convert with nats_to_bits when mixing with the
 * discrete layer.
 */

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace relinfo {

/// Covariance pair (C_S, C_N) with derived C_X = C_S + C_N. C_N must be
/// symmetric positive definite, C_S symmetric positive semidefinite.
class LinearGaussianModel {
 public:
  LinearGaussianModel(Eigen::MatrixXd signal_cov, Eigen::MatrixXd noise_cov);

  int dim() const { return static_cast<int>(signal_cov_.rows()); }
  const Eigen::MatrixXd& signal_cov() const { return signal_cov_; }
  const Eigen::MatrixXd& noise_cov() const { return noise_cov_; }
  Eigen::MatrixXd obs_cov() const { return signal_cov_ + noise_cov_; }

 private:
  Eigen::MatrixXd signal_cov_;
  Eigen::MatrixXd noise_cov_;
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations, iterated until
/// the off-diagonal Frobenius norm drops below 1e-12 (scaled by the input
/// norm above unit scale). Eigenvalues come back descending; runs of equal
/// eigenvalues are ordered by the coordinate index of each eigenvector's
/// dominant component, and signs are fixed so that component is positive.
struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, matching order
};

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& symmetric);

struct PcaDecomposition {
  Eigen::MatrixXd rotation;    // orthogonal, columns are eigenvectors of C_X
  Eigen::VectorXd eigenvalues; // descending
  int kept = 0;                // M, number of leading coordinates retained
};

/// PCA of an observation covariance, keeping M of N coordinates (1 <= M < N).
PcaDecomposition pca_decompose(const Eigen::MatrixXd& obs_cov, int kept);

/// Exact relevant loss of the M-keeping PCA projection under the all-Gaussian
/// evaluation (equivalently, the Gaussian upper bound for non-Gaussian
/// sources), in nats. Computed from the conditional-entropy gap between the
/// rotated observation and rotated noise, and cross-checked against the
/// mutual-information route I(S;X) - I(S;Y_M) from log-determinants.
double gaussian_relevant_loss(const LinearGaussianModel& model, int kept);

/// Upper bound (1/2) sum_{i>M} ln(lambda_i / mu) for spherical noise
/// C_N = mu I, nats. Rejects non-spherical noise.
double iid_gaussian_bound(const LinearGaussianModel& model, int kept);

/// Upper bound (1/2) sum_{i>M} ln(mu_1 / mu_i) from the noise eigenvalue
/// spread, nats. Requires rank(C_S) <= M.
double eigen_bound(const LinearGaussianModel& model, int kept);

/// Exhaustive search over M-element coordinate subsets for the projection
/// X -> X_subset with the smallest Gaussian relevant loss. Ties break
/// lexicographically. Limited to dim <= 20.
std::pair<std::vector<int>, double> best_coordinate_subset(
    const LinearGaussianModel& model, int kept);

/// Number of eigenvalues above 1e-8 times the largest one.
int effective_rank(const Eigen::MatrixXd& symmetric);

}  // namespace relinfo
