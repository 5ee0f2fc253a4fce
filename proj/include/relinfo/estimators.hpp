#pragma once

/**
 * Sample-based estimators: k-nearest-neighbor differential entropy, the
 * conditional divergence from a moment-matched Gaussian, the rotated-noise
 * Gaussianity comparison behind the spherical-noise PCA bound, and the
 * partition-refinement demonstration of the discrete loss definition.
 *
 * Differential entropies and divergences are in nats. Everything is
 * deterministic given (seed, n, k); sampling uses a pinned generator rather
 * than the implementation-defined standard distributions.
 */

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "relinfo/discrete.hpp"

namespace relinfo {
class LinearGaussianModel;

/// Deterministic sampling front end over mt19937_64. The mappings from raw
/// bits to variates are fixed here so results are reproducible bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double uniform01();              // [0, 1)
  double uniform(double lo, double hi);
  double normal();                 // Box-Muller, no cached spare
  double laplace(double mu, double scale);

 private:
  std::uint64_t state_;
};

struct SampleSet {
  int dim = 0;
  Eigen::MatrixXd points;  // one row per point
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(points.rows()); }
};

enum class SourceFamily { kGaussian, kUniform, kLaplace, kGaussianMixture };

/// Description of a sampling distribution. `transform`, when present, maps
/// the base draw linearly (rows x base dim), so correlated non-Gaussian
/// sources can be built from independent components.
struct SourceSpec {
  SourceFamily family = SourceFamily::kGaussian;
  int dim = 1;

  Eigen::VectorXd mean;        // gaussian, laplace
  Eigen::MatrixXd cov;         // gaussian
  Eigen::VectorXd lo, hi;      // uniform
  Eigen::VectorXd scale;       // laplace
  Eigen::VectorXd weights;     // mixture
  Eigen::MatrixXd means;       // mixture, one row per component
  Eigen::VectorXd sigmas;      // mixture, isotropic per component
  std::optional<Eigen::MatrixXd> transform;

  static SourceSpec gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  static SourceSpec uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static SourceSpec laplace(Eigen::VectorXd mean, Eigen::VectorXd scale);
  static SourceSpec gaussian_mixture(Eigen::VectorXd weights,
                                     Eigen::MatrixXd means,
                                     Eigen::VectorXd sigmas);

  int output_dim() const;
  void validate() const;
};

SampleSet sample_source(const SourceSpec& spec, int count, std::uint64_t seed);

/// Kozachenko-Leonenko k-nearest-neighbor differential entropy, nats.
/// Exact duplicates are jittered deterministically (1e-12 relative, derived
/// from the set's seed); more than 50% duplicates is an error.
double knn_entropy(const SampleSet& samples, int k = 4);

/// J(X|Y): the conditional-entropy gap between the moment-matched Gaussian
/// fit and the sample estimate, nats. The first `x_dim` columns are X, the
/// rest are the conditioning block Y. Non-negative up to estimator noise.
double conditional_divergence_J(const SampleSet& samples_xy, int x_dim,
                                int k = 4);

struct GaussianityCheck {
  double j_noise = 0.0;   // J of the rotated dropped noise given kept noise
  double j_output = 0.0;  // J of the rotated dropped output given kept output
  double std_error = 0.0; // bootstrap standard error of (j_output - j_noise)
  bool satisfied = false; // j_noise <= j_output within twice the std error
};

/// Samples the model (signal from `source`, noise Gaussian with C_N unless
/// `noise_source` overrides it), rotates through the model's PCA, and tests
/// whether the rotated noise is at least as Gaussian as the rotated output.
/// Bootstrap uses 20 resamples seeded from `seed` by fixed increments.
GaussianityCheck noise_gaussianity_check(
    const LinearGaussianModel& model, const SourceSpec& source, int kept,
    int count, std::uint64_t seed,
    const std::optional<SourceSpec>& noise_source = std::nullopt, int k = 4);

/// For each requested resolution, quantizes S into that many equal-mass
/// groups and evaluates I(S_hat;X) - I(S_hat;Y) on the gridded joint, bits.
/// With nested (dyadic) resolutions the sequence is non-decreasing and
/// approaches I(X;S|Y) from below.
std::vector<double> refined_partition_loss(const JointDistribution& joint_sx,
                                           const DeterministicMap& g,
                                           const std::vector<int>& resolutions);

/// Digamma function, exposed for the estimator tests.
double digamma(double x);

}  // namespace relinfo
