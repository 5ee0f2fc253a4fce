#pragma once

/**
 * Analysis of a discrete signal observed through additive noise and a
 * pointwise device (quantizer, sign, magnitude). Closed forms are exact for
 * uniform noise; everything else goes through a (S, N) grid discretization
 * whose induced discrete losses come from the discrete layer.
 *
 * All results are in bits.
 */

#include <vector>

#include "relinfo/discrete.hpp"

namespace relinfo {

enum class NoiseFamily { kUniform, kGaussian };

/// Zero-mean additive noise density. Uniform is on [-a, a] with a > 1 (the
/// standing assumption for the closed forms); Gaussian is parameterized by
/// its standard deviation and gridded on +/- 8 sigma.
class NoiseDensity {
 public:
  static NoiseDensity uniform(double half_width);
  static NoiseDensity gaussian(double sigma);

  NoiseFamily family() const { return family_; }
  double param() const { return param_; }
  double lo() const;
  double hi() const;
  double pdf(double n) const;
  double cdf(double n) const;

 private:
  NoiseDensity(NoiseFamily family, double param)
      : family_(family), param_(param) {}
  NoiseFamily family_;
  double param_;
};

/// Finite-alphabet signal plus additive noise; X = S + N.
struct AdditiveChannel {
  std::vector<double> signal_values;
  std::vector<double> signal_priors;
  NoiseDensity noise;
  double support_lo = 0.0;  // where X has mass, used for gridding
  double support_hi = 0.0;

  AdditiveChannel(std::vector<double> values, std::vector<double> priors,
                  NoiseDensity noise_density);

  /// The default model: S uniform on {-1, +1}.
  static AdditiveChannel antipodal(NoiseDensity noise_density);
};

/// Strictly increasing thresholds; an empty list is a constant output.
/// A sample exactly at a threshold goes to the upper cell.
struct Quantizer {
  std::vector<double> thresholds;

  explicit Quantizer(std::vector<double> t);
  int cells() const { return static_cast<int>(thresholds.size()) + 1; }
  int cell(double x) const;
};

/// I(X;S) in bits: exact piecewise closed form for uniform noise, adaptive
/// quadrature for Gaussian noise.
double input_mutual_information(const AdditiveChannel& ch);

/// Row-stochastic P(Y|S): entry (s, y) is the probability that signal s lands
/// in quantizer cell y.
std::vector<std::vector<double>> quantizer_transition_matrix(
    const AdditiveChannel& ch, const Quantizer& q);

/// I(X;S) - I(Y;S) for Y the quantizer output, bits.
double quantizer_relevant_loss(const AdditiveChannel& ch, const Quantizer& q);

/// The closed forms for the antipodal signal with uniform(-a, a) noise.
struct UniformClosedForms {
  double input_mi = 0.0;            // I(X;S) = 1/a
  double sign_loss = 0.0;           // H2((a-1)/2a) - (a-1)/a
  double bec_erasure = 0.0;         // (a-1)/a for thresholds at +/-(a-1)
  double magnitude_relevant = 0.0;  // 1/a
  double magnitude_irrelevant = 0.0;  // (a-1)/a
  double magnitude_total = 0.0;     // 1
};

UniformClosedForms uniform_closed_forms(double a);

enum class GridMap { kSign, kMagnitude, kQuantizer };

enum class GridQuantity {
  kRelevantS,    // I(X;S|Y)
  kIrrelevantS,  // H(X|Y,S)
  kRelevantN,    // I(X;N|Y)
  kIrrelevantN,  // H(X|Y,N)
  kTotal,        // H(X|Y)
};

struct GridLossEstimate {
  double estimate = 0.0;          // at the requested resolution
  double refined_estimate = 0.0;  // at twice the resolution
  bool converged = false;         // doubling moved the estimate < 1e-3 bits
  int resolution = 0;
};

/// Grid-based estimate of one Table-style loss quantity. A cleared converged
/// flag signals divergence (the quantity is infinite in the continuous
/// limit); the estimate is still the finite grid value.
GridLossEstimate grid_loss_report(const AdditiveChannel& ch, GridMap map,
                                  int resolution, GridQuantity quantity,
                                  const Quantizer* quantizer = nullptr);

/// The (S, X-cell) joint induced by the grid, plus the X-cell midpoints.
/// This is the discrete surrogate other modules consume.
struct ChannelGrid {
  JointDistribution joint_sx;
  std::vector<double> x_midpoints;
  double x_lo = 0.0;
  double x_width = 0.0;
};

ChannelGrid make_channel_grid(const AdditiveChannel& ch, int resolution);

/// The pointwise device as a map on X grid cells (midpoint evaluation).
/// Magnitude re-grids |x| onto the same X grid so sign-symmetric cells
/// collide exactly.
DeterministicMap make_grid_map(const ChannelGrid& grid, GridMap map,
                               const Quantizer* quantizer = nullptr);

}  // namespace relinfo
