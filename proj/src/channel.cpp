#include "relinfo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "relinfo/errors.hpp"

namespace relinfo {

namespace {

constexpr double kGaussianTailSigmas = 8.0;
constexpr double kConvergedDeltaBits = 1e-3;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTwoPiE = kTwoPi * std::numbers::e;

double gaussian_pdf(double x, double sigma) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}

double gaussian_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

double neg_f_log2_f(double f) { return f > 0.0 ? -f * std::log2(f) : 0.0; }

// Adaptive Simpson on [lo, hi] for the mixture-density entropy integrand.
struct EntropyIntegrand {
  const AdditiveChannel& ch;
  double operator()(double x) const {
    double f = 0.0;
    for (size_t i = 0; i < ch.signal_values.size(); ++i) {
      f += ch.signal_priors[i] * ch.noise.pdf(x - ch.signal_values[i]);
    }
    return neg_f_log2_f(f);
  }
};

template <typename F>
double simpson_step(const F& f, double lo, double hi, double flo, double fmid,
                    double fhi, double whole, double eps, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lmid = 0.5 * (lo + mid);
  const double rmid = 0.5 * (mid + hi);
  const double flmid = f(lmid);
  const double frmid = f(rmid);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * flmid + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frmid + fhi);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_step(f, lo, mid, flo, flmid, fmid, left, eps * 0.5, depth - 1) +
         simpson_step(f, mid, hi, fmid, frmid, fhi, right, eps * 0.5, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double lo, double hi, double eps) {
  const double mid = 0.5 * (lo + hi);
  const double flo = f(lo), fmid = f(mid), fhi = f(hi);
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return simpson_step(f, lo, hi, flo, fmid, fhi, whole, eps, 40);
}

}  // namespace

NoiseDensity NoiseDensity::uniform(double half_width) {
  if (!(half_width > 1.0)) {
    throw std::invalid_argument("uniform noise needs half width a > 1");
  }
  return NoiseDensity(NoiseFamily::kUniform, half_width);
}

NoiseDensity NoiseDensity::gaussian(double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gaussian noise needs sigma > 0");
  }
  return NoiseDensity(NoiseFamily::kGaussian, sigma);
}

double NoiseDensity::lo() const {
  return family_ == NoiseFamily::kUniform ? -param_
                                          : -kGaussianTailSigmas * param_;
}

double NoiseDensity::hi() const { return -lo(); }

double NoiseDensity::pdf(double n) const {
  if (family_ == NoiseFamily::kUniform) {
    return (n >= -param_ && n <= param_) ? 1.0 / (2.0 * param_) : 0.0;
  }
  return gaussian_pdf(n, param_);
}

double NoiseDensity::cdf(double n) const {
  if (family_ == NoiseFamily::kUniform) {
    if (n <= -param_) return 0.0;
    if (n >= param_) return 1.0;
    return (n + param_) / (2.0 * param_);
  }
  return gaussian_cdf(n, param_);
}

AdditiveChannel::AdditiveChannel(std::vector<double> values,
                                 std::vector<double> priors,
                                 NoiseDensity noise_density)
    : signal_values(std::move(values)),
      signal_priors(std::move(priors)),
      noise(noise_density) {
  if (signal_values.empty() || signal_values.size() != signal_priors.size()) {
    throw std::invalid_argument("signal values and priors must match and be nonempty");
  }
  long double total = 0.0L;
  for (double p : signal_priors) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative signal prior");
    total += p;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) {
    throw std::invalid_argument("signal priors do not sum to 1");
  }
  const double mass = noise.cdf(noise.hi()) - noise.cdf(noise.lo());
  if (std::fabs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("noise density does not integrate to 1 over its support");
  }
  const auto [smin, smax] =
      std::minmax_element(signal_values.begin(), signal_values.end());
  support_lo = *smin + noise.lo();
  support_hi = *smax + noise.hi();
}

AdditiveChannel AdditiveChannel::antipodal(NoiseDensity noise_density) {
  return AdditiveChannel({-1.0, 1.0}, {0.5, 0.5}, noise_density);
}

Quantizer::Quantizer(std::vector<double> t) : thresholds(std::move(t)) {
  for (size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i - 1] < thresholds[i])) {
      throw std::invalid_argument("quantizer thresholds must be strictly increasing");
    }
  }
}

int Quantizer::cell(double x) const {
  // Count of thresholds <= x, so a sample at a threshold goes up.
  return static_cast<int>(
      std::upper_bound(thresholds.begin(), thresholds.end(), x) -
      thresholds.begin());
}

double input_mutual_information(const AdditiveChannel& ch) {
  if (ch.noise.family() == NoiseFamily::kUniform) {
    // The output density is piecewise constant between the points {s - a}
    // and {s + a}, so h(X) is an exact finite sum.
    const double a = ch.noise.param();
    std::vector<double> edges;
    for (double s : ch.signal_values) {
      edges.push_back(s - a);
      edges.push_back(s + a);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    double h_x = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
      const double len = edges[i + 1] - edges[i];
      if (len <= 0.0) continue;
      const double mid = 0.5 * (edges[i] + edges[i + 1]);
      double density = 0.0;
      for (size_t j = 0; j < ch.signal_values.size(); ++j) {
        if (std::fabs(mid - ch.signal_values[j]) <= a) {
          density += ch.signal_priors[j] / (2.0 * a);
        }
      }
      h_x += len * neg_f_log2_f(density);
    }
    const double h_x_given_s = std::log2(2.0 * a);
    return h_x - h_x_given_s;
  }
  const double sigma = ch.noise.param();
  const double h_x = adaptive_simpson(EntropyIntegrand{ch}, ch.support_lo,
                                      ch.support_hi, 1e-10);
  const double h_x_given_s = 0.5 * std::log2(kTwoPiE * sigma * sigma);
  return h_x - h_x_given_s;
}

std::vector<std::vector<double>> quantizer_transition_matrix(
    const AdditiveChannel& ch, const Quantizer& q) {
  const int ny = q.cells();
  std::vector<std::vector<double>> rows;
  rows.reserve(ch.signal_values.size());
  for (double s : ch.signal_values) {
    std::vector<double> row(static_cast<size_t>(ny), 0.0);
    double prev = 0.0;
    for (int y = 0; y < ny; ++y) {
      const double upper = (y == ny - 1)
                               ? 1.0
                               : ch.noise.cdf(q.thresholds[static_cast<size_t>(y)] - s);
      row[static_cast<size_t>(y)] = upper - prev;
      prev = upper;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double quantizer_relevant_loss(const AdditiveChannel& ch, const Quantizer& q) {
  const auto rows = quantizer_transition_matrix(ch, q);
  const int ns = static_cast<int>(ch.signal_values.size());
  const int ny = q.cells();
  std::vector<double> mass(static_cast<size_t>(ns * ny), 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int y = 0; y < ny; ++y) {
      mass[static_cast<size_t>(s * ny + y)] =
          ch.signal_priors[static_cast<size_t>(s)] * rows[static_cast<size_t>(s)][static_cast<size_t>(y)];
    }
  }
  const JointDistribution joint_sy({{"S", ns}, {"Y", ny}}, std::move(mass));
  return input_mutual_information(ch) - mutual_information(joint_sy);
}

UniformClosedForms uniform_closed_forms(double a) {
  if (!(a > 1.0)) throw std::invalid_argument("closed forms need a > 1");
  UniformClosedForms out;
  out.input_mi = 1.0 / a;
  out.sign_loss = binary_entropy((a - 1.0) / (2.0 * a)) - (a - 1.0) / a;
  out.bec_erasure = (a - 1.0) / a;
  out.magnitude_relevant = 1.0 / a;
  out.magnitude_irrelevant = (a - 1.0) / a;
  out.magnitude_total = 1.0;
  return out;
}

namespace {

struct NoiseGrid {
  std::vector<double> midpoints;
  std::vector<double> masses;
};

NoiseGrid make_noise_grid(const NoiseDensity& noise, int resolution) {
  NoiseGrid grid;
  grid.midpoints.resize(static_cast<size_t>(resolution));
  grid.masses.resize(static_cast<size_t>(resolution));
  const double width = (noise.hi() - noise.lo()) / resolution;
  long double total = 0.0L;
  for (int j = 0; j < resolution; ++j) {
    // Centered form keeps symmetric grids exactly sign-symmetric.
    const double mid = (j + 0.5 - 0.5 * resolution) * width;
    grid.midpoints[static_cast<size_t>(j)] = mid;
    const double m = noise.pdf(mid) * width;
    grid.masses[static_cast<size_t>(j)] = m;
    total += m;
  }
  for (double& m : grid.masses) m = static_cast<double>(m / total);
  return grid;
}

int x_cell_of(double x, double lo, double width, int resolution) {
  const double t = (x - lo) / width;
  int j = static_cast<int>(std::floor(t));
  const double frac = t - j;
  // The atom lattice can align exactly with the cell edges (it does for
  // rational noise widths), so edge hits are not measure-zero here. Assign
  // them away from zero: that is the unique deterministic rule that keeps a
  // sign-symmetric density sign-symmetric after discretization.
  constexpr double kEdgeTol = 1e-9;
  if (frac <= kEdgeTol && x < 0.0) j -= 1;
  if (frac >= 1.0 - kEdgeTol && x > 0.0) j += 1;
  return std::clamp(j, 0, resolution - 1);
}

std::vector<double> x_grid_midpoints(double lo, double width, int resolution) {
  std::vector<double> mids(static_cast<size_t>(resolution));
  for (int j = 0; j < resolution; ++j) {
    mids[static_cast<size_t>(j)] = lo + (j + 0.5) * width;
  }
  return mids;
}

DeterministicMap grid_map_impl(const std::vector<double>& midpoints, double lo,
                               double width, GridMap map,
                               const Quantizer* quantizer) {
  const int nx = static_cast<int>(midpoints.size());
  std::vector<int> img(static_cast<size_t>(nx), 0);
  switch (map) {
    case GridMap::kSign:
      for (int j = 0; j < nx; ++j) {
        img[static_cast<size_t>(j)] = midpoints[static_cast<size_t>(j)] >= 0.0 ? 1 : 0;
      }
      return DeterministicMap(nx, 2, std::move(img));
    case GridMap::kMagnitude:
      for (int j = 0; j < nx; ++j) {
        img[static_cast<size_t>(j)] =
            x_cell_of(std::fabs(midpoints[static_cast<size_t>(j)]), lo, width, nx);
      }
      return DeterministicMap(nx, nx, std::move(img));
    case GridMap::kQuantizer: {
      if (quantizer == nullptr) {
        throw std::invalid_argument("quantizer map needs a quantizer");
      }
      for (int j = 0; j < nx; ++j) {
        img[static_cast<size_t>(j)] = quantizer->cell(midpoints[static_cast<size_t>(j)]);
      }
      return DeterministicMap(nx, quantizer->cells(), std::move(img));
    }
  }
  throw std::invalid_argument("unsupported map tag");
}

}  // namespace

ChannelGrid make_channel_grid(const AdditiveChannel& ch, int resolution) {
  if (resolution < 16) throw std::invalid_argument("grid resolution must be >= 16");
  const NoiseGrid noise = make_noise_grid(ch.noise, resolution);
  const double x_lo = ch.support_lo;
  const double x_width = (ch.support_hi - ch.support_lo) / resolution;
  const int ns = static_cast<int>(ch.signal_values.size());
  std::vector<double> mass(static_cast<size_t>(ns * resolution), 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int j = 0; j < resolution; ++j) {
      const double x = ch.signal_values[static_cast<size_t>(s)] + noise.midpoints[static_cast<size_t>(j)];
      const int xi = x_cell_of(x, x_lo, x_width, resolution);
      mass[static_cast<size_t>(s * resolution + xi)] +=
          ch.signal_priors[static_cast<size_t>(s)] * noise.masses[static_cast<size_t>(j)];
    }
  }
  ChannelGrid grid{JointDistribution({{"S", ns}, {"X", resolution}}, std::move(mass)),
                   x_grid_midpoints(x_lo, x_width, resolution), x_lo, x_width};
  return grid;
}

DeterministicMap make_grid_map(const ChannelGrid& grid, GridMap map,
                               const Quantizer* quantizer) {
  return grid_map_impl(grid.x_midpoints, grid.x_lo, grid.x_width, map, quantizer);
}

namespace {

double grid_quantity_once(const AdditiveChannel& ch, GridMap map, int resolution,
                          GridQuantity quantity, const Quantizer* quantizer) {
  const NoiseGrid noise = make_noise_grid(ch.noise, resolution);
  const double x_lo = ch.support_lo;
  const double x_width = (ch.support_hi - ch.support_lo) / resolution;
  const int ns = static_cast<int>(ch.signal_values.size());
  const DeterministicMap g = grid_map_impl(
      x_grid_midpoints(x_lo, x_width, resolution), x_lo, x_width, map, quantizer);

  const bool relevance_is_noise =
      quantity == GridQuantity::kRelevantN || quantity == GridQuantity::kIrrelevantN;
  SparseJoint joint;
  joint.r_size = relevance_is_noise ? resolution : ns;
  joint.x_size = resolution;
  joint.atoms.reserve(static_cast<size_t>(ns) * static_cast<size_t>(resolution));
  for (int s = 0; s < ns; ++s) {
    for (int j = 0; j < resolution; ++j) {
      const double x = ch.signal_values[static_cast<size_t>(s)] + noise.midpoints[static_cast<size_t>(j)];
      const int xi = x_cell_of(x, x_lo, x_width, resolution);
      joint.atoms.push_back({relevance_is_noise ? j : s, xi,
                             ch.signal_priors[static_cast<size_t>(s)] *
                                 noise.masses[static_cast<size_t>(j)]});
    }
  }
  const LossReport lr = loss_report(joint, g);
  switch (quantity) {
    case GridQuantity::kRelevantS:
    case GridQuantity::kRelevantN:
      return lr.relevant_loss;
    case GridQuantity::kIrrelevantS:
    case GridQuantity::kIrrelevantN:
      return lr.irrelevant_loss;
    case GridQuantity::kTotal:
      return lr.total_loss;
  }
  throw std::invalid_argument("unsupported grid quantity");
}

}  // namespace

GridLossEstimate grid_loss_report(const AdditiveChannel& ch, GridMap map,
                                  int resolution, GridQuantity quantity,
                                  const Quantizer* quantizer) {
  if (resolution < 16) throw std::invalid_argument("grid resolution must be >= 16");
  GridLossEstimate out;
  out.resolution = resolution;
  out.estimate = grid_quantity_once(ch, map, resolution, quantity, quantizer);
  out.refined_estimate =
      grid_quantity_once(ch, map, 2 * resolution, quantity, quantizer);
  out.converged =
      std::fabs(out.refined_estimate - out.estimate) < kConvergedDeltaBits;
  return out;
}

}  // namespace relinfo
