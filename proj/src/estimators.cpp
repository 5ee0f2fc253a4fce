#include "relinfo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "relinfo/errors.hpp"
#include "relinfo/pca.hpp"

namespace relinfo {

namespace {

constexpr double kJitterScale = 1e-12;
constexpr int kBootstrapResamples = 20;

// ln of the unit-ball volume in `dim` dimensions.
double log_unit_ball_volume(int dim) {
  return 0.5 * dim * std::log(std::numbers::pi) - std::lgamma(0.5 * dim + 1.0);
}

}  // namespace

std::uint64_t Rng::next_u64() {
  // splitmix64; small, well mixed, and stable across platforms.
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double Rng::normal() {
  double u1 = uniform01();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::laplace(double mu, double scale) {
  const double u = uniform01() - 0.5;
  double tail = 1.0 - 2.0 * std::fabs(u);
  if (tail <= 0.0) tail = 0x1.0p-53;
  const double sign = u >= 0.0 ? 1.0 : -1.0;
  return mu - scale * sign * std::log(tail);
}

SourceSpec SourceSpec::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  SourceSpec s;
  s.family = SourceFamily::kGaussian;
  s.dim = static_cast<int>(mean.size());
  s.mean = std::move(mean);
  s.cov = std::move(cov);
  s.validate();
  return s;
}

SourceSpec SourceSpec::uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  SourceSpec s;
  s.family = SourceFamily::kUniform;
  s.dim = static_cast<int>(lo.size());
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  s.validate();
  return s;
}

SourceSpec SourceSpec::laplace(Eigen::VectorXd mean, Eigen::VectorXd scale) {
  SourceSpec s;
  s.family = SourceFamily::kLaplace;
  s.dim = static_cast<int>(mean.size());
  s.mean = std::move(mean);
  s.scale = std::move(scale);
  s.validate();
  return s;
}

SourceSpec SourceSpec::gaussian_mixture(Eigen::VectorXd weights,
                                        Eigen::MatrixXd means,
                                        Eigen::VectorXd sigmas) {
  SourceSpec s;
  s.family = SourceFamily::kGaussianMixture;
  s.dim = static_cast<int>(means.cols());
  s.weights = std::move(weights);
  s.means = std::move(means);
  s.sigmas = std::move(sigmas);
  s.validate();
  return s;
}

int SourceSpec::output_dim() const {
  return transform ? static_cast<int>(transform->rows()) : dim;
}

void SourceSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("source dimension must be positive");
  switch (family) {
    case SourceFamily::kGaussian:
      if (mean.size() != dim || cov.rows() != dim || cov.cols() != dim) {
        throw std::invalid_argument("gaussian source parameters do not match dim");
      }
      break;
    case SourceFamily::kUniform:
      if (lo.size() != dim || hi.size() != dim) {
        throw std::invalid_argument("uniform source parameters do not match dim");
      }
      for (int i = 0; i < dim; ++i) {
        if (!(lo(i) < hi(i))) {
          throw std::invalid_argument("uniform source needs lo < hi per coordinate");
        }
      }
      break;
    case SourceFamily::kLaplace:
      if (mean.size() != dim || scale.size() != dim) {
        throw std::invalid_argument("laplace source parameters do not match dim");
      }
      for (int i = 0; i < dim; ++i) {
        if (!(scale(i) > 0.0)) {
          throw std::invalid_argument("laplace scale must be positive");
        }
      }
      break;
    case SourceFamily::kGaussianMixture: {
      const int k = static_cast<int>(weights.size());
      if (k < 1 || means.rows() != k || means.cols() != dim || sigmas.size() != k) {
        throw std::invalid_argument("mixture source parameters do not match dim");
      }
      long double total = 0.0L;
      for (int i = 0; i < k; ++i) {
        if (!(weights(i) >= 0.0)) {
          throw std::invalid_argument("mixture weights must be nonnegative");
        }
        if (!(sigmas(i) > 0.0)) {
          throw std::invalid_argument("mixture sigmas must be positive");
        }
        total += weights(i);
      }
      if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) {
        throw std::invalid_argument("mixture weights must sum to 1");
      }
      break;
    }
  }
  if (transform && transform->cols() != dim) {
    throw std::invalid_argument("source transform does not match the base dim");
  }
}

SampleSet sample_source(const SourceSpec& spec, int count, std::uint64_t seed) {
  spec.validate();
  if (count < 1) throw std::invalid_argument("sample count must be positive");
  Rng rng(seed);
  Eigen::MatrixXd base(count, spec.dim);

  Eigen::MatrixXd chol;
  if (spec.family == SourceFamily::kGaussian) {
    const Eigen::LLT<Eigen::MatrixXd> llt(spec.cov);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("gaussian source covariance is not positive definite");
    }
    chol = llt.matrixL();
  }
  for (int i = 0; i < count; ++i) {
    switch (spec.family) {
      case SourceFamily::kGaussian: {
        Eigen::VectorXd z(spec.dim);
        for (int d = 0; d < spec.dim; ++d) z(d) = rng.normal();
        base.row(i) = (spec.mean + chol * z).transpose();
        break;
      }
      case SourceFamily::kUniform:
        for (int d = 0; d < spec.dim; ++d) {
          base(i, d) = rng.uniform(spec.lo(d), spec.hi(d));
        }
        break;
      case SourceFamily::kLaplace:
        for (int d = 0; d < spec.dim; ++d) {
          base(i, d) = rng.laplace(spec.mean(d), spec.scale(d));
        }
        break;
      case SourceFamily::kGaussianMixture: {
        const double u = rng.uniform01();
        int comp = 0;
        double cum = 0.0;
        for (int c = 0; c < spec.weights.size(); ++c) {
          cum += spec.weights(c);
          if (u < cum) {
            comp = c;
            break;
          }
          comp = c;
        }
        for (int d = 0; d < spec.dim; ++d) {
          base(i, d) = spec.means(comp, d) + spec.sigmas(comp) * rng.normal();
        }
        break;
      }
    }
  }
  SampleSet out;
  out.seed = seed;
  if (spec.transform) {
    out.points = base * spec.transform->transpose();
  } else {
    out.points = std::move(base);
  }
  out.dim = static_cast<int>(out.points.cols());
  return out;
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma needs x > 0");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
  return result;
}

namespace {

// Deterministic duplicate handling: rows equal to an earlier row get a tiny
// relative jitter drawn from the set's seed. Errors out when more than half
// the set is duplicated.
Eigen::MatrixXd dedupe_with_jitter(const SampleSet& samples) {
  const int n = samples.count();
  const int d = samples.dim;
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto row_less = [&](int a, int b) {
    for (int c = 0; c < d; ++c) {
      if (samples.points(a, c) != samples.points(b, c)) {
        return samples.points(a, c) < samples.points(b, c);
      }
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  std::vector<int> dup_rows;
  for (int i = 1; i < n; ++i) {
    const int a = order[static_cast<size_t>(i - 1)], b = order[static_cast<size_t>(i)];
    if (!row_less(a, b) && !row_less(b, a)) dup_rows.push_back(b);
  }
  if (2 * static_cast<int>(dup_rows.size()) > n) {
    throw std::invalid_argument("sample set is degenerate: too many duplicate points");
  }
  Eigen::MatrixXd out = samples.points;
  if (!dup_rows.empty()) {
    Rng rng(samples.seed ^ 0x6a09e667f3bcc908ull);
    for (int row : dup_rows) {
      for (int c = 0; c < d; ++c) {
        const double mag = (std::fabs(out(row, c)) + 1.0) * kJitterScale;
        out(row, c) += mag * (2.0 * rng.uniform01() - 1.0);
      }
    }
  }
  return out;
}

// Distance to the k-th nearest neighbor for every point.
std::vector<double> knn_distances(const Eigen::MatrixXd& pts, int k) {
  const int n = static_cast<int>(pts.rows());
  const int d = static_cast<int>(pts.cols());
  std::vector<double> eps(static_cast<size_t>(n), 0.0);
  if (d == 1) {
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&pts](int a, int b) { return pts(a, 0) < pts(b, 0); });
    std::vector<double> cand;
    for (int i = 0; i < n; ++i) {
      cand.clear();
      for (int j = std::max(0, i - k); j <= std::min(n - 1, i + k); ++j) {
        if (j == i) continue;
        cand.push_back(std::fabs(pts(order[static_cast<size_t>(i)], 0) -
                                 pts(order[static_cast<size_t>(j)], 0)));
      }
      std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
      eps[static_cast<size_t>(order[static_cast<size_t>(i)])] = cand[static_cast<size_t>(k - 1)];
    }
    return eps;
  }
  std::vector<double> dist2(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      dist2[static_cast<size_t>(j)] = (pts.row(i) - pts.row(j)).squaredNorm();
    }
    dist2[static_cast<size_t>(i)] = std::numeric_limits<double>::infinity();
    std::nth_element(dist2.begin(), dist2.begin() + (k - 1), dist2.end());
    eps[static_cast<size_t>(i)] = std::sqrt(dist2[static_cast<size_t>(k - 1)]);
  }
  return eps;
}

double knn_entropy_rows(const Eigen::MatrixXd& pts, std::uint64_t seed, int k) {
  SampleSet tmp{static_cast<int>(pts.cols()), pts, seed};
  return knn_entropy(tmp, k);
}

}  // namespace

double knn_entropy(const SampleSet& samples, int k) {
  const int n = samples.count();
  const int d = samples.dim;
  if (k < 1) throw std::invalid_argument("neighbor count must be >= 1");
  if (n <= k + 1) throw std::invalid_argument("too few points for the neighbor count");
  if (n < 2 * (d + 1)) throw std::invalid_argument("too few points for the dimension");
  const Eigen::MatrixXd pts = dedupe_with_jitter(samples);
  const std::vector<double> eps = knn_distances(pts, k);
  double sum_log = 0.0;
  for (double e : eps) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("sample set is degenerate: zero neighbor distance");
    }
    sum_log += std::log(e);
  }
  return digamma(n) - digamma(k) + log_unit_ball_volume(d) +
         static_cast<double>(d) / n * sum_log;
}

double conditional_divergence_J(const SampleSet& samples_xy, int x_dim, int k) {
  const int n = samples_xy.count();
  const int d = samples_xy.dim;
  if (n < 1000) throw std::invalid_argument("conditional divergence needs >= 1000 points");
  if (x_dim < 1 || x_dim >= d) {
    throw std::invalid_argument("x block must be a proper prefix of the columns");
  }
  const int y_dim = d - x_dim;

  // Moment-matched Gaussian: h(X_G|Y_G) from the Schur complement.
  const Eigen::RowVectorXd mean = samples_xy.points.colwise().mean();
  const Eigen::MatrixXd centered = samples_xy.points.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1);
  const Eigen::MatrixXd cyy = cov.bottomRightCorner(y_dim, y_dim);
  const Eigen::MatrixXd cxy = cov.topRightCorner(x_dim, y_dim);
  const Eigen::LDLT<Eigen::MatrixXd> yy_ldlt(cyy);
  if (yy_ldlt.info() != Eigen::Success || yy_ldlt.vectorD().minCoeff() <= 0.0) {
    throw NumericalError("fitted covariance is singular");
  }
  const Eigen::MatrixXd schur =
      cov.topLeftCorner(x_dim, x_dim) - cxy * yy_ldlt.solve(cxy.transpose());
  const Eigen::LDLT<Eigen::MatrixXd> schur_ldlt(schur);
  if (schur_ldlt.info() != Eigen::Success || schur_ldlt.vectorD().minCoeff() <= 0.0) {
    throw NumericalError("fitted covariance is singular");
  }
  double logdet = 0.0;
  for (int i = 0; i < x_dim; ++i) logdet += std::log(schur_ldlt.vectorD()(i));
  const double h_gauss =
      0.5 * (x_dim * std::log(2.0 * std::numbers::pi * std::numbers::e) + logdet);

  // Sample estimate: h(X|Y) = h(X,Y) - h(Y).
  const double h_joint = knn_entropy(samples_xy, k);
  const double h_y = knn_entropy_rows(samples_xy.points.rightCols(y_dim),
                                      samples_xy.seed ^ 0x243f6a8885a308d3ull, k);
  return h_gauss - (h_joint - h_y);
}

GaussianityCheck noise_gaussianity_check(
    const LinearGaussianModel& model, const SourceSpec& source, int kept,
    int count, std::uint64_t seed,
    const std::optional<SourceSpec>& noise_source, int k) {
  const int n_dim = model.dim();
  if (source.output_dim() != n_dim) {
    throw std::invalid_argument("source dimension does not match the model");
  }
  if (count < 1000) throw std::invalid_argument("check needs >= 1000 samples");
  const int dropped = n_dim - kept;

  const SampleSet signal = sample_source(source, count, seed);
  SampleSet noise;
  if (noise_source) {
    if (noise_source->output_dim() != n_dim) {
      throw std::invalid_argument("noise source dimension does not match the model");
    }
    noise = sample_source(*noise_source, count, seed ^ 0x452821e638d01377ull);
  } else {
    noise = sample_source(
        SourceSpec::gaussian(Eigen::VectorXd::Zero(n_dim), model.noise_cov()),
        count, seed ^ 0x452821e638d01377ull);
  }

  const PcaDecomposition dec = pca_decompose(model.obs_cov(), kept);
  const Eigen::MatrixXd obs = signal.points + noise.points;
  const Eigen::MatrixXd output_rot = obs * dec.rotation;
  const Eigen::MatrixXd noise_rot = noise.points * dec.rotation;

  // Column layout for J(A_c | A_M): dropped block first, kept block after.
  auto blocks = [&](const Eigen::MatrixXd& rot) {
    Eigen::MatrixXd m(rot.rows(), n_dim);
    m.leftCols(dropped) = rot.rightCols(dropped);
    m.rightCols(kept) = rot.leftCols(kept);
    return m;
  };
  const Eigen::MatrixXd output_blocks = blocks(output_rot);
  const Eigen::MatrixXd noise_blocks = blocks(noise_rot);

  auto j_of = [&](const Eigen::MatrixXd& rows, std::uint64_t salt) {
    SampleSet s{n_dim, rows, seed ^ salt};
    return conditional_divergence_J(s, dropped, k);
  };
  GaussianityCheck out;
  out.j_output = j_of(output_blocks, 0x13198a2e03707344ull);
  out.j_noise = j_of(noise_blocks, 0xa4093822299f31d0ull);

  // Paired bootstrap of the difference; resample seeds advance by one.
  std::vector<double> diffs;
  diffs.reserve(kBootstrapResamples);
  for (int r = 0; r < kBootstrapResamples; ++r) {
    Rng rng(seed + 1 + static_cast<std::uint64_t>(r));
    Eigen::MatrixXd out_rs(count, n_dim), noise_rs(count, n_dim);
    for (int i = 0; i < count; ++i) {
      const int pick = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(count));
      out_rs.row(i) = output_blocks.row(pick);
      noise_rs.row(i) = noise_blocks.row(pick);
    }
    const double jo = j_of(out_rs, 0x9216d5d98979fb1bull + static_cast<std::uint64_t>(r));
    const double jn = j_of(noise_rs, 0x3f84d5b5b5470917ull + static_cast<std::uint64_t>(r));
    diffs.push_back(jo - jn);
  }
  double mean_diff = 0.0;
  for (double v : diffs) mean_diff += v;
  mean_diff /= static_cast<double>(diffs.size());
  double var = 0.0;
  for (double v : diffs) var += (v - mean_diff) * (v - mean_diff);
  var /= static_cast<double>(diffs.size() - 1);
  out.std_error = std::sqrt(var);

  // Decisive only beyond twice the standard error; ties count as satisfied.
  out.satisfied = (out.j_output - out.j_noise) >= -2.0 * out.std_error;
  return out;
}

std::vector<double> refined_partition_loss(const JointDistribution& joint_sx,
                                           const DeterministicMap& g,
                                           const std::vector<int>& resolutions) {
  if (joint_sx.num_variables() != 2) {
    throw std::invalid_argument("refined_partition_loss expects a joint over (S, X)");
  }
  if (resolutions.empty()) throw std::invalid_argument("resolution list is empty");
  for (size_t i = 0; i < resolutions.size(); ++i) {
    if (resolutions[i] < 2) {
      throw std::invalid_argument("partition resolutions must be >= 2");
    }
    if (i > 0 && resolutions[i] <= resolutions[i - 1]) {
      throw std::invalid_argument("partition resolutions must be strictly increasing");
    }
  }
  const int ns = joint_sx.size(0);
  if (g.domain_size != joint_sx.size(1)) {
    throw std::invalid_argument("map domain does not match X alphabet");
  }
  std::vector<double> marginal_s(static_cast<size_t>(ns), 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int x = 0; x < joint_sx.size(1); ++x) {
      marginal_s[static_cast<size_t>(s)] += joint_sx.at(s, x);
    }
  }
  std::vector<double> results;
  results.reserve(resolutions.size());
  const JointDistribution joint_sy = push_map(joint_sx, 1, g);
  for (int res : resolutions) {
    // Equal-mass groups by the midpoint of each cell's cumulative mass;
    // dyadic chains of resolutions give exactly nested partitions.
    std::vector<int> group(static_cast<size_t>(ns), 0);
    double cum = 0.0;
    int max_group = 0;
    for (int s = 0; s < ns; ++s) {
      const double mid = cum + 0.5 * marginal_s[static_cast<size_t>(s)];
      cum += marginal_s[static_cast<size_t>(s)];
      int gidx = std::min(res - 1, static_cast<int>(std::floor(mid * res)));
      group[static_cast<size_t>(s)] = gidx;
      max_group = std::max(max_group, gidx);
    }
    const DeterministicMap partition(ns, max_group + 1, std::move(group));
    const double i_sx = mutual_information(push_map(joint_sx, 0, partition));
    const double i_sy = mutual_information(push_map(joint_sy, 0, partition));
    results.push_back(i_sx - i_sy);
  }
  return results;
}

}  // namespace relinfo
