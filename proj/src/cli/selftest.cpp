#include "cli/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "relinfo/channel.hpp"
#include "relinfo/clustering.hpp"
#include "relinfo/discrete.hpp"
#include "relinfo/estimators.hpp"
#include "relinfo/pca.hpp"

namespace relinfo::cli {

namespace {

using relinfo::Rng;

std::vector<double> dirichlet_flat(Rng& rng, int cells) {
  std::vector<double> mass(static_cast<size_t>(cells));
  long double total = 0.0L;
  for (double& m : mass) {
    double u = rng.uniform01();
    if (u <= 0.0) u = 0x1.0p-53;
    m = -std::log(u);
    total += m;
  }
  for (double& m : mass) m = static_cast<double>(m / total);
  return mass;
}

int rand_size(Rng& rng) {
  return 2 + static_cast<int>(rng.next_u64() % 4);  // {2..5}
}

relinfo::DeterministicMap random_map(Rng& rng, int domain, int codomain) {
  std::vector<int> img(static_cast<size_t>(domain));
  for (int& y : img) y = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(codomain));
  return relinfo::DeterministicMap(domain, codomain, std::move(img));
}

// Conditional-slice route for I(A;B|C), independent of the direct formula.
double cmi_by_slices(const relinfo::JointDistribution& joint) {
  const int na = joint.size(0), nb = joint.size(1), nc = joint.size(2);
  double cmi = 0.0;
  for (int c = 0; c < nc; ++c) {
    double pc = 0.0;
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) pc += joint.at(a, b, c);
    }
    if (pc <= 0.0) continue;
    std::vector<double> slice(static_cast<size_t>(na * nb));
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) {
        slice[static_cast<size_t>(a * nb + b)] = joint.at(a, b, c) / pc;
      }
    }
    const relinfo::JointDistribution cond({{"A", na}, {"B", nb}}, std::move(slice));
    cmi += pc * relinfo::mutual_information(cond);
  }
  return cmi;
}

struct Check {
  double max_violation = 0.0;
  void record(double violation) { max_violation = std::max(max_violation, violation); }
};

Eigen::MatrixXd random_psd(Rng& rng, int n, int rank, double ridge) {
  Eigen::MatrixXd b(n, rank);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < rank; ++j) b(i, j) = rng.normal();
  }
  Eigen::MatrixXd m = b * b.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
  return 0.5 * (m + m.transpose());
}

}  // namespace

bool run_selftest(int instances, std::vector<SelfTestRow>& rows) {
  rows.clear();
  Rng rng(20240901u);

  // Discrete loss properties plus the two conditional-information routes.
  {
    Check nonneg, upper, total_bound, cascade, cmi_match;
    for (int it = 0; it < instances; ++it) {
      const int ns = rand_size(rng), nx = rand_size(rng);
      const relinfo::JointDistribution joint({{"S", ns}, {"X", nx}},
                                             dirichlet_flat(rng, ns * nx));
      const int ny = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(nx));
      const auto g = random_map(rng, nx, ny);
      const auto lr = relinfo::loss_report(joint, g);
      nonneg.record(-lr.relevant_loss);
      const double mi = relinfo::mutual_information(joint);
      const double hs = relinfo::entropy(joint.marginal({0}));
      upper.record(lr.relevant_loss - std::min(mi, hs));
      total_bound.record(lr.relevant_loss - lr.total_loss);

      const int nz = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(ny));
      const auto h = random_map(rng, ny, nz);
      const auto lr_total = relinfo::loss_report(joint, relinfo::compose(g, h));
      const auto lr_second = relinfo::loss_report(relinfo::push_map(joint, 1, g), h);
      cascade.record(std::fabs(lr_total.relevant_loss -
                               (lr.relevant_loss + lr_second.relevant_loss)));

      const int nc = rand_size(rng);
      const relinfo::JointDistribution triple({{"A", ns}, {"B", nx}, {"C", nc}},
                                              dirichlet_flat(rng, ns * nx * nc));
      cmi_match.record(std::fabs(relinfo::conditional_mutual_information(triple) -
                                 cmi_by_slices(triple)));
    }
    rows.push_back({"loss_nonnegative", instances, nonneg.max_violation,
                    nonneg.max_violation <= 1e-12});
    rows.push_back({"loss_upper_bounds", instances, upper.max_violation,
                    upper.max_violation <= 1e-9});
    rows.push_back({"relevant_within_total", instances, total_bound.max_violation,
                    total_bound.max_violation <= 1e-9});
    rows.push_back({"cascade_additivity", instances, cascade.max_violation,
                    cascade.max_violation <= 1e-9});
    rows.push_back({"cmi_two_routes", instances, cmi_match.max_violation,
                    cmi_match.max_violation <= 1e-12});
  }

  // Markov-chain ordering of relevant losses.
  {
    Check dpi;
    const int chains = std::max(instances / 2, 10);
    for (int it = 0; it < chains; ++it) {
      const int nv = rand_size(rng), nw = rand_size(rng), nx = rand_size(rng);
      const auto pv = dirichlet_flat(rng, nv);
      std::vector<std::vector<double>> pwv, pxw;
      for (int v = 0; v < nv; ++v) pwv.push_back(dirichlet_flat(rng, nw));
      for (int w = 0; w < nw; ++w) pxw.push_back(dirichlet_flat(rng, nx));
      std::vector<double> vwx(static_cast<size_t>(nv * nw * nx));
      for (int v = 0; v < nv; ++v) {
        for (int w = 0; w < nw; ++w) {
          for (int x = 0; x < nx; ++x) {
            vwx[static_cast<size_t>((v * nw + w) * nx + x)] =
                pv[static_cast<size_t>(v)] * pwv[static_cast<size_t>(v)][static_cast<size_t>(w)] *
                pxw[static_cast<size_t>(w)][static_cast<size_t>(x)];
          }
        }
      }
      const relinfo::JointDistribution chain({{"V", nv}, {"W", nw}, {"X", nx}},
                                             std::move(vwx));
      const int ny = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(nx));
      const auto g = random_map(rng, nx, ny);
      const auto loss_w = relinfo::loss_report(chain.marginal({1, 2}), g);
      const auto loss_v = relinfo::loss_report(chain.marginal({0, 2}), g);
      dpi.record(loss_v.relevant_loss - loss_w.relevant_loss);
    }
    rows.push_back({"markov_chain_ordering", chains, dpi.max_violation,
                    dpi.max_violation <= 1e-9});
  }

  // Gaussian PCA: loss within bounds, eigenvalue inequalities.
  {
    Check loss_nonneg, thm_bounds, interlace, weyl, spherical_zero;
    const int models = std::max(instances / 4, 10);
    for (int it = 0; it < models; ++it) {
      const int n = 3 + static_cast<int>(rng.next_u64() % 5);
      const int kept = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
      const relinfo::LinearGaussianModel model(random_psd(rng, n, n, 0.0),
                                               random_psd(rng, n, n, 0.05));
      const double loss = relinfo::gaussian_relevant_loss(model, kept);
      loss_nonneg.record(-loss - 1e-10);

      const auto dec = relinfo::pca_decompose(model.obs_cov(), kept);
      const Eigen::MatrixXd noise_rot =
          dec.rotation.transpose() * model.noise_cov() * dec.rotation;
      const auto mu = relinfo::jacobi_eigen(model.noise_cov()).values;
      const auto mu_kept =
          relinfo::jacobi_eigen(noise_rot.topLeftCorner(kept, kept)).values;
      for (int i = 0; i < kept; ++i) {
        interlace.record(mu_kept(i) - mu(i));
        interlace.record(mu(i + n - kept) - mu_kept(i));
      }
      const auto nu = relinfo::jacobi_eigen(model.signal_cov()).values;
      for (int i = 0; i < n; ++i) {
        weyl.record(dec.eigenvalues(i) - (nu(i) + mu(0)));
      }

      const int rank = std::max(1, kept - 1);
      const relinfo::LinearGaussianModel low_rank(random_psd(rng, n, rank, 0.0),
                                                  random_psd(rng, n, n, 0.05));
      thm_bounds.record(relinfo::gaussian_relevant_loss(low_rank, kept) -
                        relinfo::eigen_bound(low_rank, kept));

      const double mu_iso = 0.3 + rng.uniform01();
      const relinfo::LinearGaussianModel spherical(
          random_psd(rng, n, rank, 0.0),
          mu_iso * Eigen::MatrixXd::Identity(n, n));
      thm_bounds.record(relinfo::gaussian_relevant_loss(spherical, kept) -
                        relinfo::iid_gaussian_bound(spherical, kept));
      spherical_zero.record(std::fabs(relinfo::gaussian_relevant_loss(spherical, kept)));
    }
    rows.push_back({"pca_loss_nonnegative", models, loss_nonneg.max_violation,
                    loss_nonneg.max_violation <= 0.0});
    rows.push_back({"pca_loss_within_bounds", models, thm_bounds.max_violation,
                    thm_bounds.max_violation <= 1e-9});
    rows.push_back({"noise_eigen_interlacing", models, interlace.max_violation,
                    interlace.max_violation <= 1e-9});
    rows.push_back({"weyl_inequality", models, weyl.max_violation,
                    weyl.max_violation <= 1e-9});
    rows.push_back({"spherical_noise_zero_loss", models, spherical_zero.max_violation,
                    spherical_zero.max_violation <= 1e-8});
  }

  // Channel closed forms at a = 2.
  {
    const auto forms = relinfo::uniform_closed_forms(2.0);
    const auto ch = relinfo::AdditiveChannel::antipodal(relinfo::NoiseDensity::uniform(2.0));
    double v = 0.0;
    v = std::max(v, std::fabs(forms.input_mi - relinfo::input_mutual_information(ch)));
    v = std::max(v, std::fabs(forms.sign_loss -
                              relinfo::quantizer_relevant_loss(ch, relinfo::Quantizer({0.0}))));
    v = std::max(v, std::fabs(relinfo::quantizer_relevant_loss(
                       ch, relinfo::Quantizer({-1.0, 1.0}))));
    rows.push_back({"channel_closed_forms", 1, v, v <= 1e-9});
  }

  // Greedy merges match the exhaustive best pair at small sizes.
  {
    Check greedy;
    const int joints = std::max(instances / 10, 5);
    for (int it = 0; it < joints; ++it) {
      const int ns = rand_size(rng);
      const int nx = 3 + static_cast<int>(rng.next_u64() % 3);
      const relinfo::JointDistribution joint({{"S", ns}, {"X", nx}},
                                             dirichlet_flat(rng, ns * nx));
      const auto result = relinfo::agglomerative_enhance(
          joint, relinfo::mutual_information(joint) + 1.0);
      greedy.record(result.clustering.num_clusters() == 1 ? 0.0 : 1.0);
      for (const auto& step : result.trace) greedy.record(-step.increment - 1e-12);
    }
    rows.push_back({"greedy_merges_complete", joints, greedy.max_violation,
                    greedy.max_violation <= 0.0});
  }

  return std::all_of(rows.begin(), rows.end(),
                     [](const SelfTestRow& r) { return r.pass; });
}

}  // namespace relinfo::cli
