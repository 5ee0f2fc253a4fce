#include "relinfo/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "relinfo/errors.hpp"

namespace relinfo {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kNoisePdTol = 1e-12;
constexpr double kSignalPsdTol = 1e-10;
constexpr double kRankRelTol = 1e-8;
constexpr double kDetFloor = 1e-300;
constexpr int kMaxJacobiSweeps = 100;
constexpr int kMaxSubsetDim = 20;

void require_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  const double skew = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (skew > tol) throw std::invalid_argument("matrix is not symmetric");
}

double off_diagonal_frobenius(const Eigen::MatrixXd& m) {
  double sum = 0.0;
  for (Eigen::Index p = 0; p < m.rows(); ++p) {
    for (Eigen::Index q = 0; q < m.cols(); ++q) {
      if (p != q) sum += m(p, q) * m(p, q);
    }
  }
  return std::sqrt(sum);
}

int dominant_index(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (std::fabs(v(i)) > std::fabs(v(best))) best = i;
  }
  return best;
}

// Log-determinant of a symmetric positive definite matrix via LDLT.
// Raises NumericalError when a pivot falls below the determinant floor.
double logdet_spd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() == 0) return 0.0;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": factorization failed");
  }
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = ldlt.vectorD()(i);
    if (!(d > kDetFloor)) {
      throw NumericalError(std::string(what) + ": singular covariance block");
    }
    logdet += std::log(d);
  }
  return logdet;
}

}  // namespace

LinearGaussianModel::LinearGaussianModel(Eigen::MatrixXd signal_cov,
                                         Eigen::MatrixXd noise_cov)
    : signal_cov_(std::move(signal_cov)), noise_cov_(std::move(noise_cov)) {
  require_symmetric(signal_cov_, kSymmetryTol);
  require_symmetric(noise_cov_, kSymmetryTol);
  if (signal_cov_.rows() != noise_cov_.rows()) {
    throw std::invalid_argument("signal and noise covariances differ in size");
  }
  const SymmetricEigen noise_eig = jacobi_eigen(noise_cov_);
  if (noise_eig.values.minCoeff() <= kNoisePdTol) {
    throw std::invalid_argument("noise covariance must be positive definite");
  }
  const SymmetricEigen signal_eig = jacobi_eigen(signal_cov_);
  if (signal_eig.values.minCoeff() < -kSignalPsdTol) {
    throw std::invalid_argument("signal covariance must be positive semidefinite");
  }
}

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& symmetric) {
  require_symmetric(symmetric, kSymmetryTol * std::max(1.0, symmetric.cwiseAbs().maxCoeff()));
  const int n = static_cast<int>(symmetric.rows());
  Eigen::MatrixXd a = 0.5 * (symmetric + symmetric.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double tol = kSymmetryTol * std::max(1.0, a.norm());

  int sweep = 0;
  while (off_diagonal_frobenius(a) > tol) {
    if (++sweep > kMaxJacobiSweeps) {
      throw NumericalError("jacobi eigensolver did not converge");
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](int i, int j) { return a(i, i) > a(j, j); });

  // Within runs of (numerically) equal eigenvalues, order by the coordinate
  // index of the dominant eigenvector component.
  const double scale = std::max(1.0, std::fabs(a(order[0], order[0])));
  size_t run_start = 0;
  for (size_t i = 1; i <= order.size(); ++i) {
    const bool run_ends =
        i == order.size() ||
        std::fabs(a(order[run_start], order[run_start]) - a(order[i], order[i])) >
            1e-10 * scale;
    if (run_ends) {
      std::sort(order.begin() + static_cast<long>(run_start),
                order.begin() + static_cast<long>(i), [&v](int ci, int cj) {
                  return dominant_index(v.col(ci)) < dominant_index(v.col(cj));
                });
      run_start = i;
    }
  }

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    const int c = order[static_cast<size_t>(k)];
    out.values(k) = a(c, c);
    Eigen::VectorXd col = v.col(c);
    if (col(dominant_index(col)) < 0.0) col = -col;
    out.vectors.col(k) = col;
  }
  return out;
}

PcaDecomposition pca_decompose(const Eigen::MatrixXd& obs_cov, int kept) {
  const int n = static_cast<int>(obs_cov.rows());
  if (kept < 1 || kept >= n) {
    throw std::invalid_argument("kept dimension must satisfy 1 <= M < N");
  }
  const SymmetricEigen eig = jacobi_eigen(obs_cov);
  PcaDecomposition dec{eig.vectors, eig.values, kept};
  const double ortho =
      (dec.rotation.transpose() * dec.rotation - Eigen::MatrixXd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  Eigen::MatrixXd rotated = dec.rotation.transpose() * obs_cov * dec.rotation;
  rotated.diagonal().setZero();
  if (ortho > 1e-10 || rotated.cwiseAbs().maxCoeff() >
                           1e-10 * std::max(1.0, obs_cov.cwiseAbs().maxCoeff())) {
    throw NumericalError("pca rotation failed its orthogonality check");
  }
  return dec;
}

double gaussian_relevant_loss(const LinearGaussianModel& model, int kept) {
  const int n = model.dim();
  const int dropped = n - kept;
  const PcaDecomposition dec = pca_decompose(model.obs_cov(), kept);
  const Eigen::MatrixXd w = dec.rotation;

  // Conditional-entropy route: the rotated observation is diagonal, so its
  // trailing Schur complement is just the dropped eigenvalues; the rotated
  // noise needs the full Schur complement.
  double log_schur_x = 0.0;
  for (int i = kept; i < n; ++i) {
    const double lambda = dec.eigenvalues(i);
    if (!(lambda > kDetFloor)) {
      throw NumericalError("observation covariance has a singular dropped block");
    }
    log_schur_x += std::log(lambda);
  }
  for (int i = 0; i < kept; ++i) {
    if (!(dec.eigenvalues(i) > kDetFloor)) {
      throw NumericalError("observation covariance has a singular kept block");
    }
  }
  const Eigen::MatrixXd noise_rot = w.transpose() * model.noise_cov() * w;
  const Eigen::MatrixXd nm = noise_rot.topLeftCorner(kept, kept);
  const Eigen::MatrixXd nc = noise_rot.bottomRightCorner(dropped, dropped);
  const Eigen::MatrixXd ncm = noise_rot.bottomLeftCorner(dropped, kept);
  const Eigen::LDLT<Eigen::MatrixXd> nm_ldlt(nm);
  if (nm_ldlt.info() != Eigen::Success ||
      nm_ldlt.vectorD().minCoeff() <= kDetFloor) {
    throw NumericalError("rotated noise has a singular kept block");
  }
  const Eigen::MatrixXd schur_n = nc - ncm * nm_ldlt.solve(ncm.transpose());
  const double log_schur_n = logdet_spd(schur_n, "rotated noise Schur complement");
  const double loss = 0.5 * (log_schur_x - log_schur_n);

  // Independent route: I(S;X) - I(S;Y_M) from log-determinants.
  const Eigen::MatrixXd a = w.leftCols(kept).transpose();
  const double i_sx = 0.5 * (logdet_spd(model.obs_cov(), "observation covariance") -
                             logdet_spd(model.noise_cov(), "noise covariance"));
  const double i_sy =
      0.5 * (logdet_spd(a * model.obs_cov() * a.transpose(), "projected observation") -
             logdet_spd(a * model.noise_cov() * a.transpose(), "projected noise"));
  const double loss_mi = i_sx - i_sy;
  if (std::fabs(loss - loss_mi) > 1e-7 * std::max(1.0, std::fabs(loss))) {
    throw NumericalError("relevant-loss routes disagree beyond tolerance");
  }
  return loss;
}

double iid_gaussian_bound(const LinearGaussianModel& model, int kept) {
  const int n = model.dim();
  if (kept < 1 || kept >= n) {
    throw std::invalid_argument("kept dimension must satisfy 1 <= M < N");
  }
  const double mu = model.noise_cov().trace() / n;
  const double dev =
      (model.noise_cov() - mu * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    throw std::invalid_argument("noise covariance is not a scaled identity");
  }
  const SymmetricEigen eig = jacobi_eigen(model.obs_cov());
  double bound = 0.0;
  for (int i = kept; i < n; ++i) bound += std::log(eig.values(i) / mu);
  return 0.5 * bound;
}

double eigen_bound(const LinearGaussianModel& model, int kept) {
  const int n = model.dim();
  if (kept < 1 || kept >= n) {
    throw std::invalid_argument("kept dimension must satisfy 1 <= M < N");
  }
  if (effective_rank(model.signal_cov()) > kept) {
    throw std::invalid_argument("signal covariance rank exceeds the kept dimension");
  }
  const SymmetricEigen noise = jacobi_eigen(model.noise_cov());
  double bound = 0.0;
  for (int i = kept; i < n; ++i) bound += std::log(noise.values(0) / noise.values(i));
  return 0.5 * bound;
}

std::pair<std::vector<int>, double> best_coordinate_subset(
    const LinearGaussianModel& model, int kept) {
  const int n = model.dim();
  if (kept < 1 || kept >= n) {
    throw std::invalid_argument("kept dimension must satisfy 1 <= M < N");
  }
  if (n > kMaxSubsetDim) {
    throw std::invalid_argument("dimension too large for exhaustive subset search");
  }
  const double i_sx = 0.5 * (logdet_spd(model.obs_cov(), "observation covariance") -
                             logdet_spd(model.noise_cov(), "noise covariance"));

  std::vector<int> subset(static_cast<size_t>(kept));
  std::iota(subset.begin(), subset.end(), 0);
  std::vector<int> best;
  double best_loss = 0.0;
  bool have_best = false;
  const Eigen::MatrixXd obs = model.obs_cov();

  auto evaluate = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd obs_sub(kept, kept), noise_sub(kept, kept);
    for (int r = 0; r < kept; ++r) {
      for (int c = 0; c < kept; ++c) {
        obs_sub(r, c) = obs(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
        noise_sub(r, c) =
            model.noise_cov()(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
      }
    }
    const double i_sub = 0.5 * (logdet_spd(obs_sub, "subset observation") -
                                logdet_spd(noise_sub, "subset noise"));
    const double loss = i_sx - i_sub;
    if (!have_best || loss < best_loss) {
      have_best = true;
      best_loss = loss;
      best = idx;
    }
  };

  // Lexicographic enumeration, so the first minimizer wins ties.
  while (true) {
    evaluate(subset);
    int pos = kept - 1;
    while (pos >= 0 && subset[static_cast<size_t>(pos)] == n - kept + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<size_t>(pos)];
    for (int i = pos + 1; i < kept; ++i) {
      subset[static_cast<size_t>(i)] = subset[static_cast<size_t>(i - 1)] + 1;
    }
  }
  return {best, best_loss};
}

int effective_rank(const Eigen::MatrixXd& symmetric) {
  const SymmetricEigen eig = jacobi_eigen(symmetric);
  const double top = eig.values.cwiseAbs().maxCoeff();
  if (top <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > kRankRelTol * top) ++rank;
  }
  return rank;
}

}  // namespace relinfo
