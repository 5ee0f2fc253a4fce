#pragma once

// Shared generators and independent oracles for the test suites. The oracles
// deliberately re-derive quantities from raw tensors with their own loops so
// they do not share code with the library paths they check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "relinfo/discrete.hpp"

namespace testsupport {

class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * uniform01());
  }

 private:
  std::mt19937_64 eng_;
};

// Dirichlet(1,...,1) mass: normalized unit exponentials.
inline std::vector<double> dirichlet_mass(TestRng& rng, int cells) {
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

inline relinfo::JointDistribution random_joint2(TestRng& rng, int ns, int nx) {
  return relinfo::JointDistribution({{"S", ns}, {"X", nx}},
                                    dirichlet_mass(rng, ns * nx));
}

inline relinfo::JointDistribution random_joint3(TestRng& rng, int na, int nb,
                                                int nc) {
  return relinfo::JointDistribution({{"A", na}, {"B", nb}, {"C", nc}},
                                    dirichlet_mass(rng, na * nb * nc));
}

inline relinfo::DeterministicMap random_map(TestRng& rng, int domain,
                                            int codomain) {
  std::vector<int> img(static_cast<size_t>(domain));
  for (int& y : img) y = rng.uniform_int(0, codomain - 1);
  return relinfo::DeterministicMap(domain, codomain, std::move(img));
}

// A random surjective map (every codomain symbol hit at least once).
inline relinfo::DeterministicMap random_surjection(TestRng& rng, int domain,
                                                   int codomain) {
  std::vector<int> img(static_cast<size_t>(domain));
  for (int i = 0; i < codomain; ++i) img[static_cast<size_t>(i)] = i;
  for (int i = codomain; i < domain; ++i) {
    img[static_cast<size_t>(i)] = rng.uniform_int(0, codomain - 1);
  }
  for (int i = domain - 1; i > 0; --i) {
    std::swap(img[static_cast<size_t>(i)],
              img[static_cast<size_t>(rng.uniform_int(0, i))]);
  }
  return relinfo::DeterministicMap(domain, codomain, std::move(img));
}

inline double oracle_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

// Brute-force I(A;B|C) as the slice average sum_c p(c) I(A;B|C=c).
inline double oracle_cmi(const relinfo::JointDistribution& joint) {
  const int na = joint.size(0), nb = joint.size(1), nc = joint.size(2);
  double cmi = 0.0;
  for (int c = 0; c < nc; ++c) {
    double pc = 0.0;
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) pc += joint.at(a, b, c);
    }
    if (pc <= 0.0) continue;
    std::vector<double> pa(static_cast<size_t>(na), 0.0), pb(static_cast<size_t>(nb), 0.0);
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) {
        pa[static_cast<size_t>(a)] += joint.at(a, b, c) / pc;
        pb[static_cast<size_t>(b)] += joint.at(a, b, c) / pc;
      }
    }
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) {
        const double pab = joint.at(a, b, c) / pc;
        if (pab > 0.0) {
          cmi += pc * pab *
                 std::log2(pab / (pa[static_cast<size_t>(a)] * pb[static_cast<size_t>(b)]));
        }
      }
    }
  }
  return cmi;
}

// Fine-grid trapezoid differential entropy (bits) of a density callable.
template <typename Density>
double oracle_trapezoid_entropy_bits(const Density& f, double lo, double hi,
                                     int cells) {
  auto integrand = [&f](double x) {
    const double v = f(x);
    return v > 0.0 ? -v * std::log2(v) : 0.0;
  };
  const double h = (hi - lo) / cells;
  double sum = 0.5 * (integrand(lo) + integrand(hi));
  for (int i = 1; i < cells; ++i) sum += integrand(lo + i * h);
  return sum * h;
}

inline Eigen::MatrixXd random_psd(TestRng& rng, int n, int rank, double ridge) {
  Eigen::MatrixXd b(n, rank);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < rank; ++j) b(i, j) = rng.normal();
  }
  Eigen::MatrixXd m = b * b.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
  return 0.5 * (m + m.transpose());
}

inline Eigen::MatrixXd random_orthogonal(TestRng& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ();
}

}  // namespace testsupport
