#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "relinfo/discrete.hpp"
#include "relinfo/errors.hpp"
#include "test_support.hpp"

using namespace relinfo;
using testsupport::TestRng;

namespace {

JointDistribution single(const std::vector<double>& p) {
  return JointDistribution({{"X", static_cast<int>(p.size())}}, p);
}

// Joint with S = X for a given X marginal.
JointDistribution copy_joint(const std::vector<double>& px) {
  const int n = static_cast<int>(px.size());
  std::vector<double> mass(static_cast<size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) mass[static_cast<size_t>(i * n + i)] = px[static_cast<size_t>(i)];
  return JointDistribution({{"S", n}, {"X", n}}, std::move(mass));
}

}  // namespace

TEST_CASE("entropy closed forms") {
  CHECK(entropy(single({0.25, 0.25, 0.25, 0.25})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(entropy(single({1.0, 0.0, 0.0})) == doctest::Approx(0.0).epsilon(1e-12));
  // Direct summation: -(1/2)log(1/2) - 2*(1/4)log(1/4) = 1.5.
  CHECK(entropy(single({0.5, 0.25, 0.25})) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("entropy rejects multi-variable tensors") {
  TestRng rng(1);
  const auto joint = testsupport::random_joint2(rng, 2, 2);
  CHECK_THROWS_AS(entropy(joint), std::invalid_argument);
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(binary_entropy(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(binary_entropy(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781245).epsilon(1e-9));
  CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)).epsilon(1e-14));
  CHECK_THROWS_AS(binary_entropy(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy(1.1), std::invalid_argument);
}

TEST_CASE("joint distribution validation") {
  CHECK_THROWS_AS(JointDistribution({{"X", 2}}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(JointDistribution({{"X", 2}}, {1.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(JointDistribution({{"X", 3}}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(JointDistribution({{"X", 0}}, {}), std::invalid_argument);
}

TEST_CASE("mutual information basics") {
  // Product distribution: independent, so exactly zero.
  const JointDistribution prod({{"A", 2}, {"B", 3}},
                               {0.2 * 0.5, 0.3 * 0.5, 0.5 * 0.5,
                                0.2 * 0.5, 0.3 * 0.5, 0.5 * 0.5});
  CHECK(mutual_information(prod) == doctest::Approx(0.0).epsilon(1e-12));

  const JointDistribution channel({{"A", 2}, {"B", 2}}, {0.5, 0.0, 0.0, 0.5});
  CHECK(mutual_information(channel) == doctest::Approx(1.0).epsilon(1e-12));

  // Uniform input through crossover 0.25: 1 - H2(0.25).
  const double pe = 0.25;
  const JointDistribution bsc({{"S", 2}, {"Y", 2}},
                              {0.5 * (1 - pe), 0.5 * pe, 0.5 * pe, 0.5 * (1 - pe)});
  CHECK(mutual_information(bsc) == doctest::Approx(0.1887218755).epsilon(1e-9));

  CHECK_THROWS_AS(mutual_information(single({1.0})), std::invalid_argument);
}

TEST_CASE("conditional mutual information special cases") {
  TestRng rng(7);
  // C is a copy of B: conditioning on B itself gives zero.
  {
    const auto ab = testsupport::random_joint2(rng, 3, 4);
    std::vector<double> mass(3 * 4 * 4, 0.0);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 4; ++b) {
        mass[static_cast<size_t>((a * 4 + b) * 4 + b)] = ab.at(a, b);
      }
    }
    const JointDistribution joint({{"A", 3}, {"B", 4}, {"C", 4}}, std::move(mass));
    CHECK(conditional_mutual_information(joint) == doctest::Approx(0.0).epsilon(1e-12));
  }
  // Constant C: reduces to plain mutual information.
  {
    const auto ab = testsupport::random_joint2(rng, 3, 4);
    std::vector<double> mass;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 4; ++b) mass.push_back(ab.at(a, b));
    }
    const JointDistribution joint({{"A", 3}, {"B", 4}, {"C", 1}}, std::move(mass));
    CHECK(conditional_mutual_information(joint) ==
          doctest::Approx(mutual_information(ab)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(conditional_mutual_information(testsupport::random_joint2(rng, 2, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      conditional_mutual_information(testsupport::random_joint3(rng, 2, 2, 2), 0, 0, 1),
      std::invalid_argument);
}

TEST_CASE("conditional mutual information matches the brute-force oracle") {
  TestRng rng(20240902u);
  for (int it = 0; it < 200; ++it) {
    const int na = rng.uniform_int(2, 5);
    const int nb = rng.uniform_int(2, 5);
    const int nc = rng.uniform_int(2, 5);
    const auto joint = testsupport::random_joint3(rng, na, nb, nc);
    const double direct = conditional_mutual_information(joint);
    const double oracle = testsupport::oracle_cmi(joint);
    CHECK(std::fabs(direct - oracle) <= 1e-12);
  }
}

TEST_CASE("loss report closed cases") {
  TestRng rng(11);
  const auto joint = testsupport::random_joint2(rng, 3, 4);

  SUBCASE("bijective map loses nothing") {
    const auto lr = loss_report(joint, DeterministicMap::identity(4));
    CHECK(lr.total_loss == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lr.relevant_loss == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lr.irrelevant_loss == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("constant map loses everything") {
    const auto lr = loss_report(joint, DeterministicMap::constant(4));
    const auto px = joint.marginal({1});
    CHECK(lr.total_loss == doctest::Approx(entropy(px)).epsilon(1e-12));
    CHECK(lr.relevant_loss == doctest::Approx(mutual_information(joint)).epsilon(1e-12));
    // H(X|S) = H(S,X) - H(S).
    const double h_x_given_s = joint_entropy(joint) - entropy(joint.marginal({0}));
    CHECK(lr.irrelevant_loss == doctest::Approx(h_x_given_s).epsilon(1e-12));
  }
  SUBCASE("copy joint: relevant loss equals total loss") {
    TestRng rng2(12);
    const auto cj = copy_joint(testsupport::dirichlet_mass(rng2, 5));
    for (int it = 0; it < 10; ++it) {
      const auto g = testsupport::random_map(rng2, 5, rng2.uniform_int(1, 5));
      const auto lr = loss_report(cj, g);
      CHECK(std::fabs(lr.relevant_loss - lr.total_loss) <= 1e-9);
    }
  }
  SUBCASE("map and alphabet mismatch") {
    CHECK_THROWS_AS(loss_report(joint, DeterministicMap::identity(5)),
                    std::invalid_argument);
  }
}

TEST_CASE("push_map behavior") {
  TestRng rng(13);
  const auto joint = testsupport::random_joint2(rng, 3, 4);
  SUBCASE("identity keeps the distribution") {
    const auto pushed = push_map(joint, 1, DeterministicMap::identity(4));
    for (int s = 0; s < 3; ++s) {
      for (int x = 0; x < 4; ++x) {
        CHECK(pushed.at(s, x) == doctest::Approx(joint.at(s, x)).epsilon(1e-15));
      }
    }
  }
  SUBCASE("merge-all collapses to a point mass") {
    const auto pushed = push_map(joint, 1, DeterministicMap::constant(4));
    CHECK(pushed.size(1) == 1);
    const auto ps = joint.marginal({0});
    for (int s = 0; s < 3; ++s) {
      CHECK(pushed.at(s, 0) == doctest::Approx(ps.at(s)).epsilon(1e-14));
    }
  }
  SUBCASE("mod-2 on a uniform 4-symbol variable gives uniform 2 symbols") {
    const JointDistribution uniform4({{"X", 4}}, {0.25, 0.25, 0.25, 0.25});
    const auto pushed = push_map(uniform4, 0, DeterministicMap(4, 2, {0, 1, 0, 1}));
    CHECK(pushed.at(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pushed.at(1) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("mismatched map is rejected") {
    CHECK_THROWS_AS(push_map(joint, 0, DeterministicMap::identity(4)),
                    std::invalid_argument);
  }
}

TEST_CASE("loss properties on random instances") {
  TestRng rng(20240903u);
  for (int it = 0; it < 300; ++it) {
    const int ns = rng.uniform_int(2, 5);
    const int nx = rng.uniform_int(2, 5);
    const auto joint = testsupport::random_joint2(rng, ns, nx);
    const auto g = testsupport::random_map(rng, nx, rng.uniform_int(1, nx));
    const auto lr = loss_report(joint, g);

    // Non-negativity and the elementary upper bounds.
    CHECK(lr.relevant_loss >= -1e-12);
    CHECK(lr.relevant_loss <= mutual_information(joint) + 1e-9);
    CHECK(lr.relevant_loss <= entropy(joint.marginal({0})) + 1e-9);
    CHECK(lr.relevant_loss <= lr.total_loss + 1e-9);

    // Split identity against an oracle-side H(X|Y,S).
    const auto joint_sy = push_map(joint, 1, g);
    const double h_x_given_ys =
        joint_entropy(joint) - joint_entropy(joint_sy);
    CHECK(std::fabs(lr.total_loss - lr.relevant_loss - h_x_given_ys) <= 1e-9);

    // Relevant loss w.r.t. a function of S can only shrink.
    const auto f = testsupport::random_map(rng, ns, rng.uniform_int(1, ns));
    const auto lr_f = loss_report(push_map(joint, 0, f), g);
    CHECK(lr_f.relevant_loss <= lr.relevant_loss + 1e-9);

    // Cascades add up.
    const int nz = rng.uniform_int(1, g.codomain_size);
    const auto h = testsupport::random_map(rng, g.codomain_size, nz);
    const auto lr_cascade = loss_report(joint, compose(g, h));
    const auto lr_second = loss_report(joint_sy, h);
    CHECK(std::fabs(lr_cascade.relevant_loss -
                    (lr.relevant_loss + lr_second.relevant_loss)) <= 1e-9);
  }
}

TEST_CASE("relevant loss of a function of X equals H(S|Y)") {
  TestRng rng(20240904u);
  for (int it = 0; it < 50; ++it) {
    const int nx = rng.uniform_int(2, 5);
    const int ns = rng.uniform_int(1, nx);
    const auto px = testsupport::dirichlet_mass(rng, nx);
    const auto f = testsupport::random_surjection(rng, nx, ns);
    std::vector<double> mass(static_cast<size_t>(ns * nx), 0.0);
    for (int x = 0; x < nx; ++x) {
      mass[static_cast<size_t>(f(x) * nx + x)] = px[static_cast<size_t>(x)];
    }
    const JointDistribution joint({{"S", ns}, {"X", nx}}, std::move(mass));
    const auto g = testsupport::random_map(rng, nx, rng.uniform_int(1, nx));
    const auto lr = loss_report(joint, g);
    // H(S|Y) = H(S,Y) - H(Y) on the pushed joint.
    const auto joint_sy = push_map(joint, 1, g);
    const double h_s_given_y =
        joint_entropy(joint_sy) - entropy(joint_sy.marginal({1}));
    CHECK(std::fabs(lr.relevant_loss - h_s_given_y) <= 1e-9);
  }
}

TEST_CASE("markov chain ordering of relevant losses") {
  TestRng rng(20240905u);
  for (int it = 0; it < 100; ++it) {
    const int nv = rng.uniform_int(2, 5);
    const int nw = rng.uniform_int(2, 5);
    const int nx = rng.uniform_int(2, 5);
    const auto pv = testsupport::dirichlet_mass(rng, nv);
    std::vector<std::vector<double>> pwv, pxw;
    for (int v = 0; v < nv; ++v) pwv.push_back(testsupport::dirichlet_mass(rng, nw));
    for (int w = 0; w < nw; ++w) pxw.push_back(testsupport::dirichlet_mass(rng, nx));
    std::vector<double> mass(static_cast<size_t>(nv * nw * nx));
    for (int v = 0; v < nv; ++v) {
      for (int w = 0; w < nw; ++w) {
        for (int x = 0; x < nx; ++x) {
          mass[static_cast<size_t>((v * nw + w) * nx + x)] =
              pv[static_cast<size_t>(v)] *
              pwv[static_cast<size_t>(v)][static_cast<size_t>(w)] *
              pxw[static_cast<size_t>(w)][static_cast<size_t>(x)];
        }
      }
    }
    const JointDistribution chain({{"V", nv}, {"W", nw}, {"X", nx}}, std::move(mass));
    const auto g = testsupport::random_map(rng, nx, rng.uniform_int(1, nx));
    const auto loss_w = loss_report(chain.marginal({1, 2}), g);
    const auto loss_v = loss_report(chain.marginal({0, 2}), g);
    CHECK(loss_w.relevant_loss >= loss_v.relevant_loss - 1e-9);
  }
}

TEST_CASE("sparse loss report agrees with the dense path") {
  TestRng rng(20240906u);
  for (int it = 0; it < 100; ++it) {
    const int ns = rng.uniform_int(2, 5);
    const int nx = rng.uniform_int(2, 6);
    const auto joint = testsupport::random_joint2(rng, ns, nx);
    const auto g = testsupport::random_map(rng, nx, rng.uniform_int(1, nx));
    SparseJoint sparse;
    sparse.r_size = ns;
    sparse.x_size = nx;
    for (int s = 0; s < ns; ++s) {
      for (int x = 0; x < nx; ++x) {
        // Split some cells into two atoms to exercise aggregation.
        const double p = joint.at(s, x);
        if (x % 2 == 0) {
          sparse.atoms.push_back({s, x, 0.25 * p});
          sparse.atoms.push_back({s, x, 0.75 * p});
        } else {
          sparse.atoms.push_back({s, x, p});
        }
      }
    }
    const auto dense = loss_report(joint, g);
    const auto sparse_lr = loss_report(sparse, g);
    CHECK(std::fabs(dense.total_loss - sparse_lr.total_loss) <= 1e-12);
    CHECK(std::fabs(dense.relevant_loss - sparse_lr.relevant_loss) <= 1e-12);
    CHECK(std::fabs(dense.irrelevant_loss - sparse_lr.irrelevant_loss) <= 1e-12);
  }
}

TEST_CASE("base conversion helpers") {
  CHECK(bits_to_nats(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(nats_to_bits(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nats_to_bits(bits_to_nats(0.731)) == doctest::Approx(0.731).epsilon(1e-14));
}
