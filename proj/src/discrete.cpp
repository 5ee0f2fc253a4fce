#include "relinfo/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "relinfo/errors.hpp"

namespace relinfo {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kSplitTol = 1e-9;

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h -= xlog2x(v);
  return h;
}

}  // namespace

JointDistribution::JointDistribution(std::vector<Variable> variables,
                                     std::vector<double> mass)
    : vars_(std::move(variables)), mass_(std::move(mass)) {
  if (vars_.empty() || vars_.size() > 3) {
    throw std::invalid_argument("joint distribution needs 1 to 3 variables");
  }
  size_t cells = 1;
  for (const auto& v : vars_) {
    if (v.size < 1) throw std::invalid_argument("alphabet sizes must be >= 1");
    cells *= static_cast<size_t>(v.size);
  }
  if (mass_.size() != cells) {
    throw std::invalid_argument("mass tensor does not match alphabet sizes");
  }
  long double total = 0.0L;
  for (double v : mass_) {
    if (!(v >= 0.0)) throw std::invalid_argument("negative probability mass");
    total += v;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kMassTol) {
    throw std::invalid_argument("probability mass does not sum to 1");
  }
  strides_.assign(vars_.size(), 1);
  for (int axis = static_cast<int>(vars_.size()) - 2; axis >= 0; --axis) {
    strides_[static_cast<size_t>(axis)] =
        strides_[static_cast<size_t>(axis) + 1] * vars_[static_cast<size_t>(axis) + 1].size;
  }
}

double JointDistribution::at(int i, int j) const {
  return mass_[static_cast<size_t>(i * strides_[0] + j)];
}

double JointDistribution::at(int i, int j, int k) const {
  return mass_[static_cast<size_t>(i * strides_[0] + j * strides_[1] + k)];
}

JointDistribution JointDistribution::marginal(
    const std::vector<int>& keep_axes) const {
  if (keep_axes.empty()) throw std::invalid_argument("no axes to keep");
  std::vector<Variable> out_vars;
  std::vector<int> out_strides;
  int out_cells = 1;
  for (int axis : keep_axes) {
    if (axis < 0 || axis >= num_variables()) {
      throw std::invalid_argument("marginal axis out of range");
    }
    out_vars.push_back(vars_[static_cast<size_t>(axis)]);
    out_cells *= out_vars.back().size;
  }
  out_strides.assign(keep_axes.size(), 1);
  for (int a = static_cast<int>(keep_axes.size()) - 2; a >= 0; --a) {
    out_strides[static_cast<size_t>(a)] =
        out_strides[static_cast<size_t>(a) + 1] * out_vars[static_cast<size_t>(a) + 1].size;
  }
  std::vector<double> out(static_cast<size_t>(out_cells), 0.0);
  std::vector<int> idx(vars_.size(), 0);
  for (size_t flat = 0; flat < mass_.size(); ++flat) {
    int out_flat = 0;
    for (size_t a = 0; a < keep_axes.size(); ++a) {
      out_flat += idx[static_cast<size_t>(keep_axes[a])] * out_strides[a];
    }
    out[static_cast<size_t>(out_flat)] += mass_[flat];
    for (int a = static_cast<int>(vars_.size()) - 1; a >= 0; --a) {
      if (++idx[static_cast<size_t>(a)] < vars_[static_cast<size_t>(a)].size) break;
      idx[static_cast<size_t>(a)] = 0;
    }
  }
  return JointDistribution(std::move(out_vars), std::move(out));
}

DeterministicMap::DeterministicMap(int domain, int codomain,
                                   std::vector<int> img)
    : domain_size(domain), codomain_size(codomain), image(std::move(img)) {
  if (domain_size < 1 || codomain_size < 1) {
    throw std::invalid_argument("map domain/codomain must be nonempty");
  }
  if (image.size() != static_cast<size_t>(domain_size)) {
    throw std::invalid_argument("map image is not total on the domain");
  }
  for (int y : image) {
    if (y < 0 || y >= codomain_size) {
      throw std::invalid_argument("map image entry outside codomain");
    }
  }
}

DeterministicMap DeterministicMap::identity(int n) {
  std::vector<int> img(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) img[static_cast<size_t>(i)] = i;
  return DeterministicMap(n, n, std::move(img));
}

DeterministicMap DeterministicMap::constant(int n, int value, int codomain) {
  return DeterministicMap(n, codomain,
                          std::vector<int>(static_cast<size_t>(n), value));
}

DeterministicMap compose(const DeterministicMap& first,
                         const DeterministicMap& then) {
  if (first.codomain_size != then.domain_size) {
    throw std::invalid_argument("composed maps have mismatched alphabets");
  }
  std::vector<int> img(static_cast<size_t>(first.domain_size));
  for (int x = 0; x < first.domain_size; ++x) {
    img[static_cast<size_t>(x)] = then(first(x));
  }
  return DeterministicMap(first.domain_size, then.codomain_size, std::move(img));
}

double entropy(const JointDistribution& dist) {
  if (dist.num_variables() != 1) {
    throw std::invalid_argument("entropy expects a single-variable tensor");
  }
  return entropy_of(dist.mass());
}

double joint_entropy(const JointDistribution& dist) {
  return entropy_of(dist.mass());
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binary_entropy needs p in [0, 1]");
  }
  return -xlog2x(p) - xlog2x(1.0 - p);
}

double mutual_information(const JointDistribution& joint) {
  if (joint.num_variables() != 2) {
    throw std::invalid_argument("mutual_information expects two variables");
  }
  const int na = joint.size(0), nb = joint.size(1);
  std::vector<double> pa(static_cast<size_t>(na), 0.0);
  std::vector<double> pb(static_cast<size_t>(nb), 0.0);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      pa[static_cast<size_t>(i)] += joint.at(i, j);
      pb[static_cast<size_t>(j)] += joint.at(i, j);
    }
  }
  double mi = 0.0;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const double p = joint.at(i, j);
      if (p > 0.0) {
        mi += p * std::log2(p / (pa[static_cast<size_t>(i)] * pb[static_cast<size_t>(j)]));
      }
    }
  }
  return std::max(mi, 0.0);
}

double conditional_mutual_information(const JointDistribution& joint, int a,
                                      int b, int given) {
  if (joint.num_variables() != 3) {
    throw std::invalid_argument(
        "conditional_mutual_information expects three variables");
  }
  if (a == b || a == given || b == given || a < 0 || b < 0 || given < 0 ||
      a > 2 || b > 2 || given > 2) {
    throw std::invalid_argument("axis selection must be a permutation of 0,1,2");
  }
  const JointDistribution pac = joint.marginal({a, given});
  const JointDistribution pbc = joint.marginal({b, given});
  const JointDistribution pc = joint.marginal({given});
  const int na = joint.size(a), nb = joint.size(b), nc = joint.size(given);
  double cmi = 0.0;
  std::vector<int> idx(3, 0);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      for (int c = 0; c < nc; ++c) {
        idx[static_cast<size_t>(a)] = i;
        idx[static_cast<size_t>(b)] = j;
        idx[static_cast<size_t>(given)] = c;
        const double p = joint.at(idx[0], idx[1], idx[2]);
        if (p > 0.0) {
          cmi += p * std::log2(p * pc.at(c) / (pac.at(i, c) * pbc.at(j, c)));
        }
      }
    }
  }
  return std::max(cmi, 0.0);
}

LossReport loss_report(const JointDistribution& joint_sx,
                       const DeterministicMap& g) {
  if (joint_sx.num_variables() != 2) {
    throw std::invalid_argument("loss_report expects a joint over (S, X)");
  }
  const int ns = joint_sx.size(0), nx = joint_sx.size(1);
  if (g.domain_size != nx) {
    throw std::invalid_argument("map domain does not match X alphabet");
  }
  const int ny = g.codomain_size;
  std::vector<double> px(static_cast<size_t>(nx), 0.0);
  std::vector<double> py(static_cast<size_t>(ny), 0.0);
  std::vector<double> ps(static_cast<size_t>(ns), 0.0);
  std::vector<double> psy(static_cast<size_t>(ns * ny), 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int x = 0; x < nx; ++x) {
      const double p = joint_sx.at(s, x);
      px[static_cast<size_t>(x)] += p;
      ps[static_cast<size_t>(s)] += p;
      psy[static_cast<size_t>(s * ny + g(x))] += p;
    }
  }
  for (int x = 0; x < nx; ++x) py[static_cast<size_t>(g(x))] += px[static_cast<size_t>(x)];

  // Y = g(X) is deterministic, so H(X|Y) = H(X) - H(Y).
  const double total = entropy_of(px) - entropy_of(py);

  // I(X;S|Y) summed directly over the (s, x) cells; y = g(x) carries all of
  // the conditioning.
  double relevant = 0.0;
  for (int s = 0; s < ns; ++s) {
    for (int x = 0; x < nx; ++x) {
      const double p = joint_sx.at(s, x);
      if (p > 0.0) {
        const int y = g(x);
        relevant += p * std::log2(p * py[static_cast<size_t>(y)] /
                                  (px[static_cast<size_t>(x)] *
                                   psy[static_cast<size_t>(s * ny + y)]));
      }
    }
  }
  const double irrelevant = total - relevant;

  // Independent route for the split identity: H(X|Y,S) = H(S,X) - H(S,Y),
  // again using that Y is a function of X.
  const double h_x_given_ys =
      entropy_of(joint_sx.mass()) - entropy_of(psy);
  if (std::fabs(irrelevant - h_x_given_ys) > kSplitTol) {
    throw NumericalError("loss split failed its conditional-entropy cross-check");
  }
  if (total < -kMassTol || relevant < -kMassTol || irrelevant < -kMassTol) {
    throw NumericalError("loss report produced a negative component");
  }
  return LossReport{total, relevant, irrelevant};
}

JointDistribution push_map(const JointDistribution& joint, int axis,
                           const DeterministicMap& g) {
  if (axis < 0 || axis >= joint.num_variables()) {
    throw std::invalid_argument("push_map axis out of range");
  }
  if (g.domain_size != joint.size(axis)) {
    throw std::invalid_argument("map domain does not match the chosen variable");
  }
  std::vector<Variable> out_vars = joint.variables();
  out_vars[static_cast<size_t>(axis)].size = g.codomain_size;
  int out_cells = 1;
  for (const auto& v : out_vars) out_cells *= v.size;
  std::vector<int> out_strides(out_vars.size(), 1);
  for (int a = static_cast<int>(out_vars.size()) - 2; a >= 0; --a) {
    out_strides[static_cast<size_t>(a)] =
        out_strides[static_cast<size_t>(a) + 1] * out_vars[static_cast<size_t>(a) + 1].size;
  }
  std::vector<double> out(static_cast<size_t>(out_cells), 0.0);
  std::vector<int> idx(static_cast<size_t>(joint.num_variables()), 0);
  const auto& mass = joint.mass();
  for (size_t flat = 0; flat < mass.size(); ++flat) {
    int out_flat = 0;
    for (int a = 0; a < joint.num_variables(); ++a) {
      const int coord = (a == axis) ? g(idx[static_cast<size_t>(a)]) : idx[static_cast<size_t>(a)];
      out_flat += coord * out_strides[static_cast<size_t>(a)];
    }
    out[static_cast<size_t>(out_flat)] += mass[flat];
    for (int a = joint.num_variables() - 1; a >= 0; --a) {
      if (++idx[static_cast<size_t>(a)] < joint.size(a)) break;
      idx[static_cast<size_t>(a)] = 0;
    }
  }
  return JointDistribution(std::move(out_vars), std::move(out));
}

LossReport loss_report(const SparseJoint& joint_rx, const DeterministicMap& g) {
  if (joint_rx.r_size < 1 || joint_rx.x_size < 1) {
    throw std::invalid_argument("sparse joint has empty alphabets");
  }
  if (g.domain_size != joint_rx.x_size) {
    throw std::invalid_argument("map domain does not match X alphabet");
  }
  const int ny = g.codomain_size;

  // Aggregate duplicate (r, x) atoms, then process in key order so every sum
  // has a fixed, reproducible order.
  std::unordered_map<std::uint64_t, double> cells;
  cells.reserve(joint_rx.atoms.size() * 2);
  long double total_mass = 0.0L;
  for (const auto& atom : joint_rx.atoms) {
    if (atom.r < 0 || atom.r >= joint_rx.r_size || atom.x < 0 ||
        atom.x >= joint_rx.x_size || !(atom.mass >= 0.0)) {
      throw std::invalid_argument("sparse joint atom out of range");
    }
    const std::uint64_t key =
        (static_cast<std::uint64_t>(atom.r) << 32) | static_cast<std::uint32_t>(atom.x);
    cells[key] += atom.mass;
    total_mass += atom.mass;
  }
  if (std::fabs(static_cast<double>(total_mass) - 1.0) > kMassTol) {
    throw std::invalid_argument("sparse joint mass does not sum to 1");
  }
  std::vector<std::pair<std::uint64_t, double>> rx(cells.begin(), cells.end());
  std::sort(rx.begin(), rx.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> px(static_cast<size_t>(joint_rx.x_size), 0.0);
  std::vector<double> py(static_cast<size_t>(ny), 0.0);
  std::unordered_map<std::uint64_t, double> pry;
  pry.reserve(rx.size() * 2);
  for (const auto& [key, p] : rx) {
    const int r = static_cast<int>(key >> 32);
    const int x = static_cast<int>(key & 0xffffffffu);
    px[static_cast<size_t>(x)] += p;
    pry[(static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint32_t>(g(x))] += p;
  }
  for (int x = 0; x < joint_rx.x_size; ++x) {
    py[static_cast<size_t>(g(x))] += px[static_cast<size_t>(x)];
  }

  const double total = entropy_of(px) - entropy_of(py);

  double relevant = 0.0;
  double h_rx = 0.0;
  for (const auto& [key, p] : rx) {
    if (p <= 0.0) continue;
    const int x = static_cast<int>(key & 0xffffffffu);
    const int y = g(x);
    const std::uint64_t ry_key = (key & 0xffffffff00000000ull) | static_cast<std::uint32_t>(y);
    relevant += p * std::log2(p * py[static_cast<size_t>(y)] /
                              (px[static_cast<size_t>(x)] * pry[ry_key]));
    h_rx -= xlog2x(p);
  }
  const double irrelevant = total - relevant;

  std::vector<std::pair<std::uint64_t, double>> ry(pry.begin(), pry.end());
  std::sort(ry.begin(), ry.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double h_ry = 0.0;
  for (const auto& [key, p] : ry) h_ry -= xlog2x(p);
  const double h_x_given_yr = h_rx - h_ry;
  if (std::fabs(irrelevant - h_x_given_yr) > kSplitTol) {
    throw NumericalError("loss split failed its conditional-entropy cross-check");
  }
  return LossReport{total, relevant, irrelevant};
}

}  // namespace relinfo
