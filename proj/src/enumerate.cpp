#include <algorithm>
#include <cmath>

#include "loopsoup/loopmeasure.hpp"

namespace loopsoup {

Enumeration enumerate_loops(const LatticeSpec& spec, const std::vector<Site>& killed, int max_length) {
  spec.validate();
  if (spec.site_count() > 64) throw GuardError("loop enumeration is limited to boxes with at most 64 sites");
  if (max_length > 14) throw GuardError("loop enumeration is limited to length <= 14");
  if (max_length < 0) throw ConfigError("maximum loop length must be >= 0");

  const Box box(spec);
  const DenseGreen dense = dense_green(spec, killed);
  const auto n_active = static_cast<Eigen::Index>(dense.active.size());

  // Neighbor lists over active rows (row order = box index order = lexicographic).
  std::vector<std::vector<int>> nbr(dense.active.size());
  for (Eigen::Index a = 0; a < n_active; ++a) {
    for (Eigen::Index b = 0; b < n_active; ++b) {
      if (dense.transition(a, b) > 0) nbr[a].push_back(static_cast<int>(b));
    }
  }

  Enumeration out;
  std::vector<int> walk;
  // Closed walks from `start` through rows >= start (revisits of `start`
  // included); a walk is kept when it is its own least rotation, so each loop
  // is listed once.
  auto emit = [&]() {
    std::vector<int> canon = walk;
    const int m = canonicalize_in_place(canon);
    if (canon != walk) return;
    EnumeratedLoop e;
    for (int r : walk) e.loop.sites.push_back(box.site(dense.active[r]));
    e.loop.multiplicity = m;
    e.mass = loop_mass(walk.size(), m, spec.dimension, spec.kappa);
    out.loops.push_back(std::move(e));
  };
  auto dfs = [&](auto&& self, int start) -> void {
    const int cur = walk.back();
    for (int next : nbr[cur]) {
      if (next == start && walk.size() >= 2) emit();
      if (next >= start && static_cast<int>(walk.size()) < max_length) {
        walk.push_back(next);
        self(self, start);
        walk.pop_back();
      }
    }
  };
  for (int s = 0; s < static_cast<int>(n_active); ++s) {
    walk.assign(1, s);
    dfs(dfs, s);
  }

  std::sort(out.loops.begin(), out.loops.end(), [](const EnumeratedLoop& a, const EnumeratedLoop& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.loop < b.loop;
  });
  for (const auto& e : out.loops) out.total_mass += e.mass;

  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n_active, n_active) - dense.transition;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw RuntimeError("I - P is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < n_active; ++i) out.log_det -= 2.0 * std::log(l(i, i));

  Eigen::MatrixXd power = dense.transition;
  for (int n = 1; n <= max_length; ++n) {
    if (n > 1) power = power * dense.transition;
    out.trace_sum += power.trace() / n;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense.transition, Eigen::EigenvaluesOnly);
  out.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double rho = out.spectral_radius;
  const int l1 = max_length + 1;
  out.tail_bound = static_cast<double>(n_active) * std::pow(rho, l1) / (l1 * (1.0 - rho));
  return out;
}

}  // namespace loopsoup
