#include "loopsoup/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace loopsoup {

void LatticeSpec::validate() const {
  if (dimension < 1 || dimension > kMaxBoxDimension) {
    throw ConfigError("dimension must be in [1, " + std::to_string(kMaxBoxDimension) + "]");
  }
  if (box_radius < 0) throw ConfigError("box radius must be >= 0");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ConfigError("kappa must be finite and >= 0 (kappa < 0 is unsupported)");
  }
  if (static_cast<double>(site_count()) > static_cast<double>(std::numeric_limits<SiteIndex>::max())) {
    throw GuardError("box has more sites than the 32-bit site index supports");
  }
}

std::uint64_t LatticeSpec::site_count() const {
  double n = std::pow(static_cast<double>(side()), dimension);
  if (n > 1e18) return std::numeric_limits<std::uint64_t>::max();
  std::uint64_t c = 1;
  for (int i = 0; i < dimension; ++i) c *= static_cast<std::uint64_t>(side());
  return c;
}

Box::Box(const LatticeSpec& spec) : spec_(spec) {
  spec_.validate();
  const int d = spec_.dimension;
  std::int64_t s = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    stride_[axis] = s;
    s *= spec_.side();
  }
  size_ = static_cast<std::size_t>(s);
  origin_ = static_cast<SiteIndex>((size_ - 1) / 2);
}

bool Box::contains(std::span<const int> x) const {
  for (int v : x) {
    if (v > radius() || v < -radius()) return false;
  }
  return true;
}

SiteIndex Box::index(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != dimension() || !contains(x)) {
    throw ConfigError("site is not inside the box");
  }
  std::int64_t i = 0;
  for (int axis = 0; axis < dimension(); ++axis) i += (x[axis] + radius()) * stride_[axis];
  return static_cast<SiteIndex>(i);
}

void Box::coords(SiteIndex i, std::span<int> out) const {
  std::int64_t rest = i;
  for (int axis = 0; axis < dimension(); ++axis) {
    out[axis] = static_cast<int>(rest / stride_[axis]) - radius();
    rest %= stride_[axis];
  }
}

Site Box::site(SiteIndex i) const {
  Site x(dimension());
  coords(i, x);
  return x;
}

int Box::sup_norm(SiteIndex i) const {
  std::int64_t rest = i;
  int m = 0;
  for (int axis = 0; axis < dimension(); ++axis) {
    m = std::max(m, std::abs(static_cast<int>(rest / stride_[axis]) - radius()));
    rest %= stride_[axis];
  }
  return m;
}

int sup_norm(std::span<const int> x) {
  int m = 0;
  for (int v : x) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Site> neighbors(const Site& s) {
  std::vector<Site> out;
  out.reserve(2 * s.size());
  for (std::size_t axis = 0; axis < s.size(); ++axis) {
    for (int delta : {-1, 1}) {
      Site n = s;
      n[axis] += delta;
      out.push_back(std::move(n));
    }
  }
  return out;
}

std::vector<Site> boundary(const LatticeSpec& spec) {
  const Box box(spec);
  std::vector<Site> out;
  for (SiteIndex i = 0; i < box.size(); ++i) {
    if (box.sup_norm(i) == box.radius()) out.push_back(box.site(i));
  }
  return out;
}

Path walk_until_killed(const Site& start, const std::function<bool(const Site&)>& killed,
                       const LatticeSpec& spec, RngStream& rng) {
  const Box box(spec);
  if (!box.contains(start)) throw ConfigError("walk must start inside the box");
  if (killed(start)) throw ConfigError("walk must not start on a killed site");
  Path path;
  path.sites.push_back(start);
  Site x = start;
  const auto directions = static_cast<std::uint32_t>(2 * spec.dimension);
  const double survival = spec.survival();
  while (path.steps < kWalkStepCap) {
    const std::uint32_t dir = rng.below(directions);
    ++path.steps;
    x[dir >> 1] += (dir & 1U) ? 1 : -1;
    if (!box.contains(x)) {
      path.sites.push_back(x);
      path.end = WalkEnd::Exited;
      return path;
    }
    if (survival < 1.0 && !(rng.uniform() < survival)) {
      path.end = WalkEnd::Died;
      return path;
    }
    path.sites.push_back(x);
    if (killed(x)) {
      path.end = WalkEnd::Killed;
      return path;
    }
  }
  throw RuntimeError("random walk exceeded the step cap of 1e9 steps");
}

}  // namespace loopsoup
