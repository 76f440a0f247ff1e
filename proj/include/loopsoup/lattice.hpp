#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "loopsoup/error.hpp"
#include "loopsoup/rng.hpp"

namespace loopsoup {

using Site = std::vector<int>;
using SiteIndex = std::uint32_t;

inline constexpr int kMaxBoxDimension = 16;
inline constexpr std::uint64_t kWalkStepCap = 1'000'000'000ULL;

/// Box B(0, M) = [-M, M]^d in Z^d with per-step survival 1/(1+kappa).
struct LatticeSpec {
  int dimension = 3;
  int box_radius = 4;
  double kappa = 0.0;

  void validate() const;
  int side() const { return 2 * box_radius + 1; }
  std::uint64_t site_count() const;
  double survival() const { return 1.0 / (1.0 + kappa); }
};

/// Dense lexicographic indexing of box sites (first coordinate most significant),
/// so index order is the lexicographic order of coordinate tuples.
class Box {
 public:
  explicit Box(const LatticeSpec& spec);

  const LatticeSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension; }
  int radius() const { return spec_.box_radius; }
  int side() const { return spec_.side(); }
  std::size_t size() const { return size_; }
  std::int64_t stride(int axis) const { return stride_[axis]; }

  bool contains(std::span<const int> x) const;
  SiteIndex index(std::span<const int> x) const;
  Site site(SiteIndex i) const;
  void coords(SiteIndex i, std::span<int> out) const;
  SiteIndex origin() const { return origin_; }
  int sup_norm(SiteIndex i) const;

 private:
  LatticeSpec spec_;
  std::size_t size_ = 1;
  std::array<std::int64_t, kMaxBoxDimension> stride_{};
  SiteIndex origin_ = 0;
};

/// s +- e_i for each axis, minus before plus.
std::vector<Site> neighbors(const Site& s);

/// Sites of the box with a lattice neighbor outside it (the sup-norm shell ||x|| = M).
std::vector<Site> boundary(const LatticeSpec& spec);

int sup_norm(std::span<const int> x);

enum class WalkEnd { Exited, Killed, Died };

struct Path {
  /// Positions from the start up to the terminal site (an exterior site for
  /// Exited, the killed site for Killed, the last live position for Died).
  std::vector<Site> sites;
  std::uint64_t steps = 0;
  WalkEnd end = WalkEnd::Exited;
};

/// Simple random walk in the box until it exits, steps on a killed site or dies
/// by the per-step kappa killing.
Path walk_until_killed(const Site& start, const std::function<bool(const Site&)>& killed,
                       const LatticeSpec& spec, RngStream& rng);

/// Walker state tracking both the dense index and the coordinates.
class BoxWalker {
 public:
  BoxWalker(const Box& box, SiteIndex start) : box_(&box), index_(start) {
    box.coords(start, std::span<int>(x_.data(), box.dimension()));
  }

  /// Moves along direction dir in [0, 2d): axis dir / 2, minus for even dir.
  /// Returns false (and leaves the state unchanged) when the move leaves the box.
  bool step(std::uint32_t dir) {
    const int axis = static_cast<int>(dir >> 1);
    const int delta = (dir & 1U) ? 1 : -1;
    const int next = x_[axis] + delta;
    if (next > box_->radius() || next < -box_->radius()) return false;
    x_[axis] = next;
    index_ = static_cast<SiteIndex>(static_cast<std::int64_t>(index_) + delta * box_->stride(axis));
    return true;
  }

  SiteIndex index() const { return index_; }
  std::span<const int> coords() const { return {x_.data(), static_cast<std::size_t>(box_->dimension())}; }

 private:
  const Box* box_;
  SiteIndex index_;
  std::array<int, kMaxBoxDimension> x_{};
};

/// Result of an excursion attempt from a root vertex.
enum class Attempt { Returned, Failed };

/// Walks from `root` until it comes back to `root` (Returned) or exits the
/// box / dies / steps on a site with killed(index) true (Failed). Intermediate
/// sites are appended to `path`; the root itself is not.
template <class Killed>
Attempt excursion_attempt(const Box& box, SiteIndex root, double survival, RngStream& rng,
                          Killed&& killed, std::vector<SiteIndex>& path) {
  BoxWalker w(box, root);
  const auto directions = static_cast<std::uint32_t>(2 * box.dimension());
  const bool mortal = survival < 1.0;
  for (std::uint64_t steps = 0; steps < kWalkStepCap; ++steps) {
    if (!w.step(rng.below(directions))) return Attempt::Failed;
    if (mortal && !(rng.uniform() < survival)) return Attempt::Failed;
    if (w.index() == root) return Attempt::Returned;
    if (killed(w.index())) return Attempt::Failed;
    path.push_back(w.index());
  }
  throw RuntimeError("random walk exceeded the step cap of 1e9 steps");
}

}  // namespace loopsoup
