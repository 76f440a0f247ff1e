#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loopsoup/lattice.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/rng.hpp"

namespace loopsoup {

inline constexpr double kResidualIntensity = 1e-12;

/// Loops as flat box-index sequences.
struct LoopList {
  std::vector<SiteIndex> sites;
  std::vector<std::size_t> offsets{0};

  std::size_t size() const { return offsets.size() - 1; }
  bool empty() const { return size() == 0; }
  std::size_t total_length() const { return sites.size(); }
  std::span<const SiteIndex> loop(std::size_t i) const {
    return {sites.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  void add(std::span<const SiteIndex> loop) {
    sites.insert(sites.end(), loop.begin(), loop.end());
    offsets.push_back(sites.size());
  }
  void append(const LoopList& other) {
    for (std::size_t i = 0; i < other.size(); ++i) add(other.loop(i));
  }
  void clear() {
    sites.clear();
    offsets.assign(1, 0);
  }
};

enum class VertexOrder { Lexicographic, Reverse, Custom };

struct SoupParams {
  double alpha = 1.0;
  LatticeSpec spec;  // carries kappa
  VertexOrder order = VertexOrder::Lexicographic;
  std::vector<SiteIndex> custom_order;  // a permutation of the box indices
  int jmax = 0;                         // 0 selects the smallest admissible cap
  double green_bound = 0.0;             // Ghat for the cap; 0 solves for it
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t length_budget = 200'000'000;  // total loop length; exceeding it is an error
  int workers = 1;

  void validate() const;
};

/// Multiplicity cap with its bound: |box| alpha Fbar^{J+1} / ((J+1)(1-Fbar)) < 1e-12,
/// Fbar = 1 - 1/Ghat, Ghat >= max_x G_B(x,x).
struct MultiplicityCap {
  int jmax = 0;
  double green_bound = 1.0;
  double residual = 0.0;
};
MultiplicityCap choose_multiplicity_cap(const LatticeSpec& spec, double alpha, int requested = 0,
                                       double green_bound = 0.0);
/// Residual intensity for a given cap.
double multiplicity_residual(std::size_t sites, double alpha, double green_bound, int jmax);

struct SoupSample {
  SoupParams params;
  MultiplicityCap cap;
  LoopList loops;  // each loop in its least rotation

  Loop loop_at(std::size_t i) const;
};

/// Poisson ensemble of loops of intensity alpha mu_kappa restricted to the box,
/// by the minimal-vertex decomposition: for each vertex v in order, loops whose
/// earliest vertex is v are drawn as Poisson(alpha H_J) candidates with visit
/// count j chosen with probability (1/j)/H_J, each accepted iff j excursions
/// from v all return to v before exiting the box, dying, or touching an earlier
/// vertex. Accepted candidates are exactly the loops of mu_kappa with minimal
/// vertex v and j visits to v, with intensity alpha F_v^j / j.
SoupSample sample_soup(const SoupParams& params);

/// Rank of every box index in the vertex order.
std::vector<SiteIndex> vertex_order(const SoupParams& params);

/// Total visits to x.
std::uint64_t occupation(const SoupSample& soup, const Site& x);
std::vector<std::uint64_t> occupation_field(const SoupSample& soup);

/// Keeps each loop of length n with probability (alpha1/alpha0) ((1+kappa0)/(1+kappa1))^n.
/// Uniforms come from (seed, stream) in loop order, so thinnings of one soup
/// with the same stream are nested.
SoupSample thin_soup(const SoupSample& soup, double alpha1, double kappa1, std::uint64_t stream);
SoupSample thin_soup(const SoupSample& soup, double alpha1, double kappa1);

/// Per-vertex candidate generation shared by the sampler and the cluster explorer.
class VertexSampler {
 public:
  VertexSampler(const Box& box, double alpha, int jmax);

  int jmax() const { return static_cast<int>(harmonic_.size()); }

  /// Appends the loops with minimal vertex v (relative to `killed`) to `out`.
  template <class Killed>
  void sample(SiteIndex v, RngStream& rng, Killed&& killed, LoopList& out) {
    const std::uint64_t candidates = sample_candidates(rng);
    for (std::uint64_t c = 0; c < candidates; ++c) {
      const int j = sample_multiplicity(rng);
      scratch_.clear();
      bool accepted = true;
      for (int k = 0; k < j && accepted; ++k) {
        scratch_.push_back(v);
        accepted = excursion_attempt(*box_, v, survival_, rng, killed, scratch_) == Attempt::Returned;
      }
      if (accepted) {
        canonicalize_in_place(scratch_);
        out.add(scratch_);
      }
    }
  }

 private:
  std::uint64_t sample_candidates(RngStream& rng);
  int sample_multiplicity(RngStream& rng);

  const Box* box_;
  double alpha_;
  double survival_;
  std::vector<double> harmonic_;  // H_1, ..., H_J
  std::vector<SiteIndex> scratch_;
};

}  // namespace loopsoup
