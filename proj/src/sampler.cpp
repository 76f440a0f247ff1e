#include "loopsoup/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "loopsoup/distributions.hpp"
#include "loopsoup/green.hpp"

namespace loopsoup {

void SoupParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be finite and > 0");
  spec.validate();
  if (jmax < 0) throw ConfigError("jmax must be >= 0");
  if (green_bound != 0.0 && !(green_bound >= 1.0)) throw ConfigError("green bound must be >= 1 (or 0 to solve)");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (order == VertexOrder::Custom) {
    const std::size_t n = spec.site_count();
    if (custom_order.size() != n) throw ConfigError("custom vertex order must list every box site once");
    std::vector<std::uint8_t> seen(n, 0);
    for (SiteIndex v : custom_order) {
      if (v >= n || seen[v]) throw ConfigError("custom vertex order is not a permutation of the box sites");
      seen[v] = 1;
    }
  }
}

double multiplicity_residual(std::size_t sites, double alpha, double green_bound, int jmax) {
  const double fbar = 1.0 - 1.0 / green_bound;
  if (fbar <= 0.0) return 0.0;
  return static_cast<double>(sites) * alpha * std::pow(fbar, jmax + 1) / ((jmax + 1) * (1.0 - fbar));
}

MultiplicityCap choose_multiplicity_cap(const LatticeSpec& spec, double alpha, int requested, double green_bound) {
  spec.validate();
  MultiplicityCap cap;
  const double padded = std::pow(spec.side() + 2.0, spec.dimension);
  if (green_bound >= 1.0) {
    cap.green_bound = green_bound;
  } else if (padded <= 4e6) {
    GreenTable g(spec);
    cap.green_bound = g.column(g.box().origin())[g.box().origin()];
  } else if (spec.dimension >= 3) {
    // The free Green function dominates every killed box Green function.
    cap.green_bound = free_green(spec.dimension, 0)->at(std::vector<int>(spec.dimension, 0));
  } else {
    throw GuardError("box too large for the multiplicity-cap Green solve in d <= 2");
  }
  const std::size_t n = spec.site_count();
  if (requested > 0) {
    cap.jmax = requested;
    cap.residual = multiplicity_residual(n, alpha, cap.green_bound, requested);
    if (!(cap.residual < kResidualIntensity)) {
      throw ConfigError("jmax " + std::to_string(requested) + " leaves residual intensity " +
                        std::to_string(cap.residual) + " above 1e-12");
    }
    return cap;
  }
  for (int j = 1; j <= 100000; ++j) {
    const double r = multiplicity_residual(n, alpha, cap.green_bound, j);
    if (r < kResidualIntensity) {
      cap.jmax = j;
      cap.residual = r;
      return cap;
    }
  }
  throw GuardError("no multiplicity cap below 100000 reaches residual intensity 1e-12");
}

VertexSampler::VertexSampler(const Box& box, double alpha, int jmax)
    : box_(&box), alpha_(alpha), survival_(box.spec().survival()) {
  if (jmax < 1) throw ConfigError("jmax must be >= 1");
  double h = 0.0;
  for (int j = 1; j <= jmax; ++j) {
    h += 1.0 / j;
    harmonic_.push_back(h);
  }
}

std::uint64_t VertexSampler::sample_candidates(RngStream& rng) { return sample_poisson(rng, alpha_ * harmonic_.back()); }

int VertexSampler::sample_multiplicity(RngStream& rng) {
  const double u = rng.uniform() * harmonic_.back();
  const auto it = std::upper_bound(harmonic_.begin(), harmonic_.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - harmonic_.begin(), harmonic_.size() - 1)) + 1;
}

std::vector<SiteIndex> vertex_order(const SoupParams& params) {
  const auto n = static_cast<SiteIndex>(params.spec.site_count());
  std::vector<SiteIndex> order(n);
  switch (params.order) {
    case VertexOrder::Lexicographic:
      for (SiteIndex i = 0; i < n; ++i) order[i] = i;
      break;
    case VertexOrder::Reverse:
      for (SiteIndex i = 0; i < n; ++i) order[i] = n - 1 - i;
      break;
    case VertexOrder::Custom:
      order = params.custom_order;
      break;
  }
  return order;
}

SoupSample sample_soup(const SoupParams& params) {
  params.validate();
  SoupSample out;
  out.params = params;
  out.cap = choose_multiplicity_cap(params.spec, params.alpha, params.jmax, params.green_bound);
  const Box box(params.spec);
  const std::vector<SiteIndex> order = vertex_order(params);
  std::vector<SiteIndex> rank(order.size());
  for (SiteIndex i = 0; i < order.size(); ++i) rank[order[i]] = i;

  const std::size_t n = order.size();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(params.workers), std::max<std::size_t>(n, 1));
  std::vector<LoopList> parts(workers);
  std::atomic<std::uint64_t> total{0};
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    try {
      VertexSampler vs(box, params.alpha, out.cap.jmax);
      const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
      LoopList& part = parts[w];
      for (std::size_t i = begin; i < end; ++i) {
        const SiteIndex v = order[i];
        RngStream rng(params.seed, derive_stream(params.stream, v));
        const std::size_t before = part.total_length();
        vs.sample(v, rng, [&](SiteIndex x) { return rank[x] < i; }, part);
        if (total.fetch_add(part.total_length() - before) + (part.total_length() - before) > params.length_budget) {
          throw GuardError("soup exceeds the total-length budget of " + std::to_string(params.length_budget));
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& part : parts) out.loops.append(part);
  return out;
}

Loop SoupSample::loop_at(std::size_t i) const {
  const Box box(params.spec);
  Loop l;
  for (SiteIndex v : loops.loop(i)) l.sites.push_back(box.site(v));
  l.multiplicity = repetition_count(std::span<const Site>(l.sites));
  return l;
}

std::uint64_t occupation(const SoupSample& soup, const Site& x) {
  const Box box(soup.params.spec);
  if (!box.contains(x)) return 0;
  const SiteIndex xi = box.index(x);
  return static_cast<std::uint64_t>(std::count(soup.loops.sites.begin(), soup.loops.sites.end(), xi));
}

std::vector<std::uint64_t> occupation_field(const SoupSample& soup) {
  std::vector<std::uint64_t> xi(soup.params.spec.site_count(), 0);
  for (SiteIndex v : soup.loops.sites) ++xi[v];
  return xi;
}

SoupSample thin_soup(const SoupSample& soup, double alpha1, double kappa1, std::uint64_t stream) {
  const double alpha0 = soup.params.alpha, kappa0 = soup.params.spec.kappa;
  if (!(alpha1 > 0.0)) throw ConfigError("thinned alpha must be > 0");
  if (!(kappa1 >= kappa0)) throw ConfigError("thinning needs kappa1 >= kappa0");
  const double ratio = (1.0 + kappa0) / (1.0 + kappa1);
  // Loops have length >= 2, so the largest keep probability is (alpha1/alpha0) ratio^2.
  if (alpha1 / alpha0 * ratio * ratio > 1.0 + 1e-12) {
    throw ConfigError("thinning needs alpha1 <= alpha0 ((1+kappa1)/(1+kappa0))^2");
  }
  SoupSample out;
  out.params = soup.params;
  out.params.alpha = alpha1;
  out.params.spec.kappa = kappa1;
  out.cap = soup.cap;
  RngStream rng(soup.params.seed, stream);
  for (std::size_t i = 0; i < soup.loops.size(); ++i) {
    const auto loop = soup.loops.loop(i);
    const double keep = std::min(1.0, alpha1 / alpha0 * std::pow(ratio, static_cast<double>(loop.size())));
    if (rng.uniform() < keep) out.loops.add(loop);
  }
  return out;
}

SoupSample thin_soup(const SoupSample& soup, double alpha1, double kappa1) {
  return thin_soup(soup, alpha1, kappa1, derive_stream(soup.params.stream, tag_hash("thin")));
}

}  // namespace loopsoup
