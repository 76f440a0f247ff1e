#include <cmath>
#include <string>

#include "loopsoup/green.hpp"
#include "loopsoup/simd/kernels.hpp"

namespace loopsoup {
namespace {

std::vector<std::uint8_t> killed_mask(const Box& box, const std::vector<Site>& killed) {
  std::vector<std::uint8_t> mask(box.size(), 0);
  for (const Site& s : killed) {
    if (static_cast<int>(s.size()) != box.dimension()) throw ConfigError("killed site has wrong dimension");
    if (box.contains(s)) mask[box.index(s)] = 1;
  }
  return mask;
}

// The box embedded in a grid with one ghost layer per face, so the stencil
// needs no bounds checks: ghosts and killed sites carry mask 0 and stay 0.
class PaddedOperator {
 public:
  PaddedOperator(const Box& box, const std::vector<std::uint8_t>& killed) : box_(box) {
    const int d = box.dimension();
    const std::size_t p = static_cast<std::size_t>(box.side()) + 2;
    std::vector<std::size_t> pstride(d);
    std::size_t s = 1;
    for (int axis = d - 1; axis >= 0; --axis) {
      pstride[axis] = s;
      s *= p;
    }
    padded_ = s;
    for (int axis = 0; axis < d; ++axis) strides_.push_back(static_cast<std::ptrdiff_t>(pstride[axis]));
    mask_.assign(padded_, 0.0);
    pad_of_.resize(box.size());
    std::vector<int> x(d);
    for (std::size_t i = 0; i < box.size(); ++i) {
      box.coords(static_cast<SiteIndex>(i), x);
      std::size_t q = 0;
      for (int axis = 0; axis < d; ++axis) q += static_cast<std::size_t>(x[axis] + box.radius() + 1) * pstride[axis];
      pad_of_[i] = q;
      if (!killed[i]) mask_[q] = 1.0;
    }
    c_ = 1.0 / (2.0 * d * (1.0 + box.spec().kappa));
    begin_ = pstride[0];
    end_ = padded_ - pstride[0];
  }

  std::vector<double> solve(SiteIndex y, SolverStats* stats) const {
    const auto& k = simd::kernels();
    std::vector<double> x(padded_, 0.0), r(padded_, 0.0), p(padded_, 0.0), ap(padded_, 0.0);
    const int max_iter = static_cast<int>(std::min<std::size_t>(20 * box_.size() + 100, 10'000'000));
    int it = 0;
    double residual = 1.0;
    r[pad_of_[y]] = 1.0;
    // Restarted from the true residual when the recurrence has drifted.
    for (int restart = 0; restart < 4; ++restart) {
      p = r;
      double rr = k.dot(r.data(), r.data(), padded_);
      const double target = GreenTable::kTolerance * 0.25;
      for (; it < max_iter && std::sqrt(rr) > target; ++it) {
        apply(p, ap);
        const double pap = k.dot(p.data(), ap.data(), padded_);
        if (!(pap > 0.0)) throw RuntimeError("conjugate gradient breakdown (operator not positive definite)");
        const double a = rr / pap;
        k.axpy(a, p.data(), x.data(), padded_);
        k.axpy(-a, ap.data(), r.data(), padded_);
        const double rr_new = k.dot(r.data(), r.data(), padded_);
        k.xpay(r.data(), rr_new / rr, p.data(), padded_);
        rr = rr_new;
      }
      apply(x, ap);
      for (std::size_t i = 0; i < padded_; ++i) r[i] = -ap[i];
      r[pad_of_[y]] += 1.0;
      residual = std::sqrt(k.dot(r.data(), r.data(), padded_));
      if (residual <= GreenTable::kTolerance) break;
    }
    if (residual > GreenTable::kTolerance) {
      throw RuntimeError("Green solve did not reach relative residual 1e-12 (residual " +
                         std::to_string(residual) + ")");
    }
    if (stats) *stats = {it, residual};
    std::vector<double> column(box_.size());
    for (std::size_t i = 0; i < box_.size(); ++i) column[i] = x[pad_of_[i]];
    return column;
  }

 private:
  void apply(const std::vector<double>& in, std::vector<double>& out) const {
    simd::kernels().masked_stencil(in.data(), mask_.data(), out.data(), begin_, end_, strides_.data(),
                                   static_cast<int>(strides_.size()), c_);
  }

  const Box& box_;
  std::size_t padded_ = 0;
  std::vector<std::ptrdiff_t> strides_;
  std::vector<double> mask_;
  std::vector<std::size_t> pad_of_;
  double c_ = 0.0;
  std::size_t begin_ = 0, end_ = 0;
};

}  // namespace

GreenTable::GreenTable(const LatticeSpec& spec, const std::vector<Site>& killed)
    : box_(spec), killed_(killed_mask(box_, killed)) {
  for (auto k : killed_) active_ += k ? 0 : 1;
  if (active_ == 0) throw RuntimeError("killed set empties the box; the Green system is singular");
}

const std::vector<double>& GreenTable::column(const Site& y) const { return column(box_.index(y)); }

const std::vector<double>& GreenTable::column(SiteIndex y) const {
  std::lock_guard lock(mutex_);
  auto it = columns_.find(y);
  if (it != columns_.end()) return it->second.first;
  if (y >= box_.size()) throw ConfigError("Green column outside the box");
  if (killed_[y]) throw ConfigError("Green column requested at a killed site");
  PaddedOperator op(box_, killed_);
  SolverStats st;
  auto col = op.solve(y, &st);
  return columns_.emplace(y, std::make_pair(std::move(col), st)).first->second.first;
}

SolverStats GreenTable::stats(SiteIndex y) const {
  column(y);
  std::lock_guard lock(mutex_);
  return columns_.at(y).second;
}

double GreenTable::operator()(const Site& x, const Site& y) const {
  if (!box_.contains(x) || !box_.contains(y)) return 0.0;
  const SiteIndex xi = box_.index(x), yi = box_.index(y);
  if (killed_[xi] || killed_[yi]) return 0.0;
  return column(yi)[xi];
}

std::vector<double> green_column(const LatticeSpec& spec, const std::vector<Site>& killed, const Site& y,
                                 SolverStats* stats) {
  Box box(spec);
  auto mask = killed_mask(box, killed);
  const SiteIndex yi = box.index(y);
  if (mask[yi]) throw ConfigError("Green column requested at a killed site");
  PaddedOperator op(box, mask);
  return op.solve(yi, stats);
}

DenseGreen dense_green(const LatticeSpec& spec, const std::vector<Site>& killed) {
  Box box(spec);
  auto mask = killed_mask(box, killed);
  DenseGreen out;
  std::vector<std::int64_t> row(box.size(), -1);
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!mask[i]) {
      row[i] = static_cast<std::int64_t>(out.active.size());
      out.active.push_back(static_cast<SiteIndex>(i));
    }
  }
  const auto n = static_cast<Eigen::Index>(out.active.size());
  if (n == 0) throw RuntimeError("killed set empties the box; the Green system is singular");
  if (n > 4096) throw GuardError("dense Green oracle is limited to 4096 active sites");
  const double c = 1.0 / (2.0 * spec.dimension * (1.0 + spec.kappa));
  out.transition = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    BoxWalker w0(box, out.active[a]);
    for (std::uint32_t dir = 0; dir < static_cast<std::uint32_t>(2 * spec.dimension); ++dir) {
      BoxWalker w = w0;
      if (!w.step(dir)) continue;
      if (row[w.index()] >= 0) out.transition(a, row[w.index()]) += c;
    }
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - out.transition;
  out.green = a.partialPivLu().inverse();
  return out;
}

}  // namespace loopsoup
