#include <algorithm>
#include <cmath>

#include "matchmix/error.hpp"
#include "matchmix/walk.hpp"

namespace matchmix {

Kernel::Kernel(const GStar& gs, bool lazy)
    : Kernel(gs.base_ptr(), std::vector<Vertex>(gs.matching().partners().begin(),
                                                 gs.matching().partners().end()),
             gs.eps(), lazy) {}

Kernel Kernel::simple_walk(std::shared_ptr<const Graph> g, bool lazy) {
  std::vector<Vertex> none(g->vertex_count(), kNoVertex);
  return Kernel(std::move(g), std::move(none), 1.0, lazy);
}

Kernel Kernel::simple_walk(const Graph& g, bool lazy) {
  return simple_walk(std::make_shared<const Graph>(g), lazy);
}

Kernel::Kernel(std::shared_ptr<const Graph> g, std::vector<Vertex> partner, double eps, bool lazy)
    : graph_(std::move(g)), partner_(std::move(partner)), eps_(eps), lazy_(lazy) {
  const std::size_t n = graph_->vertex_count();
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows(n);
  total_.resize(n);
  double sum = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    auto x = static_cast<Vertex>(v);
    auto& r = rows[v];
    for (Vertex y : graph_->neighbors(x)) {
      if (!r.empty() && r.back().first == y)
        r.back().second += 1.0;
      else
        r.emplace_back(y, 1.0);
    }
    Vertex p = partner_[v];
    if (p != kNoVertex) {
      auto it = std::find_if(r.begin(), r.end(), [&](auto& e) { return e.first == p; });
      if (it != r.end())
        it->second += eps_;
      else
        r.emplace_back(p, eps_);
    }
    total_[v] = graph_->degree(x) + (p != kNoVertex ? eps_ : 0.0);
    if (total_[v] <= 0.0) throw InvalidInput("vertex without any edge");
    sum += total_[v];
  }
  weights_ = simd::EllMatrix::from_rows(rows);
  inv_total_.resize(n);
  inv_sqrt_total_.resize(n);
  pi_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    inv_total_[v] = 1.0 / total_[v];
    inv_sqrt_total_[v] = 1.0 / std::sqrt(total_[v]);
    pi_[v] = total_[v] / sum;
  }
}

double Kernel::probability(Vertex x, Vertex y) const {
  double w = graph_->multiplicity(x, y) + (partner_[x] == y && y != kNoVertex ? eps_ : 0.0);
  double p = w / total_[x];
  if (!lazy_) return p;
  return 0.5 * p + (x == y ? 0.5 : 0.0);
}

std::vector<std::pair<Vertex, double>> Kernel::row(Vertex x) const {
  std::vector<std::pair<Vertex, double>> out;
  const std::size_t n = size();
  const double scale = lazy_ ? 0.5 : 1.0;
  for (std::size_t s = 0; s < weights_.width; ++s) {
    double w = weights_.vals[s * n + x];
    if (w == 0.0) continue;
    out.emplace_back(weights_.cols[s * n + x], scale * w * inv_total_[x]);
  }
  if (lazy_) out.emplace_back(x, 0.5);
  std::sort(out.begin(), out.end());
  return out;
}

void Kernel::step(std::span<const double> in, std::span<double> out,
                  std::span<double> scratch) const {
  simd::hadamard(in, inv_total_, scratch);
  simd::ell_multiply(weights_, scratch, out);
  if (lazy_) simd::average(in, out, out);
}

void Kernel::apply(std::span<const double> f, std::span<double> out,
                   std::span<double> scratch) const {
  simd::ell_multiply(weights_, f, scratch);
  simd::hadamard(scratch, inv_total_, out);
  if (lazy_) simd::average(f, out, out);
}

void Kernel::apply_symmetric(std::span<const double> v, std::span<double> out,
                             std::span<double> scratch) const {
  simd::hadamard(v, inv_sqrt_total_, scratch);
  simd::ell_multiply(weights_, scratch, out);
  simd::hadamard(out, inv_sqrt_total_, out);
  if (lazy_) simd::average(v, out, out);
}

Vertex Kernel::sample_step(Vertex x, Rng& rng, StepKind& kind) const {
  if (lazy_ && (rng() >> 63) == 0) {
    kind = StepKind::Hold;
    return x;
  }
  auto nb = graph_->neighbors(x);
  double r = uniform01(rng) * total_[x];
  auto i = static_cast<std::size_t>(r);
  if (i < nb.size()) {
    kind = StepKind::Base;
    return nb[i];
  }
  if (partner_[x] == kNoVertex) {  // only reachable through rounding at the upper end
    kind = StepKind::Base;
    return nb.back();
  }
  kind = StepKind::Matching;
  return partner_[x];
}

}  // namespace matchmix
