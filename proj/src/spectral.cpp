#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "matchmix/error.hpp"
#include "matchmix/simd/kernels.hpp"
#include "matchmix/walk.hpp"

namespace matchmix {
namespace {

constexpr double kUnboundedGap = 1e-12;

Eigen::MatrixXd symmetric_dense(const Kernel& k) {
  const std::size_t n = k.size();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  auto pi = k.stationary_mass();
  for (std::size_t x = 0; x < n; ++x)
    for (auto [y, p] : k.row(static_cast<Vertex>(x)))
      s(x, y) = std::sqrt(pi[x] / pi[y]) * p;
  // Symmetrise away rounding so the self-adjoint solver sees an exact mirror.
  return 0.5 * (s + s.transpose());
}

void orthogonalize(std::vector<double>& v, std::span<const double> top) {
  double c = simd::dot(v, top);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * top[i];
}

double normalize(std::vector<double>& v) {
  double norm = std::sqrt(simd::dot(v, v));
  if (norm > 0)
    for (double& x : v) x /= norm;
  return norm;
}

// Dominant eigenvalue of (S + shift I) restricted to the complement of the top
// eigenvector sqrt(pi); returns the Rayleigh quotient of S.
double deflated_power(const Kernel& k, double shift, const RelaxationOptions& opts,
                      std::size_t& iterations) {
  const std::size_t n = k.size();
  auto pi = k.stationary_mass();
  std::vector<double> top(n);
  for (std::size_t i = 0; i < n; ++i) top[i] = std::sqrt(pi[i]);
  Rng rng(opts.seed);
  std::vector<double> v(n), w(n), scratch(n);
  for (double& x : v) x = uniform01(rng) - 0.5;
  orthogonalize(v, top);
  normalize(v);
  double lambda = 0.0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    k.apply_symmetric(v, w, scratch);
    double rq = simd::dot(v, w);
    for (std::size_t i = 0; i < n; ++i) w[i] += shift * v[i];
    orthogonalize(w, top);
    if (normalize(w) == 0.0) {
      iterations += it;
      return rq;
    }
    std::swap(v, w);
    if (it > 1 && std::fabs(rq - lambda) < opts.tol * std::max(1.0, std::fabs(rq))) {
      iterations += it;
      return rq;
    }
    lambda = rq;
  }
  iterations += opts.max_iterations;
  return lambda;
}

RelaxationTimes finish(double lambda2, double lambda_star) {
  RelaxationTimes r;
  r.lambda2 = lambda2;
  r.lambda_star = lambda_star;
  const double inf = std::numeric_limits<double>::infinity();
  r.t_rel = 1.0 - lambda2 >= kUnboundedGap ? 1.0 / (1.0 - lambda2) : inf;
  r.unbounded = lambda_star >= 1.0 - kUnboundedGap;
  r.t_rel_abs = r.unbounded ? inf : 1.0 / (1.0 - lambda_star);
  return r;
}

}  // namespace

std::vector<double> spectrum(const Kernel& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric_dense(k), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed");
  std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + k.size());
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

RelaxationTimes relaxation_times(const Kernel& k, const RelaxationOptions& opts) {
  const std::size_t n = k.size();
  if (n < 2) return finish(0.0, 0.0);
  if (n <= opts.exact_limit) {
    auto ev = spectrum(k);
    double lambda_star = std::max(std::fabs(ev[1]), std::fabs(ev.back()));
    auto r = finish(ev[1], lambda_star);
    r.exact = true;
    return r;
  }
  std::size_t iterations = 0;
  // Shifting by +1 makes the spectrum nonnegative, so the dominant deflated
  // eigenvalue is lambda2; the unshifted run finds the largest modulus.
  double lambda2 = deflated_power(k, 1.0, opts, iterations);
  double extreme = deflated_power(k, 0.0, opts, iterations);
  auto r = finish(lambda2, std::max(std::fabs(extreme), lambda2));
  r.exact = false;
  r.iterations = iterations;
  return r;
}

}  // namespace matchmix
