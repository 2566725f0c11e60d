#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "matchmix/graph.hpp"
#include "matchmix/matching.hpp"
#include "matchmix/rng.hpp"
#include "matchmix/simd/kernels.hpp"

namespace matchmix {

enum class StepKind : std::uint8_t { Hold, Base, Matching };

// kinds[i] labels the step vertices[i] -> vertices[i + 1].
struct TaggedPath {
  std::vector<Vertex> vertices;
  std::vector<StepKind> kinds;

  std::size_t length() const { return kinds.size(); }
};

// Transition kernel of the weighted walk on a GStar (or of the simple walk on
// a bare graph), optionally lazy.
class Kernel {
 public:
  Kernel(const GStar& gs, bool lazy);
  static Kernel simple_walk(std::shared_ptr<const Graph> g, bool lazy);
  static Kernel simple_walk(const Graph& g, bool lazy);

  std::size_t size() const { return total_.size(); }
  bool lazy() const { return lazy_; }
  double eps() const { return eps_; }
  const Graph& base() const { return *graph_; }
  Vertex partner(Vertex v) const { return partner_[v]; }
  double total_weight(Vertex v) const { return total_[v]; }
  double probability(Vertex x, Vertex y) const;
  std::span<const double> stationary_mass() const { return pi_; }
  // Sparse row of the kernel, hold mass included for lazy kernels.
  std::vector<std::pair<Vertex, double>> row(Vertex x) const;
  // Symmetric weights w(x, y) in ELL form.
  const simd::EllMatrix& weights() const { return weights_; }

  // out = in P. scratch must have length size().
  void step(std::span<const double> in, std::span<double> out, std::span<double> scratch) const;
  // out = P f
  void apply(std::span<const double> f, std::span<double> out, std::span<double> scratch) const;
  // out = D^{1/2} P D^{-1/2} v with D = diag(pi); symmetric.
  void apply_symmetric(std::span<const double> v, std::span<double> out,
                       std::span<double> scratch) const;

  Vertex sample_step(Vertex x, Rng& rng, StepKind& kind) const;

 private:
  Kernel(std::shared_ptr<const Graph> g, std::vector<Vertex> partner, double eps, bool lazy);

  std::shared_ptr<const Graph> graph_;
  std::vector<Vertex> partner_;
  double eps_;
  bool lazy_;
  simd::EllMatrix weights_;
  std::vector<double> total_, inv_total_, inv_sqrt_total_, pi_;
};

struct Distribution {
  std::vector<double> mass;

  std::size_t size() const { return mass.size(); }
  // Nonnegative and summing to one within tol.
  bool valid(double tol = 1e-10) const;
};

Distribution point_mass(std::size_t n, Vertex v);
Distribution stationary(const Kernel& k);
Distribution step(const Kernel& k, const Distribution& d);
double tv(const Distribution& a, const Distribution& b);
double tv(std::span<const double> a, std::span<const double> b);

struct MixCurve {
  std::vector<Vertex> starts;
  std::vector<double> values;  // values[t] = max over starts of TV(P^t(x, .), pi)
};

struct ProfileOptions {
  unsigned jobs = 1;
  // Stop once the curve is at or below this value (0 = run to t_max).
  double stop_below = 0.0;
  // pi-weighted average over the starts instead of the maximum.
  bool average = false;
};

MixCurve distance_profile(const Kernel& k, std::span<const Vertex> starts, std::size_t t_max,
                          const ProfileOptions& opts = {});
// min(n, sample) uniform starts plus the vertices of extreme total weight.
std::vector<Vertex> default_starts(const Kernel& k, Rng& rng, std::size_t sample = 64);
std::vector<Vertex> all_starts(std::size_t n);
std::size_t mixing_time(const MixCurve& c, double theta);
std::optional<std::size_t> try_mixing_time(const MixCurve& c, double theta);
void write_mix_curve_csv(std::ostream& out, const MixCurve& c);

TaggedPath sample_tagged_path(const Kernel& k, Vertex start, std::size_t t, Rng& rng);
std::vector<Vertex> sample_path(const Kernel& k, Vertex start, std::size_t t, Rng& rng);

struct HittingEstimate {
  Vertex start = kNoVertex;
  double exceed = 0.0;  // P_start(tau_A > s)
  double ci = 0.0;      // one-sigma radius, 0 when exact
  bool exact = false;
};

// P_y(tau_A > s) for every y by backward iteration (0 on A).
std::vector<double> survival_probabilities(const Kernel& k, const std::vector<char>& in_target,
                                           std::size_t s);
std::vector<HittingEstimate> hitting_time_quantile(const Kernel& k, std::span<const Vertex> target,
                                                   std::span<const Vertex> starts, std::size_t s,
                                                   std::size_t trials, Rng& rng,
                                                   std::size_t exact_limit = 2000);

struct RelaxationOptions {
  std::size_t exact_limit = 2000;
  double tol = 1e-9;
  std::size_t max_iterations = 100000;
  std::uint64_t seed = 0x5eed;
};

struct RelaxationTimes {
  double lambda2 = 0.0;      // second largest eigenvalue
  double lambda_star = 0.0;  // largest modulus excluding the top eigenvalue
  double t_rel = 0.0;
  double t_rel_abs = 0.0;    // infinity when unbounded
  bool unbounded = false;
  bool exact = true;
  std::size_t iterations = 0;
};

RelaxationTimes relaxation_times(const Kernel& k, const RelaxationOptions& opts = {});
// Full spectrum in decreasing order (dense solve, n <= exact_limit).
std::vector<double> spectrum(const Kernel& k);

// H_b(p) = sum p (-log p)^b, natural log.
double entropy_b(std::span<const double> p, int b);
std::vector<double> entropy_profile(const Kernel& k, Vertex start, std::size_t t_max, int b);

struct EntropyProfiles {
  std::vector<double> h1, h2, h4;
};
EntropyProfiles entropy_profiles(const Kernel& k, Vertex start, std::size_t t_max);
void write_entropy_csv(std::ostream& out, const EntropyProfiles& p);

// Law of the walk on g stopped at the first long-range crossing: from x it is
// killed with probability eps/(deg x + eps) when x is matched, else it moves
// to a uniform neighbour.
struct KilledLaw {
  std::vector<double> endpoint;  // sub-probability, total = accumulated
  double accumulated = 0.0;
  double residual = 0.0;  // alive mass when iteration stopped
  double mean_time = 0.0;
  double second_moment = 0.0;
  std::size_t steps = 0;
};

KilledLaw killed_endpoint_distribution(const Graph& g, std::span<const char> matched_mask,
                                       double eps, Vertex v, double tol);
double first_crossing_entropy(const GStar& gs, Vertex v, double tol, int b);

struct DirichletReport {
  bool lower_holds = false;  // eps P_K <= P_G*
  bool upper_holds = false;  // P_G* <= (1 + Delta) P_K
  bool pi_within_weight_bounds = false;  // pi_G*/pi_K in [1/(1+eps), 1+eps]
  double min_kernel_ratio = 0.0;
  double max_kernel_ratio = 0.0;
  double min_pi_ratio = 0.0;
  double max_pi_ratio = 0.0;
  double upper_constant = 0.0;
};

DirichletReport dirichlet_comparison(const GStar& gs);

}  // namespace matchmix
