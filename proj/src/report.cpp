#include "matchmix/report.hpp"

#include <cstdio>
#include <ostream>

#include "matchmix/simd/kernels.hpp"

#ifndef MATCHMIX_BUILD_ID
#define MATCHMIX_BUILD_ID "unknown"
#endif

namespace matchmix {
namespace {

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return "";
  Json j = *v;
  return j.dump();
}

}  // namespace

std::string build_id() { return MATCHMIX_BUILD_ID; }

std::string config_hash(const Json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Metadata make_metadata(const Json& config, std::uint64_t seed) {
  return {config_hash(config), seed, build_id(), simd::isa_name(simd::active_isa())};
}

Json to_json(const Metadata& m) {
  return Json{{"config_hash", m.config_hash}, {"seed", m.seed}, {"build_id", m.build_id}, {"isa", m.isa}};
}

void write_header(std::ostream& out, const Metadata& m) {
  out << "# config_hash=" << m.config_hash << " seed=" << m.seed << " build_id=" << m.build_id
      << " isa=" << m.isa << "\n";
}

Json to_json(const FamilySpec& f) { return f.name(); }
Json to_json(const EpsRule& e) { return e.describe(); }

Json to_json(const ExperimentConfig& c) {
  Json seeds = Json::array();
  for (auto s : c.seeds) seeds.push_back(s);
  return Json{{"family", to_json(c.family)},
              {"sizes", c.sizes},
              {"eps_rule", to_json(c.eps)},
              {"thetas", c.thetas},
              {"seeds", seeds},
              {"t_max", c.t_max},
              {"start_sample", c.start_sample},
              {"all_starts", c.all_starts},
              {"lazy", c.lazy},
              {"halving", c.halving},
              {"no_cutoff_floor", c.no_cutoff_floor},
              {"predict", c.predict},
              {"r_factor", c.r_factor},
              {"speed_walks", c.speed_walks},
              {"speed_horizon_factor", c.speed_horizon_factor},
              {"B", c.window_B},
              {"K", c.K},
              {"M", c.M},
              {"kroot_samples", c.kroot_samples},
              {"kroot_K", c.kroot_K},
              {"kroot_R", c.kroot_R},
              {"compare_base", c.compare_base}};
}

Json to_json(const MixRow& r) {
  Json tm = Json::object();
  for (std::size_t i = 0; i < r.thetas.size(); ++i) {
    Json key = r.thetas[i];
    tm[key.dump()] = opt(r.t_mix[i]);
  }
  return Json{{"family", r.family},
              {"n", r.n},
              {"eps", r.eps},
              {"seed", r.seed},
              {"t_mix", tm},
              {"t_half", opt(r.t_half)},
              {"t_quarter", opt(r.t_quarter)},
              {"width", opt(r.width)},
              {"ratio", opt(r.ratio)},
              {"t_quarter_eps", opt(r.t_quarter_eps)},
              {"delta_hat", opt(r.delta_hat)},
              {"nu_hat", opt(r.nu_hat)},
              {"h_hat", opt(r.h_hat)},
              {"V_hat", opt(r.V_hat)},
              {"t0_pred", opt(r.t0_pred)},
              {"t_w", opt(r.t_w)},
              {"L", opt(r.L)},
              {"kroot_fraction", opt(r.kroot_fraction)},
              {"tmix_base_half", opt(r.tmix_base_half)},
              {"classification", r.classification}};
}

Json to_json(const CutoffReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  Json summary = Json::array();
  for (const auto& s : r.summary)
    summary.push_back(Json{{"n", s.n},
                           {"eps", s.eps},
                           {"mean_ratio", opt(s.mean_ratio)},
                           {"mean_t_half", opt(s.mean_t_half)},
                           {"mean_t_quarter", opt(s.mean_t_quarter)}});
  return Json{{"config", to_json(r.config)},
              {"rows", rows},
              {"summary", summary},
              {"verdict", opt(r.verdict)},
              {"partial", r.partial},
              {"warnings", r.warnings}};
}

Json to_json(const PairingReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points)
    pts.push_back(Json{{"a", p.a}, {"empirical", p.empirical}, {"sigma", p.sigma}, {"bound", p.bound}, {"ok", p.ok}});
  return Json{{"size", r.size}, {"m", r.m}, {"b", r.b}, {"trials", r.trials}, {"points", pts}, {"all_ok", r.all_ok}};
}

Json to_json(const HeatKernelReport& r, bool include_curve) {
  Json j{{"t_lo", r.t_lo},
         {"t_hi", r.t_hi},
         {"ratio_min", r.ratio_min},
         {"ratio_max", r.ratio_max},
         {"sup_sqrt_t_max", r.sup_sqrt_t_max}};
  if (include_curve) {
    Json curve = Json::array();
    for (const auto& p : r.curve)
      curve.push_back(Json{{"t", p.t}, {"diagonal", p.diagonal}, {"volume", p.volume}, {"ratio", p.ratio},
                           {"sqrt_t_max", p.sqrt_t_max}});
    j["curve"] = curve;
  }
  return j;
}

Json to_json(const LamplighterReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points)
    pts.push_back(Json{{"t", p.t},
                       {"h1", p.h1},
                       {"range_exact", p.range_exact},
                       {"range_mc", p.range_mc},
                       {"range_mc_se", p.range_mc_se},
                       {"states", p.states},
                       {"ok", p.ok}});
  return Json{{"c", r.c}, {"points", pts}, {"all_ok", r.all_ok}};
}

Json to_json(const SandwichReport& r) {
  return Json{{"theta", r.theta},
              {"t_mix", r.t_mix},
              {"hit_lower", r.hit_lower},
              {"hit_upper", r.hit_upper},
              {"hit_half", r.hit_half},
              {"t_rel_abs", r.unbounded ? Json(nullptr) : Json(r.t_rel_abs)},
              {"unbounded", r.unbounded},
              {"upper_bound", r.upper_bound},
              {"lower_ok", r.lower_ok},
              {"upper_ok", r.upper_ok},
              {"monotone_ok", r.monotone_ok},
              {"exhaustive", r.exhaustive},
              {"candidate_sets", r.candidate_sets}};
}

void write_mix_table_csv(std::ostream& out, const CutoffReport& r, const Metadata& m) {
  write_header(out, m);
  out << "family,n,eps,seed,theta,t_mix\n";
  for (const auto& row : r.rows)
    for (std::size_t i = 0; i < row.thetas.size(); ++i)
      out << row.family << ',' << row.n << ',' << Json(row.eps).dump() << ',' << row.seed << ','
          << Json(row.thetas[i]).dump() << ',' << cell(row.t_mix[i]) << '\n';
}

void write_widths_csv(std::ostream& out, const CutoffReport& r, const Metadata& m) {
  write_header(out, m);
  out << "family,n,eps,seed,t_half,width,ratio,t_quarter_eps,kroot_fraction,classification\n";
  for (const auto& row : r.rows)
    out << row.family << ',' << row.n << ',' << Json(row.eps).dump() << ',' << row.seed << ','
        << cell(row.t_half) << ',' << cell(row.width) << ',' << cell(row.ratio) << ','
        << cell(row.t_quarter_eps) << ',' << cell(row.kroot_fraction) << ',' << row.classification << '\n';
}

void write_estimators_csv(std::ostream& out, const CutoffReport& r, const Metadata& m) {
  write_header(out, m);
  out << "n,eps,seed,delta,nu,h,V,t0_pred,t_w,L\n";
  for (const auto& row : r.rows)
    out << row.n << ',' << Json(row.eps).dump() << ',' << row.seed << ',' << cell(row.delta_hat) << ','
        << cell(row.nu_hat) << ',' << cell(row.h_hat) << ',' << cell(row.V_hat) << ','
        << cell(row.t0_pred) << ',' << cell(row.t_w) << ',' << cell(row.L) << '\n';
}

}  // namespace matchmix
