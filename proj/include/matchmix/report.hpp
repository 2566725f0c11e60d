#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "matchmix/analysis.hpp"

namespace matchmix {

using Json = nlohmann::ordered_json;

std::string build_id();
// 64-bit FNV-1a of the canonical (compact, ordered) config text, as hex.
std::string config_hash(const Json& config);

struct Metadata {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string build_id;
  std::string isa;
};

Metadata make_metadata(const Json& config, std::uint64_t seed);
Json to_json(const Metadata& m);
// "# config_hash=... seed=... build_id=... isa=..." line for text outputs.
void write_header(std::ostream& out, const Metadata& m);

Json to_json(const FamilySpec& f);
Json to_json(const EpsRule& e);
Json to_json(const ExperimentConfig& cfg);
Json to_json(const MixRow& row);
Json to_json(const CutoffReport& r);
Json to_json(const PairingReport& r);
Json to_json(const HeatKernelReport& r, bool include_curve = false);
Json to_json(const LamplighterReport& r);
Json to_json(const SandwichReport& r);

// CSV tables, each preceded by the metadata header line.
void write_mix_table_csv(std::ostream& out, const CutoffReport& r, const Metadata& m);
void write_widths_csv(std::ostream& out, const CutoffReport& r, const Metadata& m);
void write_estimators_csv(std::ostream& out, const CutoffReport& r, const Metadata& m);

}  // namespace matchmix
