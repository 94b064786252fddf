#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "distnet/confrepl.hpp"
#include "distnet/mstruct.hpp"
#include "distnet/reach.hpp"
#include "distnet/verdict.hpp"

namespace distnet {

inline constexpr const char* kToolName = "distnet";
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

inline nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["truth"] = to_string(v.truth);
  j["detail"] = v.detail;
  j["witness"] = v.witness;
  return j;
}

inline nlohmann::json to_json(const Limits& lim) {
  nlohmann::json j;
  j["max_markings"] = lim.max_markings;
  j["max_tokens_per_place"] = lim.max_tokens_per_place;
  j["max_firing_len"] = lim.max_firing_len;
  j["max_step_size"] = lim.max_step_size;
  return j;
}

inline nlohmann::json to_json(const DistributabilityVerdict& v) {
  nlohmann::json j;
  switch (v.kind) {
    case Distributability::Distributable: j["kind"] = "distributable"; break;
    case Distributability::NotDistributable: j["kind"] = "not-distributable"; break;
    case Distributability::Inapplicable: j["kind"] = "inapplicable"; break;
    case Distributability::Unknown: j["kind"] = "unknown"; break;
  }
  j["detail"] = v.detail;
  if (v.witness) {
    j["witness"] = {{"t", v.witness->t},
                    {"u", v.witness->u},
                    {"v", v.witness->v},
                    {"marking", v.witness->marking.to_string()}};
  }
  if (!v.predicate_witness.empty()) j["predicate_witness"] = v.predicate_witness;
  return j;
}

// Machine-readable result of one CLI invocation. Wall time is informational
// and excluded from golden comparisons.
struct VerdictDocument {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, digest)
  nlohmann::json verdict;
  bool truncated = false;
  Limits limits;
  long long wall_ms = 0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [path, digest] : inputs)
      j["inputs"].push_back({{"path", path}, {"digest", digest}});
    j["verdict"] = verdict;
    j["truncated"] = truncated;
    j["limits"] = distnet::to_json(limits);
    j["wall_ms"] = wall_ms;
    return j;
  }
};

inline nlohmann::json to_json(const SynthesisReport& r) {
  nlohmann::json j;
  j["essentially_distributed"] = to_json(r.essentially_distributed);
  j["distributed_after_conversion"] = to_json(r.distributed_after_conversion);
  j["equivalence"] = to_json(r.equivalence);
  j["specification_places"] = r.specification.places.size();
  j["specification_transitions"] = r.specification.transitions.size();
  j["implementation_places"] = r.implementation.places.size();
  j["implementation_transitions"] = r.implementation.transitions.size();
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

}  // namespace distnet
