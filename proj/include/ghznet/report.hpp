#pragma once

// JSON rendering of reports and transcripts. Key order is fixed so that a
// report is byte-stable for a fixed (spec, seed, flags).

#include <string>
#include <variant>

#include "json.hpp"

#include "ghznet/locc.hpp"
#include "ghznet/protocols.hpp"
#include "ghznet/topology.hpp"

namespace ghznet {

using Json = nlohmann::ordered_json;

inline Json to_json(const TranscriptEvent& ev) {
  return std::visit(
      [](const auto& e) -> Json {
        using T = std::decay_t<decltype(e)>;
        Json j;
        if constexpr (std::is_same_v<T, event::Ancilla>) {
          j["event"] = "ancilla";
          j["actor"] = e.actor.value;
          j["qubit"] = e.qubit.value;
          if (e.amplitudes[0] != Complex{1.0}) {
            j["state"] = {e.amplitudes[0].real(), e.amplitudes[0].imag(), e.amplitudes[1].real(),
                          e.amplitudes[1].imag()};
          }
        } else if constexpr (std::is_same_v<T, event::LocalGate>) {
          j["event"] = "gate";
          j["actor"] = e.actor.value;
          j["gate"] = to_string(e.gate.kind);
          Json qs = Json::array();
          for (QubitId q : e.gate.operands()) qs.push_back(q.value);
          j["qubits"] = qs;
          if (e.condition) j["if_bit"] = e.condition->value;
          j["applied"] = e.applied;
        } else if constexpr (std::is_same_v<T, event::Measure>) {
          j["event"] = "measure";
          j["actor"] = e.actor.value;
          j["qubit"] = e.qubit.value;
          j["bit"] = e.bit.value;
          j["outcome"] = e.outcome;
          j["probability"] = e.probability;
        } else if constexpr (std::is_same_v<T, event::Signal>) {
          j["event"] = "signal";
          j["actor"] = e.actor.value;
          j["bit"] = e.bit.value;
          j["value"] = e.value;
        } else if constexpr (std::is_same_v<T, event::Send>) {
          j["event"] = "send";
          j["from"] = e.message.sender.value;
          if (e.message.receiver) {
            j["to"] = e.message.receiver->value;
          } else {
            j["to"] = "all";
          }
          Json bits = Json::array();
          for (BitId b : e.message.bits) bits.push_back(b.value);
          j["bits"] = bits;
          j["values"] = e.values;
          j["purpose"] = e.message.purpose;
        } else if constexpr (std::is_same_v<T, event::Discard>) {
          j["event"] = "discard";
          j["actor"] = e.actor.value;
          j["qubit"] = e.qubit.value;
        } else if constexpr (std::is_same_v<T, event::Lock>) {
          j["event"] = "lock_pairs";
          j["actor"] = e.actor.value;
        } else if constexpr (std::is_same_v<T, event::ClaimPair>) {
          j["event"] = "claim_pair";
          j["agents"] = {e.a.value, e.b.value};
          j["use"] = e.use == PairUse::protocol ? "protocol" : "ad_hoc";
        }
        return j;
      },
      ev);
}

inline Json to_json(const Transcript& t) {
  Json out = Json::array();
  for (const auto& ev : t) out.push_back(to_json(ev));
  return out;
}

inline std::string outcome_string(const std::vector<int>& outcomes) {
  std::string s;
  for (int b : outcomes) s.push_back(b ? '1' : '0');
  return s;
}

inline Json to_json(const SpanningTree& tree) {
  Json j;
  Json edges = Json::array();
  for (const auto& e : tree.edges) edges.push_back({e.u.value, e.v.value});
  j["edges"] = edges;
  j["total_weight"] = tree.total_weight();
  j["T"] = tree.root_leaf.value;
  j["S"] = tree.start.value;
  Json leaves = Json::array();
  for (AgentId a : tree.leaves) leaves.push_back(a.value);
  j["L"] = leaves;
  j["k"] = tree.leaf_count();
  return j;
}

inline Json to_json(const ProtocolReport& r) {
  Json j;
  j["protocol"] = r.protocol;
  j["variant"] = r.variant;
  j["n"] = r.n;
  if (r.leaf_count) j["k"] = *r.leaf_count;
  j["cbits"] = r.cbits;
  if (r.expected_cbits) j["expected_cbits"] = *r.expected_cbits;
  j["identities_hold"] = r.identities_hold();
  j["worst_fidelity"] = r.worst_fidelity;
  j["epr_pairs_consumed"] = r.epr_pairs_consumed;
  j["max_register"] = r.max_register;
  if (!r.fusion_sizes.empty()) {
    Json sizes = Json::array();
    for (const auto& s : r.fusion_sizes) sizes.push_back({{"expected", s.expected}, {"simulated", s.simulated}});
    j["fusion_sizes"] = sizes;
    j["duplicates_disentangled"] = r.duplicates_disentangled;
  }
  j["problems"] = r.problems;
  j["branch_mode"] = r.branch_mode;
  j["runs"] = r.runs;
  j["total_probability"] = r.total_probability;
  Json branches = Json::array();
  for (const auto& b : r.branches) {
    Json row;
    row["outcomes"] = outcome_string(b.outcomes);
    row["probability"] = b.probability;
    row["fidelity"] = b.fidelity;
    row["cbits"] = b.cbits;
    if (b.hits != 1) row["hits"] = b.hits;
    branches.push_back(row);
  }
  j["branches"] = branches;
  j["transcript"] = to_json(r.transcript);
  return j;
}

}  // namespace ghznet
