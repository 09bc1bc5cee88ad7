#pragma once

// Command-line front end, kept free of argv handling so it can be driven
// in-process. Exit status: 0 success, 1 error or failed identity,
// 2 connectivity rejection.

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "ghznet/errors.hpp"
#include "ghznet/locc.hpp"
#include "ghznet/protocols.hpp"
#include "ghznet/report.hpp"
#include "ghznet/spec_format.hpp"
#include "ghznet/topology.hpp"

namespace ghznet::cli {

inline constexpr std::string_view kToolName = "ghznet";
inline constexpr std::string_view kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDisconnected = 2;

struct Flags {
  std::uint64_t seed = 0;
  std::string branches = "all";  // "all" or "sample:<count>"
  std::string step2 = "symmetric";
  bool verbose = false;
};

struct Result {
  int exit_code = kExitOk;
  std::string report;   // JSON document, newline-terminated
  std::string summary;  // one human-readable line
  std::string detail;   // transcript listing, filled when verbose
};

inline BranchMode parse_branch_mode(std::string_view text, std::uint64_t seed) {
  if (text == "all") return BranchMode::all(seed);
  constexpr std::string_view prefix = "sample:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string_view count = text.substr(prefix.size());
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
    if (ec == std::errc{} && ptr == count.data() + count.size() && n > 0) {
      return BranchMode::sample(n, seed);
    }
  }
  throw InvalidArgument("--branches expects 'all' or 'sample:<count>'");
}

inline Step2Variant parse_step2(std::string_view text) {
  if (text == "symmetric") return Step2Variant::symmetric;
  if (text == "zeilinger") return Step2Variant::zeilinger;
  throw InvalidArgument("--step2 expects 'symmetric' or 'zeilinger'");
}

// One line per transcript event.
inline std::string describe(const Transcript& t) {
  std::ostringstream out;
  for (const auto& ev : t) out << to_json(ev).dump() << '\n';
  return out.str();
}

namespace detail {

inline bool spec_connected(const NetworkSpec& spec) {
  return spec.mode == NetworkSpec::Mode::epr_graph ? is_connected(spec.graph())
                                                   : hypergraph_is_connected(spec.hypergraph());
}

inline void require_edges(const NetworkSpec& spec, std::string_view subcommand) {
  if (spec.mode != NetworkSpec::Mode::epr_graph) {
    throw InvalidArgument(std::string(subcommand) + " needs an EPR-graph spec ('edge' lines)");
  }
}

inline std::string summarise(std::string_view subcommand, const ProtocolReport& r) {
  std::ostringstream out;
  out << subcommand << ": protocol " << r.protocol << " (" << r.variant << "), n=" << r.n;
  if (r.leaf_count) out << ", k=" << *r.leaf_count;
  out << ", cbits=" << r.cbits << ", worst_fidelity=" << r.worst_fidelity << ", branches="
      << r.branches.size() << (r.succeeded() ? ", ok" : ", FAILED");
  return out.str();
}

}  // namespace detail

inline Result run(std::string_view subcommand, std::string_view spec_text, const Flags& flags) {
  Result result;
  Json report;
  report["tool"] = kToolName;
  report["version"] = kToolVersion;
  report["subcommand"] = subcommand;
  report["seed"] = flags.seed;
  report["flags"] = {{"branches", flags.branches}, {"step2", flags.step2}};

  const auto finish = [&](int code, const std::string& verdict) {
    result.exit_code = code;
    report["verdict"] = verdict;
    report["exit_status"] = code;
    result.report = report.dump(2) + "\n";
    return result;
  };

  try {
    const NetworkSpec spec = parse_spec(spec_text);
    report["spec_hash"] = spec_hash(spec);
    report["agents"] = spec.agents;
    report["mode"] = to_string(spec.mode);

    const BranchMode branches = parse_branch_mode(flags.branches, flags.seed);
    const Step2Variant step2 = parse_step2(flags.step2);

    const bool connected = detail::spec_connected(spec);
    report["connected"] = connected;

    if (subcommand == "check") {
      result.summary = connected ? "connected" : "disconnected";
      return finish(connected ? kExitOk : kExitDisconnected, result.summary);
    }

    if (subcommand == "tree" || subcommand == "mst") {
      detail::require_edges(spec, subcommand);
      const EprGraph g = spec.graph();
      const SpanningTree tree = subcommand == "tree" ? spanning_tree(g) : minimum_spanning_tree(g);
      report["tree"] = to_json(tree);
      result.summary = std::string(subcommand) + ": k=" + std::to_string(tree.leaf_count()) +
                       ", T=" + std::to_string(tree.root_leaf.value) +
                       ", S=" + std::to_string(tree.start.value);
      return finish(kExitOk, "ok");
    }

    ProtocolReport protocol;
    if (subcommand == "ghz3") {
      detail::require_edges(spec, subcommand);
      const EprGraph g = spec.graph();
      if (!connected) ghznet::detail::require_connected(g);
      const NetworkState net = network_from_graph(g);
      protocol = protocol_one(net, correction_rule_for(net), branches);
    } else if (subcommand == "weave") {
      detail::require_edges(spec, subcommand);
      const EprGraph g = spec.graph();
      const SpanningTree tree = g.has_weights() ? minimum_spanning_tree(g) : spanning_tree(g);
      report["tree"] = to_json(tree);
      WeaveOptions options;
      options.step2 = step2;
      options.branches = branches;
      protocol = protocol_two(network_from_graph(tree.as_graph()), tree, options);
    } else if (subcommand == "fuse") {
      const EntangledHypergraph h = spec.hypergraph();
      if (!connected) ghznet::detail::require_connected(h);
      protocol = protocol_three(network_from_hypergraph(h), h, branches);
    } else {
      throw InvalidArgument("unknown subcommand '" + std::string(subcommand) + "'");
    }

    report["report"] = to_json(protocol);
    result.summary = detail::summarise(subcommand, protocol);
    if (flags.verbose) result.detail = describe(protocol.transcript);
    return finish(protocol.succeeded() ? kExitOk : kExitFailure,
                  protocol.succeeded() ? "ok" : "failed");
  } catch (const ConnectivityError& e) {
    report["error"] = e.what();
    result.summary = e.what();
    return finish(kExitDisconnected, "disconnected");
  } catch (const Error& e) {
    report["error"] = e.what();
    result.summary = e.what();
    return finish(kExitFailure, "error");
  }
}

}  // namespace ghznet::cli
