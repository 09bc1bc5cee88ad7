#pragma once

// GHZ preparation over a network of pre-shared entanglement.
//
//   Protocol I   three agents, two EPR pairs, symmetric circuit, 2 cbits.
//   Protocol II  any spanning EPR tree: signal, GHZ on {S, T, R}, then grow
//                the state along the tree by local extension + teleportation.
//   Protocol III a connected hypergraph of GHZ-form states, fused pairwise at
//                a junction agent, duplicates disentangled locally.
//
// Each protocol is a single-branch run over a NetworkState; the exploration
// driver re-runs it for every measurement branch (or a seeded sample).

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ghznet/errors.hpp"
#include "ghznet/locc.hpp"
#include "ghznet/statevec.hpp"
#include "ghznet/topology.hpp"

namespace ghznet {

// One designated qubit per agent: the qubit that carries its share of the GHZ.
using Designation = std::map<AgentId, QubitId>;

// Cyclic order over three agents. The agent after the sharer corrects with X
// on M2, the one after that with Z on M1.
struct CorrectionRule {
  std::array<AgentId, 3> cycle{AgentId{1}, AgentId{2}, AgentId{3}};
  AgentId sharer{1};

  AgentId successor(AgentId a) const {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (cycle[i] == a) return cycle[(i + 1) % cycle.size()];
    }
    throw InvalidArgument(to_string(a) + " is not in the cyclic order");
  }

  AgentId x_applier() const { return successor(sharer); }
  AgentId z_applier() const { return successor(successor(sharer)); }
};

using StepObserver = std::function<void(std::string_view label, const NetworkState&)>;

// ---- building blocks ----------------------------------------------------------

struct SymmetricGhzQubits {
  QubitId sharer;    // a1
  QubitId x_side;    // b
  QubitId z_side;    // c
  QubitId pair_half; // a2, measured
  QubitId ancilla;   // a3, measured
};

// The three-agent circuit. Claims the sharer's pairs with the X- and
// Z-appliers, entangles an ancilla with the first pair, and moves it onto the
// second pair with both receivers taking part in the correction. Observer
// labels: phi1 … phi7.
inline SymmetricGhzQubits symmetric_ghz(NetworkState& net, AgentId sharer, AgentId x_applier,
                                        AgentId z_applier, bool discard_measured,
                                        const StepObserver& observe = {}) {
  const auto note = [&](std::string_view label) {
    if (observe) observe(label, net);
  };
  const EprPair first = net.claim_pair(sharer, x_applier);
  const EprPair second = net.claim_pair(sharer, z_applier);
  const QubitId a1 = first.qa;
  const QubitId b = first.qb;
  const QubitId a2 = second.qa;
  const QubitId c = second.qb;

  const QubitId a3 = net.new_ancilla(sharer);
  net.local_gate(sharer, Gate::cnot(a1, a3));
  note("phi1");
  net.local_gate(sharer, Gate::cnot(a3, a2));
  note("phi2");
  const auto [m2, m2_bit] = net.local_measure(sharer, a2);
  note("phi3");
  net.local_gate(sharer, Gate::h(a3));
  note("phi4");
  const auto [m1, m1_bit] = net.local_measure(sharer, a3);
  note("phi5");
  net.local_gate(sharer, Gate::x(a1), m2_bit);
  net.send_classical({sharer, x_applier, {m2_bit}, "M2"});
  net.send_classical({sharer, z_applier, {m1_bit}, "M1"});
  net.local_gate(x_applier, Gate::x(b), m2_bit);
  note("phi6");
  net.local_gate(z_applier, Gate::z(c), m1_bit);
  note("phi7");

  if (discard_measured) {
    net.discard(sharer, a2);
    net.discard(sharer, a3);
  }
  return {a1, b, c, a2, a3};
}

// Entangles a fresh |0> qubit with `anchor` by a local CNOT; an m-qubit
// GHZ-form state becomes an (m+1)-qubit one.
inline QubitId fig5_extend(NetworkState& net, AgentId actor, QubitId anchor) {
  if (net.owner(anchor) != actor) {
    throw LoccViolation(to_string(actor) + " does not own " + to_string(anchor));
  }
  const QubitId extra = net.new_ancilla(actor);
  net.local_gate(actor, Gate::cnot(anchor, extra));
  return extra;
}

// Standard teleportation over an unused EPR pair. Returns the receiver's
// half, which now carries the payload state.
inline QubitId teleport(NetworkState& net, AgentId sender, QubitId payload, AgentId receiver,
                        PairUse use = PairUse::protocol) {
  if (net.owner(payload) != sender) {
    throw LoccViolation(to_string(sender) + " does not own " + to_string(payload));
  }
  const EprPair pair = net.claim_pair(sender, receiver, use);
  net.local_gate(sender, Gate::cnot(payload, pair.qa));
  const auto [m2, m2_bit] = net.local_measure(sender, pair.qa);
  net.local_gate(sender, Gate::h(payload));
  const auto [m1, m1_bit] = net.local_measure(sender, payload);
  net.send_classical({sender, receiver, {m2_bit}, "teleport X"});
  net.send_classical({sender, receiver, {m1_bit}, "teleport Z"});
  net.local_gate(receiver, Gate::x(pair.qb), m2_bit);
  net.local_gate(receiver, Gate::z(pair.qb), m1_bit);
  net.discard(sender, pair.qa);
  net.discard(sender, payload);
  return pair.qb;
}

// Fuses two independent GHZ-form groups at `junction`, which holds a qubit in
// each. The outcome bit is broadcast whatever its value. Returns the qubits
// of the merged group.
inline std::vector<QubitId> fusion_step(NetworkState& net, std::span<const QubitId> f_qubits,
                                        std::span<const QubitId> e_qubits, AgentId junction) {
  const auto held = [&](std::span<const QubitId> qs) -> std::optional<QubitId> {
    for (QubitId q : qs) {
      if (net.owner(q) == junction) return q;
    }
    return std::nullopt;
  };
  const auto qf = held(f_qubits);
  const auto qe = held(e_qubits);
  if (!qf || !qe) {
    throw ProtocolError(to_string(junction) + " needs a qubit in both groups to fuse them");
  }
  net.local_gate(junction, Gate::cnot(*qf, *qe));
  const auto [outcome, bit] = net.local_measure(junction, *qe);
  net.send_classical({junction, std::nullopt, {bit}, "fusion outcome"});
  for (QubitId q : e_qubits) {
    if (q != *qe) net.local_gate(net.owner(q), Gate::x(q), bit);
  }
  net.discard(junction, *qe);

  std::vector<QubitId> merged(f_qubits.begin(), f_qubits.end());
  for (QubitId q : e_qubits) {
    if (q != *qe) merged.push_back(q);
  }
  return merged;
}

// Undoes a local extension: with keep and drop perfectly correlated,
// CNOT(keep -> drop) returns drop to |0>, which is then verified and discarded.
inline void disentangle_duplicate(NetworkState& net, AgentId actor, QubitId keep, QubitId drop) {
  net.local_gate(actor, Gate::cnot(keep, drop));
  if (net.excited_probability(drop) > kFidelityTolerance) {
    throw ResidualEntanglement(to_string(keep) + " and " + to_string(drop) +
                               " are not perfectly correlated");
  }
  net.discard(actor, drop);
}

// Fidelity of the designated qubits with (|0…0> + |1…1>)/√2, agents in
// increasing order. Every other qubit must have factored out.
inline double verify_ghz(const NetworkState& net, const Designation& designated) {
  std::vector<QubitId> qubits;
  for (int a = 1; a <= net.agent_count(); ++a) {
    const auto it = designated.find(AgentId{a});
    if (it == designated.end()) throw InvalidArgument("A" + std::to_string(a) + " has no designated qubit");
    if (net.owner(it->second) != it->first) {
      throw InvalidArgument(to_string(it->second) + " is not owned by " + to_string(it->first));
    }
    qubits.push_back(it->second);
  }
  if (designated.size() != qubits.size()) throw InvalidArgument("designation names unknown agents");
  const StateVector joint = net.joint_state(qubits);
  if (joint.qubit_count() > qubits.size()) {
    const double residual = cut_entropy(joint, qubits);
    if (residual > kFidelityTolerance) {
      throw ResidualEntanglement("designated qubits are still entangled with other qubits (" +
                                 std::to_string(residual) + " bits)");
    }
  }
  const Eigen::MatrixXcd rho = reduced_density_matrix(joint, qubits);
  const Eigen::Index last = rho.rows() - 1;
  const double f = 0.5 * (rho(0, 0) + rho(0, last) + rho(last, 0) + rho(last, last)).real();
  return std::clamp(f, 0.0, 1.0);
}

// Largest entry-wise distance of any designated qubit's reduced state from I/2.
inline double marginal_deviation(const NetworkState& net, const Designation& designated) {
  double worst = 0.0;
  for (const auto& [agent, q] : designated) {
    const QubitId single[] = {q};
    const Eigen::MatrixXcd rho = reduced_density_matrix(net.joint_state(single), single);
    const Eigen::MatrixXcd diff = rho - 0.5 * Eigen::MatrixXcd::Identity(2, 2);
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return worst;
}

// ---- reports and branch exploration ---------------------------------------------

struct BranchMode {
  enum class Kind { exhaustive, sampled };

  Kind kind = Kind::exhaustive;
  std::size_t samples = 32;
  std::uint64_t seed = 0;
  std::size_t cap = std::size_t{1} << 20;  // exhaustive walks stop here ...
  std::size_t fallback_samples = 1024;     // ... and resample this many instead

  static BranchMode all(std::uint64_t seed = 0) { return {Kind::exhaustive, 32, seed}; }
  static BranchMode sample(std::size_t count, std::uint64_t seed = 0) {
    return {Kind::sampled, count, seed};
  }
};

struct BranchResult {
  std::vector<int> outcomes;
  double probability = 0.0;
  double fidelity = 0.0;
  double marginal_deviation = 0.0;
  std::size_t cbits = 0;
  std::size_t hits = 1;  // sampled runs that landed on this branch
};

// Entangled-set size after a fusion step: the bookkeeping value and the
// number of qubits actually in the merged factor.
struct FusionSize {
  std::size_t expected = 0;
  std::size_t simulated = 0;
};

struct ProtocolReport {
  std::string protocol;  // "I", "II", "III"
  std::string variant;
  int n = 0;
  std::optional<std::size_t> leaf_count;
  std::size_t cbits = 0;
  std::optional<std::size_t> expected_cbits;
  std::size_t epr_pairs_consumed = 0;
  std::size_t max_register = 0;
  std::string branch_mode;
  std::size_t runs = 0;
  std::vector<BranchResult> branches;
  double worst_fidelity = 1.0;
  double total_probability = 0.0;
  std::vector<FusionSize> fusion_sizes;
  std::size_t duplicates_disentangled = 0;
  std::vector<std::string> problems;  // identity violations found while running
  Transcript transcript;              // of the first run

  bool identities_hold() const noexcept { return problems.empty(); }
  bool succeeded() const noexcept {
    return identities_hold() && worst_fidelity >= 1.0 - kFidelityTolerance;
  }
};

// What a single run reports back to the explorer.
struct RunSummary {
  double fidelity = 0.0;
  double marginal_deviation = 0.0;
  std::vector<FusionSize> fusion_sizes;
  std::size_t duplicates_disentangled = 0;
  std::vector<std::string> problems;
};

namespace detail {

inline double branch_probability(const Transcript& t) {
  double p = 1.0;
  for (const auto& ev : t) {
    if (const auto* m = std::get_if<event::Measure>(&ev)) p *= m->probability;
  }
  return p;
}

inline void add_problem(ProtocolReport& report, const std::string& problem) {
  if (std::find(report.problems.begin(), report.problems.end(), problem) == report.problems.end()) {
    report.problems.push_back(problem);
  }
}

inline void absorb(ProtocolReport& report, const NetworkState& net, const RunSummary& run,
                   std::vector<int> outcomes) {
  if (report.runs == 0) {
    report.cbits = net.cbit_count();
    report.epr_pairs_consumed = net.consumed_pairs();
    report.transcript = net.transcript();
    report.fusion_sizes = run.fusion_sizes;
    report.duplicates_disentangled = run.duplicates_disentangled;
  } else {
    if (net.cbit_count() != report.cbits) add_problem(report, "cbit count differs between branches");
    if (net.consumed_pairs() != report.epr_pairs_consumed) {
      add_problem(report, "EPR consumption differs between branches");
    }
  }
  ++report.runs;
  report.max_register = std::max(report.max_register, net.max_register());
  for (const auto& p : run.problems) add_problem(report, p);
  report.worst_fidelity = std::min(report.worst_fidelity, run.fidelity);
  report.branches.push_back({std::move(outcomes), branch_probability(net.transcript()),
                             run.fidelity, run.marginal_deviation, net.cbit_count(), 1});
}

// Folds repeated sampled branches together and sorts by outcome vector.
inline void canonicalise(std::vector<BranchResult>& branches) {
  std::map<std::vector<int>, BranchResult> merged;
  for (auto& b : branches) {
    auto [it, inserted] = merged.try_emplace(b.outcomes, b);
    if (!inserted) it->second.hits += b.hits;
  }
  branches.clear();
  for (auto& [key, b] : merged) branches.push_back(std::move(b));
}

template <class Run>
void explore_sampled(ProtocolReport& report, const NetworkState& initial, std::size_t count,
                     std::uint64_t seed, Run& run) {
  std::mt19937_64 engine(seed);
  for (std::size_t i = 0; i < count; ++i) {
    NetworkState net = initial;
    net.set_branch_source(BranchSource::sampled(engine));
    const RunSummary summary = run(net);
    engine = net.branch_source().engine();
    absorb(report, net, summary, net.branch_source().outcomes());
  }
  canonicalise(report.branches);
}

}  // namespace detail

// Runs `run` (RunSummary(NetworkState&)) once per branch. Exhaustive mode
// walks the outcome tree depth-first, 0 before 1, so branches come out in
// lexicographic order.
template <class Run>
void explore(ProtocolReport& report, const NetworkState& initial, const BranchMode& mode, Run run) {
  const auto finish = [&report] {
    report.total_probability = 0.0;
    for (const auto& b : report.branches) report.total_probability += b.probability;
    if (report.expected_cbits && report.cbits != *report.expected_cbits) {
      detail::add_problem(report, "cbits " + std::to_string(report.cbits) + " != expected " +
                                      std::to_string(*report.expected_cbits));
    }
  };

  if (mode.kind == BranchMode::Kind::sampled) {
    report.branch_mode = "sampled";
    detail::explore_sampled(report, initial, mode.samples, mode.seed, run);
    finish();
    return;
  }

  report.branch_mode = "exhaustive";
  std::vector<int> prefix;
  std::vector<bool> pending;  // per prefix position: is outcome 1 still unexplored?
  for (;;) {
    NetworkState net = initial;
    net.set_branch_source(BranchSource::scripted(prefix));
    const RunSummary summary = run(net);
    const auto& source = net.branch_source();
    std::vector<int> outcomes = source.outcomes();
    std::vector<bool> open(outcomes.size(), false);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      open[i] = i < pending.size() ? pending[i] : source.alternatives()[i];
    }
    detail::absorb(report, net, summary, outcomes);

    std::size_t j = open.size();
    while (j > 0 && !open[j - 1]) --j;
    if (j == 0) break;
    if (report.branches.size() >= mode.cap) {
      // Too many branches to enumerate: resample from the seeded stream.
      ProtocolReport fresh;
      fresh.protocol = report.protocol;
      fresh.variant = report.variant;
      fresh.n = report.n;
      fresh.leaf_count = report.leaf_count;
      fresh.expected_cbits = report.expected_cbits;
      report = std::move(fresh);
      report.branch_mode = "sampled (exhaustive cap reached)";
      detail::explore_sampled(report, initial, mode.fallback_samples, mode.seed, run);
      finish();
      return;
    }
    prefix.assign(outcomes.begin(), outcomes.begin() + static_cast<std::ptrdiff_t>(j - 1));
    prefix.push_back(1);
    pending.assign(open.begin(), open.begin() + static_cast<std::ptrdiff_t>(j - 1));
    pending.push_back(false);
  }
  finish();
}

// ---- Protocol I ------------------------------------------------------------------

// The rule implied by a three-agent setup: the sharer is whoever holds both pairs.
inline CorrectionRule correction_rule_for(const NetworkState& net) {
  if (net.agent_count() != 3 || net.epr_pairs().size() != 2) {
    throw ProtocolError("Protocol I needs three agents and exactly two EPR pairs");
  }
  const auto& p = net.epr_pairs();
  for (AgentId a : {p[0].a, p[0].b}) {
    if (a == p[1].a || a == p[1].b) return CorrectionRule{{AgentId{1}, AgentId{2}, AgentId{3}}, a};
  }
  throw ProtocolError("Protocol I needs the two EPR pairs to share an agent");
}

// Single branch of Protocol I. The measured qubits stay in the register.
inline RunSummary run_protocol_one(NetworkState& net, const CorrectionRule& rule,
                                   const StepObserver& observe = {}) {
  const CorrectionRule implied = correction_rule_for(net);
  if (implied.sharer != rule.sharer) {
    throw ProtocolError("correction rule names " + to_string(rule.sharer) +
                        " as sharer but the EPR pairs meet at " + to_string(implied.sharer));
  }
  const AgentId x = rule.x_applier();
  const AgentId z = rule.z_applier();
  const auto q = symmetric_ghz(net, rule.sharer, x, z, false, observe);
  const Designation designated{{rule.sharer, q.sharer}, {x, q.x_side}, {z, q.z_side}};
  RunSummary out;
  out.fidelity = verify_ghz(net, designated);
  out.marginal_deviation = marginal_deviation(net, designated);
  return out;
}

inline ProtocolReport protocol_one(const NetworkState& initial, const CorrectionRule& rule,
                                   const BranchMode& mode = BranchMode::all(),
                                   const StepObserver& observe = {}) {
  ProtocolReport report;
  report.protocol = "I";
  report.variant = "symmetric";
  report.n = 3;
  report.expected_cbits = 2;
  explore(report, initial, mode,
          [&](NetworkState& net) { return run_protocol_one(net, rule, observe); });
  return report;
}

// ---- Protocol II -----------------------------------------------------------------

enum class Step2Variant { symmetric, zeilinger };

inline std::string to_string(Step2Variant v) {
  return v == Step2Variant::symmetric ? "symmetric" : "zeilinger";
}

struct WeaveOptions {
  Step2Variant step2 = Step2Variant::symmetric;
  BranchMode branches = BranchMode::all();
  // When set, Step 3 picks the next ready vertex at random from this seed
  // instead of lowest index first.
  std::optional<std::uint64_t> order_seed;
};

// cbits of a full run: 1 signal + Step 2 + 2 per teleportation + one per
// leaf other than T.
inline std::size_t expected_weave_cbits(int n, std::size_t leaves, Step2Variant step2) {
  if (n == 2) return 1;
  const std::size_t base = 2 * static_cast<std::size_t>(n) + leaves - 4;
  return step2 == Step2Variant::symmetric ? base : base - 1;
}

namespace detail {

inline void require_matching_pairs(const NetworkState& net, const SpanningTree& tree) {
  if (net.agent_count() != tree.n) throw ProtocolError("network and tree disagree on agent count");
  if (!net.ghz_groups().empty()) throw ProtocolError("Protocol II setups hold EPR pairs only");
  std::vector<std::pair<AgentId, AgentId>> have;
  for (const auto& p : net.epr_pairs()) {
    if (p.consumed) throw ProtocolError("setup EPR pair already consumed");
    have.emplace_back(std::min(p.a, p.b), std::max(p.a, p.b));
  }
  std::vector<std::pair<AgentId, AgentId>> want;
  for (const auto& e : tree.edges) want.emplace_back(e.u, e.v);
  std::sort(have.begin(), have.end());
  std::sort(want.begin(), want.end());
  if (have != want) throw ProtocolError("setup EPR pairs do not match the spanning tree");
}

}  // namespace detail

// Single branch of Protocol II; returns the designation it built.
inline Designation run_protocol_two(NetworkState& net, const SpanningTree& tree,
                                    const WeaveOptions& options = {}) {
  detail::require_matching_pairs(net, tree);
  const AgentId s = tree.start;
  const AgentId t = tree.root_leaf;

  const BitId go = net.signal_bit(s, 1);
  net.send_classical({s, std::nullopt, {go}, "start"});
  net.lock_pairs(s);

  Designation designated;
  if (tree.n == 2) {
    const EprPair pair = net.claim_pair(s, t);
    designated[s] = pair.qa;
    designated[t] = pair.qb;
    return designated;
  }

  const auto others = tree.neighbors(s);
  const AgentId r = *std::find_if(others.begin(), others.end(), [&](AgentId a) { return a != t; });
  if (options.step2 == Step2Variant::symmetric) {
    const auto q = symmetric_ghz(net, s, t, r, true);
    designated[s] = q.sharer;
    designated[t] = q.x_side;
    designated[r] = q.z_side;
  } else {
    const EprPair st = net.claim_pair(s, t);
    const EprPair sr = net.claim_pair(s, r);
    const QubitId f[] = {st.qa, st.qb};
    const QubitId e[] = {sr.qa, sr.qb};
    fusion_step(net, f, e, s);
    designated[s] = st.qa;
    designated[t] = st.qb;
    designated[r] = sr.qb;
  }

  std::set<AgentId> ready{s, r};
  std::optional<std::mt19937_64> shuffle;
  if (options.order_seed) shuffle.emplace(*options.order_seed);
  while (!ready.empty()) {
    auto it = ready.begin();
    if (shuffle) std::advance(it, static_cast<std::ptrdiff_t>((*shuffle)() % ready.size()));
    const AgentId a = *it;
    ready.erase(it);
    if (tree.is_leaf(a)) {
      const BitId done = net.signal_bit(a, 1);
      net.send_classical({a, std::nullopt, {done}, "leaf done"});
      continue;
    }
    for (AgentId k : tree.neighbors(a)) {
      if (designated.contains(k)) continue;
      const QubitId extra = fig5_extend(net, a, designated.at(a));
      designated[k] = teleport(net, a, extra, k);
      ready.insert(k);
    }
  }
  return designated;
}

inline ProtocolReport protocol_two(const NetworkState& initial, const SpanningTree& tree,
                                   const WeaveOptions& options = {}) {
  if (tree.n < 2) throw InvalidArgument("Protocol II needs at least two agents");
  detail::require_matching_pairs(initial, tree);
  ProtocolReport report;
  report.protocol = "II";
  report.variant = tree.n == 2 ? "degenerate" : to_string(options.step2);
  report.n = tree.n;
  report.leaf_count = tree.leaf_count();
  report.expected_cbits = expected_weave_cbits(tree.n, tree.leaf_count(), options.step2);
  const std::size_t n = static_cast<std::size_t>(tree.n);
  explore(report, initial, options.branches, [&](NetworkState& net) {
    const Designation designated = run_protocol_two(net, tree, options);
    RunSummary out;
    out.fidelity = verify_ghz(net, designated);
    out.marginal_deviation = marginal_deviation(net, designated);
    if (net.consumed_pairs() != n - 1) out.problems.push_back("EPR pairs consumed != n-1");
    if (n >= 3 && net.cbit_count() > 3 * n - 5) out.problems.push_back("cbits exceed 3n-5");
    if (net.max_register() > n + 2) out.problems.push_back("live register exceeded n+2 qubits");
    return out;
  });
  return report;
}

// ---- Protocol III ----------------------------------------------------------------

namespace detail {

// Setup GHZ groups matched to hyperedges (sorted order), by member set.
inline std::vector<std::vector<QubitId>> match_groups(const NetworkState& net,
                                                      const EntangledHypergraph& h) {
  if (net.agent_count() != h.agent_count()) {
    throw ProtocolError("network and hypergraph disagree on agent count");
  }
  const auto& groups = net.ghz_groups();
  if (groups.size() != h.hyperedges().size()) {
    throw ProtocolError("setup states do not match the hyperedges");
  }
  std::vector<bool> used(groups.size(), false);
  std::vector<std::vector<QubitId>> out;
  for (const auto& e : h.hyperedges()) {
    bool found = false;
    for (std::size_t g = 0; g < groups.size() && !found; ++g) {
      if (!used[g] && groups[g].members == e.members) {
        used[g] = true;
        found = true;
        out.push_back(groups[g].qubits);
      }
    }
    if (!found) throw ProtocolError("no setup state for a hyperedge");
  }
  return out;
}

inline QubitId held_by(const NetworkState& net, const std::vector<QubitId>& qubits, AgentId a) {
  for (QubitId q : qubits) {
    if (net.is_live(q) && net.owner(q) == a) return q;
  }
  throw ProtocolError(to_string(a) + " holds no qubit of the group");
}

}  // namespace detail

// Single branch of Protocol III.
inline Designation run_protocol_three(NetworkState& net, const EntangledHypergraph& h,
                                      RunSummary* summary = nullptr) {
  if (!hypergraph_is_connected(h)) detail::require_connected(h);
  const auto groups = detail::match_groups(net, h);
  const auto steps = merge_schedule(h);

  Designation designated;
  for (std::size_t i = 0; i < h.hyperedges().front().members.size(); ++i) {
    designated[h.hyperedges().front().members[i]] = groups.front()[i];
  }
  for (const auto& step : steps) {
    const auto& members = h.hyperedges()[step.hyperedge].members;
    const auto& e_qubits = groups[step.hyperedge];
    std::vector<QubitId> f_qubits;
    for (const auto& [agent, q] : designated) f_qubits.push_back(q);

    fusion_step(net, f_qubits, e_qubits, step.junction);
    for (AgentId a : step.overlap) {
      if (a == step.junction) continue;
      disentangle_duplicate(net, a, designated.at(a), detail::held_by(net, e_qubits, a));
      if (summary) ++summary->duplicates_disentangled;
    }
    for (AgentId a : members) {
      if (!designated.contains(a)) designated[a] = detail::held_by(net, e_qubits, a);
    }
    if (summary) {
      summary->fusion_sizes.push_back(
          {step.post_size(), net.entangled_size(designated.at(step.junction))});
    }
  }
  // Hyperedges already inside F: each holder measures its qubit out.
  for (std::size_t i : redundant_hyperedges(h, steps)) {
    for (QubitId q : groups[i]) {
      const AgentId a = net.owner(q);
      net.local_measure(a, q);
      net.discard(a, q);
    }
  }
  return designated;
}

inline ProtocolReport protocol_three(const NetworkState& initial, const EntangledHypergraph& h,
                                     const BranchMode& mode = BranchMode::all()) {
  // Rejected before any quantum action.
  if (!hypergraph_is_connected(h)) detail::require_connected(h);
  if (h.hyperedges().empty()) throw InvalidArgument("Protocol III needs at least one hyperedge");
  detail::match_groups(initial, h);
  const auto steps = merge_schedule(h);
  ProtocolReport report;
  report.protocol = "III";
  report.variant = "fusion";
  report.n = h.agent_count();
  report.expected_cbits = steps.size();
  explore(report, initial, mode, [&](NetworkState& net) {
    RunSummary out;
    const Designation designated = run_protocol_three(net, h, &out);
    out.fidelity = verify_ghz(net, designated);
    out.marginal_deviation = marginal_deviation(net, designated);
    for (const auto& s : out.fusion_sizes) {
      if (s.expected != s.simulated) out.problems.push_back("fusion size bookkeeping mismatch");
    }
    return out;
  });
  return report;
}

}  // namespace ghznet
