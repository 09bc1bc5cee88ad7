#pragma once

// Distributed network model. Agents own qubits; every quantum operation is
// checked for locality, every classical bit is tracked to the agents that
// know it, and all communication is transcribed and counted.
//
// The global state is held as a product of independent factors. Operations
// that touch several factors merge them first, so untouched setup resources
// never inflate the register.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ghznet/errors.hpp"
#include "ghznet/statevec.hpp"
#include "ghznet/topology.hpp"

namespace ghznet {

struct BitId {
  std::uint32_t value{};

  friend constexpr auto operator<=>(const BitId&, const BitId&) = default;
};

struct ClassicalMessage {
  AgentId sender;
  std::optional<AgentId> receiver;  // empty: broadcast
  std::vector<BitId> bits;
  std::string purpose;
};

// Where measurement outcomes come from: a seeded stream, or a scripted
// prefix followed by "lowest possible outcome" (used to walk every branch).
class BranchSource {
 public:
  static BranchSource seeded(std::uint64_t seed) {
    BranchSource s;
    s.engine_.seed(seed);
    return s;
  }

  // Continues an existing stream, so consecutive runs share one sequence.
  static BranchSource sampled(std::mt19937_64 engine) {
    BranchSource s;
    s.engine_ = std::move(engine);
    return s;
  }

  static BranchSource scripted(std::vector<int> prefix) {
    BranchSource s;
    s.scripted_ = true;
    s.prefix_ = std::move(prefix);
    return s;
  }

  int choose(double p0, double p1) {
    int bit = 0;
    bool alternative = false;
    if (!scripted_) {
      bit = sample_with(engine_)(p0, p1);
    } else if (outcomes_.size() < prefix_.size()) {
      bit = prefix_[outcomes_.size()];
    } else {
      bit = p0 > kProbabilityTolerance ? 0 : 1;
      alternative = bit == 0 && p1 > kProbabilityTolerance;
    }
    outcomes_.push_back(bit);
    alternatives_.push_back(alternative);
    return bit;
  }

  bool is_scripted() const noexcept { return scripted_; }
  std::size_t prefix_length() const noexcept { return prefix_.size(); }

  // Every outcome handed out so far, in order.
  const std::vector<int>& outcomes() const noexcept { return outcomes_; }

  // For scripted sources: whether outcome 1 was also possible where the
  // walker took 0 beyond the prefix.
  const std::vector<bool>& alternatives() const noexcept { return alternatives_; }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  BranchSource() = default;

  bool scripted_ = false;
  std::vector<int> prefix_;
  std::mt19937_64 engine_;
  std::vector<int> outcomes_;
  std::vector<bool> alternatives_;
};

enum class PairUse { protocol, ad_hoc };

struct EprPair {
  AgentId a;
  AgentId b;
  QubitId qa;  // owned by a
  QubitId qb;  // owned by b
  bool consumed = false;
};

struct GhzGroup {
  std::vector<AgentId> members;  // ascending
  std::vector<QubitId> qubits;   // qubits[i] owned by members[i]
};

namespace event {

struct Ancilla {
  AgentId actor;
  QubitId qubit;
  std::array<Complex, 2> amplitudes{Complex{1.0}, Complex{}};
};
struct LocalGate {
  AgentId actor;
  Gate gate;
  std::optional<BitId> condition;
  bool applied = true;
};
struct Measure {
  AgentId actor;
  QubitId qubit;
  BitId bit;
  int outcome = 0;
  double probability = 1.0;
};
struct Signal {
  AgentId actor;
  BitId bit;
  int value = 0;
};
struct Send {
  ClassicalMessage message;
  std::vector<int> values;
};
struct Discard {
  AgentId actor;
  QubitId qubit;
};
struct Lock {
  AgentId actor;
};
struct ClaimPair {
  AgentId a;
  AgentId b;
  PairUse use = PairUse::protocol;
};

}  // namespace event

using TranscriptEvent = std::variant<event::Ancilla, event::LocalGate, event::Measure,
                                     event::Signal, event::Send, event::Discard, event::Lock,
                                     event::ClaimPair>;
using Transcript = std::vector<TranscriptEvent>;

class NetworkState {
 public:
  explicit NetworkState(int n, BranchSource source = BranchSource::seeded(0))
      : n_(n), source_(std::move(source)), knowledge_(static_cast<std::size_t>(n) + 1) {
    if (n < 1) throw InvalidArgument("a network needs at least one agent");
  }

  int agent_count() const noexcept { return n_; }
  bool in_setup() const noexcept { return setup_; }

  // ---- setup phase -------------------------------------------------------

  std::pair<QubitId, QubitId> distribute_epr(AgentId a, AgentId b) {
    require_setup();
    check_agent(a);
    check_agent(b);
    if (a == b) throw InvalidArgument("an EPR pair needs two distinct agents");
    const QubitId qa = fresh_qubit(a);
    const QubitId qb = fresh_qubit(b);
    add_factor(ghz_state({qa, qb}));
    pairs_.push_back({a, b, qa, qb, false});
    return {qa, qb};
  }

  // One fresh qubit per member, jointly in (|0…0> + |1…1>)/√2.
  std::vector<QubitId> distribute_ghz(std::span<const AgentId> members) {
    require_setup();
    if (members.size() < 2) throw InvalidArgument("a shared GHZ state needs at least two agents");
    std::vector<AgentId> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidArgument("GHZ members must be distinct");
    }
    for (AgentId a : sorted) check_agent(a);
    GhzGroup group{sorted, {}};
    for (AgentId a : sorted) group.qubits.push_back(fresh_qubit(a));
    add_factor(ghz_state(group.qubits));
    if (sorted.size() == 2) {
      pairs_.push_back({sorted[0], sorted[1], group.qubits[0], group.qubits[1], false});
    }
    groups_.push_back(group);
    return group.qubits;
  }

  std::vector<QubitId> distribute_ghz(std::initializer_list<AgentId> members) {
    return distribute_ghz(std::span<const AgentId>(members.begin(), members.size()));
  }

  // ---- local operations and classical communication ----------------------

  // Fresh |0> qubit; free and legal at any time.
  QubitId new_ancilla(AgentId actor) { return prepare_qubit(actor, Complex{1.0}, Complex{}); }

  // Fresh qubit in a0|0> + a1|1>, prepared locally by the actor.
  QubitId prepare_qubit(AgentId actor, Complex a0, Complex a1) {
    check_agent(actor);
    StateVector single = StateVector::from_amplitudes({QubitId{next_qubit_}}, {a0, a1});
    const QubitId q = fresh_qubit(actor);
    add_factor(std::move(single));
    setup_ = false;
    transcript_.push_back(event::Ancilla{actor, q, {a0, a1}});
    return q;
  }

  // Applies g if `condition` is absent or carries 1. Returns whether it ran.
  bool local_gate(AgentId actor, const Gate& g, std::optional<BitId> condition = std::nullopt) {
    check_agent(actor);
    for (QubitId q : g.operands()) require_owner(actor, q, "apply a gate to");
    if (g.kind == GateKind::CNOT && g.first == g.second) {
      throw InvalidArgument("CNOT operands must differ");
    }
    bool applied = true;
    if (condition) {
      require_known(actor, *condition);
      applied = bits_[condition->value].value == 1;
    }
    setup_ = false;
    if (applied) {
      const auto operands = g.operands();
      const std::size_t f = merge(operands);
      factors_[f] = apply_gate(std::move(factors_[f]), g);
    }
    transcript_.push_back(event::LocalGate{actor, g, condition, applied});
    return applied;
  }

  // Computational-basis measurement; the outcome is known to the actor only.
  std::pair<MeasurementOutcome, BitId> local_measure(AgentId actor, QubitId q) {
    check_agent(actor);
    require_owner(actor, q, "measure");
    setup_ = false;
    const std::size_t f = factor_of(q);
    auto [outcome, post] =
        measure(factors_[f], q, [this](double p0, double p1) { return source_.choose(p0, p1); });
    factors_[f] = std::move(post);
    const BitId bit = new_bit(actor, outcome.bit);
    transcript_.push_back(event::Measure{actor, q, bit, outcome.bit, outcome.probability});
    return {outcome, bit};
  }

  // A locally chosen classical bit (protocol signals).
  BitId signal_bit(AgentId actor, int value) {
    check_agent(actor);
    if (value != 0 && value != 1) throw InvalidArgument("a bit is 0 or 1");
    setup_ = false;
    const BitId bit = new_bit(actor, value);
    transcript_.push_back(event::Signal{actor, bit, value});
    return bit;
  }

  // Charges one cbit per bit carried, whatever the number of receivers.
  void send_classical(ClassicalMessage msg) {
    check_agent(msg.sender);
    if (msg.receiver) check_agent(*msg.receiver);
    if (msg.bits.empty()) throw InvalidArgument("a classical message carries at least one bit");
    std::vector<int> values;
    for (BitId b : msg.bits) {
      require_known(msg.sender, b);
      values.push_back(bits_[b.value].value);
    }
    setup_ = false;
    for (BitId b : msg.bits) {
      if (msg.receiver) {
        learn(*msg.receiver, b);
      } else {
        for (int a = 1; a <= n_; ++a) learn(AgentId{a}, b);
      }
    }
    cbits_ += msg.bits.size();
    transcript_.push_back(event::Send{std::move(msg), std::move(values)});
  }

  // Drops a qubit that has factored out of everything else.
  void discard(AgentId actor, QubitId q) {
    check_agent(actor);
    require_owner(actor, q, "discard");
    setup_ = false;
    const std::size_t f = factor_of(q);
    factors_[f] = discard_qubit(factors_[f], q);
    if (factors_[f].qubit_count() == 0) factors_.erase(factors_.begin() + static_cast<std::ptrdiff_t>(f));
    owner_.erase(q);
    transcript_.push_back(event::Discard{actor, q});
  }

  // After this, EPR pairs may only be spent by the running protocol.
  void lock_pairs(AgentId actor) {
    check_agent(actor);
    setup_ = false;
    locked_ = true;
    transcript_.push_back(event::Lock{actor});
  }

  bool pairs_locked() const noexcept { return locked_; }

  // Marks the lowest-index unused EPR pair between a and b as consumed.
  EprPair claim_pair(AgentId a, AgentId b, PairUse use = PairUse::protocol) {
    check_agent(a);
    check_agent(b);
    if (locked_ && use == PairUse::ad_hoc) {
      throw ProtocolError("EPR pairs are reserved for the running protocol");
    }
    for (auto& p : pairs_) {
      if (p.consumed) continue;
      if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) {
        p.consumed = true;
        setup_ = false;
        transcript_.push_back(event::ClaimPair{a, b, use});
        if (p.a == a) return p;
        return EprPair{p.b, p.a, p.qb, p.qa, true};
      }
    }
    throw ProtocolError("no unused EPR pair between " + to_string(a) + " and " + to_string(b));
  }

  // ---- queries -------------------------------------------------------------

  AgentId owner(QubitId q) const {
    const auto it = owner_.find(q);
    if (it == owner_.end()) throw InvalidArgument("unknown qubit " + to_string(q));
    return it->second;
  }

  bool is_live(QubitId q) const { return owner_.contains(q); }

  std::vector<QubitId> qubits_of(AgentId a) const {
    std::vector<QubitId> out;
    for (const auto& [q, owner] : owner_) {
      if (owner == a) out.push_back(q);
    }
    return out;
  }

  bool knows(AgentId a, BitId b) const {
    const auto& k = knowledge_.at(static_cast<std::size_t>(a.value));
    return b.value < k.size() && k[b.value];
  }

  int bit_value(BitId b) const { return bits_.at(b.value).value; }

  std::size_t cbit_count() const noexcept { return cbits_; }
  const Transcript& transcript() const noexcept { return transcript_; }
  const std::vector<EprPair>& epr_pairs() const noexcept { return pairs_; }
  const std::vector<GhzGroup>& ghz_groups() const noexcept { return groups_; }

  std::size_t consumed_pairs() const {
    return static_cast<std::size_t>(
        std::count_if(pairs_.begin(), pairs_.end(), [](const EprPair& p) { return p.consumed; }));
  }

  std::size_t live_qubits() const noexcept { return owner_.size(); }

  // Largest factor ever held, in qubits.
  std::size_t max_register() const noexcept { return max_register_; }

  // Qubit count of the factor holding q.
  std::size_t entangled_size(QubitId q) const { return factors_[factor_of(q)].qubit_count(); }

  BranchSource& branch_source() noexcept { return source_; }
  void set_branch_source(BranchSource source) { source_ = std::move(source); }
  const BranchSource& branch_source() const noexcept { return source_; }

  // The product of every factor that holds one of `qubits`.
  StateVector joint_state(std::span<const QubitId> qubits) const {
    std::vector<bool> take(factors_.size(), false);
    for (QubitId q : qubits) take[factor_of(q)] = true;
    StateVector out;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      if (take[f]) out = tensor(out, factors_[f]);
    }
    return out;
  }

  StateVector joint_state(std::initializer_list<QubitId> qubits) const {
    return joint_state(std::span<const QubitId>(qubits.begin(), qubits.size()));
  }

  StateVector full_state() const {
    StateVector out;
    for (const auto& f : factors_) out = tensor(out, f);
    return out;
  }

  // Probability that q reads 1; a simulator-side check, not an agent action.
  double excited_probability(QubitId q) const {
    const StateVector& sv = factors_[factor_of(q)];
    const QubitId single[] = {q};
    return reduced_density_matrix(sv, single)(1, 1).real();
  }

  // Entanglement entropy between the qubits owned by `part` and the rest.
  double audit_cut(std::span<const AgentId> part) const {
    std::vector<bool> inside(static_cast<std::size_t>(n_) + 1, false);
    std::size_t count = 0;
    for (AgentId a : part) {
      check_agent(a);
      if (!inside[a.value]) ++count;
      inside[a.value] = true;
    }
    if (count == 0 || count == static_cast<std::size_t>(n_)) {
      throw InvalidArgument("cut must be a nonempty proper subset of the agents");
    }
    double total = 0.0;
    for (const auto& f : factors_) {
      std::vector<QubitId> side;
      for (QubitId q : f.qubits()) {
        if (inside[owner(q).value]) side.push_back(q);
      }
      if (!side.empty() && side.size() < f.qubit_count()) total += cut_entropy(f, side);
    }
    return total;
  }

  double audit_cut(std::initializer_list<AgentId> part) const {
    return audit_cut(std::span<const AgentId>(part.begin(), part.size()));
  }

  void check_agent(AgentId a) const {
    if (a.value < 1 || a.value > n_) {
      throw InvalidArgument("agent " + std::to_string(a.value) + " out of range 1.." +
                            std::to_string(n_));
    }
  }

 private:
  struct BitRecord {
    int value;
    AgentId origin;
  };

  void require_setup() const {
    if (!setup_) throw LoccViolation("setup phase is over; no new shared entanglement");
  }

  void require_owner(AgentId actor, QubitId q, const char* verb) const {
    const AgentId o = owner(q);
    if (o != actor) {
      throw LoccViolation(to_string(actor) + " cannot " + verb + " " + to_string(q) +
                          ", owned by " + to_string(o));
    }
  }

  void require_known(AgentId actor, BitId b) const {
    if (b.value >= bits_.size() || !knows(actor, b)) {
      throw ConditioningViolation(to_string(actor) + " has not learned bit " +
                                  std::to_string(b.value));
    }
  }

  QubitId fresh_qubit(AgentId owner) {
    const QubitId q{next_qubit_++};
    owner_.emplace(q, owner);
    return q;
  }

  BitId new_bit(AgentId actor, int value) {
    const BitId b{static_cast<std::uint32_t>(bits_.size())};
    bits_.push_back({value, actor});
    learn(actor, b);
    return b;
  }

  void learn(AgentId a, BitId b) {
    auto& k = knowledge_[static_cast<std::size_t>(a.value)];
    if (k.size() <= b.value) k.resize(b.value + 1, false);
    k[b.value] = true;
  }

  void add_factor(StateVector sv) {
    max_register_ = std::max(max_register_, sv.qubit_count());
    factors_.push_back(std::move(sv));
  }

  std::size_t factor_of(QubitId q) const {
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      if (factors_[f].contains(q)) return f;
    }
    throw InvalidArgument("unknown qubit " + to_string(q));
  }

  // Tensors together every factor holding one of `qubits`; returns its index.
  std::size_t merge(std::span<const QubitId> qubits) {
    std::vector<std::size_t> idx;
    for (QubitId q : qubits) idx.push_back(factor_of(q));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (std::size_t i = idx.size(); i-- > 1;) {
      factors_[idx[0]] = tensor(factors_[idx[0]], factors_[idx[i]]);
      factors_.erase(factors_.begin() + static_cast<std::ptrdiff_t>(idx[i]));
    }
    max_register_ = std::max(max_register_, factors_[idx[0]].qubit_count());
    return idx[0];
  }

  int n_;
  BranchSource source_;
  bool setup_ = true;
  bool locked_ = false;
  std::uint32_t next_qubit_ = 0;
  std::vector<StateVector> factors_;
  std::map<QubitId, AgentId> owner_;
  std::vector<EprPair> pairs_;
  std::vector<GhzGroup> groups_;
  std::vector<BitRecord> bits_;
  std::vector<std::vector<bool>> knowledge_;
  std::size_t cbits_ = 0;
  std::size_t max_register_ = 0;
  Transcript transcript_;
};

// Convenience for building a setup from an EPR graph.
inline NetworkState network_from_graph(const EprGraph& g,
                                       BranchSource source = BranchSource::seeded(0)) {
  NetworkState net(g.agent_count(), std::move(source));
  for (const auto& e : g.edges()) net.distribute_epr(e.u, e.v);
  return net;
}

inline NetworkState network_from_hypergraph(const EntangledHypergraph& h,
                                            BranchSource source = BranchSource::seeded(0)) {
  NetworkState net(h.agent_count(), std::move(source));
  std::vector<const Hyperedge*> declared(h.hyperedges().size());
  for (const auto& e : h.hyperedges()) declared[e.original_index] = &e;
  for (const Hyperedge* e : declared) net.distribute_ghz(e->members);
  return net;
}

// Re-executes a transcript against `initial`. Measurement outcomes come from
// initial's branch source; bit ids line up because bits are numbered in
// creation order. Conditioned operations whose triggering message is missing
// raise ConditioningViolation.
inline NetworkState replay(NetworkState initial, const Transcript& transcript) {
  NetworkState& net = initial;
  for (const auto& ev : transcript) {
    std::visit(
        [&net](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, event::Ancilla>) {
            net.prepare_qubit(e.actor, e.amplitudes[0], e.amplitudes[1]);
          } else if constexpr (std::is_same_v<T, event::LocalGate>) {
            net.local_gate(e.actor, e.gate, e.condition);
          } else if constexpr (std::is_same_v<T, event::Measure>) {
            net.local_measure(e.actor, e.qubit);
          } else if constexpr (std::is_same_v<T, event::Signal>) {
            net.signal_bit(e.actor, e.value);
          } else if constexpr (std::is_same_v<T, event::Send>) {
            net.send_classical(e.message);
          } else if constexpr (std::is_same_v<T, event::Discard>) {
            net.discard(e.actor, e.qubit);
          } else if constexpr (std::is_same_v<T, event::Lock>) {
            net.lock_pairs(e.actor);
          } else if constexpr (std::is_same_v<T, event::ClaimPair>) {
            net.claim_pair(e.a, e.b, e.use);
          }
        },
        ev);
  }
  return initial;
}

}  // namespace ghznet
