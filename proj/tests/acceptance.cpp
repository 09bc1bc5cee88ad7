// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "ghznet/ghznet.hpp"
#include "oracles.hpp"
#include "circuit_states.hpp"
#include "random_locc.hpp"

using namespace ghznet;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
  bool ok = true;
  std::string first_failure;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) first_failure = what;
    ok = ok && condition;
  }
};

int failures = 0;

void report(int id, const std::string& title, const Check& c, const std::string& detail) {
  std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " ("
            << detail << (c.ok ? "" : "; first failure: " + c.first_failure) << ")\n";
  if (!c.ok) ++failures;
}

void guarded(int id, const std::string& title, const std::function<std::string(Check&)>& body) {
  Check c;
  std::string detail;
  try {
    detail = body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  report(id, title, c, detail);
}

std::string graph_text(int n, const std::vector<std::pair<int, int>>& edges) {
  std::string s = "agents " + std::to_string(n) + "\n";
  for (auto [a, b] : edges) s += "edge " + std::to_string(a) + " " + std::to_string(b) + "\n";
  return s;
}

std::string hyper_text(int n, const std::vector<std::vector<int>>& hyperedges) {
  std::string s = "agents " + std::to_string(n) + "\n";
  for (const auto& h : hyperedges) {
    s += "hyper";
    for (int a : h) s += " " + std::to_string(a);
    s += "\n";
  }
  return s;
}

std::vector<std::pair<int, int>> random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::vector<std::pair<int, int>> edges;
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      if (keep(rng)) edges.emplace_back(a, b);
    }
  }
  return edges;
}

std::string criterion1(Check& c) {
  const auto start = Clock::now();
  const auto net = network_from_graph(EprGraph(3, {{1, 2}, {1, 3}}));
  int snapshots = 0;
  const auto observe = [&](std::string_view label, const NetworkState& state) {
    const auto ids = circuit::circuit_qubits(state);
    const auto& out = state.branch_source().outcomes();
    const int m2 = out.size() > 0 ? out[0] : -1;
    const int m1 = out.size() > 1 ? out[1] : -1;
    const double f = oracle::overlap(state.joint_state(ids), circuit::phi(std::string(label), m2, m1, ids));
    c.require(f >= 1.0 - 1e-10, std::string(label) + " differs from the case algebra in branch M2=" +
                                    std::to_string(m2) + " M1=" + std::to_string(m1));
    ++snapshots;
  };
  const auto r = protocol_one(net, correction_rule_for(net), BranchMode::all(), observe);
  const double elapsed = seconds_since(start);
  c.require(r.branches.size() == 4, "expected 4 branches");
  for (const auto& b : r.branches) {
    c.require(b.fidelity >= 1.0 - 1e-10, "branch fidelity below 1 - 1e-10");
    c.require(b.cbits == 2, "branch cbits != 2");
  }
  c.require(r.cbits == 2, "cbits != 2");
  c.require(r.identities_hold(), "identity problems reported");
  c.require(snapshots == 28, "expected 7 snapshots in each of 4 branches");
  c.require(elapsed < 1.0, "runtime not under 1 s");
  std::ostringstream out;
  out << r.branches.size() << " branches, cbits=" << r.cbits << ", worst fidelity "
      << r.worst_fidelity << ", " << snapshots << " phi snapshots matched, " << elapsed << " s";
  return out.str();
}

std::string criterion2(Check& c) {
  const auto start = Clock::now();
  std::mt19937_64 rng(2);
  std::size_t trees = 0;
  std::size_t branches = 0;
  const auto check_tree = [&](int n, const std::vector<std::pair<int, int>>& edges, BranchMode mode) {
    const auto g = oracle::graph_of(n, edges);
    const auto tree = spanning_tree(g);
    WeaveOptions options;
    options.branches = mode;
    const auto r = protocol_two(network_from_graph(g), tree, options);
    const std::size_t k = tree.leaf_count();
    const std::size_t expected = 2 * static_cast<std::size_t>(n) + k - 4;
    const std::string tag = "n=" + std::to_string(n) + " tree " + graph_text(n, edges);
    for (const auto& b : r.branches) {
      c.require(b.fidelity >= 1.0 - 1e-10, "fidelity below 1 - 1e-10 for " + tag);
      c.require(b.cbits == expected, "cbits != 2n+k-4 for " + tag);
      c.require(b.cbits <= 3 * static_cast<std::size_t>(n) - 5, "cbits exceed 3n-5 for " + tag);
    }
    c.require(r.epr_pairs_consumed == static_cast<std::size_t>(n - 1), "EPR pairs consumed != n-1 for " + tag);
    c.require(r.identities_hold(), "identity problems for " + tag);
    if (mode.kind == BranchMode::Kind::sampled) c.require(r.runs >= 32, "fewer than 32 samples");
    ++trees;
    branches += r.branches.size();
  };
  for (int n = 3; n <= 5; ++n) {
    for (const auto& edges : oracle::all_trees(n)) check_tree(n, edges, BranchMode::all());
  }
  for (int n = 6; n <= 8; ++n) {
    for (int i = 0; i < 50; ++i) {
      check_tree(n, oracle::random_tree(n, rng), BranchMode::sample(32, static_cast<std::uint64_t>(i)));
    }
  }
  const double elapsed = seconds_since(start);
  c.require(elapsed < 60.0, "runtime not under 60 s");
  std::ostringstream out;
  out << trees << " trees, " << branches << " distinct branches, " << elapsed << " s";
  return out.str();
}

std::string criterion3(Check& c) {
  std::mt19937_64 rng(3);
  std::size_t specs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    if (trial % 2 == 0) {
      const auto edges = random_graph(n, 0.3, rng);
      if (oracle::connected(n, edges)) continue;
      const std::string text = graph_text(n, edges);
      for (const char* sub : {"check", "tree", "mst", "ghz3", "weave", "fuse"}) {
        const auto r = cli::run(sub, text, {});
        c.require(r.exit_code == 2, std::string(sub) + " did not exit 2 on " + text);
        c.require(!Json::parse(r.report).contains("report"), std::string(sub) + " ran a protocol");
      }
    } else {
      const auto edges = oracle::random_hyperedges(n, 1 + static_cast<int>(rng() % 3), 2, 3, rng);
      if (oracle::hyper_connected(n, edges)) continue;
      const std::string text = hyper_text(n, edges);
      for (const char* sub : {"check", "fuse"}) {
        const auto r = cli::run(sub, text, {});
        c.require(r.exit_code == 2, std::string(sub) + " did not exit 2 on " + text);
        c.require(!Json::parse(r.report).contains("report"), std::string(sub) + " ran a protocol");
      }
      const EntangledHypergraph h(n, edges);
      const auto net = network_from_hypergraph(h);
      try {
        protocol_three(net, h);
        c.require(false, "protocol_three accepted a disconnected hypergraph");
      } catch (const ConnectivityError&) {
      }
    }
    ++specs;
  }

  std::size_t sequences = 0;
  std::size_t steps = 0;
  double worst = 0.0;
  double worst_full = 0.0;
  while (sequences < 1000) {
    const int n = 2 + static_cast<int>(rng() % 5);
    NetworkState net(n);
    std::vector<std::vector<int>> groups;
    if (sequences % 2 == 0) {
      const auto edges = random_graph(n, 0.4, rng);
      if (oracle::connected(n, edges)) continue;
      net = network_from_graph(oracle::graph_of(n, edges), BranchSource::seeded(sequences));
      for (auto [a, b] : edges) groups.push_back({a, b});
    } else {
      groups = oracle::random_hyperedges(n, 1 + static_cast<int>(rng() % 2), 2, 3, rng);
      if (oracle::hyper_connected(n, groups)) continue;
      net = network_from_hypergraph(EntangledHypergraph(n, groups), BranchSource::seeded(sequences));
    }
    // The side of the cut: agent 1's component.
    oracle::UnionFind uf(n);
    for (const auto& g : groups) {
      for (std::size_t i = 1; i < g.size(); ++i) uf.join(g[0], g[i]);
    }
    std::vector<AgentId> part;
    for (int a = 1; a <= n; ++a) {
      if (uf.find(a) == uf.find(1)) part.push_back(AgentId{a});
    }
    std::vector<BitId> bits;
    worst = std::max(worst, net.audit_cut(part));
    for (int step = 0; step < 25; ++step) {
      testing_support::random_locc_step(net, n, rng, bits);
      const double e = net.audit_cut(part);
      worst = std::max(worst, e);
      // Independent figure from the whole joint vector.
      const StateVector all = net.full_state();
      std::vector<QubitId> side;
      for (QubitId q : all.qubits()) {
        if (uf.find(net.owner(q).value) == uf.find(1)) side.push_back(q);
      }
      if (!side.empty() && side.size() < all.qubit_count()) {
        worst_full = std::max(worst_full, cut_entropy(all, side));
      }
      ++steps;
    }
    ++sequences;
  }
  c.require(worst <= 1e-10, "audit_cut rose above 1e-10");
  c.require(worst_full <= 1e-10, "full-state cut entropy rose above 1e-10");
  std::ostringstream out;
  out << specs << " disconnected specs rejected with exit 2, " << sequences << " LOCC sequences / "
      << steps << " steps, max audit_cut " << worst << ", max full-state cut entropy "
      << worst_full;
  return out.str();
}

std::string criterion4(Check& c) {
  std::mt19937_64 rng(4);
  int cases = 0;
  int overlap_cases = 0;
  std::size_t duplicates = 0;
  std::size_t fusion_checks = 0;
  std::size_t branch_count = 0;
  while (cases < 30) {
    const int n = 4 + static_cast<int>(rng() % 5);
    const int m = 2 + static_cast<int>(rng() % 4);
    const auto edges = oracle::random_hyperedges(n, m, 2, 4, rng);
    if (!oracle::hyper_connected(n, edges)) continue;
    const EntangledHypergraph h(n, edges);
    const auto steps = merge_schedule(h);
    // A single hyperedge covering everyone leaves nothing to fuse.
    if (steps.empty()) continue;
    bool overlap2 = false;
    for (const auto& s : steps) overlap2 = overlap2 || s.overlap.size() >= 2;
    // Reserve room so at least five cases exercise duplicate removal.
    if (!overlap2 && cases - overlap_cases >= 25) continue;
    const auto r = protocol_three(network_from_hypergraph(h), h);
    const std::string tag = hyper_text(n, edges);
    for (const auto& b : r.branches) {
      c.require(b.fidelity >= 1.0 - 1e-10, "fidelity below 1 - 1e-10 for " + tag);
      c.require(b.cbits == steps.size(), "cbits != merge steps for " + tag);
    }
    c.require(r.fusion_sizes.size() == steps.size(), "missing fusion size records for " + tag);
    for (std::size_t i = 0; i < r.fusion_sizes.size(); ++i) {
      const std::size_t expected = steps[i].pre_size + steps[i].add_size - steps[i].overlap.size();
      c.require(r.fusion_sizes[i].expected == expected, "bookkeeping differs from |F|+|E|-|F^E| for " + tag);
      c.require(r.fusion_sizes[i].simulated == expected, "simulated entangled size differs for " + tag);
      ++fusion_checks;
    }
    c.require(r.identities_hold(), "identity problems for " + tag);
    duplicates += r.duplicates_disentangled;
    branch_count += r.branches.size();
    overlap_cases += overlap2 ? 1 : 0;
    ++cases;
  }
  c.require(overlap_cases >= 5, "fewer than 5 cases with overlap >= 2");
  std::ostringstream out;
  out << cases << " hypergraphs, " << overlap_cases << " with overlap >= 2, " << duplicates
      << " duplicates verified |0> and dropped, " << fusion_checks << " size checks, "
      << branch_count << " branches";
  return out.str();
}

std::string criterion5(Check& c) {
  std::mt19937_64 rng(5);
  int agree = 0;
  int connected = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto edges = oracle::random_hyperedges(n, 1 + static_cast<int>(rng() % 4), 2, 4, rng);
    const bool expected = oracle::hyper_connected(n, edges);
    const bool actual = hypergraph_is_connected(EntangledHypergraph(n, edges));
    c.require(expected == actual, "connectivity disagrees on " + hyper_text(n, edges));
    agree += expected == actual ? 1 : 0;
    connected += expected ? 1 : 0;
  }
  int mst_cases = 0;
  std::uniform_int_distribution<int> weight(0, 20);
  while (mst_cases < 20) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const auto edges = random_graph(n, 0.6, rng);
    if (!oracle::connected(n, edges)) continue;
    EprGraph g(n);
    std::vector<oracle::WeightedEdge> weighted;
    for (auto [a, b] : edges) {
      const double w = weight(rng) / 4.0;
      g.add_edge(AgentId{a}, AgentId{b}, w);
      weighted.push_back({a, b, w});
    }
    const double brute = oracle::brute_force_mst_weight(n, weighted);
    c.require(std::abs(minimum_spanning_tree(g).total_weight() - brute) < 1e-12,
              "MST weight differs from enumeration");
    ++mst_cases;
  }
  std::ostringstream out;
  out << agree << "/200 hypergraph verdicts agree (" << connected << " connected), " << mst_cases
      << " weighted MST cases match enumeration";
  return out.str();
}

std::string criterion6(Check& c) {
  std::mt19937_64 rng(6);
  std::size_t runs = 0;
  double worst_fidelity = 1.0;
  for (int i = 0; i < 100; ++i) {
    const auto input = oracle::random_state({QubitId{0}}, rng);
    for (int m2 : {0, 1}) {
      for (int m1 : {0, 1}) {
        NetworkState net(2, BranchSource::scripted({m2, m1}));
        net.distribute_epr(AgentId{1}, AgentId{2});
        const QubitId payload =
            net.prepare_qubit(AgentId{1}, input.amplitudes()[0], input.amplitudes()[1]);
        const QubitId out = teleport(net, AgentId{1}, payload, AgentId{2});
        const auto& outcomes = net.branch_source().outcomes();
        c.require(outcomes == std::vector<int>{m2, m1}, "branch not forced as requested");
        const auto expected = StateVector::from_amplitudes({out}, {input.amplitudes()[0], input.amplitudes()[1]});
        const double f = fidelity(net.joint_state({out}), expected);
        worst_fidelity = std::min(worst_fidelity, f);
        c.require(f >= 1.0 - 1e-10, "teleported state differs from input");
        ++runs;
      }
    }
  }

  std::size_t gates = 0;
  double worst_norm = 0.0;
  for (int circuit = 0; circuit < 20; ++circuit) {
    const std::size_t width = 1 + static_cast<std::size_t>(circuit % 8);
    std::vector<QubitId> ids;
    for (std::size_t i = 0; i < width; ++i) ids.push_back(QubitId{static_cast<std::uint32_t>(i)});
    auto sv = oracle::random_state(ids, rng);
    for (int g = 0; g < 200; ++g) {
      const QubitId a = ids[rng() % width];
      QubitId b = ids[rng() % width];
      Gate gate = Gate::h(a);
      switch (rng() % 4) {
        case 0: gate = Gate::x(a); break;
        case 1: gate = Gate::z(a); break;
        case 2: gate = Gate::h(a); break;
        default:
          if (width > 1) {
            while (b == a) b = ids[rng() % width];
            gate = Gate::cnot(a, b);
          }
      }
      sv = apply_gate(std::move(sv), gate);
      worst_norm = std::max(worst_norm, std::abs(sv.norm_squared() - 1.0));
      ++gates;
    }
  }
  c.require(worst_norm <= 1e-12, "norm drifted beyond 1e-12");

  double worst_marginal = 0.0;
  for (std::uint32_t n = 2; n <= 8; ++n) {
    std::vector<QubitId> ids;
    for (std::uint32_t i = 0; i < n; ++i) ids.push_back(QubitId{i * 3 + 1});
    const auto ghz = ghz_state(ids);
    for (QubitId q : ids) {
      const auto rho = oracle::reduced_2x2(ghz, q);
      worst_marginal = std::max({worst_marginal, std::abs(rho[0] - 0.5), std::abs(rho[1]),
                                 std::abs(rho[2]), std::abs(rho[3] - 0.5)});
    }
  }
  c.require(worst_marginal <= 1e-10, "GHZ marginal differs from I/2");
  std::ostringstream out;
  out << runs << " teleport branches (worst fidelity " << worst_fidelity << "), " << gates
      << " gates (max norm error " << worst_norm << "), GHZ_2..8 marginal error " << worst_marginal;
  return out.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string criterion7(Check& c) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "ghznet_acceptance";
  std::filesystem::create_directories(dir);
  std::size_t compared = 0;
  for (const char* sample : {"star5.net", "weighted6.net", "path3.net"}) {
    const std::string spec = std::string(GHZNET_SAMPLES_DIR) + "/" + sample;
    std::string reports[2];
    for (int i = 0; i < 2; ++i) {
      const auto out = dir / (std::string(sample) + "." + std::to_string(i) + ".json");
      const std::string cmd = std::string("\"") + GHZNET_CLI + "\" weave \"" + spec +
                              "\" --seed 7 --branches sample:64 --report \"" + out.string() +
                              "\" > /dev/null";
      const int status = std::system(cmd.c_str());
      c.require(status == 0, std::string("weave exited non-zero on ") + sample);
      reports[i] = read_file(out);
    }
    c.require(!reports[0].empty(), std::string("empty report for ") + sample);
    c.require(reports[0] == reports[1], std::string("reports differ for ") + sample);
    ++compared;
  }
  std::ostringstream out;
  out << compared << " specs, two `weave --seed 7` runs each, byte-identical";
  return out.str();
}

}  // namespace

int main() {
  guarded(1, "Protocol I exact in all four branches", criterion1);
  guarded(2, "Protocol II cbit identity and fidelity over trees n=3..8", criterion2);
  guarded(3, "disconnected setups rejected; LOCC keeps cut entropy at 0", criterion3);
  guarded(4, "Protocol III fusion on random hypergraphs", criterion4);
  guarded(5, "topology agrees with independent oracles", criterion5);
  guarded(6, "simulator core: teleportation, norms, GHZ marginals", criterion6);
  guarded(7, "weave reports are deterministic", criterion7);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
