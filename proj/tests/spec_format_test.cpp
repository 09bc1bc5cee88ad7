#include <gtest/gtest.h>

#include <random>

#include "ghznet/spec_format.hpp"
#include "oracles.hpp"

using namespace ghznet;

namespace {

std::size_t error_line(std::string_view text) {
  try {
    parse_spec(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(ParseSpec, TwoPairsMeetingAtOne) {
  const auto spec = parse_spec("agents 3\nedge 1 2\nedge 1 3");
  EXPECT_EQ(spec.mode, NetworkSpec::Mode::epr_graph);
  const auto g = spec.graph();
  EXPECT_TRUE(g.has_edge(AgentId{1}, AgentId{2}));
  EXPECT_TRUE(g.has_edge(AgentId{1}, AgentId{3}));
  EXPECT_FALSE(g.has_edge(AgentId{2}, AgentId{3}));
}

TEST(ParseSpec, HypergraphChain) {
  const auto spec = parse_spec("agents 5\nhyper 1 2 3\nhyper 3 4\nhyper 4 5");
  EXPECT_EQ(spec.mode, NetworkSpec::Mode::hypergraph);
  EXPECT_TRUE(hypergraph_is_connected(spec.hypergraph()));
  EXPECT_TRUE(oracle::hyper_connected(5, spec.hyperedges));
}

TEST(ParseSpec, SelfLoopAtLineTwo) {
  EXPECT_EQ(error_line("agents 2\nedge 1 1"), 2u);
}

TEST(ParseSpec, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("# header\nagents 3\nedge 1 2\nedge 2 1\n"), 4u);
  EXPECT_EQ(error_line("agents 3\nedge 1 4\n"), 2u);
  EXPECT_EQ(error_line("agents 3\nhyper 2\n"), 2u);
  EXPECT_EQ(error_line("agents 3\nedge 1 2\nhyper 1 2 3\n"), 3u);
  EXPECT_EQ(error_line("edge 1 2\n"), 1u);
  EXPECT_EQ(error_line("agents 3\nedge 1 2 -1\n"), 2u);
  EXPECT_EQ(error_line("agents 3\nedge 1 two\n"), 2u);
  EXPECT_EQ(error_line("agents 3\nlink 1 2\n"), 2u);
}

TEST(ParseSpec, CommentsAndBlankLines) {
  const auto spec = parse_spec("\n# network\nagents 3   # three of them\n\nedge 2 1 0.5 # cheap\n");
  ASSERT_EQ(spec.edges.size(), 1u);
  EXPECT_EQ(spec.edges[0].u, 1);
  EXPECT_EQ(spec.edges[0].v, 2);
  EXPECT_DOUBLE_EQ(*spec.edges[0].weight, 0.5);
}

TEST(SerializeSpec, RoundTripIsIdentity) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    std::string text = "agents " + std::to_string(n) + "\n";
    if (trial % 2 == 0) {
      for (auto [a, b] : oracle::random_tree(n, rng)) {
        text += "edge " + std::to_string(b) + " " + std::to_string(a);
        if (rng() % 2) text += " " + std::to_string(static_cast<double>(rng() % 100) / 8.0);
        text += "\n";
      }
    } else {
      for (const auto& h : oracle::random_hyperedges(n, 3, 2, 4, rng)) {
        text += "hyper";
        for (auto it = h.rbegin(); it != h.rend(); ++it) text += " " + std::to_string(*it);
        text += "\n";
      }
    }
    const auto first = parse_spec(text);
    const auto again = parse_spec(serialize_spec(first));
    EXPECT_EQ(first, again);
    EXPECT_EQ(serialize_spec(first), serialize_spec(again));
    EXPECT_EQ(spec_hash(first), spec_hash(again));
  }
}

TEST(SpecHash, SixteenHexDigitsAndSensitive) {
  const auto a = spec_hash(parse_spec("agents 3\nedge 1 2\nedge 2 3\n"));
  const auto b = spec_hash(parse_spec("agents 3\nedge 1 2\nedge 1 3\n"));
  EXPECT_EQ(a.size(), 16u);
  EXPECT_NE(a, b);
  EXPECT_EQ(a, spec_hash(parse_spec("# same\nagents 3\nedge 2 1\nedge 3 2\n")));
}
