#include "distnet/reach.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace distnet;
using namespace distnet::testing;

TEST(reach, fig1_markings_match_exhaustive_oracle) {
  PetriNet n = fig1();
  ReachGraph g = reachability(n);
  EXPECT_FALSE(g.truncated);
  std::set<Marking> got(g.nodes.begin(), g.nodes.end());
  EXPECT_EQ(got, oracle_reachable_markings(n));
  // {p,q}, {p}, {q}, {} — u empties, t and v strip one side each
  EXPECT_EQ(g.nodes.size(), 4u);
  EXPECT_EQ(g.nodes[0], n.initial);
}

TEST(reach, no_transitions) {
  PetriNet n;
  n.add_place("s", 1);
  ReachGraph g = reachability(n);
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_TRUE(g.edges.empty());
  EXPECT_FALSE(g.truncated);
}

TEST(reach, fig5_fully_explored_and_matches_oracle) {
  PetriNet n = fig5();
  Limits lim;
  lim.max_markings = 100000;
  ReachGraph g = reachability(n, lim);
  EXPECT_FALSE(g.truncated);
  std::set<Marking> got(g.nodes.begin(), g.nodes.end());
  EXPECT_EQ(got, oracle_reachable_markings(n));
}

TEST(reach, all_steps_mode_lists_concurrent_steps) {
  PetriNet n = fig1();
  ReachGraph g = reachability(n, {}, StepMode::AllSteps);
  bool found_pair = false;
  for (const auto& e : g.edges)
    if (e.step == (Step{{"t", 1}, {"v", 1}})) found_pair = true;
  EXPECT_TRUE(found_pair);
  // all-steps edges from the initial marking: {t}, {u}, {v}, {t,v}
  std::size_t from_init = 0;
  for (const auto& e : g.edges)
    if (e.src == 0) ++from_init;
  EXPECT_EQ(from_init, 4u);
}

TEST(reach, truncation_is_reported) {
  PetriNet producer;  // unbounded: t keeps feeding s
  producer.add_place("c", 1);
  producer.add_place("s", 0);
  producer.add_transition("t", "a");
  producer.add_arc("c", "t");
  producer.add_arc("t", "c");
  producer.add_arc("t", "s");
  Limits lim;
  lim.max_tokens_per_place = 4;
  ReachGraph g = reachability(producer, lim);
  EXPECT_TRUE(g.truncated);
  EXPECT_EQ(g.truncation_reason, "max-tokens-per-place exceeded");

  Limits lim2;
  lim2.max_markings = 3;
  ReachGraph g2 = reachability(producer, lim2);
  EXPECT_TRUE(g2.truncated);
  EXPECT_EQ(g2.truncation_reason, "max-markings exceeded");
}

TEST(reach, raising_limits_never_removes_nodes) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 60; ++round) {
    PetriNet n = random_net(rng);
    Limits small;
    small.max_markings = 5;
    Limits big;
    big.max_markings = 1000;
    ReachGraph gs = reachability(n, small);
    ReachGraph gb = reachability(n, big);
    std::set<Marking> s(gs.nodes.begin(), gs.nodes.end());
    std::set<Marking> b(gb.nodes.begin(), gb.nodes.end());
    for (const auto& m : s) EXPECT_TRUE(b.count(m));
  }
}

TEST(reach, concurrency_fig1) {
  ConcurrencyRelation rel = concurrency_relation(fig1());
  EXPECT_FALSE(rel.truncated);
  EXPECT_EQ(rel.pairs, (std::set<std::pair<Ident, Ident>>{{"t", "v"}}));
  EXPECT_TRUE(rel.related("v", "t"));
}

TEST(reach, concurrency_fig5_extremal_transitions) {
  ConcurrencyRelation rel = concurrency_relation(fig5());
  EXPECT_TRUE(rel.related("1", "4"));  // the extremal pair of the long M
  EXPECT_FALSE(rel.related("1", "2"));
}

TEST(reach, concurrency_single_transition_net) {
  PetriNet n;
  n.add_place("s", 1);
  n.add_transition("t", "a");
  n.add_arc("s", "t");
  EXPECT_TRUE(concurrency_relation(n).pairs.empty());
}

TEST(reach, self_concurrency_recorded_as_diagonal_pair) {
  PetriNet n;
  n.add_place("s", 2);
  n.add_transition("t", "a");
  n.add_arc("s", "t");
  ConcurrencyRelation rel = concurrency_relation(n);
  EXPECT_TRUE(rel.related("t", "t"));
}

TEST(reach, structural_conflict_fig1_and_fig5) {
  EXPECT_EQ(is_structural_conflict_net(fig1()).truth, Truth::Yes);
  EXPECT_EQ(is_structural_conflict_net(fig5()).truth, Truth::Yes);
}

TEST(reach, structural_conflict_violation) {
  // t and u share s, with private marked side conditions making them
  // concurrent but not self-concurrent
  PetriNet n;
  n.add_place("s", 2);
  n.add_place("pt", 1);
  n.add_place("pu", 1);
  n.add_transition("t", "a");
  n.add_transition("u", "b");
  n.add_arc("s", "t");
  n.add_arc("pt", "t");
  n.add_arc("s", "u");
  n.add_arc("pu", "u");
  Verdict v = is_structural_conflict_net(n);
  EXPECT_EQ(v.truth, Truth::No);
  EXPECT_EQ(v.witness, (std::vector<std::string>{"t", "u"}));
}

TEST(reach, one_safe) {
  EXPECT_EQ(is_one_safe(fig1()).truth, Truth::Yes);
  EXPECT_EQ(is_one_safe(fig5()).truth, Truth::Yes);
  PetriNet two;
  two.add_place("s", 2);
  EXPECT_EQ(is_one_safe(two).truth, Truth::No);
  PetriNet producer;
  producer.add_place("c", 1);
  producer.add_place("s", 0);
  producer.add_transition("t", "a");
  producer.add_arc("c", "t");
  producer.add_arc("t", "c");
  producer.add_arc("t", "s");
  Verdict v = is_one_safe(producer);
  EXPECT_EQ(v.truth, Truth::No);
  EXPECT_EQ(v.witness, std::vector<std::string>{"s"});
}

TEST(reach, one_safe_nets_stay_within_powerset_bound) {
  std::mt19937_64 rng(13);
  RandomNetOptions opt;
  opt.max_init_tokens = 1;
  for (int round = 0; round < 150; ++round) {
    PetriNet n = random_net(rng, opt);
    if (is_one_safe(n).truth != Truth::Yes) continue;
    ReachGraph g = reachability(n);
    ASSERT_FALSE(g.truncated);
    EXPECT_LE(g.nodes.size(), std::size_t{1} << n.places.size());
  }
}
