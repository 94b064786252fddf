#include "distnet/lts.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace distnet;
using namespace distnet::testing;

namespace {

// test oracle: strong bisimilarity by plain fixpoint refinement
bool strongly_bisimilar(const Lts& a, const Lts& b) {
  std::vector<std::vector<char>> rel(a.states.size(), std::vector<char>(b.states.size(), 1));
  auto matched = [&](const Lts& l1, int s, const Lts& l2, int t, bool flip) {
    for (const auto& [li, sd] : l1.out[s]) {
      bool ok = false;
      for (const auto& [lj, td] : l2.out[t])
        if (l1.labels[li] == l2.labels[lj] && (flip ? rel[td][sd] : rel[sd][td])) ok = true;
      if (!ok) return false;
    }
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < a.states.size(); ++s)
      for (std::size_t t = 0; t < b.states.size(); ++t) {
        if (!rel[s][t]) continue;
        if (!matched(a, static_cast<int>(s), b, static_cast<int>(t), false) ||
            !matched(b, static_cast<int>(t), a, static_cast<int>(s), true)) {
          rel[s][t] = 0;
          changed = true;
        }
      }
  }
  return rel[a.initial][b.initial];
}

Lts st_with_split_labels(const Lts& st) {
  Lts r = st;
  for (auto& l : r.labels) {
    if (l.tau) continue;
    auto dash = l.text.find('-');
    if (dash != std::string::npos) l.text = l.text.substr(0, dash) + "-";
  }
  // relabelling may merge label ids; rebuild edges through add_edge semantics
  Lts merged;
  merged.states = r.states;
  merged.out.resize(r.states.size());
  merged.initial = r.initial;
  merged.truncated = r.truncated;
  for (std::size_t s = 0; s < r.states.size(); ++s)
    for (const auto& [li, d] : r.out[s]) merged.add_edge(static_cast<int>(s), r.labels[li], d);
  return merged;
}

}  // namespace

TEST(lts, interleaving_fig1) {
  Lts l = build_interleaving_lts(fig1());
  EXPECT_FALSE(l.truncated);
  EXPECT_EQ(l.states.size(), 4u);
  EXPECT_EQ(l.menu(l.initial), (std::set<std::string>{"a", "b", "c"}));
}

TEST(lts, single_tau_self_loop) {
  PetriNet n;
  n.add_place("s", 1);
  n.add_transition("t", std::nullopt);
  n.add_arc("s", "t");
  n.add_arc("t", "s");
  Lts l = build_interleaving_lts(n);
  EXPECT_EQ(l.states.size(), 1u);
  EXPECT_EQ(l.edge_count(), 1u);
  EXPECT_TRUE(l.has_tau(0));
}

TEST(lts, empty_net) {
  PetriNet n;
  Lts l = build_interleaving_lts(n);
  EXPECT_EQ(l.states.size(), 1u);
  EXPECT_EQ(l.edge_count(), 0u);
}

TEST(lts, step_lts_fig1_has_concurrent_step_edge) {
  Lts l = build_step_lts(fig1());
  bool found = false;
  for (const auto& [li, d] : l.out[l.initial])
    if (!l.labels[li].tau && l.labels[li].text == "{a,c}") found = true;
  EXPECT_TRUE(found);
}

TEST(lts, step_lts_sequential_net_has_singletons_only) {
  Lts l = build_step_lts(a_then_b());
  for (std::size_t s = 0; s < l.states.size(); ++s)
    for (const auto& [li, d] : l.out[s]) {
      if (l.labels[li].tau) continue;
      EXPECT_TRUE(l.labels[li].text == "{a}" || l.labels[li].text == "{b}")
          << l.labels[li].text;
    }
}

TEST(lts, step_lts_never_bundles_tau) {
  PetriNet n;  // two concurrently enabled tau transitions
  n.add_place("s1", 1);
  n.add_place("s2", 1);
  n.add_transition("t1", std::nullopt);
  n.add_transition("t2", std::nullopt);
  n.add_arc("s1", "t1");
  n.add_arc("s2", "t2");
  Lts l = build_step_lts(n);
  for (std::size_t s = 0; s < l.states.size(); ++s)
    for (const auto& [li, d] : l.out[s])
      EXPECT_TRUE(l.labels[li].tau);  // no visible step edge can exist
}

TEST(lts, split_single_transition_protocol) {
  PetriNet n = single_a();
  Lts l = build_split_lts(n);
  // ({s},{}) -a+-> ({},{a}) -a--> ({o},{})
  ASSERT_EQ(l.states.size(), 3u);
  EXPECT_EQ(l.states[0], "({s},{})");
  ASSERT_EQ(l.out[0].size(), 1u);
  EXPECT_EQ(l.labels[l.out[0][0].first].text, "a+");
  int mid = l.out[0][0].second;
  EXPECT_EQ(l.states[mid], "({},{a})");
  ASSERT_EQ(l.out[mid].size(), 1u);
  EXPECT_EQ(l.labels[l.out[mid][0].first].text, "a-");
  EXPECT_EQ(l.states[l.out[mid][0].second], "({o},{})");
}

TEST(lts, split_fig1_allows_overlapping_starts) {
  Lts l = build_split_lts(fig1());
  // a+ then c+ from the initial state
  int after_a = -1;
  for (const auto& [li, d] : l.out[l.initial])
    if (l.labels[li].text == "a+") after_a = d;
  ASSERT_GE(after_a, 0);
  bool c_plus = false;
  for (const auto& [li, d] : l.out[after_a])
    if (l.labels[li].text == "c+") c_plus = true;
  EXPECT_TRUE(c_plus);
}

TEST(lts, split_tau_keeps_firing_component) {
  Lts l = build_split_lts(fig2());
  // take a+ (transition t), then the tau transition v must stay available
  int after_a = -1;
  for (const auto& [li, d] : l.out[l.initial])
    if (l.labels[li].text == "a+") after_a = d;
  ASSERT_GE(after_a, 0);
  bool tau_found = false;
  for (const auto& [li, d] : l.out[after_a])
    if (l.labels[li].tau) {
      tau_found = true;
      EXPECT_EQ(l.states[d], "({r},{t})");  // U unchanged by tau
    }
  EXPECT_TRUE(tau_found);
}

namespace {

// parse "( {..marking..} , {..firing..} )" back into multisets; test net ids
// contain no braces or commas, so splitting at "},{" is unambiguous
std::pair<Marking, Step> parse_split_state(const std::string& name) {
  auto cut = name.find("},{");
  std::string mpart = name.substr(1, cut);                         // "{...}"
  std::string upart = name.substr(cut + 2, name.size() - cut - 3);  // "{...}"
  auto parse = [](const std::string& body) {
    SignedMultiset<Ident> m;
    std::string inner = body.substr(1, body.size() - 2);
    std::istringstream in(inner);
    std::string item;
    while (std::getline(in, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos)
        m.add(item, 1);
      else
        m.add(item.substr(0, colon), std::stoll(item.substr(colon + 1)));
    }
    return m;
  };
  return {parse(mpart), parse(upart)};
}

}  // namespace

// (M,U) -a+-> iff M -a-> in the interleaving view, at every reachable state
TEST(lts, split_start_coherence_randomized) {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 80; ++round) {
    PetriNet n = random_net(rng);
    Lts split = build_split_lts(n);
    if (split.truncated) continue;
    for (std::size_t s = 0; s < split.states.size(); ++s) {
      auto [m, u] = parse_split_state(split.states[s]);
      std::set<std::string> starts;
      for (const auto& [li, d] : split.out[s])
        if (!split.labels[li].tau && split.labels[li].text.back() == '+')
          starts.insert(split.labels[li].text);
      std::set<std::string> enabled_visible;
      for (const auto& t : n.transitions) {
        if (n.is_tau(t)) continue;
        if (leq(n.preset(t), m)) enabled_visible.insert(*n.label(t) + "+");
      }
      EXPECT_EQ(starts, enabled_visible) << split.states[s];
    }
  }
}

// Reachable split markings are exactly { (M - pre(U), U) | M reachable,
// U a multiset of visible transitions with pre(U) <= M }.
TEST(lts, split_reachability_characterisation) {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int round = 0; round < 120; ++round) {
    PetriNet n = random_net(rng);
    Limits lim;
    lim.max_markings = 20000;
    Lts split = build_split_lts(n, lim);
    if (split.truncated) continue;
    std::set<Marking> reach = oracle_reachable_markings(n, 5000);
    if (reach.size() >= 5000) continue;
    std::set<std::string> expected;
    std::vector<Ident> vis;
    for (const auto& t : n.transitions)
      if (!n.is_tau(t)) vis.push_back(t);
    for (const auto& m : reach) {
      // enumerate U with pre(U) <= m
      std::vector<long long> count(vis.size(), 0);
      auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == vis.size()) {
          Step u;
          for (std::size_t k = 0; k < vis.size(); ++k)
            if (count[k]) u.add(vis[k], count[k]);
          SignedMultiset<Ident> pre;
          for (std::size_t k = 0; k < vis.size(); ++k)
            pre = pre + scale(count[k], n.preset(vis[k]));
          if (leq(pre, m))
            expected.insert("(" + (m - pre).to_string() + "," + u.to_string() + ")");
          return;
        }
        for (count[i] = 0; count[i] <= 4; ++count[i]) {
          SignedMultiset<Ident> pre;
          for (std::size_t k = 0; k <= i; ++k)
            pre = pre + scale(count[k], n.preset(vis[k]));
          if (!leq(pre, m)) break;
          self(self, i + 1);
        }
        count[i] = 0;
      };
      rec(rec, 0);
    }
    std::set<std::string> got(split.states.begin(), split.states.end());
    EXPECT_EQ(got, expected) << "net with " << n.transitions.size() << " transitions";
    ++checked;
  }
  EXPECT_GE(checked, 50);
}

TEST(lts, st_single_transition) {
  Lts l = build_st_lts(single_a());
  ASSERT_EQ(l.states.size(), 3u);
  EXPECT_EQ(l.labels[l.out[0][0].first].text, "a+");
  int mid = l.out[0][0].second;
  EXPECT_EQ(l.labels[l.out[mid][0].first].text, "a-1");
}

TEST(lts, st_two_copies_allow_ending_the_second) {
  PetriNet n;  // a can fire twice concurrently (two tokens)
  n.add_place("s", 2);
  n.add_place("o", 0);
  n.add_transition("t", "a");
  n.add_arc("s", "t");
  n.add_arc("t", "o");
  Lts l = build_st_lts(n);
  // find ({},t.t) — after a+ a+
  int ss = -1;
  for (std::size_t s = 0; s < l.states.size(); ++s)
    if (l.states[s] == "({},t.t)") ss = static_cast<int>(s);
  ASSERT_GE(ss, 0);
  std::set<std::string> ends;
  for (const auto& [li, d] : l.out[ss]) ends.insert(l.labels[li].text);
  EXPECT_TRUE(ends.count("a-1"));
  EXPECT_TRUE(ends.count("a-2"));  // the second occurrence can end first
}

TEST(lts, st_truncates_on_firing_length) {
  PetriNet n;
  n.add_place("s", 16);
  n.add_transition("t", "a");
  n.add_arc("s", "t");
  Limits lim;
  lim.max_firing_len = 2;
  Lts l = build_st_lts(n, lim);
  EXPECT_TRUE(l.truncated);
  EXPECT_EQ(l.truncation_reason, "max-firing-len exceeded");
}

// The sequence-to-multiset projection maps the ST view onto the split view;
// with end labels collapsed the two systems are strongly bisimilar.
TEST(lts, st_and_split_views_match) {
  for (const PetriNet& n : {fig1(), single_a(), fig2(), a_then_tau_b_or_b()}) {
    Lts st = build_st_lts(n);
    Lts split = build_split_lts(n);
    ASSERT_FALSE(st.truncated);
    ASSERT_FALSE(split.truncated);
    EXPECT_TRUE(strongly_bisimilar(st_with_split_labels(st), split));
    EXPECT_LE(split.states.size(), st.states.size());
  }
}

TEST(lts, divergence_tau_self_loop) {
  PetriNet n;
  n.add_place("s", 1);
  n.add_transition("t", std::nullopt);
  n.add_arc("s", "t");
  n.add_arc("t", "s");
  Lts l = build_interleaving_lts(n);
  EXPECT_EQ(detect_divergence(l), std::set<int>{0});
}

TEST(lts, divergence_acyclic_tau_graph_is_empty) {
  Lts l = build_interleaving_lts(fig2());
  EXPECT_TRUE(detect_divergence(l).empty());
}

TEST(lts, divergence_includes_states_reaching_a_cycle) {
  // tau path s0 -> s1 -> cycle(s1), plus ordinary visible exit from s0
  PetriNet n;
  n.add_place("s0", 1);
  n.add_place("s1", 0);
  n.add_transition("into", std::nullopt);
  n.add_transition("loop", std::nullopt);
  n.add_transition("t", "a");
  n.add_arc("s0", "into");
  n.add_arc("into", "s1");
  n.add_arc("s1", "loop");
  n.add_arc("loop", "s1");
  n.add_arc("s0", "t");
  Lts l = build_interleaving_lts(n);
  std::set<int> div = detect_divergence(l);
  // both the initial state and the loop state diverge; the post-a state not
  EXPECT_EQ(div.size(), 2u);
  EXPECT_TRUE(div.count(l.initial));
}

TEST(lts, plain_net_lts_is_deterministic) {
  for (const PetriNet& n : {fig1(), fig5(), single_a(), conflict_ab()}) {
    ASSERT_EQ(is_plain(n).truth, Truth::Yes);
    EXPECT_TRUE(is_deterministic(build_interleaving_lts(n)));
    EXPECT_TRUE(is_deterministic(build_split_lts(n)));
    EXPECT_TRUE(is_deterministic(build_step_lts(n)));
  }
  EXPECT_EQ(is_deterministic(build_interleaving_lts(fig2())).truth, Truth::No);
}

TEST(lts, dot_export_mentions_states_and_labels) {
  Lts l = build_interleaving_lts(single_a());
  std::string dot = lts_to_dot(l, "single");
  EXPECT_NE(dot.find("digraph \"single\""), std::string::npos);
  EXPECT_NE(dot.find("label=\"a\""), std::string::npos);
  EXPECT_NE(dot.find("init -> s0"), std::string::npos);
}
