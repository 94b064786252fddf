#pragma once

#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "distnet/component.hpp"
#include "distnet/net.hpp"

namespace distnet::testing {

// --- fixtures -------------------------------------------------------------

// Three transitions over two shared marked places:
//
//   (p)*    (q)*
//   /  \    /  \        .
//  [a]  \  /  [c]       .
//   t   [b]    v        .
//        u              .
//
// t and v are concurrent, both conflict with u.
inline PetriNet fig1() {
  PetriNet n;
  n.add_place("p", 1);
  n.add_place("q", 1);
  n.add_transition("t", "a");
  n.add_transition("u", "b");
  n.add_transition("v", "c");
  n.add_arc("p", "t");
  n.add_arc("p", "u");
  n.add_arc("q", "u");
  n.add_arc("q", "v");
  return n;
}

// Like fig1 but the right branch is silent and continues into c.
inline PetriNet fig2() {
  PetriNet n;
  n.add_place("p", 1);
  n.add_place("q", 1);
  n.add_place("r", 0);
  n.add_transition("t", "a");
  n.add_transition("u", "b");
  n.add_transition("v", std::nullopt);
  n.add_transition("w", "c");
  n.add_arc("p", "t");
  n.add_arc("p", "u");
  n.add_arc("q", "u");
  n.add_arc("q", "v");
  n.add_arc("v", "r");
  n.add_arc("r", "w");
  return n;
}

// The long-M example: five conflicting transitions 1..5 fed by two marked
// producer places through five top transitions. The top transitions carry
// fresh labels i1..i5 so the net stays plain.
inline PetriNet fig5() {
  PetriNet n;
  n.add_place("inip1", 1);
  n.add_place("inip2", 1);
  for (const char* p : {"p", "r", "v", "y", "z"}) n.add_place(p, 0);
  for (const char* p : {"q", "s", "x"}) n.add_place(p, 1);
  const char* top_src[5] = {"inip1", "inip2", "inip1", "inip2", "inip1"};
  const char* top_dst[5] = {"p", "r", "v", "y", "z"};
  for (int i = 1; i <= 5; ++i) {
    std::string t = "init" + std::to_string(i);
    n.add_transition(t, "i" + std::to_string(i));
    n.add_arc(top_src[i - 1], t);
    n.add_arc(t, top_dst[i - 1]);
  }
  const char* labels[5] = {"a", "b", "c", "d", "e"};
  for (int i = 1; i <= 5; ++i) n.add_transition(std::to_string(i), labels[i - 1]);
  n.add_arc("p", "1");
  n.add_arc("q", "1");
  n.add_arc("q", "2");
  n.add_arc("r", "2");
  n.add_arc("s", "2");
  n.add_arc("s", "3");
  n.add_arc("v", "3");
  n.add_arc("x", "3");
  n.add_arc("x", "4");
  n.add_arc("y", "4");
  n.add_arc("x", "5");
  n.add_arc("z", "5");
  return n;
}

// Only the bottom half of fig5: the five conflicting transitions with their
// preset structure, initial tokens on the shared places.
inline PetriNet fig5_bottom() {
  PetriNet n;
  for (const char* p : {"p", "r", "v", "y", "z"}) n.add_place(p, 0);
  for (const char* p : {"q", "s", "x"}) n.add_place(p, 1);
  const char* labels[5] = {"a", "b", "c", "d", "e"};
  for (int i = 1; i <= 5; ++i) n.add_transition(std::to_string(i), labels[i - 1]);
  n.add_arc("p", "1");
  n.add_arc("q", "1");
  n.add_arc("q", "2");
  n.add_arc("r", "2");
  n.add_arc("s", "2");
  n.add_arc("s", "3");
  n.add_arc("v", "3");
  n.add_arc("x", "3");
  n.add_arc("x", "4");
  n.add_arc("y", "4");
  n.add_arc("x", "5");
  n.add_arc("z", "5");
  return n;
}

inline PetriNet single_a() {
  PetriNet n;
  n.add_place("s", 1);
  n.add_place("o", 0);
  n.add_transition("a", "a");
  n.add_arc("s", "a");
  n.add_arc("a", "o");
  return n;
}

inline PetriNet conflict_ab() {
  PetriNet n;
  n.add_place("s", 1);
  n.add_place("oa", 0);
  n.add_place("ob", 0);
  n.add_transition("a", "a");
  n.add_transition("b", "b");
  n.add_arc("s", "a");
  n.add_arc("s", "b");
  n.add_arc("a", "oa");
  n.add_arc("b", "ob");
  return n;
}

inline PetriNet conflict_ab_with_c() {
  PetriNet n = conflict_ab();
  n.add_place("sc", 1);
  n.add_place("oc", 0);
  n.add_transition("c", "c");
  n.add_arc("sc", "c");
  n.add_arc("c", "oc");
  return n;
}

// a;(tau;b + b) — a classic branching-bisimilar partner of a;b.
inline PetriNet a_then_tau_b_or_b() {
  PetriNet n;
  n.add_place("s", 1);
  n.add_place("m", 0);
  n.add_place("k", 0);
  n.add_place("o", 0);
  n.add_transition("a", "a");
  n.add_transition("i", std::nullopt);
  n.add_transition("b1", "b");
  n.add_transition("b2", "b");
  n.add_arc("s", "a");
  n.add_arc("a", "m");
  n.add_arc("m", "i");
  n.add_arc("i", "k");
  n.add_arc("k", "b1");
  n.add_arc("m", "b2");
  n.add_arc("b1", "o");
  n.add_arc("b2", "o");
  return n;
}

inline PetriNet a_then_b() {
  PetriNet n;
  n.add_place("s", 1);
  n.add_place("m", 0);
  n.add_place("o", 0);
  n.add_transition("a", "a");
  n.add_transition("b", "b");
  n.add_arc("s", "a");
  n.add_arc("a", "m");
  n.add_arc("m", "b");
  n.add_arc("b", "o");
  return n;
}

// --- independent oracles ----------------------------------------------------

// Reachable markings by plain recursive closure over single firings, kept
// deliberately separate from the exploration engine.
inline std::set<Marking> oracle_reachable_markings(const PetriNet& n,
                                                   std::size_t cap = 100000) {
  std::set<Marking> seen{n.initial};
  std::deque<Marking> queue{n.initial};
  while (!queue.empty() && seen.size() < cap) {
    Marking m = queue.front();
    queue.pop_front();
    for (const auto& t : n.transitions) {
      if (!leq(n.preset(t), m)) continue;
      Marking next = m + n.effect(t);
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return seen;
}

// All step multisets of visible transitions enabled at m, by odometer over
// candidate multiplicity vectors.
inline std::set<SignedMultiset<Action>> oracle_step_menu(const PetriNet& n, const Marking& m,
                                                         std::size_t max_size = 8) {
  std::vector<Ident> ts;
  for (const auto& t : n.transitions)
    if (!n.is_tau(t)) ts.push_back(t);
  std::set<SignedMultiset<Action>> menu;
  std::vector<long long> count(ts.size(), 0);
  auto rec = [&](auto&& self, std::size_t idx, std::size_t used) -> void {
    if (idx == ts.size()) {
      if (used == 0) return;
      Step g;
      for (std::size_t i = 0; i < ts.size(); ++i)
        if (count[i]) g.add(ts[i], count[i]);
      if (leq(n.step_preset(g), m)) menu.insert(n.step_label(g));
      return;
    }
    for (long long k = 0; used + k <= max_size; ++k) {
      count[idx] = k;
      self(self, idx + 1, used + k);
    }
    count[idx] = 0;
  };
  rec(rec, 0, 0);
  return menu;
}

inline bool oracle_stable(const PetriNet& n, const Marking& m) {
  for (const auto& t : n.transitions)
    if (n.is_tau(t) && leq(n.preset(t), m)) return false;
  return true;
}

// Step ready pairs with |trace| <= maxlen, straight from the definition:
// breadth-first over (marking, trace) pairs.
struct OraclePair {
  std::vector<Action> trace;
  std::set<SignedMultiset<Action>> menu;
  friend bool operator<(const OraclePair& a, const OraclePair& b) {
    return std::tie(a.trace, a.menu) < std::tie(b.trace, b.menu);
  }
};

inline std::set<OraclePair> oracle_step_ready_pairs(const PetriNet& n, std::size_t maxlen,
                                                    std::size_t step_cap = 8) {
  std::set<OraclePair> out;
  std::set<std::pair<Marking, std::vector<Action>>> seen;
  std::deque<std::pair<Marking, std::vector<Action>>> queue;
  queue.push_back({n.initial, {}});
  seen.insert(queue.front());
  while (!queue.empty()) {
    auto [m, trace] = queue.front();
    queue.pop_front();
    if (oracle_stable(n, m)) out.insert({trace, oracle_step_menu(n, m, step_cap)});
    for (const auto& t : n.transitions) {
      if (!leq(n.preset(t), m)) continue;
      Marking next = m + n.effect(t);
      std::vector<Action> tr = trace;
      Label l = n.label(t);
      if (l) {
        if (trace.size() >= maxlen) continue;
        tr.push_back(*l);
      }
      auto item = std::make_pair(next, tr);
      if (seen.insert(item).second) queue.push_back(item);
    }
  }
  return out;
}

// --- random instance generators ---------------------------------------------

struct RandomNetOptions {
  int min_places = 2, max_places = 5;
  int min_transitions = 1, max_transitions = 4;
  double tau_prob = 0.25;
  double arc_prob = 0.45;
  double weight2_prob = 0.1;
  int max_init_tokens = 2;
  bool force_preset = true;   // every transition gets at least one preplace
  bool plain = false;         // injective visible labels
};

inline PetriNet random_net(std::mt19937_64& rng, const RandomNetOptions& opt = {}) {
  std::uniform_int_distribution<int> np(opt.min_places, opt.max_places);
  std::uniform_int_distribution<int> nt(opt.min_transitions, opt.max_transitions);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  PetriNet n;
  int places = np(rng), trans = nt(rng);
  for (int i = 0; i < places; ++i) {
    std::uniform_int_distribution<int> tokens(0, opt.max_init_tokens);
    n.add_place("P" + std::to_string(i), tokens(rng));
  }
  for (int i = 0; i < trans; ++i) {
    Label l;
    if (!opt.plain && coin(rng) < opt.tau_prob)
      l = std::nullopt;
    else if (opt.plain)
      l = "a" + std::to_string(i);
    else {
      std::uniform_int_distribution<int> act(0, 2);
      l = std::string(1, static_cast<char>('a' + act(rng)));
    }
    n.add_transition("T" + std::to_string(i), l);
  }
  for (int t = 0; t < trans; ++t) {
    Ident tid = "T" + std::to_string(t);
    bool has_pre = false;
    for (int p = 0; p < places; ++p) {
      Ident pid = "P" + std::to_string(p);
      if (coin(rng) < opt.arc_prob) {
        n.add_arc(pid, tid, coin(rng) < opt.weight2_prob ? 2 : 1);
        has_pre = true;
      }
      if (coin(rng) < opt.arc_prob) n.add_arc(tid, pid, coin(rng) < opt.weight2_prob ? 2 : 1);
    }
    if (!has_pre && opt.force_preset) {
      std::uniform_int_distribution<int> pick(0, places - 1);
      n.add_arc("P" + std::to_string(pick(rng)), tid);
    }
  }
  return n;
}

// A sequential component whose control flow is a linear chain, reading one
// mailbox per step with some probability and posting to output places.
inline Component random_sequential_component(std::mt19937_64& rng, int index,
                                             const std::vector<Ident>& mailbox_pool,
                                             int my_mailbox_begin, int my_mailbox_count) {
  std::uniform_int_distribution<int> nlen(1, 3);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Component c;
  std::string prefix = "c" + std::to_string(index) + "_";
  int len = nlen(rng);
  for (int i = 0; i <= len; ++i) c.net.add_place(prefix + "q" + std::to_string(i), i == 0 ? 1 : 0);
  for (int i = my_mailbox_begin; i < my_mailbox_begin + my_mailbox_count; ++i) {
    c.net.add_place(mailbox_pool[i], coin(rng) < 0.3 ? 1 : 0);
    c.inputs.insert(mailbox_pool[i]);
  }
  for (int i = 0; i < len; ++i) {
    Ident t = prefix + "t" + std::to_string(i);
    Label l;
    if (coin(rng) < 0.3)
      l = std::nullopt;
    else
      l = prefix + "act" + std::to_string(i);
    c.net.add_transition(t, l);
    c.net.add_arc(prefix + "q" + std::to_string(i), t);
    c.net.add_arc(t, prefix + "q" + std::to_string(i + 1));
    // read own mailbox
    if (my_mailbox_count > 0 && coin(rng) < 0.5) {
      std::uniform_int_distribution<int> pick(my_mailbox_begin,
                                              my_mailbox_begin + my_mailbox_count - 1);
      c.net.add_arc(mailbox_pool[pick(rng)], t);
    }
    // post to a foreign mailbox
    if (coin(rng) < 0.5) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(mailbox_pool.size()) - 1);
      int m = pick(rng);
      if (m < my_mailbox_begin || m >= my_mailbox_begin + my_mailbox_count) {
        const Ident& box = mailbox_pool[m];
        if (!c.net.places.count(box)) {
          c.net.add_place(box, 0);
          c.outputs.insert(box);
        }
        if (c.outputs.count(box)) c.net.add_arc(t, box);
      }
    }
  }
  return c;
}

}  // namespace distnet::testing
