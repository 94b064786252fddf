#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "distnet/lts.hpp"
#include "distnet/net.hpp"
#include "distnet/reach.hpp"

namespace distnet {

struct ReadyPair {
  std::vector<std::string> trace;
  std::set<std::string> menu;

  friend bool operator<(const ReadyPair& a, const ReadyPair& b) {
    return std::tie(a.trace, a.menu) < std::tie(b.trace, b.menu);
  }
  friend bool operator==(const ReadyPair& a, const ReadyPair& b) {
    return a.trace == b.trace && a.menu == b.menu;
  }
};

struct StepReadyPair {
  std::vector<Action> trace;                 // sequence of single actions
  std::set<SignedMultiset<Action>> menu;     // enabled visible steps

  friend bool operator<(const StepReadyPair& a, const StepReadyPair& b) {
    return std::tie(a.trace, a.menu) < std::tie(b.trace, b.menu);
  }
  friend bool operator==(const StepReadyPair& a, const StepReadyPair& b) {
    return a.trace == b.trace && a.menu == b.menu;
  }
};

namespace detail {

// Weak transition structure over an LTS: tau-closures and per-label
// successors, reused by ready-pair enumeration and bisimulation checking.
struct WeakLts {
  const Lts* lts;
  std::vector<std::vector<int>> tau_closure;  // states weakly reachable via tau*

  explicit WeakLts(const Lts& l) : lts(&l) {
    int n = static_cast<int>(l.states.size());
    tau_closure.resize(n);
    for (int s = 0; s < n; ++s) {
      std::vector<char> seen(n, 0);
      std::deque<int> queue{s};
      seen[s] = 1;
      while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        tau_closure[s].push_back(v);
        for (const auto& [li, d] : l.out[v])
          if (l.labels[li].tau && !seen[d]) {
            seen[d] = 1;
            queue.push_back(d);
          }
      }
      std::sort(tau_closure[s].begin(), tau_closure[s].end());
    }
  }

  std::vector<int> closure_of(const std::vector<int>& states) const {
    std::set<int> acc;
    for (int s : states) acc.insert(tau_closure[s].begin(), tau_closure[s].end());
    return {acc.begin(), acc.end()};
  }

  // subset -a-> closure(successors)
  std::vector<int> weak_step(const std::vector<int>& subset, const std::string& a) const {
    std::set<int> next;
    for (int s : subset)
      for (const auto& [li, d] : lts->out[s])
        if (!lts->labels[li].tau && lts->labels[li].text == a) next.insert(d);
    std::vector<int> v(next.begin(), next.end());
    return closure_of(v);
  }

  std::set<std::string> alphabet(const std::vector<int>& subset) const {
    std::set<std::string> acts;
    for (int s : subset)
      for (const auto& [li, d] : lts->out[s])
        if (!lts->labels[li].tau) acts.insert(lts->labels[li].text);
    return acts;
  }
};

}  // namespace detail

// Ready pairs of an LTS up to a trace length bound: <sigma, X> with
// initial =sigma=> M, M stable, X the visible menu of M. The bound keeps the
// enumeration finite on cyclic systems.
inline std::set<ReadyPair> ready_pairs(const Lts& lts, std::size_t max_trace_len = 6) {
  detail::WeakLts weak(lts);
  std::set<ReadyPair> result;
  struct Item {
    std::vector<int> subset;
    std::vector<std::string> trace;
  };
  std::deque<Item> queue;
  queue.push_back({weak.closure_of({lts.initial}), {}});
  while (!queue.empty()) {
    Item item = queue.front();
    queue.pop_front();
    for (int s : item.subset)
      if (!lts.has_tau(s)) result.insert({item.trace, lts.menu(s)});
    if (item.trace.size() >= max_trace_len) continue;
    for (const auto& a : weak.alphabet(item.subset)) {
      std::vector<int> next = weak.weak_step(item.subset, a);
      if (next.empty()) continue;
      auto trace = item.trace;
      trace.push_back(a);
      queue.push_back({std::move(next), std::move(trace)});
    }
  }
  return result;
}

namespace detail {

struct StepMenuSpace {
  IndexedNet inet;
  MarkingSpace space;
  std::vector<char> stable;                          // per marking
  std::vector<std::set<SignedMultiset<Action>>> menus;  // per stable marking
  std::vector<std::vector<int>> tau_succ;            // single-tau successors
  std::map<Action, std::vector<std::vector<int>>> act_succ;

  StepMenuSpace(const PetriNet& n, const Limits& lim) : inet(n), space(explore_markings(inet, lim)) {
    std::size_t ns = space.states.size();
    stable.assign(ns, 1);
    menus.resize(ns);
    tau_succ.resize(ns);
    for (const auto& [src, t, dst] : space.edges) {
      if (inet.label[t] < 0) {
        stable[src] = 0;
        tau_succ[src].push_back(static_cast<int>(dst));
      } else {
        auto& vec = act_succ[inet.actions[inet.label[t]]];
        if (vec.empty()) vec.resize(ns);
        vec[src].push_back(static_cast<int>(dst));
      }
    }
    for (std::size_t s = 0; s < ns; ++s) {
      if (!stable[s]) continue;
      std::vector<std::vector<std::pair<int, long long>>> steps;
      enumerate_steps(inet, space.states[s], lim, true, steps);
      for (const auto& fir : steps) {
        SignedMultiset<Action> a;
        for (const auto& [t, k] : fir) a.add(inet.actions[inet.label[t]], k);
        menus[s].insert(a);
      }
    }
  }

  std::vector<int> closure_of(std::vector<int> states) const {
    std::set<int> acc;
    std::deque<int> queue(states.begin(), states.end());
    acc.insert(states.begin(), states.end());
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int d : tau_succ[v])
        if (acc.insert(d).second) queue.push_back(d);
    }
    return {acc.begin(), acc.end()};
  }

  std::vector<int> weak_step(const std::vector<int>& subset, const Action& a) const {
    auto it = act_succ.find(a);
    std::vector<int> next;
    if (it != act_succ.end())
      for (int s : subset)
        for (int d : it->second[s]) next.push_back(d);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return closure_of(std::move(next));
  }

  // Menus observable at stable markings of a subset.
  std::set<std::set<SignedMultiset<Action>>> observable(const std::vector<int>& subset) const {
    std::set<std::set<SignedMultiset<Action>>> obs;
    for (int s : subset)
      if (stable[s]) obs.insert(menus[s]);
    return obs;
  }
};

}  // namespace detail

// Step ready pairs of a net up to a trace length bound, per the definition:
// sigma ranges over single actions, the menu over enabled visible steps at a
// stable marking.
inline std::set<StepReadyPair> step_ready_pairs(const PetriNet& n, const Limits& lim = {},
                                                std::size_t max_trace_len = 6) {
  detail::StepMenuSpace sms(n, lim);
  std::set<StepReadyPair> result;
  struct Item {
    std::vector<int> subset;
    std::vector<Action> trace;
  };
  std::deque<Item> queue;
  queue.push_back({sms.closure_of({0}), {}});
  while (!queue.empty()) {
    Item item = queue.front();
    queue.pop_front();
    for (int s : item.subset)
      if (sms.stable[s]) result.insert({item.trace, sms.menus[s]});
    if (item.trace.size() >= max_trace_len) continue;
    std::set<Action> acts;
    for (const auto& [a, vec] : sms.act_succ)
      for (int s : item.subset)
        if (!vec[s].empty()) acts.insert(a);
    for (const auto& a : acts) {
      std::vector<int> next = sms.weak_step(item.subset, a);
      if (next.empty()) continue;
      auto trace = item.trace;
      trace.push_back(a);
      queue.push_back({std::move(next), std::move(trace)});
    }
  }
  return result;
}

// Exact decision of R(N1) = R(N2) by synchronised weak determinization: two
// nets have equal step ready pair sets iff every common trace leads to subset
// states with identical observable menu sets. Terminates because subsets over
// the finite explored marking spaces are finite.
inline Verdict step_readiness_equivalent(const PetriNet& n1, const PetriNet& n2,
                                         const Limits& lim = {}) {
  detail::StepMenuSpace a(n1, lim), b(n2, lim);
  if (a.space.truncated || b.space.truncated)
    return Verdict::unknown("state space truncated");
  using Node = std::pair<std::vector<int>, std::vector<int>>;
  std::set<Node> seen;
  std::deque<std::pair<Node, std::vector<Action>>> queue;
  Node init{a.closure_of({0}), b.closure_of({0})};
  seen.insert(init);
  queue.push_back({init, {}});
  auto trace_text = [](const std::vector<Action>& t) {
    std::ostringstream s;
    for (std::size_t i = 0; i < t.size(); ++i) s << (i ? " " : "") << t[i];
    return s.str();
  };
  while (!queue.empty()) {
    auto [node, trace] = queue.front();
    queue.pop_front();
    auto obs1 = a.observable(node.first);
    auto obs2 = b.observable(node.second);
    if (obs1 != obs2) {
      std::ostringstream why;
      why << "ready pairs differ after trace \"" << trace_text(trace) << "\"";
      const auto& bigger = obs1.size() >= obs2.size() ? obs1 : obs2;
      const auto& other = obs1.size() >= obs2.size() ? obs2 : obs1;
      for (const auto& menu : bigger)
        if (!other.count(menu)) {
          why << ": menu {";
          bool first = true;
          for (const auto& m : menu) {
            if (!first) why << ' ';
            first = false;
            why << m.to_string();
          }
          why << "} on one side only";
          break;
        }
      return Verdict::no(why.str());
    }
    std::set<Action> acts;
    for (const auto& [act, vec] : a.act_succ)
      for (int s : node.first)
        if (!vec[s].empty()) acts.insert(act);
    for (const auto& [act, vec] : b.act_succ)
      for (int s : node.second)
        if (!vec[s].empty()) acts.insert(act);
    for (const auto& act : acts) {
      Node next{a.weak_step(node.first, act), b.weak_step(node.second, act)};
      if (next.first.empty() && next.second.empty()) continue;
      if (seen.insert(next).second) {
        auto t2 = trace;
        t2.push_back(act);
        queue.push_back({std::move(next), std::move(t2)});
      }
    }
  }
  return Verdict::yes();
}

// Greatest branching bisimulation by naive coinductive refinement on the
// state product, then the explicit-divergence side condition in the
// simplified form: when one system is divergence-free the other must be too;
// when both diverge the answer is unknown-divergence.
inline Verdict branching_bisim_divergence(const Lts& l1, const Lts& l2) {
  if (l1.truncated || l2.truncated) return Verdict::unknown("truncated input LTS");
  detail::WeakLts w1(l1), w2(l2);
  int n1 = static_cast<int>(l1.states.size());
  int n2 = static_cast<int>(l2.states.size());
  std::vector<std::vector<char>> rel(n1, std::vector<char>(n2, 1));

  // One side of the transfer condition: every move of s must be matched from t.
  auto matched = [](const Lts& ls, int s, const Lts& lt, const detail::WeakLts& wt, int t,
                    const std::vector<std::vector<char>>& r, bool flip) {
    auto related = [&](int x, int y) { return flip ? r[y][x] : r[x][y]; };
    for (const auto& [li, sdst] : ls.out[s]) {
      const LtsLabel& lab = ls.labels[li];
      bool ok = false;
      for (int mid : wt.tau_closure[t]) {
        if (!related(s, mid)) continue;
        if (lab.tau && related(sdst, mid)) {
          ok = true;
          break;
        }
        for (const auto& [lj, tdst] : lt.out[mid]) {
          if (!(lt.labels[lj] == lab)) continue;
          if (related(sdst, tdst)) {
            ok = true;
            break;
          }
        }
        if (ok) break;
      }
      if (!ok) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n1; ++s)
      for (int t = 0; t < n2; ++t) {
        if (!rel[s][t]) continue;
        if (!matched(l1, s, l2, w2, t, rel, false) ||
            !matched(l2, t, l1, w1, s, rel, true)) {
          rel[s][t] = 0;
          changed = true;
        }
      }
  }
  if (!rel[l1.initial][l2.initial]) {
    // find a minimal distinguishing pair for the report: the initial pair
    return Verdict::no("initial states not branching bisimilar",
                       {l1.states[l1.initial], l2.states[l2.initial]});
  }
  bool div1 = !detect_divergence(l1).empty();
  bool div2 = !detect_divergence(l2).empty();
  if (!div1 && !div2) return Verdict::yes();
  if (div1 != div2)
    return Verdict::no(std::string("explicit divergence: only the ") +
                       (div1 ? "first" : "second") + " system diverges");
  return Verdict::unknown(
      "unknown-divergence: both systems diverge; general divergence matching not decided");
}

// Forward-simulation check against a deterministic target. Builds the
// relation that maps each reachable state of l1 to the unique l2 state
// determined by its visible trace and verifies the five conditions of the
// underlying lemma; condition (e) is tau-acyclicity over the related states.
inline Verdict branching_bisim_deterministic_target(const Lts& l1, const Lts& l2) {
  if (l1.truncated || l2.truncated) return Verdict::unknown("truncated input LTS");
  Verdict det = is_deterministic(l2);
  if (!det)
    throw NetError("target LTS is not deterministic: " + det.detail);

  auto visible_successor = [&](int t, const LtsLabel& lab) -> int {
    for (const auto& [lj, d] : l2.out[t])
      if (l2.labels[lj] == lab) return d;
    return -1;
  };

  std::set<std::pair<int, int>> related;
  std::deque<std::pair<int, int>> queue;
  auto add = [&](int s, int t) {
    if (related.insert({s, t}).second) queue.push_back({s, t});
  };
  add(l1.initial, l2.initial);
  while (!queue.empty()) {
    auto [s, t] = queue.front();
    queue.pop_front();
    // (b)/(c): every move of s is matched
    for (const auto& [li, sdst] : l1.out[s]) {
      const LtsLabel& lab = l1.labels[li];
      if (lab.tau) {
        add(sdst, t);
      } else {
        int tdst = visible_successor(t, lab);
        if (tdst < 0)
          return Verdict::no("visible action " + lab.text + " of state " + l1.states[s] +
                                 " has no counterpart at " + l2.states[t],
                             {l1.states[s], l2.states[t]});
        add(sdst, tdst);
      }
    }
    // (d): every menu entry of t is enabled or deferrable at s
    bool has_tau = l1.has_tau(s);
    if (!has_tau) {
      for (const auto& [lj, d] : l2.out[t]) {
        const LtsLabel& lab = l2.labels[lj];
        bool ok = false;
        for (const auto& [li, sd] : l1.out[s])
          if (l1.labels[li] == lab) ok = true;
        if (!ok)
          return Verdict::no("stable state " + l1.states[s] + " refuses action " +
                                 lab.text + " offered by " + l2.states[t],
                             {l1.states[s], l2.states[t]});
      }
    }
  }
  // (e): no infinite tau run from a related state. All tau successors of
  // related states are related, so it suffices to find a tau cycle among them.
  std::set<int> dom;
  for (const auto& [s, t] : related) dom.insert(s);
  std::set<int> diverging = detect_divergence(l1);
  for (int s : dom)
    if (diverging.count(s))
      return Verdict::no("tau divergence at state " + l1.states[s], {l1.states[s]});
  return Verdict::yes();
}

// Branching split bisimilarity with explicit divergence between a net and a
// plain net, via the deterministic-target check on their split LTSs. For a
// plain second net this coincides with branching ST-bisimilarity with
// explicit divergence.
inline Verdict branching_split_bisim_nets(const PetriNet& n1, const PetriNet& n2,
                                          const Limits& lim = {}) {
  Verdict plain = is_plain(n2);
  if (!plain) throw NetError("second net must be plain: " + plain.detail);
  Lts l1 = build_split_lts(n1, lim);
  if (l1.truncated) return Verdict::unknown("first split LTS truncated: " + l1.truncation_reason);
  Lts l2 = build_split_lts(n2, lim);
  if (l2.truncated) return Verdict::unknown("second split LTS truncated: " + l2.truncation_reason);
  return branching_bisim_deterministic_target(l1, l2);
}

}  // namespace distnet
