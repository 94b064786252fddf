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

#include "distnet/reach.hpp"

namespace distnet {

struct LtsLabel {
  bool tau = false;
  std::string text;  // "a", "{a,c}", "a+", "a-2"; empty for tau

  friend bool operator==(const LtsLabel& a, const LtsLabel& b) {
    return a.tau == b.tau && (a.tau || a.text == b.text);
  }
  friend bool operator<(const LtsLabel& a, const LtsLabel& b) {
    return std::tie(a.tau, a.text) < std::tie(b.tau, b.text);
  }
  std::string display() const { return tau ? "tau" : text; }
};

inline LtsLabel tau_label() { return {true, ""}; }
inline LtsLabel act_label(std::string text) { return {false, std::move(text)}; }

struct Lts {
  std::vector<std::string> states;  // display names, discovery order
  std::vector<LtsLabel> labels;     // label table
  std::vector<std::vector<std::pair<int, int>>> out;  // per state: (label, dst)
  int initial = 0;
  bool truncated = false;
  std::string truncation_reason;

  int intern_label(const LtsLabel& l) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == l) return static_cast<int>(i);
    labels.push_back(l);
    return static_cast<int>(labels.size() - 1);
  }

  int add_state(std::string name) {
    states.push_back(std::move(name));
    out.emplace_back();
    return static_cast<int>(states.size() - 1);
  }

  void add_edge(int src, const LtsLabel& l, int dst) {
    int li = intern_label(l);
    auto& edges = out[src];
    if (std::find(edges.begin(), edges.end(), std::make_pair(li, dst)) == edges.end())
      edges.push_back({li, dst});
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& e : out) n += e.size();
    return n;
  }

  bool has_tau(int s) const {
    for (const auto& [l, d] : out[s])
      if (labels[l].tau) return true;
    return false;
  }

  // Visible labels available at s.
  std::set<std::string> menu(int s) const {
    std::set<std::string> m;
    for (const auto& [l, d] : out[s])
      if (!labels[l].tau) m.insert(labels[l].text);
    return m;
  }
};

// Interleaving view: states are reachable markings, edges single transitions
// labelled ell(t).
inline Lts build_interleaving_lts(const PetriNet& n, const Limits& lim = {}) {
  detail::IndexedNet inet(n);
  detail::MarkingSpace space = detail::explore_markings(inet, lim);
  Lts lts;
  lts.truncated = space.truncated;
  lts.truncation_reason = space.truncation_reason;
  for (const auto& m : space.states) lts.add_state(inet.to_marking(m).to_string());
  for (const auto& [src, t, dst] : space.edges) {
    int li = inet.label[t];
    lts.add_edge(static_cast<int>(src),
                 li < 0 ? tau_label() : act_label(inet.actions[li]),
                 static_cast<int>(dst));
  }
  return lts;
}

// Step view: visible edges are labelled by non-empty multisets of visible
// actions (steps of all-visible transitions); tau edges as in the
// interleaving case.
inline Lts build_step_lts(const PetriNet& n, const Limits& lim = {}) {
  detail::IndexedNet inet(n);
  detail::MarkingSpace space = detail::explore_markings(inet, lim);
  Lts lts;
  lts.truncated = space.truncated;
  lts.truncation_reason = space.truncation_reason;
  for (const auto& m : space.states) lts.add_state(inet.to_marking(m).to_string());
  for (const auto& [src, t, dst] : space.edges)
    if (inet.label[t] < 0)
      lts.add_edge(static_cast<int>(src), tau_label(), static_cast<int>(dst));
  for (std::size_t s = 0; s < space.states.size(); ++s) {
    std::vector<std::vector<std::pair<int, long long>>> steps;
    detail::enumerate_steps(inet, space.states[s], lim, true, steps);
    for (const auto& fir : steps) {
      std::vector<long long> next = space.states[s];
      SignedMultiset<Action> a;
      for (const auto& [t, k] : fir) {
        a.add(inet.actions[inet.label[t]], k);
        for (const auto& [p, w] : inet.pre[t]) next[p] -= w * k;
        for (const auto& [p, w] : inet.post[t]) next[p] += w * k;
      }
      auto it = space.index.find(next);
      if (it == space.index.end()) {
        lts.truncated = true;
        if (lts.truncation_reason.empty())
          lts.truncation_reason = "step target outside explored markings";
        continue;
      }
      lts.add_edge(static_cast<int>(s), act_label(a.to_string()),
                   static_cast<int>(it->second));
    }
  }
  return lts;
}

namespace detail {

// Shared exploration for the split view; states are (marking, multiset of
// currently firing visible transitions), encoded densely as one vector.
struct SplitSpace {
  std::vector<int> visible;  // transition indices with a visible label
  std::vector<std::vector<long long>> states;  // |S| marking + |visible| firing
  std::unordered_map<std::vector<long long>, std::size_t, VecHash> index;
  bool truncated = false;
  std::string truncation_reason;
};

inline SplitSpace explore_split(const IndexedNet& net) {
  SplitSpace sp;
  for (int t = 0; t < static_cast<int>(net.trans_names.size()); ++t)
    if (net.label[t] >= 0) sp.visible.push_back(t);
  std::size_t ns = net.place_names.size();
  std::vector<long long> init = net.m0;
  init.resize(ns + sp.visible.size(), 0);
  sp.states.push_back(init);
  sp.index.emplace(init, 0);
  return sp;
}

}  // namespace detail

// Split view: states are split markings (M,U); labels a+, a-, tau.
inline Lts build_split_lts(const PetriNet& n, const Limits& lim = {}) {
  detail::IndexedNet inet(n);
  detail::SplitSpace sp = detail::explore_split(inet);
  std::size_t ns = inet.place_names.size();
  Lts lts;
  auto name_of = [&](const std::vector<long long>& st) {
    Marking m;
    for (std::size_t i = 0; i < ns; ++i)
      if (st[i] != 0) m.set(inet.place_names[i], st[i]);
    Step u;
    for (std::size_t i = 0; i < sp.visible.size(); ++i)
      if (st[ns + i] != 0) u.set(inet.trans_names[sp.visible[i]], st[ns + i]);
    return "(" + m.to_string() + "," + u.to_string() + ")";
  };
  lts.add_state(name_of(sp.states[0]));
  std::deque<std::size_t> queue{0};
  auto push = [&](std::vector<long long>&& st) -> int {
    auto it = sp.index.find(st);
    if (it != sp.index.end()) return static_cast<int>(it->second);
    for (std::size_t i = 0; i < ns; ++i)
      if (st[i] > lim.max_tokens_per_place) {
        lts.truncated = true;
        lts.truncation_reason = "max-tokens-per-place exceeded";
        return -1;
      }
    if (sp.states.size() >= lim.max_markings) {
      lts.truncated = true;
      lts.truncation_reason = "max-markings exceeded";
      return -1;
    }
    sp.states.push_back(st);
    sp.index.emplace(std::move(st), sp.states.size() - 1);
    lts.add_state(name_of(sp.states.back()));
    queue.push_back(sp.states.size() - 1);
    return static_cast<int>(sp.states.size() - 1);
  };
  while (!queue.empty()) {
    std::size_t si = queue.front();
    queue.pop_front();
    std::vector<long long> st = sp.states[si];
    // a+ : start a visible transition, removing its preset
    for (std::size_t vi = 0; vi < sp.visible.size(); ++vi) {
      int t = sp.visible[vi];
      if (!inet.enabled(st, t)) continue;
      std::vector<long long> next = st;
      for (const auto& [p, w] : inet.pre[t]) next[p] -= w;
      next[ns + vi] += 1;
      int dst = push(std::move(next));
      if (dst >= 0)
        lts.add_edge(static_cast<int>(si),
                     act_label(inet.actions[inet.label[t]] + "+"), dst);
    }
    // a- : finish a currently firing transition, adding its postset
    for (std::size_t vi = 0; vi < sp.visible.size(); ++vi) {
      if (st[ns + vi] == 0) continue;
      int t = sp.visible[vi];
      std::vector<long long> next = st;
      for (const auto& [p, w] : inet.post[t]) next[p] += w;
      next[ns + vi] -= 1;
      int dst = push(std::move(next));
      if (dst >= 0)
        lts.add_edge(static_cast<int>(si),
                     act_label(inet.actions[inet.label[t]] + "-"), dst);
    }
    // tau : fire an invisible transition, leaving U unchanged
    for (int t = 0; t < static_cast<int>(inet.trans_names.size()); ++t) {
      if (inet.label[t] >= 0 || !inet.enabled(st, t)) continue;
      std::vector<long long> next = st;
      for (const auto& [p, w] : inet.pre[t]) next[p] -= w;
      for (const auto& [p, w] : inet.post[t]) next[p] += w;
      int dst = push(std::move(next));
      if (dst >= 0) lts.add_edge(static_cast<int>(si), tau_label(), dst);
    }
  }
  return lts;
}

// ST view: states are (M,U) with U a sequence of currently firing
// transitions; ends are matched to starts by position, labels a+, a-n, tau.
// |U| is capped by lim.max_firing_len; hitting the cap sets truncated.
inline Lts build_st_lts(const PetriNet& n, const Limits& lim = {}) {
  detail::IndexedNet inet(n);
  std::size_t ns = inet.place_names.size();
  // state: marking vector + firing sequence of transition indices
  using State = std::pair<std::vector<long long>, std::vector<int>>;
  std::map<State, int> index;
  std::vector<State> states;
  Lts lts;
  auto name_of = [&](const State& st) {
    Marking m;
    for (std::size_t i = 0; i < ns; ++i)
      if (st.first[i] != 0) m.set(inet.place_names[i], st.first[i]);
    std::ostringstream u;
    for (std::size_t i = 0; i < st.second.size(); ++i) {
      if (i) u << '.';
      u << inet.trans_names[st.second[i]];
    }
    return "(" + m.to_string() + "," + u.str() + ")";
  };
  State init{inet.m0, {}};
  index.emplace(init, 0);
  states.push_back(init);
  lts.add_state(name_of(init));
  std::deque<int> queue{0};
  auto push = [&](State&& st) -> int {
    auto it = index.find(st);
    if (it != index.end()) return it->second;
    if (st.second.size() > lim.max_firing_len) {
      lts.truncated = true;
      lts.truncation_reason = "max-firing-len exceeded";
      return -1;
    }
    for (std::size_t i = 0; i < ns; ++i)
      if (st.first[i] > lim.max_tokens_per_place) {
        lts.truncated = true;
        lts.truncation_reason = "max-tokens-per-place exceeded";
        return -1;
      }
    if (states.size() >= lim.max_markings) {
      lts.truncated = true;
      lts.truncation_reason = "max-markings exceeded";
      return -1;
    }
    states.push_back(st);
    int id = static_cast<int>(states.size() - 1);
    index.emplace(std::move(st), id);
    lts.add_state(name_of(states.back()));
    queue.push_back(id);
    return id;
  };
  while (!queue.empty()) {
    int si = queue.front();
    queue.pop_front();
    State st = states[si];
    for (int t = 0; t < static_cast<int>(inet.trans_names.size()); ++t) {
      if (!inet.enabled(st.first, t)) continue;
      if (inet.label[t] >= 0) {
        State next = st;
        for (const auto& [p, w] : inet.pre[t]) next.first[p] -= w;
        next.second.push_back(t);
        int dst = push(std::move(next));
        if (dst >= 0)
          lts.add_edge(si, act_label(inet.actions[inet.label[t]] + "+"), dst);
      } else {
        State next = st;
        for (const auto& [p, w] : inet.pre[t]) next.first[p] -= w;
        for (const auto& [p, w] : inet.post[t]) next.first[p] += w;
        int dst = push(std::move(next));
        if (dst >= 0) lts.add_edge(si, tau_label(), dst);
      }
    }
    for (std::size_t pos = 0; pos < st.second.size(); ++pos) {
      int t = st.second[pos];
      State next = st;
      for (const auto& [p, w] : inet.post[t]) next.first[p] += w;
      next.second.erase(next.second.begin() + static_cast<long>(pos));
      int dst = push(std::move(next));
      if (dst >= 0)
        lts.add_edge(si,
                     act_label(inet.actions[inet.label[t]] + "-" +
                               std::to_string(pos + 1)),
                     dst);
    }
  }
  return lts;
}

// States admitting an infinite tau-path: those that can tau-reach a tau-cycle.
inline std::set<int> detect_divergence(const Lts& lts) {
  int n = static_cast<int>(lts.states.size());
  // Tarjan SCC on the tau-subgraph, iterative.
  std::vector<int> indexv(n, -1), low(n, 0);
  std::vector<char> onstack(n, 0);
  std::vector<int> stack;
  std::vector<int> scc_of(n, -1);
  std::vector<std::vector<int>> sccs;
  int counter = 0;
  for (int root = 0; root < n; ++root) {
    if (indexv[root] != -1) continue;
    std::vector<std::tuple<int, std::size_t>> call{{root, 0}};
    while (!call.empty()) {
      auto& [v, ei] = call.back();
      if (ei == 0) {
        indexv[v] = low[v] = counter++;
        stack.push_back(v);
        onstack[v] = 1;
      }
      bool descended = false;
      while (ei < lts.out[v].size()) {
        auto [l, w] = lts.out[v][ei];
        ++ei;
        if (!lts.labels[l].tau) continue;
        if (indexv[w] == -1) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (onstack[w]) low[v] = std::min(low[v], indexv[w]);
      }
      if (descended) continue;
      if (low[v] == indexv[v]) {
        sccs.emplace_back();
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          onstack[w] = 0;
          scc_of[w] = static_cast<int>(sccs.size() - 1);
          sccs.back().push_back(w);
        } while (w != v);
      }
      int finished = v;
      call.pop_back();
      if (!call.empty()) {
        int parent = std::get<0>(call.back());
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  // A tau-cycle: SCC of size >= 2, or a single state with a tau self-loop.
  std::vector<char> cyc(sccs.size(), 0);
  for (std::size_t i = 0; i < sccs.size(); ++i) {
    if (sccs[i].size() >= 2) cyc[i] = 1;
    else {
      int v = sccs[i][0];
      for (const auto& [l, w] : lts.out[v])
        if (lts.labels[l].tau && w == v) cyc[i] = 1;
    }
  }
  // Backward closure over tau edges: BFS from cyclic states on reversed graph.
  std::vector<std::vector<int>> rev(n);
  for (int v = 0; v < n; ++v)
    for (const auto& [l, w] : lts.out[v])
      if (lts.labels[l].tau) rev[w].push_back(v);
  std::set<int> result;
  std::deque<int> queue;
  for (int v = 0; v < n; ++v)
    if (cyc[scc_of[v]]) {
      result.insert(v);
      queue.push_back(v);
    }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : rev[v])
      if (result.insert(u).second) queue.push_back(u);
  }
  return result;
}

// Def. "deterministic": no reachable tau edge, and a-successors are unique.
inline Verdict is_deterministic(const Lts& lts) {
  for (std::size_t s = 0; s < lts.states.size(); ++s) {
    std::map<int, int> seen;
    for (const auto& [l, d] : lts.out[s]) {
      if (lts.labels[l].tau)
        return Verdict::no("tau edge at state " + lts.states[s], {lts.states[s]});
      auto [it, inserted] = seen.emplace(l, d);
      if (!inserted && it->second != d)
        return Verdict::no("nondeterministic label " + lts.labels[l].text + " at " +
                               lts.states[s],
                           {lts.states[s]});
    }
  }
  return Verdict::yes();
}

inline std::string lts_to_dot(const Lts& lts, const std::string& name = "lts") {
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n";
  out << "  rankdir=TB;\n  node [shape=ellipse];\n";
  out << "  init [shape=point];\n";
  for (std::size_t s = 0; s < lts.states.size(); ++s)
    out << "  s" << s << " [label=\"" << lts.states[s] << "\"];\n";
  out << "  init -> s" << lts.initial << ";\n";
  for (std::size_t s = 0; s < lts.states.size(); ++s)
    for (const auto& [l, d] : lts.out[s])
      out << "  s" << s << " -> s" << d << " [label=\"" << lts.labels[l].display()
          << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace distnet
