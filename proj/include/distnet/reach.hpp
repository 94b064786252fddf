#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "distnet/net.hpp"
#include "distnet/verdict.hpp"

namespace distnet {

struct Limits {
  std::size_t max_markings = 100000;     // state budget for explorations
  long long max_tokens_per_place = 16;   // marking truncation bound
  std::size_t max_firing_len = 8;        // |U| cap in the ST transition system
  std::size_t max_step_size = 8;         // |G| cap when enumerating steps
};

enum class StepMode { Single, AllSteps };

struct ReachGraph {
  struct Edge {
    std::size_t src;
    Step step;
    std::size_t dst;
  };
  std::vector<Marking> nodes;  // BFS discovery order; nodes[0] is initial
  std::vector<Edge> edges;
  bool truncated = false;
  std::string truncation_reason;

  bool contains(const Marking& m) const {
    for (const auto& n : nodes)
      if (n == m) return true;
    return false;
  }
};

namespace detail {

struct VecHash {
  std::size_t operator()(const std::vector<long long>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (long long x : v) {
      auto u = static_cast<unsigned long long>(x);
      for (int i = 0; i < 8; ++i) {
        h ^= (u >> (i * 8)) & 0xff;
        h *= 1099511628211ull;
      }
    }
    return h;
  }
};

// Dense view of a net for state-space exploration. Places and transitions are
// numbered in ascending id order, so everything downstream is deterministic.
struct IndexedNet {
  std::vector<Ident> place_names;
  std::vector<Ident> trans_names;
  std::map<Ident, int> place_index;
  std::map<Ident, int> trans_index;
  std::vector<std::vector<std::pair<int, long long>>> pre;   // per transition
  std::vector<std::vector<std::pair<int, long long>>> post;  // per transition
  std::vector<int> label;  // -1 = tau, else index into actions
  std::vector<Action> actions;
  std::vector<long long> m0;

  explicit IndexedNet(const PetriNet& n) {
    n.validate();
    place_names.assign(n.places.begin(), n.places.end());
    trans_names.assign(n.transitions.begin(), n.transitions.end());
    for (std::size_t i = 0; i < place_names.size(); ++i)
      place_index[place_names[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < trans_names.size(); ++i)
      trans_index[trans_names[i]] = static_cast<int>(i);
    pre.resize(trans_names.size());
    post.resize(trans_names.size());
    std::set<Action> acts;
    for (const auto& t : n.transitions) {
      Label l = n.label(t);
      if (l) acts.insert(*l);
    }
    actions.assign(acts.begin(), acts.end());
    label.resize(trans_names.size(), -1);
    for (std::size_t i = 0; i < trans_names.size(); ++i) {
      Label l = n.label(trans_names[i]);
      if (l)
        label[i] = static_cast<int>(
            std::lower_bound(actions.begin(), actions.end(), *l) - actions.begin());
    }
    for (const auto& [arc, w] : n.flow) {
      auto pit = place_index.find(arc.first);
      if (pit != place_index.end()) {
        pre[trans_index.at(arc.second)].push_back({pit->second, w});
      } else {
        post[trans_index.at(arc.first)].push_back({place_index.at(arc.second), w});
      }
    }
    for (auto& v : pre) std::sort(v.begin(), v.end());
    for (auto& v : post) std::sort(v.begin(), v.end());
    m0.assign(place_names.size(), 0);
    for (const auto& [p, k] : n.initial) m0[place_index.at(p)] = k;
  }

  bool enabled(const std::vector<long long>& m, int t) const {
    for (const auto& [p, w] : pre[t])
      if (m[p] < w) return false;
    return true;
  }

  std::vector<long long> fire(const std::vector<long long>& m, int t) const {
    std::vector<long long> r = m;
    for (const auto& [p, w] : pre[t]) r[p] -= w;
    for (const auto& [p, w] : post[t]) r[p] += w;
    return r;
  }

  Marking to_marking(const std::vector<long long>& m) const {
    Marking r;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] != 0) r.set(place_names[i], m[i]);
    return r;
  }

  std::vector<long long> from_marking(const Marking& m) const {
    std::vector<long long> r(place_names.size(), 0);
    for (const auto& [p, k] : m) r[place_index.at(p)] = k;
    return r;
  }
};

struct MarkingSpace {
  std::vector<std::vector<long long>> states;
  std::unordered_map<std::vector<long long>, std::size_t, VecHash> index;
  // single-transition edges (src, transition, dst) in discovery order
  std::vector<std::tuple<std::size_t, int, std::size_t>> edges;
  bool truncated = false;
  std::string truncation_reason;

  std::size_t intern(const std::vector<long long>& m) {
    auto it = index.find(m);
    if (it != index.end()) return it->second;
    states.push_back(m);
    index.emplace(m, states.size() - 1);
    return states.size() - 1;
  }
};

// Breadth-first closure of the initial marking under single-transition
// firings. Every reachable marking arises this way because steps can always
// be serialised.
inline MarkingSpace explore_markings(const IndexedNet& net, const Limits& lim) {
  MarkingSpace space;
  space.intern(net.m0);
  for (std::size_t qi = 0; qi < space.states.size(); ++qi) {
    std::vector<long long> m = space.states[qi];
    for (int t = 0; t < static_cast<int>(net.trans_names.size()); ++t) {
      if (!net.enabled(m, t)) continue;
      std::vector<long long> next = net.fire(m, t);
      bool over = false;
      for (long long tokens : next)
        if (tokens > lim.max_tokens_per_place) over = true;
      if (over) {
        space.truncated = true;
        space.truncation_reason = "max-tokens-per-place exceeded";
        continue;
      }
      if (space.index.find(next) == space.index.end() &&
          space.states.size() >= lim.max_markings) {
        space.truncated = true;
        space.truncation_reason = "max-markings exceeded";
        continue;
      }
      std::size_t dst = space.intern(next);
      space.edges.emplace_back(qi, t, dst);
    }
  }
  return space;
}

// All non-empty steps G with \bullet G <= m, by backtracking over transitions
// in ascending order; per-transition multiplicity is limited by the token
// budget and the total size by lim.max_step_size. visible_only excludes tau
// transitions from G.
inline void enumerate_steps(const IndexedNet& net, const std::vector<long long>& m,
                            const Limits& lim, bool visible_only,
                            std::vector<std::vector<std::pair<int, long long>>>& out) {
  std::vector<std::pair<int, long long>> current;
  std::vector<long long> budget = m;
  std::size_t size = 0;
  auto rec = [&](auto&& self, int t) -> void {
    if (t == static_cast<int>(net.trans_names.size())) {
      if (!current.empty()) out.push_back(current);
      return;
    }
    self(self, t + 1);  // multiplicity 0 first keeps output lexicographic
    if (visible_only && net.label[t] < 0) return;
    long long count = 0;
    while (size < lim.max_step_size) {
      bool can = true;
      for (const auto& [p, w] : net.pre[t])
        if (budget[p] < w) can = false;
      if (!can) break;
      for (const auto& [p, w] : net.pre[t]) budget[p] -= w;
      ++count;
      ++size;
      current.push_back({t, count});
      self(self, t + 1);
      current.pop_back();
    }
    for (const auto& [p, w] : net.pre[t]) budget[p] += w * count;
    size -= count;
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
}

}  // namespace detail

inline ReachGraph reachability(const PetriNet& n, const Limits& lim = {},
                               StepMode mode = StepMode::Single) {
  detail::IndexedNet inet(n);
  detail::MarkingSpace space = detail::explore_markings(inet, lim);
  ReachGraph g;
  g.truncated = space.truncated;
  g.truncation_reason = space.truncation_reason;
  g.nodes.reserve(space.states.size());
  for (const auto& m : space.states) g.nodes.push_back(inet.to_marking(m));
  if (mode == StepMode::Single) {
    for (const auto& [src, t, dst] : space.edges)
      g.edges.push_back({src, Step::single(inet.trans_names[t]), dst});
  } else {
    for (std::size_t s = 0; s < space.states.size(); ++s) {
      std::vector<std::vector<std::pair<int, long long>>> steps;
      detail::enumerate_steps(inet, space.states[s], lim, false, steps);
      for (const auto& fir : steps) {
        std::vector<long long> next = space.states[s];
        Step step;
        for (const auto& [t, k] : fir) {
          step.set(inet.trans_names[t], k);
          for (const auto& [p, w] : inet.pre[t]) next[p] -= w * k;
          for (const auto& [p, w] : inet.post[t]) next[p] += w * k;
        }
        auto it = space.index.find(next);
        if (it == space.index.end()) {
          g.truncated = true;
          if (g.truncation_reason.empty())
            g.truncation_reason = "step target outside explored markings";
          continue;
        }
        g.edges.push_back({s, step, it->second});
      }
    }
  }
  return g;
}

struct ConcurrencyRelation {
  // unordered pairs stored with first <= second; (t,t) records self-concurrency
  std::set<std::pair<Ident, Ident>> pairs;
  bool truncated = false;

  bool related(const Ident& a, const Ident& b) const {
    auto p = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    return pairs.count(p) != 0;
  }
};

// t ~ u iff some reachable marking enables the step {t}+{u}.
inline ConcurrencyRelation concurrency_relation(const PetriNet& n, const Limits& lim = {}) {
  detail::IndexedNet inet(n);
  detail::MarkingSpace space = detail::explore_markings(inet, lim);
  ConcurrencyRelation rel;
  rel.truncated = space.truncated;
  std::size_t nt = inet.trans_names.size();
  std::vector<std::vector<long long>> need;  // preset of {t}+{u} as dense vector
  for (const auto& m : space.states) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (!inet.enabled(m, static_cast<int>(t))) continue;
      for (std::size_t u = t; u < nt; ++u) {
        if (rel.pairs.count({inet.trans_names[t], inet.trans_names[u]})) continue;
        bool ok = true;
        std::vector<long long> rest = m;
        for (const auto& [p, w] : inet.pre[t]) rest[p] -= w;
        for (const auto& [p, w] : inet.pre[u])
          if (rest[p] < w) ok = false;
        if (ok) rel.pairs.insert({inet.trans_names[t], inet.trans_names[u]});
      }
    }
  }
  return rel;
}

// No two concurrently enabled transitions share a preplace.
inline Verdict is_structural_conflict_net(const PetriNet& n, const Limits& lim = {}) {
  ConcurrencyRelation rel = concurrency_relation(n, lim);
  for (const auto& [t, u] : rel.pairs) {
    Marking shared = multiset_intersection(n.preset(t), n.preset(u));
    if (!shared.empty())
      return Verdict::no("concurrent transitions share preplace " + shared.begin()->first,
                         {t, u});
  }
  if (rel.truncated) return Verdict::unknown("state space truncated");
  return Verdict::yes();
}

inline Verdict is_one_safe(const PetriNet& n, const Limits& lim = {}) {
  detail::IndexedNet inet(n);
  detail::MarkingSpace space = detail::explore_markings(inet, lim);
  for (const auto& m : space.states) {
    for (std::size_t p = 0; p < m.size(); ++p)
      if (m[p] > 1)
        return Verdict::no("place holds " + std::to_string(m[p]) + " tokens",
                           {inet.place_names[p]});
  }
  if (space.truncated) return Verdict::unknown("state space truncated");
  return Verdict::yes();
}

}  // namespace distnet
