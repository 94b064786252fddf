#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "distnet/component.hpp"
#include "distnet/net.hpp"
#include "distnet/reach.hpp"

namespace distnet {

// A location assignment for places and transitions, represented by the
// induced partition. Location ids are the least member of each class.
struct Distribution {
  std::map<Ident, Ident> location;  // element -> class representative

  Ident of(const Ident& x) const {
    auto it = location.find(x);
    if (it == location.end()) throw NetError("element without location: " + x);
    return it->second;
  }

  bool colocated(const Ident& x, const Ident& y) const { return of(x) == of(y); }

  std::map<Ident, std::set<Ident>> classes() const {
    std::map<Ident, std::set<Ident>> c;
    for (const auto& [x, loc] : location) c[loc].insert(x);
    return c;
  }
};

namespace detail {

struct UnionFind {
  std::map<Ident, Ident> parent;

  void add(const Ident& x) { parent.emplace(x, x); }

  Ident find(const Ident& x) {
    Ident r = x;
    while (parent[r] != r) r = parent[r];
    // path compression
    Ident c = x;
    while (parent[c] != r) {
      Ident next = parent[c];
      parent[c] = r;
      c = next;
    }
    return r;
  }

  void unite(const Ident& a, const Ident& b) {
    Ident ra = find(a), rb = find(b);
    if (ra == rb) return;
    // keep the lexicographically least id as representative
    if (rb < ra) std::swap(ra, rb);
    parent[rb] = ra;
  }
};

}  // namespace detail

// The canonical co-location relation: the smallest equivalence generated by
// "a transition is co-located with each of its preplaces".
inline Distribution canonical_distribution(const PetriNet& n) {
  detail::UnionFind uf;
  for (const auto& p : n.places) uf.add(p);
  for (const auto& t : n.transitions) uf.add(t);
  for (const auto& [arc, w] : n.flow)
    if (n.places.count(arc.first)) uf.unite(arc.first, arc.second);  // s in pre(t)
  Distribution d;
  for (const auto& p : n.places) d.location[p] = uf.find(p);
  for (const auto& t : n.transitions) d.location[t] = uf.find(t);
  return d;
}

namespace detail {

// BFS chain of preset-sharing transitions from t0 to tn, for failure
// witnesses: consecutive chain members share a preplace.
inline std::vector<Ident> conflict_chain(const PetriNet& n, const Ident& from,
                                         const Ident& to) {
  std::map<Ident, Ident> pred;
  std::deque<Ident> queue{from};
  pred[from] = from;
  while (!queue.empty()) {
    Ident t = queue.front();
    queue.pop_front();
    if (t == to) break;
    Marking pre_t = n.preset(t);
    for (const auto& u : n.transitions) {
      if (pred.count(u)) continue;
      if (!multiset_intersection(pre_t, n.preset(u)).empty()) {
        pred[u] = t;
        queue.push_back(u);
      }
    }
  }
  std::vector<Ident> chain;
  if (!pred.count(to)) return chain;
  for (Ident t = to;; t = pred[t]) {
    chain.push_back(t);
    if (t == pred[t]) break;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

enum class CoLocationRule { Distributed, Essentially, Externally };

inline Verdict check_distribution_conditions(const PetriNet& n, const Distribution& d,
                                             const ConcurrencyRelation& rel,
                                             CoLocationRule rule, bool canonical) {
  // Condition (1): transitions co-located with their preplaces.
  for (const auto& [arc, w] : n.flow) {
    if (!n.places.count(arc.first)) continue;
    if (!d.colocated(arc.first, arc.second))
      return Verdict::no("transition not co-located with preplace",
                         {arc.second, arc.first});
  }
  // Condition (2) in its three variants.
  for (const auto& [t, u] : rel.pairs) {
    bool applies = true;
    switch (rule) {
      case CoLocationRule::Distributed: break;
      case CoLocationRule::Essentially:
        applies = !n.is_tau(t) || !n.is_tau(u);
        break;
      case CoLocationRule::Externally:
        applies = !n.is_tau(t) && !n.is_tau(u);
        break;
    }
    if (!applies) continue;
    if (d.colocated(t, u)) {
      Verdict v = Verdict::no("concurrent transitions co-located", {t, u});
      if (canonical) {
        std::vector<Ident> chain = conflict_chain(n, t, u);
        if (!chain.empty()) {
          v.detail += "; preset-sharing chain";
          v.witness = chain;
        }
      }
      return v;
    }
  }
  if (rel.truncated) return Verdict::unknown("concurrency relation truncated");
  return Verdict::yes();
}

inline Verdict check_with_rule(const PetriNet& n, const Distribution* d,
                               const Limits& lim, CoLocationRule rule) {
  n.validate();
  ConcurrencyRelation rel = concurrency_relation(n, lim);
  if (d) return check_distribution_conditions(n, *d, rel, rule, false);
  Distribution cd = canonical_distribution(n);
  return check_distribution_conditions(n, cd, rel, rule, true);
}

}  // namespace detail

// Distributed: some distribution keeps transitions with their preplaces and
// separates concurrent transitions. Without an explicit distribution the
// canonical one decides the existential question.
inline Verdict check_distributed(const PetriNet& n, const Limits& lim = {},
                                 const Distribution* d = nullptr) {
  return detail::check_with_rule(n, d, lim, detail::CoLocationRule::Distributed);
}

// Essentially distributed: concurrent pairs with at least one visible member
// must be separated; invisible transitions may share a location.
inline Verdict check_essentially_distributed(const PetriNet& n, const Limits& lim = {},
                                             const Distribution* d = nullptr) {
  return detail::check_with_rule(n, d, lim, detail::CoLocationRule::Essentially);
}

// Externally distributed: only concurrent pairs of two visible transitions
// must be separated.
inline Verdict check_externally_distributed(const PetriNet& n, const Limits& lim = {},
                                            const Distribution* d = nullptr) {
  return detail::check_with_rule(n, d, lim, detail::CoLocationRule::Externally);
}

namespace detail {

inline Ident control_place_name(const Ident& loc) { return "ctl(" + loc + ")"; }

}  // namespace detail

// Serialises each canonical location by a fresh marked control place
// self-looped to all its transitions. For an essentially distributed input
// the result is distributed and branching ST-bisimilar with explicit
// divergence to the input.
inline PetriNet essentially_to_distributed(const PetriNet& n, const Limits& lim = {}) {
  Verdict pre = check_essentially_distributed(n, lim);
  if (pre.truth == Truth::No)
    throw NetError("net is not essentially distributed: " + pre.detail);
  Distribution d = canonical_distribution(n);
  PetriNet out = n;
  for (const auto& [loc, members] : d.classes()) {
    std::vector<Ident> trans;
    for (const auto& x : members)
      if (n.transitions.count(x)) trans.push_back(x);
    if (trans.empty()) continue;
    Ident ctl = detail::control_place_name(loc);
    if (out.has_element(ctl)) throw NetError("control place name collision: " + ctl);
    out.add_place(ctl, 1);
    for (const auto& t : trans) {
      out.add_arc(ctl, t);
      out.add_arc(t, ctl);
    }
  }
  out.validate();
  return out;
}

// The location-wise decomposition of a distributed net into sequential
// components, and its recomposition as an LSGA net. Per location [x] the
// component keeps the local places and transitions, adds a marked control
// place self-looped to the local transitions, imports the postplaces of local
// transitions that live elsewhere as outputs, and exposes the local places as
// inputs.
inline std::pair<std::vector<Component>, Component> decompose_to_lsga(
    const PetriNet& n, const Distribution& d, const Limits& lim = {}) {
  Verdict ok = check_distributed(n, lim, &d);
  if (ok.truth != Truth::Yes)
    throw NetError("net is not distributed w.r.t. the given distribution: " + ok.detail);
  std::vector<Component> components;
  for (const auto& [loc, members] : d.classes()) {
    Component c;
    std::set<Ident> local_places, local_trans;
    for (const auto& x : members) {
      if (n.places.count(x)) local_places.insert(x);
      else local_trans.insert(x);
    }
    std::set<Ident> outputs;
    for (const auto& t : local_trans)
      for (const auto& [p, w] : n.postset(t))
        if (!members.count(p)) outputs.insert(p);
    for (const auto& p : local_places) {
      c.net.add_place(p, n.initial[p]);
      c.inputs.insert(p);
    }
    for (const auto& p : outputs) {
      c.net.add_place(p, 0);
      c.outputs.insert(p);
    }
    for (const auto& t : local_trans) c.net.add_transition(t, n.label(t));
    for (const auto& [arc, w] : n.flow) {
      bool src_in = c.net.has_element(arc.first), dst_in = c.net.has_element(arc.second);
      if (!src_in || !dst_in) continue;
      // arcs of the component: both endpoints local or an output postarc
      if (n.transitions.count(arc.first) && !local_trans.count(arc.first)) continue;
      if (n.transitions.count(arc.second) && !local_trans.count(arc.second)) continue;
      c.net.add_arc(arc.first, arc.second, w);
    }
    // one fresh marked control place per location, self-looped to all its
    // transitions; it is the sequential S-invariant of the component
    Ident ctl = detail::control_place_name(loc);
    if (n.has_element(ctl)) throw NetError("control place name collision: " + ctl);
    c.net.add_place(ctl, 1);
    for (const auto& t : local_trans) {
      c.net.add_arc(ctl, t);
      c.net.add_arc(t, ctl);
    }
    components.push_back(std::move(c));
  }
  Component recomposed = compose(components);
  return {components, recomposed};
}

inline std::pair<std::vector<Component>, Component> decompose_to_lsga(
    const PetriNet& n, const Limits& lim = {}) {
  return decompose_to_lsga(n, canonical_distribution(n), lim);
}

}  // namespace distnet
