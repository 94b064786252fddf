#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "distnet/net.hpp"
#include "distnet/reach.hpp"

namespace distnet {

// Conflict structure over the well-ordering < on transitions, fixed here as
// ascending id order: i # j iff i != j and their presets intersect.
struct ConflictStructure {
  std::vector<Ident> order;                        // ascending
  std::set<std::pair<Ident, Ident>> conflict;      // unordered, stored sorted
  std::set<std::pair<Ident, Ident>> ordered_conflict;  // i <# j pairs

  bool in_conflict(const Ident& a, const Ident& b) const {
    auto p = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    return conflict.count(p) != 0;
  }
  // i =# j : in conflict or equal
  bool conflict_or_equal(const Ident& a, const Ident& b) const {
    return a == b || in_conflict(a, b);
  }
  // i <# j
  bool ordered(const Ident& a, const Ident& b) const {
    return ordered_conflict.count({a, b}) != 0;
  }
  // i <=# j
  bool ordered_or_equal(const Ident& a, const Ident& b) const {
    return a == b || ordered(a, b);
  }
};

inline ConflictStructure conflict_structure(const PetriNet& n) {
  ConflictStructure cs;
  cs.order.assign(n.transitions.begin(), n.transitions.end());
  for (std::size_t i = 0; i < cs.order.size(); ++i) {
    Marking pre_i = n.preset(cs.order[i]);
    for (std::size_t j = i + 1; j < cs.order.size(); ++j) {
      if (multiset_intersection(pre_i, n.preset(cs.order[j])).empty()) continue;
      cs.conflict.insert({cs.order[i], cs.order[j]});
      cs.ordered_conflict.insert({cs.order[i], cs.order[j]});
    }
  }
  return cs;
}

// Witness of a fully reachable pure M: transitions t,u,v with
// pre(t)^pre(u) != 0, pre(u)^pre(v) != 0, pre(t)^pre(v) = 0 and a reachable
// marking covering pre(t) u pre(u) u pre(v). Canonical: t < v.
struct MWitness {
  Ident t, u, v;
  Marking marking;
};

struct MSearchResult {
  std::optional<MWitness> witness;
  bool truncated = false;
};

inline MSearchResult find_fully_reachable_pure_m(const PetriNet& n, const Limits& lim = {}) {
  n.validate();
  // structural candidates first
  std::vector<Ident> ts(n.transitions.begin(), n.transitions.end());
  std::vector<Marking> pre(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) pre[i] = n.preset(ts[i]);
  struct Candidate {
    std::size_t t, u, v;
    Marking cover;  // pointwise max of the three presets
  };
  std::vector<Candidate> candidates;
  for (std::size_t u = 0; u < ts.size(); ++u)
    for (std::size_t t = 0; t < ts.size(); ++t) {
      if (t == u || multiset_intersection(pre[t], pre[u]).empty()) continue;
      for (std::size_t v = t + 1; v < ts.size(); ++v) {  // canonical t < v
        if (v == u || multiset_intersection(pre[u], pre[v]).empty()) continue;
        if (!multiset_intersection(pre[t], pre[v]).empty()) continue;
        candidates.push_back(
            {t, u, v, multiset_union(multiset_union(pre[t], pre[u]), pre[v])});
      }
    }
  MSearchResult result;
  if (candidates.empty()) return result;
  // one pass over the explored state space, testing all candidates per marking
  detail::IndexedNet inet(n);
  detail::MarkingSpace space = detail::explore_markings(inet, lim);
  result.truncated = space.truncated;
  for (const auto& mvec : space.states) {
    for (const auto& c : candidates) {
      bool covered = true;
      for (const auto& [p, k] : c.cover)
        if (mvec[inet.place_index.at(p)] < k) {
          covered = false;
          break;
        }
      if (covered) {
        result.witness = MWitness{ts[c.t], ts[c.u], ts[c.v], inet.to_marking(mvec)};
        return result;
      }
    }
  }
  return result;
}

enum class Distributability { Distributable, NotDistributable, Inapplicable, Unknown };

struct DistributabilityVerdict {
  Distributability kind = Distributability::Unknown;
  std::string detail;
  std::optional<MWitness> witness;       // for NotDistributable
  std::vector<std::string> predicate_witness;  // for Inapplicable
};

// A finitary plain structural conflict net is distributable iff it has no
// fully reachable pure M; other inputs are out of the theorem's scope and
// reported inapplicable.
inline DistributabilityVerdict distributability_verdict(const PetriNet& n,
                                                        const Limits& lim = {}) {
  DistributabilityVerdict out;
  Verdict plain = is_plain(n);
  if (plain.truth != Truth::Yes) {
    out.kind = Distributability::Inapplicable;
    out.detail = "not a plain net: " + plain.detail;
    out.predicate_witness = plain.witness;
    return out;
  }
  Verdict fin = finitary_guard(n);
  if (fin.truth != Truth::Yes) {
    out.kind = Distributability::Inapplicable;
    out.detail = "not finitary: " + fin.detail;
    out.predicate_witness = fin.witness;
    return out;
  }
  Verdict scn = is_structural_conflict_net(n, lim);
  if (scn.truth == Truth::No) {
    out.kind = Distributability::Inapplicable;
    out.detail = "not a structural conflict net: " + scn.detail;
    out.predicate_witness = scn.witness;
    return out;
  }
  if (scn.truth == Truth::Unknown) {
    out.kind = Distributability::Unknown;
    out.detail = "structural conflict check truncated";
    return out;
  }
  MSearchResult m = find_fully_reachable_pure_m(n, lim);
  if (m.witness) {
    out.kind = Distributability::NotDistributable;
    out.detail = "fully reachable pure M (" + m.witness->t + "," + m.witness->u + "," +
                 m.witness->v + ") at " + m.witness->marking.to_string();
    out.witness = m.witness;
    return out;
  }
  if (m.truncated) {
    out.kind = Distributability::Unknown;
    out.detail = "reachability truncated before excluding all M candidates";
    return out;
  }
  out.kind = Distributability::Distributable;
  out.detail = "no fully reachable pure M";
  return out;
}

}  // namespace distnet
