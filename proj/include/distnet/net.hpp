#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "distnet/multiset.hpp"
#include "distnet/verdict.hpp"

namespace distnet {

using Ident = std::string;
using Action = std::string;

// nullopt = tau (the invisible action).
using Label = std::optional<Action>;

// Markings and steps are multisets (all multiplicities >= 0) over place and
// transition ids respectively; the shared representation is the signed
// multiset, which also carries token-replacement effects.
using Marking = SignedMultiset<Ident>;
using Step = SignedMultiset<Ident>;

struct NetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A labelled place/transition net with arc weights.
struct PetriNet {
  std::set<Ident> places;
  std::set<Ident> transitions;
  // Arcs (place,transition) and (transition,place); only weights > 0 stored.
  std::map<std::pair<Ident, Ident>, long long> flow;
  Marking initial;
  std::map<Ident, Label> labels;

  void add_place(const Ident& p, long long tokens = 0) {
    if (places.count(p) || transitions.count(p))
      throw NetError("duplicate element id: " + p);
    places.insert(p);
    if (tokens != 0) initial.add(p, tokens);
  }

  void add_transition(const Ident& t, Label label) {
    if (places.count(t) || transitions.count(t))
      throw NetError("duplicate element id: " + t);
    transitions.insert(t);
    labels[t] = std::move(label);
  }

  void add_arc(const Ident& src, const Ident& dst, long long weight = 1) {
    if (weight <= 0) throw NetError("arc weight must be positive");
    bool ps = places.count(src), pd = places.count(dst);
    bool ts = transitions.count(src), td = transitions.count(dst);
    if (!(ps || ts)) throw NetError("unknown element id: " + src);
    if (!(pd || td)) throw NetError("unknown element id: " + dst);
    if (ps == pd) throw NetError("arc must connect a place and a transition: " + src + " -> " + dst);
    flow[{src, dst}] = detail::checked_add(arc_weight(src, dst), weight);
  }

  long long arc_weight(const Ident& src, const Ident& dst) const {
    auto it = flow.find({src, dst});
    return it == flow.end() ? 0 : it->second;
  }

  bool has_element(const Ident& x) const {
    return places.count(x) || transitions.count(x);
  }

  Label label(const Ident& t) const {
    auto it = labels.find(t);
    if (it == labels.end()) throw NetError("unknown transition: " + t);
    return it->second;
  }

  bool is_tau(const Ident& t) const { return !label(t).has_value(); }

  // Structural sanity: disjoint id spaces, flow over declared elements,
  // initial marking supported on places, labels total on transitions.
  void validate() const {
    for (const auto& [arc, w] : flow) {
      if (w <= 0) throw NetError("zero-weight arc stored");
      if (!has_element(arc.first) || !has_element(arc.second))
        throw NetError("flow references undeclared element");
      if (places.count(arc.first) == places.count(arc.second))
        throw NetError("flow must alternate places and transitions");
    }
    for (const auto& [p, k] : initial) {
      if (!places.count(p)) throw NetError("initial marking off places: " + p);
      if (k < 0) throw NetError("negative initial marking: " + p);
    }
    for (const auto& t : transitions)
      if (!labels.count(t)) throw NetError("transition without label: " + t);
  }

  Marking preset(const Ident& x) const {
    require_element(x);
    Marking m;
    if (places.count(x)) {
      for (const auto& t : transitions) m.add(t, arc_weight(t, x));
    } else {
      for (const auto& p : places) m.add(p, arc_weight(p, x));
    }
    return m;
  }

  Marking postset(const Ident& x) const {
    require_element(x);
    Marking m;
    if (places.count(x)) {
      for (const auto& t : transitions) m.add(t, arc_weight(x, t));
    } else {
      for (const auto& p : places) m.add(p, arc_weight(x, p));
    }
    return m;
  }

  // Token replacement [[t]] = t\bullet - \bullet t; transitions only.
  SignedMultiset<Ident> effect(const Ident& t) const {
    if (!transitions.count(t)) throw NetError("effect is defined for transitions only: " + t);
    return postset(t) - preset(t);
  }

  SignedMultiset<Ident> step_preset(const Step& g) const {
    return lift([this](const Ident& t) { return preset(t); }, g);
  }

  SignedMultiset<Ident> step_effect(const Step& g) const {
    return lift([this](const Ident& t) { return effect(t); }, g);
  }

  // Labelling extended to steps: multiset over Act (tau occurrences dropped
  // from the result, reported by the out-parameter free overload below).
  SignedMultiset<Action> step_label(const Step& g) const {
    SignedMultiset<Action> a;
    for (const auto& [t, k] : g) {
      Label l = label(t);
      if (l) a.add(*l, k);
    }
    return a;
  }

  bool step_all_visible(const Step& g) const {
    for (const auto& [t, k] : g)
      if (is_tau(t)) return false;
    return true;
  }

 private:
  void require_element(const Ident& x) const {
    if (!has_element(x)) throw NetError("unknown element id: " + x);
  }
};

inline bool net_equal(const PetriNet& a, const PetriNet& b) {
  return a.places == b.places && a.transitions == b.transitions && a.flow == b.flow &&
         a.initial == b.initial && a.labels == b.labels;
}

inline bool operator==(const PetriNet& a, const PetriNet& b) { return net_equal(a, b); }

// G is enabled at M iff \bullet G <= M.
inline bool enabled(const PetriNet& n, const Marking& m, const Step& g) {
  if (g.empty()) throw NetError("steps are non-empty");
  return leq(n.step_preset(g), m);
}

// M [G> M' with M' = M + [[G]].
inline Marking fire(const PetriNet& n, const Marking& m, const Step& g) {
  if (!enabled(n, m, g)) throw NetError("step not enabled");
  return m + n.step_effect(g);
}

// ell injective on Act and no tau labels.
inline Verdict is_plain(const PetriNet& n) {
  std::map<Action, Ident> seen;
  for (const auto& t : n.transitions) {
    Label l = n.label(t);
    if (!l) return Verdict::no("transition labelled tau", {t});
    auto [it, inserted] = seen.emplace(*l, t);
    if (!inserted) return Verdict::no("label " + *l + " not injective", {it->second, t});
  }
  return Verdict::yes();
}

// Syntactic sufficient condition for finitariness: finite initial marking and
// finite postsets hold trivially for finite nets; the live clause is that no
// transition has an empty preset.
inline Verdict finitary_guard(const PetriNet& n) {
  for (const auto& t : n.transitions)
    if (n.preset(t).empty()) return Verdict::no("transition with empty preset", {t});
  return Verdict::yes();
}

}  // namespace distnet
