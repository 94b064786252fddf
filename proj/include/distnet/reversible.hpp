#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "distnet/net.hpp"

namespace distnet {

enum class ArcType { In, Early, Late, Out, Far };

inline const char* to_string(ArcType t) {
  switch (t) {
    case ArcType::In: return "in";
    case ArcType::Early: return "early";
    case ArcType::Late: return "late";
    case ArcType::Out: return "out";
    case ArcType::Far: return "far";
  }
  return "?";
}

// Interface place names are a fixed convention: a reversible transition t
// with interface w requires places undo@w(t), reset@w(t) and ack@w(t).
inline Ident undo_place(const Ident& w, const Ident& t) { return "undo@" + w + "(" + t + ")"; }
inline Ident reset_place(const Ident& w, const Ident& t) { return "reset@" + w + "(" + t + ")"; }
inline Ident ack_place(const Ident& w, const Ident& t) { return "ack@" + w + "(" + t + ")"; }

// A Petri net with reversible transitions. Semantics is by translation only:
// expand() produces the ordinary net. Transitions with no undo interface are
// standard and restricted to in/out arcs.
struct ReversibleNet {
  std::set<Ident> places;
  std::set<Ident> transitions;
  std::set<Ident> interfaces;                 // undo interface ids (Omega)
  std::set<std::pair<Ident, Ident>> ui;       // (interface, transition)
  std::map<std::tuple<Ident, Ident, ArcType>, long long> flow;  // (place, trans, type)
  Marking initial;
  std::map<Ident, Label> labels;

  void add_place(const Ident& p, long long tokens = 0) {
    if (places.count(p) || transitions.count(p)) throw NetError("duplicate element id: " + p);
    places.insert(p);
    if (tokens != 0) initial.add(p, tokens);
  }

  void add_transition(const Ident& t, Label label) {
    if (places.count(t) || transitions.count(t)) throw NetError("duplicate element id: " + t);
    transitions.insert(t);
    labels[t] = std::move(label);
  }

  void add_arc(const Ident& place, const Ident& trans, ArcType type, long long weight = 1) {
    if (weight <= 0) throw NetError("arc weight must be positive");
    if (!places.count(place)) throw NetError("unknown place: " + place);
    if (!transitions.count(trans)) throw NetError("unknown transition: " + trans);
    flow[{place, trans, type}] += weight;
  }

  void add_interface(const Ident& w, const Ident& t) {
    if (!transitions.count(t)) throw NetError("unknown transition: " + t);
    interfaces.insert(w);
    ui.insert({w, t});
  }

  bool reversible(const Ident& t) const {
    for (const auto& [w, u] : ui)
      if (u == t) return true;
    return false;
  }

  std::vector<Ident> interfaces_of(const Ident& t) const {
    std::vector<Ident> ws;
    for (const auto& [w, u] : ui)
      if (u == t) ws.push_back(w);
    return ws;
  }

  // Places of the given arc type around t, with weights.
  Marking typed(const Ident& t, ArcType type) const {
    Marking m;
    for (const auto& [key, w] : flow) {
      const auto& [p, u, ty] = key;
      if (u == t && ty == type) m.add(p, w);
    }
    return m;
  }
};

inline Verdict validate_reversible(const ReversibleNet& r) {
  for (const auto& [key, w] : r.flow) {
    const auto& [p, t, ty] = key;
    if (w <= 0) return Verdict::no("non-positive arc weight", {p, t});
    if (!r.places.count(p)) return Verdict::no("flow references unknown place", {p});
    if (!r.transitions.count(t)) return Verdict::no("flow references unknown transition", {t});
  }
  for (const auto& [p, k] : r.initial) {
    if (!r.places.count(p)) return Verdict::no("initial marking off places", {p});
    if (k < 0) return Verdict::no("negative initial marking", {p});
  }
  for (const auto& t : r.transitions)
    if (!r.labels.count(t)) return Verdict::no("transition without label", {t});
  for (const auto& [w, t] : r.ui) {
    if (!r.transitions.count(t)) return Verdict::no("undo interface on unknown transition", {w, t});
    for (const auto& p : {undo_place(w, t), reset_place(w, t), ack_place(w, t)})
      if (!r.places.count(p))
        return Verdict::no("missing interface place " + p, {w, t});
  }
  for (const auto& t : r.transitions) {
    if (r.reversible(t)) continue;
    for (ArcType ty : {ArcType::Early, ArcType::Late, ArcType::Far}) {
      Marking m = r.typed(t, ty);
      if (!m.empty())
        return Verdict::no(std::string("standard transition with ") + to_string(ty) + " arc",
                           {t, m.begin()->first});
    }
  }
  return Verdict::yes();
}

// Generated element names of the expansion.
inline Ident fire_name(const Ident& t) { return t + ".fire"; }
inline Ident undo_name(const Ident& t, const Ident& w) { return t + ".undo@" + w; }
inline Ident undo_far_name(const Ident& t, const Ident& f) { return t + ".undo(" + f + ")"; }
inline Ident undone_name(const Ident& t) { return t + ".undone"; }
inline Ident reset_name(const Ident& t, const Ident& w) { return t + ".reset@" + w; }
inline Ident elide_name(const Ident& t, const Ident& w) { return t + ".elide@" + w; }
inline Ident fired_place(const Ident& t) { return "fired(" + t + ")"; }
inline Ident keep_place(const Ident& w, const Ident& t) { return "keep@" + w + "(" + t + ")"; }
inline Ident take_place(const Ident& f, const Ident& t) { return "take(" + f + ")(" + t + ")"; }
inline Ident took_place(const Ident& f, const Ident& t) { return "took(" + f + ")(" + t + ")"; }
inline Ident rho_place(const Ident& t) { return "rho(" + t + ")"; }

// Macro expansion into an ordinary place/transition net. Every place of the
// reversible net is kept with its marking; standard transitions are copied
// unchanged; each reversible transition becomes its six-family protocol with
// the bookkeeping places fired, keep, take, took and rho. Arc weights of the
// original typed arcs are inherited; protocol arcs have weight 1.
inline PetriNet expand(const ReversibleNet& r) {
  Verdict v = validate_reversible(r);
  if (!v) throw NetError("invalid reversible net: " + v.detail);
  PetriNet out;
  for (const auto& p : r.places) out.add_place(p, r.initial[p]);

  auto fresh_place = [&out](const Ident& p) {
    if (out.has_element(p)) throw NetError("generated place collides: " + p);
    out.add_place(p);
  };
  auto fresh_trans = [&out](const Ident& t, Label l) {
    if (out.has_element(t)) throw NetError("generated transition collides: " + t);
    out.add_transition(t, std::move(l));
  };

  for (const auto& t : r.transitions) {
    if (!r.reversible(t)) {
      fresh_trans(t, r.labels.at(t));
      for (const auto& [p, w] : r.typed(t, ArcType::In)) out.add_arc(p, t, w);
      for (const auto& [p, w] : r.typed(t, ArcType::Out)) out.add_arc(t, p, w);
      continue;
    }
    Marking in = r.typed(t, ArcType::In);
    Marking early = r.typed(t, ArcType::Early);
    Marking late = r.typed(t, ArcType::Late);
    Marking outp = r.typed(t, ArcType::Out);
    Marking far = r.typed(t, ArcType::Far);
    std::vector<Ident> ws = r.interfaces_of(t);

    fresh_place(fired_place(t));
    fresh_place(rho_place(t));
    for (const auto& w : ws) fresh_place(keep_place(w, t));
    for (const auto& [f, k] : far) {
      fresh_place(take_place(f, t));
      fresh_place(took_place(f, t));
    }

    // t.fire consumes all preplaces and produces fired(t) plus all postplaces
    Ident fire = fire_name(t);
    fresh_trans(fire, r.labels.at(t));
    for (const auto& [p, w] : in) out.add_arc(p, fire, w);
    for (const auto& [p, w] : early) out.add_arc(p, fire, w);
    for (const auto& [p, w] : late) out.add_arc(p, fire, w);
    out.add_arc(fire, fired_place(t));
    for (const auto& [p, w] : outp) out.add_arc(fire, p, w);
    for (const auto& [p, w] : far) out.add_arc(fire, p, w);

    // t.undo@w starts the reversal and issues one take token per far place
    for (const auto& w : ws) {
      Ident undo = undo_name(t, w);
      fresh_trans(undo, std::nullopt);
      out.add_arc(undo_place(w, t), undo);
      out.add_arc(fired_place(t), undo);
      out.add_arc(undo, keep_place(w, t));
      for (const auto& [f, k] : far) out.add_arc(undo, take_place(f, t));
    }

    // t.undo(f) retrieves the far output of f
    for (const auto& [f, k] : far) {
      Ident uf = undo_far_name(t, f);
      fresh_trans(uf, std::nullopt);
      out.add_arc(take_place(f, t), uf);
      out.add_arc(f, uf, k);  // inherited far weight
      out.add_arc(uf, took_place(f, t));
    }

    // t.undone completes the retrieval and returns the early preplaces
    Ident undone = undone_name(t);
    fresh_trans(undone, std::nullopt);
    for (const auto& [f, k] : far) out.add_arc(took_place(f, t), undone);
    out.add_arc(undone, rho_place(t));
    for (const auto& [p, w] : early) out.add_arc(undone, p, w);

    // t.reset@w finishes the cycle, returning late preplaces and acknowledging
    for (const auto& w : ws) {
      Ident reset = reset_name(t, w);
      fresh_trans(reset, std::nullopt);
      out.add_arc(reset_place(w, t), reset);
      out.add_arc(keep_place(w, t), reset);
      out.add_arc(rho_place(t), reset);
      for (const auto& [p, wt] : late) out.add_arc(reset, p, wt);
      out.add_arc(reset, ack_place(w, t));
    }

    // t.elide@w lets undo and reset annihilate when t never fired
    for (const auto& w : ws) {
      Ident elide = elide_name(t, w);
      fresh_trans(elide, std::nullopt);
      out.add_arc(undo_place(w, t), elide);
      out.add_arc(reset_place(w, t), elide);
      out.add_arc(elide, ack_place(w, t));
    }
  }
  out.validate();
  return out;
}

// The signed multiset t(w) = t.fire + t.undo@w + sum_f t.undo(f) + t.undone +
// t.reset@w, whose token replacement equals that of t.elide@w.
inline Step full_cycle(const ReversibleNet& r, const Ident& t, const Ident& w) {
  Step g;
  g.add(fire_name(t), 1);
  g.add(undo_name(t, w), 1);
  for (const auto& [f, k] : r.typed(t, ArcType::Far)) g.add(undo_far_name(t, f), 1);
  g.add(undone_name(t), 1);
  g.add(reset_name(t, w), 1);
  return g;
}

}  // namespace distnet
