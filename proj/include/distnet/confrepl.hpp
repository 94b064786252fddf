#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "distnet/distribution.hpp"
#include "distnet/equivalence.hpp"
#include "distnet/mstruct.hpp"
#include "distnet/net.hpp"
#include "distnet/reversible.hpp"

namespace distnet {

// Name mangling for the instantiated elements. The mapping is bijective with
// the construction's identities; collisions with the input net's ids are
// detected at build time.
inline Ident dist_name(const Ident& p) { return "dist[" + p + "]"; }
inline Ident copy_place(const Ident& p, const Ident& c) { return p + "[" + c + "]"; }
inline Ident pi_place(const Ident& j) { return "pi[" + j + "]"; }
inline Ident pi_pair_place(const Ident& j, const Ident& l) { return "pi[" + j + "#" + l + "]"; }
inline Ident pre_place(const Ident& i, const Ident& j) { return "pre[" + i + "][" + j + "]"; }
inline Ident transin_place(const Ident& h, const Ident& j) { return "trans-in[" + h + "][" + j + "]"; }
inline Ident transout_place(const Ident& h, const Ident& j) { return "trans-out[" + h + "][" + j + "]"; }
inline Ident ini_name(const Ident& j) { return "ini[" + j + "]"; }
inline Ident trans_name(const Ident& h, const Ident& j) { return "trans[" + h + "][" + j + "]"; }
inline Ident exec_name(const Ident& i, const Ident& j) { return "exec[" + i + "][" + j + "]"; }
inline Ident fetchin_place(const Ident& q, const Ident& c, const Ident& i, const Ident& j) {
  return "fetch-in[" + q + "][" + c + "][" + i + "][" + j + "]";
}
inline Ident fetchout_place(const Ident& q, const Ident& c, const Ident& i, const Ident& j) {
  return "fetch-out[" + q + "][" + c + "][" + i + "][" + j + "]";
}
inline Ident fetch_name(const Ident& q, const Ident& c, const Ident& i, const Ident& j) {
  return "fetch[" + q + "][" + c + "][" + i + "][" + j + "]";
}
inline Ident fetched_name(const Ident& i, const Ident& j) { return "fetched[" + i + "][" + j + "]"; }
inline Ident complete_name(const Ident& i, const Ident& j) { return "complete[" + i + "][" + j + "]"; }

// The undo interface set of transition i: the initialise transition of every
// conflicting (or equal) c, and the handover transitions between them.
inline std::vector<Ident> undo_interface_transitions(const ConflictStructure& cs,
                                                     const Ident& i) {
  std::vector<Ident> out;
  std::set<Ident> seen;
  auto push = [&](const Ident& t) {
    if (!seen.insert(t).second) throw NetError("duplicate undo interface member: " + t);
    out.push_back(t);
  };
  for (const auto& c : cs.order)
    if (cs.conflict_or_equal(c, i)) push(ini_name(c));
  for (const auto& c : cs.order) {
    if (!cs.conflict_or_equal(c, i)) continue;
    for (const auto& b : cs.order)
      if (cs.ordered(b, c)) push(trans_name(b, c));
  }
  return out;
}

// Builds the conflict replicating implementation of a plain net as a net with
// reversible transitions. The well-ordering on transitions is ascending id
// order; it decides which of two conflicting transitions may take over the
// other's execution.
inline ReversibleNet build_conflict_replicating(const PetriNet& n) {
  Verdict plain = is_plain(n);
  if (!plain) throw NetError("input must be plain: " + plain.detail);
  Verdict fin = finitary_guard(n);
  if (!fin) throw NetError("input must satisfy the finitary guard: " + fin.detail);
  n.validate();
  ConflictStructure cs = conflict_structure(n);

  ReversibleNet r;
  // inherited places, with the original marking
  for (const auto& p : n.places) r.add_place(p, n.initial[p]);

  auto fresh_place = [&r](const Ident& p, long long tokens = 0) {
    if (r.places.count(p) || r.transitions.count(p))
      throw NetError("generated name collides: " + p);
    r.add_place(p, tokens);
  };
  auto fresh_trans = [&r](const Ident& t, Label l) {
    if (r.places.count(t) || r.transitions.count(t))
      throw NetError("generated name collides: " + t);
    r.add_transition(t, std::move(l));
  };

  // place copies p_c for c a posttransition of p
  for (const auto& p : n.places)
    for (const auto& [c, w] : n.postset(p)) fresh_place(copy_place(p, c));
  // pi_j, marked: the ready-to-initialise token of j
  for (const auto& j : cs.order) fresh_place(pi_place(j), 1);
  // pre^i_j for i <=# j
  for (const auto& i : cs.order)
    for (const auto& j : cs.order)
      if (cs.ordered_or_equal(i, j)) fresh_place(pre_place(i, j));
  // handover buffers for h <# j
  for (const auto& h : cs.order)
    for (const auto& j : cs.order)
      if (cs.ordered(h, j)) {
        fresh_place(transin_place(h, j));
        fresh_place(transout_place(h, j));
      }
  // pi_{j#l} for j <=# l, marked; the diagonal pi_{j#j} serialises the
  // executions of j's location between cleanups
  for (const auto& j : cs.order)
    for (const auto& l : cs.order)
      if (cs.ordered_or_equal(j, l)) fresh_place(pi_pair_place(j, l), 1);
  // fetch buffers per i <=# j, q in pre(i), c in post(q)
  for (const auto& i : cs.order)
    for (const auto& j : cs.order) {
      if (!cs.ordered_or_equal(i, j)) continue;
      for (const auto& [q, wq] : n.preset(i))
        for (const auto& [c, wc] : n.postset(q)) {
          fresh_place(fetchin_place(q, c, i, j));
          fresh_place(fetchout_place(q, c, i, j));
        }
    }
  // interface places undo/reset/ack@i(t) for t in UI_i
  std::map<Ident, std::vector<Ident>> ui_members;
  for (const auto& i : cs.order) ui_members[i] = undo_interface_transitions(cs, i);
  for (const auto& i : cs.order)
    for (const auto& t : ui_members[i]) {
      fresh_place(undo_place(i, t));
      fresh_place(reset_place(i, t));
      fresh_place(ack_place(i, t));
    }

  // distribute transitions, one per place with posttransitions
  for (const auto& p : n.places) {
    Marking post = n.postset(p);
    if (post.empty()) continue;
    Ident d = dist_name(p);
    fresh_trans(d, std::nullopt);
    r.add_arc(p, d, ArcType::In);
    for (const auto& [c, w] : post) r.add_arc(copy_place(p, c), d, ArcType::Out);
  }

  // reversible ini_j: early the place copies of pre(j) with original weights,
  // late pi_j, far the pre^j_k and trans-in^h_j tokens it seeds
  for (const auto& j : cs.order) {
    Ident t = ini_name(j);
    fresh_trans(t, std::nullopt);
    for (const auto& [p, w] : n.preset(j)) r.add_arc(copy_place(p, j), t, ArcType::Early, w);
    r.add_arc(pi_place(j), t, ArcType::Late);
    for (const auto& k : cs.order)
      if (cs.ordered_or_equal(j, k)) r.add_arc(pre_place(j, k), t, ArcType::Far);
    for (const auto& h : cs.order)
      if (cs.ordered(h, j)) r.add_arc(transin_place(h, j), t, ArcType::Far);
  }

  // reversible trans^h_j: hands the initiative for j's neighbourhood to j
  for (const auto& h : cs.order)
    for (const auto& j : cs.order) {
      if (!cs.ordered(h, j)) continue;
      Ident t = trans_name(h, j);
      fresh_trans(t, std::nullopt);
      r.add_arc(transin_place(h, j), t, ArcType::Early);
      r.add_arc(pi_pair_place(h, j), t, ArcType::Late);
      r.add_arc(transout_place(h, j), t, ArcType::Far);
    }

  // standard transitions: exec, fetch, fetched, complete
  for (const auto& i : cs.order)
    for (const auto& j : cs.order) {
      if (!cs.ordered_or_equal(i, j)) continue;
      Ident ex = exec_name(i, j);
      fresh_trans(ex, n.label(i));
      r.add_arc(pre_place(i, j), ex, ArcType::In);
      r.add_arc(pre_place(i, j), ex, ArcType::Out);
      for (const auto& h : cs.order)
        if (cs.ordered(h, j)) {
          r.add_arc(transout_place(h, j), ex, ArcType::In);
          r.add_arc(transout_place(h, j), ex, ArcType::Out);
        }
      for (const auto& l : cs.order)
        if (cs.ordered_or_equal(j, l)) r.add_arc(pi_pair_place(j, l), ex, ArcType::In);
      for (const auto& t : ui_members[i]) r.add_arc(undo_place(i, t), ex, ArcType::Out);
      for (const auto& [q, wq] : n.preset(i))
        for (const auto& [c, wc] : n.postset(q))
          r.add_arc(fetchin_place(q, c, i, j), ex, ArcType::Out);

      for (const auto& [q, wq] : n.preset(i))
        for (const auto& [c, wc] : n.postset(q)) {
          Ident f = fetch_name(q, c, i, j);
          fresh_trans(f, std::nullopt);
          r.add_arc(fetchin_place(q, c, i, j), f, ArcType::In);
          r.add_arc(copy_place(q, c), f, ArcType::In, wq);
          r.add_arc(fetchout_place(q, c, i, j), f, ArcType::Out);
        }

      Ident fd = fetched_name(i, j);
      fresh_trans(fd, std::nullopt);
      for (const auto& [q, wq] : n.preset(i))
        for (const auto& [c, wc] : n.postset(q))
          r.add_arc(fetchout_place(q, c, i, j), fd, ArcType::In);
      for (const auto& l : cs.order)
        if (cs.ordered_or_equal(j, l)) r.add_arc(pi_pair_place(j, l), fd, ArcType::Out);
      for (const auto& t : ui_members[i]) r.add_arc(reset_place(i, t), fd, ArcType::Out);

      Ident cp = complete_name(i, j);
      fresh_trans(cp, std::nullopt);
      for (const auto& t : ui_members[i]) r.add_arc(ack_place(i, t), cp, ArcType::In);
      for (const auto& [rr, w] : n.postset(i)) r.add_arc(rr, cp, ArcType::Out, w);
    }

  // undo interfaces: one per transition of the source net
  for (const auto& i : cs.order)
    for (const auto& t : ui_members[i]) r.add_interface(i, t);

  Verdict ok = validate_reversible(r);
  if (!ok) throw NetError("conflict replicating construction invalid: " + ok.detail);
  return r;
}

// The firing combination of the implementation that mimics a single firing of
// i when executed at the location of j: its token replacement, computed in
// the expanded implementation, equals the effect of i in the source net.
inline Step mimic_combination(const PetriNet& n, const ConflictStructure& cs, const Ident& i,
                              const Ident& j) {
  Step g;
  g.add(exec_name(i, j), 1);
  for (const auto& [p, w] : n.preset(i)) {
    g.add(dist_name(p), w);
    for (const auto& [c, wc] : n.postset(p)) g.add(fetch_name(p, c, i, j), 1);
  }
  g.add(fetched_name(i, j), 1);
  g.add(complete_name(i, j), 1);
  for (const auto& t : undo_interface_transitions(cs, i)) g.add(elide_name(t, i), 1);
  return g;
}

// The S-invariant place set of the handover between j and l (for j <# l):
// per i <=# j one fetch-in/out pair over a chosen preplace q_i of i, plus the
// pi_{j#l} token's path through trans^j_l's protocol.
inline std::set<Ident> sinvariant_places(const PetriNet& n, const ConflictStructure& cs,
                                         const Ident& j, const Ident& l,
                                         const std::map<Ident, Ident>* chosen_preplace = nullptr) {
  if (!cs.ordered(j, l)) throw NetError("sinvariant_places requires j <# l");
  std::set<Ident> s;
  for (const auto& i : cs.order) {
    if (!cs.ordered_or_equal(i, j)) continue;
    Ident q;
    if (chosen_preplace && chosen_preplace->count(i)) {
      q = chosen_preplace->at(i);
      if (!n.preset(i).contains(q)) throw NetError("chosen place is not a preplace of " + i);
    } else {
      Marking pre = n.preset(i);
      if (pre.empty()) throw NetError("transition without preplace: " + i);
      q = pre.begin()->first;
    }
    s.insert(fetchin_place(q, i, i, j));
    s.insert(fetchout_place(q, i, i, j));
  }
  s.insert(pi_pair_place(j, l));
  s.insert(transout_place(j, l));
  Ident tr = trans_name(j, l);
  s.insert(took_place(transout_place(j, l), tr));
  s.insert(rho_place(tr));
  return s;
}

inline std::vector<Ident> sinvariant_transitions(const ConflictStructure& cs, const Ident& j,
                                                 const Ident& l) {
  std::vector<Ident> ts;
  for (const auto& i : cs.order)
    if (cs.ordered_or_equal(i, j)) ts.push_back(exec_name(i, j));
  Ident tr = trans_name(j, l);
  ts.push_back(fire_name(tr));
  ts.push_back(undo_far_name(tr, transout_place(j, l)));
  for (const auto& k : cs.order)
    if (cs.ordered_or_equal(k, l)) ts.push_back(exec_name(k, l));
  return ts;
}

// Checks over the explored state space of the expanded implementation that
// the invariant set carries exactly one token and that no two transitions of
// the serialised family are concurrently enabled.
inline Verdict sinvariant_check(const PetriNet& impl, const PetriNet& source,
                                const ConflictStructure& cs, const Ident& j, const Ident& l,
                                const Limits& lim = {},
                                const std::map<Ident, Ident>* chosen_preplace = nullptr) {
  std::set<Ident> places = sinvariant_places(source, cs, j, l, chosen_preplace);
  std::vector<Ident> family = sinvariant_transitions(cs, j, l);
  for (const auto& p : places)
    if (!impl.places.count(p)) return Verdict::no("invariant place missing from net", {p});
  for (const auto& t : family)
    if (!impl.transitions.count(t)) return Verdict::no("family transition missing from net", {t});

  detail::IndexedNet inet(impl);
  detail::MarkingSpace space = detail::explore_markings(inet, lim);
  std::vector<int> place_idx;
  for (const auto& p : places) place_idx.push_back(inet.place_index.at(p));
  for (const auto& m : space.states) {
    long long tokens = 0;
    for (int p : place_idx) tokens += m[p];
    if (tokens != 1)
      return Verdict::no("invariant set holds " + std::to_string(tokens) + " tokens at " +
                         inet.to_marking(m).to_string());
  }
  // pairwise concurrent enabling within the family
  for (const auto& m : space.states) {
    for (std::size_t a = 0; a < family.size(); ++a)
      for (std::size_t b = a; b < family.size(); ++b) {
        Step g;
        g.add(family[a], 1);
        g.add(family[b], 1);
        if (leq(impl.step_preset(g), inet.to_marking(m)))
          return Verdict::no("family transitions concurrently enabled",
                             {family[a], family[b]});
      }
  }
  if (space.truncated) return Verdict::unknown("state space truncated");
  return Verdict::yes();
}

struct SynthesisReport {
  PetriNet specification;
  ReversibleNet reversible_form;
  PetriNet implementation;
  Verdict essentially_distributed;
  Verdict distributed_after_conversion;
  Verdict equivalence;
  std::optional<PetriNet> distributed_form;
  std::string notes;
};

struct SynthesisError : NetError {
  DistributabilityVerdict verdict;
  explicit SynthesisError(DistributabilityVerdict v)
      : NetError("net is not synthesisable: " + v.detail), verdict(std::move(v)) {}
};

// End-to-end pipeline: distributability verdict gates the construction; the
// implementation is checked essentially distributed, converted to a
// distributed net, and compared with the source up to branching split
// bisimilarity with explicit divergence (within the state budget).
inline SynthesisReport synthesize(const PetriNet& n, const Limits& lim = {}) {
  DistributabilityVerdict dv = distributability_verdict(n, lim);
  if (dv.kind != Distributability::Distributable) throw SynthesisError(dv);

  SynthesisReport report;
  report.specification = n;
  report.reversible_form = build_conflict_replicating(n);
  report.implementation = expand(report.reversible_form);
  report.essentially_distributed = check_essentially_distributed(report.implementation, lim);
  if (report.essentially_distributed.truth == Truth::Yes) {
    report.distributed_form = essentially_to_distributed(report.implementation, lim);
    report.distributed_after_conversion = check_distributed(*report.distributed_form, lim);
  } else {
    report.distributed_after_conversion =
        Verdict::unknown("conversion skipped: essential distributedness not established");
  }
  try {
    report.equivalence = branching_split_bisim_nets(report.implementation, n, lim);
  } catch (const NetError& e) {
    report.equivalence = Verdict::unknown(e.what());
  }
  return report;
}

}  // namespace distnet
