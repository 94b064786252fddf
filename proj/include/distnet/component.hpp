#pragma once

#include <set>
#include <string>
#include <vector>

#include "distnet/net.hpp"
#include "distnet/reach.hpp"

namespace distnet {

// A net with an asynchronous interface: input places are mailboxes, output
// places are addresses outside the component. O may have no posttransitions.
struct Component {
  PetriNet net;
  std::set<Ident> inputs;
  std::set<Ident> outputs;
};

enum class SequentialityMode { Structural, Behavioral };

// Structural mode searches for an S-invariant Q in S \ (I u O) carrying
// exactly one token with every transition reading and writing exactly one
// token of it; behavioral mode checks that no reachable marking enables a
// two-element step. Structural search is exact up to 20 places and falls back
// to behavioral beyond that.
inline Verdict validate_component(const Component& c,
                                  SequentialityMode mode = SequentialityMode::Structural,
                                  const Limits& lim = {}) {
  c.net.validate();
  for (const auto& p : c.inputs)
    if (!c.net.places.count(p)) return Verdict::no("input is not a place", {p});
  for (const auto& p : c.outputs)
    if (!c.net.places.count(p)) return Verdict::no("output is not a place", {p});
  for (const auto& p : c.inputs)
    if (c.outputs.count(p)) return Verdict::no("interface sets overlap", {p});
  for (const auto& o : c.outputs)
    if (!c.net.postset(o).empty())
      return Verdict::no("output place has posttransitions", {o});

  if (mode == SequentialityMode::Structural && c.net.places.size() > 20)
    mode = SequentialityMode::Behavioral;  // exact search too large; see notes

  if (mode == SequentialityMode::Behavioral) {
    ConcurrencyRelation rel = concurrency_relation(c.net, lim);
    if (!rel.pairs.empty()) {
      auto [t, u] = *rel.pairs.begin();
      return Verdict::no("two transitions can fire in one step", {t, u});
    }
    if (rel.truncated) return Verdict::unknown("state space truncated");
    return Verdict::yes("behavioral");
  }

  // Exact search for Q: per transition pick one weight-1 preplace and one
  // weight-1 postplace into Q; everything else adjacent to the transition is
  // excluded. Then the total initial marking on Q must be exactly 1.
  std::vector<Ident> trans(c.net.transitions.begin(), c.net.transitions.end());
  std::vector<Ident> candidates;
  for (const auto& p : c.net.places)
    if (!c.inputs.count(p) && !c.outputs.count(p)) candidates.push_back(p);
  std::set<Ident> cand_set(candidates.begin(), candidates.end());

  // 0 = undecided, 1 = in Q, 2 = excluded
  std::map<Ident, int> state;
  for (const auto& p : candidates) state[p] = 0;

  auto search = [&](auto&& self, std::size_t ti) -> bool {
    if (ti == trans.size()) {
      long long tokens = 0;
      for (const auto& p : candidates)
        if (state[p] == 1) tokens += c.net.initial[p];
      if (tokens > 1) return false;
      if (tokens == 1) return true;
      // need one more initially marked place unconnected to any transition
      for (const auto& p : candidates) {
        if (state[p] != 0 || c.net.initial[p] != 1) continue;
        if (c.net.preset(p).empty() && c.net.postset(p).empty()) {
          state[p] = 1;
          return true;
        }
      }
      return false;
    }
    const Ident& t = trans[ti];
    Marking pre = c.net.preset(t).restrict_to(cand_set);
    Marking post = c.net.postset(t).restrict_to(cand_set);
    // current committed weight into Q
    auto committed = [&](const Marking& side) {
      long long w = 0;
      for (const auto& [p, k] : side)
        if (state[p] == 1) w += k;
      return w;
    };
    auto choices = [&](const Marking& side) {
      std::vector<Ident> free;
      for (const auto& [p, k] : side)
        if (state[p] == 0 && k == 1) free.push_back(p);
      return free;
    };
    long long wpre = committed(pre), wpost = committed(post);
    if (wpre > 1 || wpost > 1) return false;

    std::vector<std::pair<Ident, Ident>> options;  // (preplace pick, postplace pick); "" = already satisfied
    std::vector<Ident> pre_free = choices(pre), post_free = choices(post);
    std::vector<Ident> pre_opts = wpre == 1 ? std::vector<Ident>{""} : pre_free;
    std::vector<Ident> post_opts = wpost == 1 ? std::vector<Ident>{""} : post_free;
    for (const auto& pp : pre_opts)
      for (const auto& qq : post_opts) options.push_back({pp, qq});

    for (const auto& [pp, qq] : options) {
      std::vector<std::pair<Ident, int>> undo;
      auto assign = [&](const Ident& p, int v) {
        undo.push_back({p, state[p]});
        state[p] = v;
      };
      if (!pp.empty()) assign(pp, 1);
      if (!qq.empty() && qq != pp) assign(qq, 1);
      // exclude all other adjacent candidate places
      for (const auto& [p, k] : pre)
        if (state[p] == 0) assign(p, 2);
      for (const auto& [p, k] : post)
        if (state[p] == 0) assign(p, 2);
      // exact one-token read and write after exclusion
      bool ok = committed(pre) == 1 && committed(post) == 1;
      if (ok && self(self, ti + 1)) return true;
      for (auto it = undo.rbegin(); it != undo.rend(); ++it) state[it->first] = it->second;
    }
    return false;
  };

  if (trans.empty()) {
    // no transitions constrain Q; just need one token on a candidate place
    for (const auto& p : candidates)
      if (c.net.initial[p] == 1) return Verdict::yes("Q={" + p + "}");
    return Verdict::no("no one-token control place available");
  }

  if (search(search, 0)) {
    std::vector<Ident> q;
    for (const auto& p : candidates)
      if (state[p] == 1) q.push_back(p);
    std::string desc = "Q={";
    for (std::size_t i = 0; i < q.size(); ++i) desc += (i ? "," : "") + q[i];
    desc += "}";
    return Verdict::yes(desc);
  }
  return Verdict::no("no sequential control invariant found");
}

// Asynchronous parallel composition: componentwise union. Components may
// overlap at interface places only and mailboxes are unshared.
inline Component compose(const std::vector<Component>& components) {
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& ck = components[k];
    std::set<Ident> ifk;
    for (const auto& p : ck.inputs) ifk.insert(p);
    for (const auto& p : ck.outputs) ifk.insert(p);
    for (std::size_t l = k + 1; l < components.size(); ++l) {
      const auto& cl = components[l];
      std::set<Ident> ifl;
      for (const auto& p : cl.inputs) ifl.insert(p);
      for (const auto& p : cl.outputs) ifl.insert(p);
      auto check_shared = [&](const std::set<Ident>& elems, const char* kind) {
        for (const auto& x : elems) {
          bool in_l = cl.net.places.count(x) || cl.net.transitions.count(x);
          if (!in_l) continue;
          if (!ifk.count(x) || !ifl.count(x))
            throw NetError(std::string("components overlap at non-interface ") + kind +
                           ": " + x);
        }
      };
      check_shared(ck.net.places, "place");
      check_shared(ck.net.transitions, "element");
      for (const auto& i : ck.inputs)
        if (cl.inputs.count(i)) throw NetError("shared mailbox: " + i);
      for (const auto& x : ck.net.places)
        if (cl.net.transitions.count(x))
          throw NetError("element " + x + " is a place in one component and a transition in another");
      for (const auto& x : ck.net.transitions) {
        if (cl.net.places.count(x))
          throw NetError("element " + x + " is a place in one component and a transition in another");
        if (cl.net.transitions.count(x) && ck.net.label(x) != cl.net.label(x))
          throw NetError("label disagreement on shared transition " + x);
      }
    }
  }
  Component r;
  for (const auto& c : components) {
    for (const auto& p : c.net.places) r.net.places.insert(p);
    for (const auto& t : c.net.transitions) r.net.transitions.insert(t);
    for (const auto& [t, l] : c.net.labels) r.net.labels[t] = l;
    for (const auto& [arc, w] : c.net.flow) {
      auto it = r.net.flow.find(arc);
      if (it == r.net.flow.end())
        r.net.flow[arc] = w;
      else if (it->second != w)
        throw NetError("arc weight disagreement on shared arc");
    }
    r.net.initial = r.net.initial + c.net.initial;  // M0 = sum of components
    for (const auto& i : c.inputs) r.inputs.insert(i);
  }
  for (const auto& c : components)
    for (const auto& o : c.outputs)
      if (!r.inputs.count(o)) r.outputs.insert(o);
  r.net.validate();
  return r;
}

// LSGA nets: asynchronous parallel compositions of sequential components.
inline Verdict is_lsga_composition(const std::vector<Component>& components,
                                   const Limits& lim = {}) {
  for (const auto& c : components) {
    Verdict v = validate_component(c, SequentialityMode::Structural, lim);
    if (v.truth != Truth::Yes) return v;
  }
  return Verdict::yes();
}

}  // namespace distnet
