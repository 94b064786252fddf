#pragma once

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "distnet/component.hpp"
#include "distnet/net.hpp"
#include "distnet/reversible.hpp"

namespace distnet {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// A parsed net document: exactly one of a plain net, a component (net plus
// interface declarations) or a net with reversible transitions.
struct NetDocument {
  std::string name;
  std::variant<PetriNet, Component, ReversibleNet> content;

  bool is_plain_net() const { return std::holds_alternative<PetriNet>(content); }
  bool is_component() const { return std::holds_alternative<Component>(content); }
  bool is_reversible() const { return std::holds_alternative<ReversibleNet>(content); }

  const PetriNet& net() const {
    if (is_plain_net()) return std::get<PetriNet>(content);
    if (is_component()) return std::get<Component>(content).net;
    throw NetError("document holds a reversible net; expand it first");
  }
};

namespace detail {

inline bool valid_ident(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) continue;
    switch (c) {
      case '_': case '.': case '(': case ')': case '[': case ']':
      case '@': case '#': case '-': continue;
      default: return false;
    }
  }
  return true;
}

// Whitespace tokenizer; a token starting with '#' begins a comment.
inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') break;
    tokens.push_back(tok);
  }
  return tokens;
}

inline long long parse_number(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + s + "'");
  }
}

inline std::optional<ArcType> arc_type_of(const std::string& s) {
  if (s == "in") return ArcType::In;
  if (s == "early") return ArcType::Early;
  if (s == "late") return ArcType::Late;
  if (s == "out") return ArcType::Out;
  if (s == "far") return ArcType::Far;
  return std::nullopt;
}

}  // namespace detail

inline NetDocument parse_net(const std::string& text) {
  struct PlaceDecl { Ident id; long long init; int line; };
  struct TransDecl { Ident id; Label label; int line; };
  struct ArcDecl { Ident src, dst; long long weight; int line; };
  struct RarcDecl { Ident place, trans; ArcType type; long long weight; int line; };
  struct IfaceDecl { Ident iface, trans; int line; };
  struct PortDecl { Ident place; bool input; int line; };

  std::string name;
  bool saw_net = false;
  std::vector<PlaceDecl> places;
  std::vector<TransDecl> trans;
  std::vector<ArcDecl> arcs;
  std::vector<RarcDecl> rarcs;
  std::vector<IfaceDecl> ifaces;
  std::vector<PortDecl> ports;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto want_ident = [](const std::string& s, int ln) {
    if (!detail::valid_ident(s)) throw ParseError(ln, "invalid identifier '" + s + "'");
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> tok = detail::tokenize(line);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "net") {
      if (tok.size() != 2) throw ParseError(lineno, "usage: net <name>");
      if (saw_net) throw ParseError(lineno, "duplicate net header");
      name = want_ident(tok[1], lineno);
      saw_net = true;
    } else if (kw == "place") {
      if (tok.size() != 2 && !(tok.size() == 4 && tok[2] == "init"))
        throw ParseError(lineno, "usage: place <id> [init <n>]");
      long long init = tok.size() == 4 ? detail::parse_number(tok[3], lineno) : 0;
      if (init < 0) throw ParseError(lineno, "negative initial marking");
      places.push_back({want_ident(tok[1], lineno), init, lineno});
    } else if (kw == "trans") {
      Label label;
      if (tok.size() == 2) {
        label = tok[1];  // plain default: a transition is its own action
      } else if (tok.size() == 3 && tok[2] == "tau") {
        label = std::nullopt;
      } else if (tok.size() == 4 && tok[2] == "label") {
        label = want_ident(tok[3], lineno);
      } else {
        throw ParseError(lineno, "usage: trans <id> [label <action> | tau]");
      }
      trans.push_back({want_ident(tok[1], lineno), label, lineno});
    } else if (kw == "arc") {
      if (tok.size() != 3 && !(tok.size() == 5 && tok[3] == "weight"))
        throw ParseError(lineno, "usage: arc <src> <dst> [weight <n>]");
      long long weight = tok.size() == 5 ? detail::parse_number(tok[4], lineno) : 1;
      if (weight <= 0) throw ParseError(lineno, "arc weight must be positive");
      arcs.push_back({want_ident(tok[1], lineno), want_ident(tok[2], lineno), weight, lineno});
    } else if (kw == "rarc") {
      if (tok.size() != 4 && tok.size() != 5)
        throw ParseError(lineno, "usage: rarc <place> <trans> <in|early|late|out|far> [weight]");
      auto type = detail::arc_type_of(tok[3]);
      if (!type) throw ParseError(lineno, "unknown arc type '" + tok[3] + "'");
      long long weight = tok.size() == 5 ? detail::parse_number(tok[4], lineno) : 1;
      if (weight <= 0) throw ParseError(lineno, "arc weight must be positive");
      rarcs.push_back(
          {want_ident(tok[1], lineno), want_ident(tok[2], lineno), *type, weight, lineno});
    } else if (kw == "interface") {
      if (tok.size() != 3) throw ParseError(lineno, "usage: interface <id> <trans>");
      ifaces.push_back({want_ident(tok[1], lineno), want_ident(tok[2], lineno), lineno});
    } else if (kw == "input" || kw == "output") {
      if (tok.size() != 2) throw ParseError(lineno, "usage: " + kw + " <place>");
      ports.push_back({want_ident(tok[1], lineno), kw == "input", lineno});
    } else {
      throw ParseError(lineno, "unknown declaration '" + kw + "'");
    }
  }

  bool reversible = !rarcs.empty() || !ifaces.empty();
  bool component = !ports.empty();
  if (reversible && component)
    throw ParseError(1, "document mixes component and reversible declarations");

  NetDocument doc;
  doc.name = name.empty() ? "net" : name;
  try {
    if (reversible) {
      ReversibleNet r;
      for (const auto& d : places) r.add_place(d.id, d.init);
      for (const auto& d : trans) r.add_transition(d.id, d.label);
      for (const auto& d : arcs) {
        // arc lines in a reversible document: plain in/out arcs
        if (r.places.count(d.src) && r.transitions.count(d.dst))
          r.add_arc(d.src, d.dst, ArcType::In, d.weight);
        else if (r.transitions.count(d.src) && r.places.count(d.dst))
          r.add_arc(d.dst, d.src, ArcType::Out, d.weight);
        else
          throw ParseError(d.line, "arc endpoints must be a declared place and transition");
      }
      for (const auto& d : rarcs) {
        if (!r.places.count(d.place)) throw ParseError(d.line, "unknown place " + d.place);
        if (!r.transitions.count(d.trans)) throw ParseError(d.line, "unknown transition " + d.trans);
        r.add_arc(d.place, d.trans, d.type, d.weight);
      }
      for (const auto& d : ifaces) {
        if (!r.transitions.count(d.trans)) throw ParseError(d.line, "unknown transition " + d.trans);
        r.add_interface(d.iface, d.trans);
      }
      Verdict v = validate_reversible(r);
      if (!v) throw ParseError(1, "invalid reversible net: " + v.detail);
      doc.content = std::move(r);
      return doc;
    }
    PetriNet n;
    for (const auto& d : places) {
      if (n.has_element(d.id)) throw ParseError(d.line, "duplicate declaration of " + d.id);
      n.add_place(d.id, d.init);
    }
    for (const auto& d : trans) {
      if (n.has_element(d.id)) throw ParseError(d.line, "duplicate declaration of " + d.id);
      n.add_transition(d.id, d.label);
    }
    for (const auto& d : arcs) {
      if (!n.has_element(d.src)) throw ParseError(d.line, "unknown element " + d.src);
      if (!n.has_element(d.dst)) throw ParseError(d.line, "unknown element " + d.dst);
      n.add_arc(d.src, d.dst, d.weight);
    }
    n.validate();
    if (component) {
      Component c;
      c.net = std::move(n);
      for (const auto& d : ports) {
        if (!c.net.places.count(d.place)) throw ParseError(d.line, "unknown place " + d.place);
        (d.input ? c.inputs : c.outputs).insert(d.place);
      }
      for (const auto& p : c.inputs)
        if (c.outputs.count(p)) throw ParseError(1, "place is both input and output: " + p);
      doc.content = std::move(c);
    } else {
      doc.content = std::move(n);
    }
  } catch (const NetError& e) {
    throw ParseError(1, e.what());
  }
  return doc;
}

inline NetDocument parse_net_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_net(buf.str());
}

namespace detail {

inline void serialize_label(std::ostream& out, const Label& l) {
  if (l)
    out << " label " << *l;
  else
    out << " tau";
}

}  // namespace detail

// Canonical text form: places, transitions, then arcs, each ascending by id.
inline std::string serialize_net(const NetDocument& doc) {
  std::ostringstream out;
  out << "net " << doc.name << "\n";
  auto emit_plain = [&out](const PetriNet& n) {
    for (const auto& p : n.places) {
      out << "place " << p;
      if (n.initial[p] > 0) out << " init " << n.initial[p];
      out << "\n";
    }
    for (const auto& t : n.transitions) {
      out << "trans " << t;
      detail::serialize_label(out, n.label(t));
      out << "\n";
    }
    for (const auto& [arc, w] : n.flow) {
      out << "arc " << arc.first << " " << arc.second;
      if (w != 1) out << " weight " << w;
      out << "\n";
    }
  };
  if (doc.is_plain_net()) {
    emit_plain(std::get<PetriNet>(doc.content));
  } else if (doc.is_component()) {
    const Component& c = std::get<Component>(doc.content);
    emit_plain(c.net);
    for (const auto& p : c.inputs) out << "input " << p << "\n";
    for (const auto& p : c.outputs) out << "output " << p << "\n";
  } else {
    const ReversibleNet& r = std::get<ReversibleNet>(doc.content);
    for (const auto& p : r.places) {
      out << "place " << p;
      if (r.initial[p] > 0) out << " init " << r.initial[p];
      out << "\n";
    }
    for (const auto& t : r.transitions) {
      out << "trans " << t;
      detail::serialize_label(out, r.labels.at(t));
      out << "\n";
    }
    for (const auto& [key, w] : r.flow) {
      const auto& [p, t, ty] = key;
      out << "rarc " << p << " " << t << " " << to_string(ty);
      if (w != 1) out << " weight " << w;
      out << "\n";
    }
    for (const auto& [w, t] : r.ui) out << "interface " << w << " " << t << "\n";
  }
  return out.str();
}

// DOT rendering: places as circles carrying their token count, transitions as
// boxes carrying their label, arc weights greater than one annotated.
inline std::string export_dot(const NetDocument& doc) {
  std::ostringstream out;
  out << "digraph \"" << doc.name << "\" {\n  rankdir=LR;\n";
  auto emit = [&out](const PetriNet& n) {
    for (const auto& p : n.places) {
      out << "  \"" << p << "\" [shape=circle,label=\"" << p;
      if (n.initial[p] > 0) out << "\\n" << n.initial[p];
      out << "\"];\n";
    }
    for (const auto& t : n.transitions) {
      Label l = n.label(t);
      out << "  \"" << t << "\" [shape=box,label=\"" << (l ? *l : std::string("tau"))
          << "\\n" << t << "\"];\n";
    }
    for (const auto& [arc, w] : n.flow) {
      out << "  \"" << arc.first << "\" -> \"" << arc.second << "\"";
      if (w != 1) out << " [label=\"" << w << "\"]";
      out << ";\n";
    }
  };
  if (doc.is_reversible()) {
    const ReversibleNet& r = std::get<ReversibleNet>(doc.content);
    for (const auto& p : r.places) {
      out << "  \"" << p << "\" [shape=circle,label=\"" << p;
      if (r.initial[p] > 0) out << "\\n" << r.initial[p];
      out << "\"];\n";
    }
    for (const auto& t : r.transitions) {
      Label l = r.labels.at(t);
      out << "  \"" << t << "\" [shape=box,label=\"" << (l ? *l : std::string("tau"))
          << "\\n" << t << "\"];\n";
    }
    for (const auto& [key, w] : r.flow) {
      const auto& [p, t, ty] = key;
      bool into = ty == ArcType::In || ty == ArcType::Early || ty == ArcType::Late;
      if (into)
        out << "  \"" << p << "\" -> \"" << t << "\"";
      else
        out << "  \"" << t << "\" -> \"" << p << "\"";
      out << " [style=" << (ty == ArcType::In || ty == ArcType::Out ? "solid" : "dashed")
          << ",label=\"" << to_string(ty);
      if (w != 1) out << " " << w;
      out << "\"];\n";
    }
  } else {
    emit(doc.net());
  }
  out << "}\n";
  return out.str();
}

}  // namespace distnet
