#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distnet/confrepl.hpp"
#include "distnet/distribution.hpp"
#include "distnet/equivalence.hpp"
#include "distnet/format.hpp"
#include "distnet/lts.hpp"
#include "distnet/mstruct.hpp"
#include "distnet/report.hpp"

namespace fs = std::filesystem;
using namespace distnet;

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;

struct Cli {
  Limits limits;
  std::string json_path;
  unsigned long long seed = 0;  // reserved for test-net generators
  VerdictDocument doc;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    doc.inputs.push_back({path, fnv1a64(text)});
    return text;
  }

  NetDocument load(const std::string& path) { return parse_net(slurp(path)); }

  int finish(int code) {
    doc.limits = limits;
    doc.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - started)
                      .count();
    if (!json_path.empty()) {
      std::ofstream out(json_path);
      out << doc.to_json().dump(2) << "\n";
    }
    return code;
  }
};

int exit_of(Truth t) {
  switch (t) {
    case Truth::Yes: return kExitYes;
    case Truth::No: return kExitNo;
    case Truth::Unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

void print_verdict(const std::string& what, const Verdict& v) {
  std::cout << what << ": " << to_string(v.truth);
  if (!v.detail.empty()) std::cout << " (" << v.detail << ")";
  if (!v.witness.empty()) {
    std::cout << " [";
    for (std::size_t i = 0; i < v.witness.size(); ++i)
      std::cout << (i ? " " : "") << v.witness[i];
    std::cout << "]";
  }
  std::cout << "\n";
}

int run_check(Cli& cli, const std::string& file) {
  NetDocument doc = cli.load(file);
  const PetriNet& n = doc.net();
  Verdict plain = is_plain(n);
  Verdict onesafe = is_one_safe(n, cli.limits);
  Verdict scn = is_structural_conflict_net(n, cli.limits);
  Verdict fin = finitary_guard(n);
  print_verdict("plain", plain);
  print_verdict("one-safe", onesafe);
  print_verdict("structural-conflict", scn);
  print_verdict("finitary", fin);
  cli.doc.verdict = {{"plain", to_json(plain)},
                     {"one_safe", to_json(onesafe)},
                     {"structural_conflict", to_json(scn)},
                     {"finitary", to_json(fin)}};
  cli.doc.truncated = onesafe.truth == Truth::Unknown || scn.truth == Truth::Unknown;
  Truth overall = Truth::Yes;
  for (const Verdict* v : {&plain, &onesafe, &scn, &fin}) {
    if (v->truth == Truth::No) { overall = Truth::No; break; }
    if (v->truth == Truth::Unknown) overall = Truth::Unknown;
  }
  return cli.finish(exit_of(overall));
}

int run_distributable(Cli& cli, const std::string& file) {
  NetDocument doc = cli.load(file);
  DistributabilityVerdict v = distributability_verdict(doc.net(), cli.limits);
  cli.doc.verdict = to_json(v);
  cli.doc.truncated = v.kind == Distributability::Unknown;
  switch (v.kind) {
    case Distributability::Distributable:
      std::cout << "distributable: " << v.detail << "\n";
      return cli.finish(kExitYes);
    case Distributability::NotDistributable:
      std::cout << "not-distributable: " << v.detail << "\n";
      return cli.finish(kExitNo);
    case Distributability::Inapplicable:
      std::cout << "inapplicable: " << v.detail << "\n";
      return cli.finish(kExitNo);
    case Distributability::Unknown:
      std::cout << "unknown: " << v.detail << "\n";
      return cli.finish(kExitUnknown);
  }
  return cli.finish(kExitUnknown);
}

int run_synthesize(Cli& cli, const std::string& file, const std::string& outdir) {
  NetDocument doc = cli.load(file);
  fs::create_directories(outdir);
  try {
    SynthesisReport report = synthesize(doc.net(), cli.limits);
    NetDocument rev{doc.name + ".reversible", report.reversible_form};
    NetDocument impl{doc.name + ".impl", report.implementation};
    std::ofstream(fs::path(outdir) / "reversible.net") << serialize_net(rev);
    std::ofstream(fs::path(outdir) / "implementation.net") << serialize_net(impl);
    if (report.distributed_form) {
      NetDocument distr{doc.name + ".distributed", *report.distributed_form};
      std::ofstream(fs::path(outdir) / "distributed.net") << serialize_net(distr);
    }
    nlohmann::json jr = to_json(report);
    std::ofstream(fs::path(outdir) / "report.json") << jr.dump(2) << "\n";
    cli.doc.verdict = jr;
    print_verdict("essentially-distributed", report.essentially_distributed);
    print_verdict("distributed-after-conversion", report.distributed_after_conversion);
    print_verdict("equivalence", report.equivalence);
    Truth overall = Truth::Yes;
    for (const Verdict* v :
         {&report.essentially_distributed, &report.distributed_after_conversion,
          &report.equivalence}) {
      if (v->truth == Truth::No) { overall = Truth::No; break; }
      if (v->truth == Truth::Unknown) overall = Truth::Unknown;
    }
    cli.doc.truncated = overall == Truth::Unknown;
    return cli.finish(exit_of(overall));
  } catch (const SynthesisError& e) {
    std::cout << "refused: " << e.what() << "\n";
    cli.doc.verdict = to_json(e.verdict);
    return cli.finish(kExitNo);
  }
}

int run_equiv(Cli& cli, const std::string& file_a, const std::string& file_b,
              const std::string& relation) {
  NetDocument da = cli.load(file_a);
  NetDocument db = cli.load(file_b);
  const PetriNet& a = da.net();
  const PetriNet& b = db.net();
  Verdict v;
  if (relation == "step-readiness") {
    v = step_readiness_equivalent(a, b, cli.limits);
  } else if (relation == "branching-split-divergence") {
    if (is_plain(b))
      v = branching_split_bisim_nets(a, b, cli.limits);
    else if (is_plain(a))
      v = branching_split_bisim_nets(b, a, cli.limits);
    else
      v = branching_bisim_divergence(build_split_lts(a, cli.limits),
                                     build_split_lts(b, cli.limits));
  } else if (relation == "interleaving-branching-divergence") {
    v = branching_bisim_divergence(build_interleaving_lts(a, cli.limits),
                                   build_interleaving_lts(b, cli.limits));
  } else {
    std::cerr << "unknown relation: " << relation << "\n";
    return cli.finish(kExitUsage);
  }
  print_verdict("equivalent", v);
  cli.doc.verdict = {{"relation", relation}, {"result", to_json(v)}};
  cli.doc.truncated = v.truth == Truth::Unknown;
  return cli.finish(exit_of(v.truth));
}

int run_distribution(Cli& cli, const std::string& file) {
  NetDocument doc = cli.load(file);
  const PetriNet& n = doc.net();
  Distribution d = canonical_distribution(n);
  std::cout << "canonical distribution:\n";
  for (const auto& [loc, members] : d.classes()) {
    std::cout << "  " << loc << ":";
    for (const auto& m : members) std::cout << " " << m;
    std::cout << "\n";
  }
  Verdict distr = check_distributed(n, cli.limits);
  Verdict ess = check_essentially_distributed(n, cli.limits);
  Verdict ext = check_externally_distributed(n, cli.limits);
  print_verdict("distributed", distr);
  print_verdict("essentially-distributed", ess);
  print_verdict("externally-distributed", ext);
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [loc, members] : d.classes())
    classes[loc] = std::vector<std::string>(members.begin(), members.end());
  cli.doc.verdict = {{"classes", classes},
                     {"distributed", to_json(distr)},
                     {"essentially_distributed", to_json(ess)},
                     {"externally_distributed", to_json(ext)}};
  cli.doc.truncated = distr.truth == Truth::Unknown;
  return cli.finish(exit_of(distr.truth));
}

int run_compose(Cli& cli, const std::vector<std::string>& files, const std::string& outfile) {
  std::vector<Component> parts;
  for (const auto& f : files) {
    NetDocument doc = cli.load(f);
    if (doc.is_component())
      parts.push_back(std::get<Component>(doc.content));
    else
      parts.push_back(Component{doc.net(), {}, {}});
  }
  Component c = compose(parts);
  NetDocument out{"composition", c};
  std::string text = serialize_net(out);
  if (outfile.empty())
    std::cout << text;
  else
    std::ofstream(outfile) << text;
  cli.doc.verdict = {{"places", c.net.places.size()},
                     {"transitions", c.net.transitions.size()},
                     {"inputs", c.inputs.size()},
                     {"outputs", c.outputs.size()}};
  return cli.finish(kExitYes);
}

int run_to_lsga(Cli& cli, const std::string& file, const std::string& outdir) {
  NetDocument doc = cli.load(file);
  const PetriNet& n = doc.net();
  Verdict distr = check_distributed(n, cli.limits);
  if (distr.truth != Truth::Yes) {
    print_verdict("distributed", distr);
    cli.doc.verdict = to_json(distr);
    return cli.finish(exit_of(distr.truth));
  }
  auto [components, recomposed] = decompose_to_lsga(n, cli.limits);
  fs::create_directories(outdir);
  for (std::size_t i = 0; i < components.size(); ++i) {
    NetDocument cd{doc.name + ".comp" + std::to_string(i), components[i]};
    std::ofstream(fs::path(outdir) / ("comp" + std::to_string(i) + ".net"))
        << serialize_net(cd);
  }
  NetDocument rd{doc.name + ".lsga", recomposed};
  std::ofstream(fs::path(outdir) / "recomposed.net") << serialize_net(rd);
  std::cout << "components: " << components.size() << "\n";
  cli.doc.verdict = {{"components", components.size()}};
  return cli.finish(kExitYes);
}

int run_export_dot(Cli& cli, const std::string& file, const std::string& outfile) {
  NetDocument doc = cli.load(file);
  std::string dot = export_dot(doc);
  if (outfile.empty())
    std::cout << dot;
  else
    std::ofstream(outfile) << dot;
  return cli.finish(kExitYes);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analysis, distributability and synthesis for labelled Petri nets"};
  app.require_subcommand(1);

  Cli cli;
  app.add_option("--max-markings", cli.limits.max_markings, "state budget for explorations");
  app.add_option("--max-tokens", cli.limits.max_tokens_per_place, "per-place token bound");
  app.add_option("--max-firing-len", cli.limits.max_firing_len, "|U| cap in the ST view");
  app.add_option("--max-step-size", cli.limits.max_step_size, "step size cap");
  app.add_option("--json", cli.json_path, "write a machine-readable verdict document");
  app.add_option("--seed", cli.seed, "seed for randomized test generators (reserved)");

  std::string file, file_b, outdir = "out", outfile, relation = "step-readiness";
  std::vector<std::string> files;

  CLI::App* check = app.add_subcommand("check", "plain / one-safe / structural-conflict / finitary");
  check->add_option("file", file)->required();

  CLI::App* distributable = app.add_subcommand("distributable", "decide distributability");
  distributable->add_option("file", file)->required();

  CLI::App* synth = app.add_subcommand("synthesize", "build the conflict replicating implementation");
  synth->add_option("file", file)->required();
  synth->add_option("-o,--output", outdir, "output directory");

  CLI::App* equiv = app.add_subcommand("equiv", "compare two nets");
  equiv->add_option("a", file)->required();
  equiv->add_option("b", file_b)->required();
  equiv->add_option("--relation", relation,
                    "step-readiness | branching-split-divergence | interleaving-branching-divergence");

  CLI::App* distribution = app.add_subcommand("distribution", "canonical distribution and verdicts");
  distribution->add_option("file", file)->required();

  CLI::App* comp = app.add_subcommand("compose", "asynchronous parallel composition");
  comp->add_option("files", files)->required()->expected(-1);
  comp->add_option("-o,--output", outfile, "output file (stdout if omitted)");

  CLI::App* lsga = app.add_subcommand("to-lsga", "decompose a distributed net into sequential components");
  lsga->add_option("file", file)->required();
  lsga->add_option("-o,--output", outdir, "output directory");

  CLI::App* dot = app.add_subcommand("export-dot", "render a net as DOT");
  dot->add_option("file", file)->required();
  dot->add_option("-o,--output", outfile, "output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*check) { cli.doc.command = "check"; return run_check(cli, file); }
    if (*distributable) { cli.doc.command = "distributable"; return run_distributable(cli, file); }
    if (*synth) { cli.doc.command = "synthesize"; return run_synthesize(cli, file, outdir); }
    if (*equiv) { cli.doc.command = "equiv"; return run_equiv(cli, file, file_b, relation); }
    if (*distribution) { cli.doc.command = "distribution"; return run_distribution(cli, file); }
    if (*comp) { cli.doc.command = "compose"; return run_compose(cli, files, outfile); }
    if (*lsga) { cli.doc.command = "to-lsga"; return run_to_lsga(cli, file, outdir); }
    if (*dot) { cli.doc.command = "export-dot"; return run_export_dot(cli, file, outfile); }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const NetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNo;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoInput;
  }
  return kExitUsage;
}
