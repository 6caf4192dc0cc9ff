#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "loccsim/loccsim.hpp"

namespace {

using namespace loccsim;

// 0 pass, 1 verification fail, 2 usage or input error
constexpr int kPass = 0, kFail = 1, kUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool looks_like_file(const std::string& s) {
  return s.find('/') != std::string::npos ||
         (s.size() > 5 && s.compare(s.size() - 5, 5, ".json") == 0);
}

void emit(const ordered_json& j, const std::string& text, const std::string& format) {
  if (format == "json") {
    const auto problems = validate_report_json(j);
    if (!problems.empty()) {
      std::string all;
      for (const auto& p : problems) all += (all.empty() ? "" : "; ") + p;
      throw LayoutError("report does not match its schema: " + all);
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

bool needs_grouping(const CatalogSet& set) {
  for (const auto& c : set.candidates)
    if (c.mixed) return true;
  return false;
}

int cmd_verify(const std::string& set_name, const std::string& protocol,
               double tol, const std::string& format) {
  const CatalogSet set = set_by_name(set_name);
  const ProtocolTree tree = looks_like_file(protocol)
                                ? import_protocol(read_file(protocol))
                                : protocol_by_name(protocol);
  const VerificationReport r = needs_grouping(set)
                                   ? lift_mixed(tree, set, grouping_of(set), tol)
                                   : verify(tree, set, tol);
  emit(to_json(r), render_text(r), format);
  return r.pass ? kPass : kFail;
}

int cmd_upb_check(const std::string& set_name, const SeesawConfig& cfg,
                  const std::string& format) {
  const CatalogSet set = set_by_name(set_name);
  const UpbVerdict v = check_upb(set, cfg);
  emit(to_json(v, set.name, cfg), render_text(v, set.name, cfg), format);
  auto it = set.metadata.find("unextendible");
  if (it == set.metadata.end()) return kPass;
  const bool expect_unext = it->second == "true";
  const bool found_unext = !v.extendible && !v.degenerate;
  return expect_unext == found_unext ? kPass : kFail;
}

int cmd_hierarchy(const std::string& format) {
  const HierarchyReport h = hierarchy_report();
  emit(to_json(h), render_text(h), format);
  return h.ok ? kPass : kFail;
}

int cmd_lock_demo(int pairs, int bit, std::uint64_t seed, const std::string& format) {
  const LockDemoTranscript t = lock_demo(pairs, bit, seed);
  emit(to_json(t), render_text(t), format);
  return t.ok ? kPass : kFail;
}

int cmd_schmidt(const std::string& state_name, const std::string& format) {
  const SchmidtReport r = schmidt_report(state_by_name(state_name));
  emit(to_json(r), render_text(r), format);
  return kPass;
}

int cmd_export(const std::string& protocol, const std::string& out) {
  const ProtocolTree tree = protocol_by_name(protocol);
  const std::string text = export_protocol_text(tree);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ParseError("cannot write '" + out + "'");
    f << text;
  }
  return kPass;
}

int cmd_import(const std::string& file) {
  const ProtocolTree tree = import_protocol(read_file(file));
  int leaves = 0, nodes = 0;
  std::function<void(const ProtocolNode&)> walk = [&](const ProtocolNode& n) {
    if (n.leaf) {
      ++leaves;
      return;
    }
    ++nodes;
    for (const auto& c : n.children) walk(c);
  };
  walk(tree.root);
  std::cout << "protocol " << tree.name << ": resource " << tree.resource.label
            << ", " << nodes << " measurement node(s), " << leaves
            << " leaf/leaves\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement-assisted local discrimination toolkit"};
  app.require_subcommand(1);
  std::string format = "text";

  std::string v_set, v_protocol;
  double v_tol = kDefaultTol;
  auto* v = app.add_subcommand("verify", "run a protocol against a state set");
  v->add_option("--set", v_set, "set name")->required();
  v->add_option("--protocol", v_protocol, "protocol name or exported file")->required();
  v->add_option("--tol", v_tol, "orthogonality/probability tolerance");
  v->add_option("--format", format, "text | json");

  std::string u_set;
  SeesawConfig cfg;
  auto* u = app.add_subcommand("upb-check", "search for a product state in a set's complement");
  u->add_option("--set", u_set, "set name")->required();
  u->add_option("--restarts", cfg.restarts, "random restarts");
  u->add_option("--iters", cfg.iters, "iterations per restart");
  u->add_option("--seed", cfg.seed, "rng seed");
  u->add_option("--format", format, "text | json");

  auto* h = app.add_subcommand("hierarchy", "resource-rank table with provenance");
  h->add_option("--format", format, "text | json");

  int l_pairs = 1, l_bit = 0;
  std::uint64_t l_seed = 0;
  auto* l = app.add_subcommand("lock-demo", "encode one bit, decode per shared pair");
  l->add_option("--pairs", l_pairs, "receiver pairs");
  l->add_option("--bit", l_bit, "bit to encode (0 or 1)");
  l->add_option("--seed", l_seed, "rng seed for trajectory sampling");
  l->add_option("--format", format, "text | json");

  std::string s_state;
  auto* s = app.add_subcommand("schmidt", "Schmidt coefficients of a named state");
  s->add_option("--state", s_state, "state name")->required();
  s->add_option("--format", format, "text | json");

  std::string e_protocol, e_out;
  auto* e = app.add_subcommand("export", "write a built-in protocol as JSON");
  e->add_option("--protocol", e_protocol, "protocol name")->required();
  e->add_option("--out", e_out, "output file ('-' for stdout)");

  std::string i_file;
  auto* i = app.add_subcommand("import", "parse a protocol file and summarize it");
  i->add_option("file", i_file, "protocol JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (v->parsed()) return cmd_verify(v_set, v_protocol, v_tol, format);
    if (u->parsed()) {
      cfg.validate();
      return cmd_upb_check(u_set, cfg, format);
    }
    if (h->parsed()) return cmd_hierarchy(format);
    if (l->parsed()) return cmd_lock_demo(l_pairs, l_bit, l_seed, format);
    if (s->parsed()) return cmd_schmidt(s_state, format);
    if (e->parsed()) return cmd_export(e_protocol, e_out);
    if (i->parsed()) return cmd_import(i_file);
  } catch (const ParseError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const LayoutError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
