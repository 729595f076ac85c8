// Command-line front end: glreg <subcommand> FILE [flags]
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "glreg/frontend.hpp"
#include "glreg/global_eval.hpp"
#include "glreg/global_types.hpp"
#include "glreg/harness.hpp"
#include "glreg/imperative.hpp"
#include "glreg/region_eval.hpp"
#include "glreg/region_types.hpp"
#include "glreg/regionize.hpp"
#include "glreg/trace.hpp"

using namespace glreg;

namespace {

struct Flags {
  std::string file;
  std::string gamma;
  std::string regions;
  std::string trace;
  std::string out;
  std::size_t fuel = 100000;
  std::uint64_t seed = 1;
  int size = 4;
  std::size_t count = 500;
  bool full_snapshots = false;
  bool ascii = false;
};

// Usage and parse problems exit with 2, failed checks with 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SourceFile load(const Flags& f) {
  Mode mode = mode_for_path(f.file);
  SourceFile src = parse_program(read_file(f.file), {mode, true});
  if (!f.gamma.empty()) {
    TypeContext extra = parse_gamma(read_file(f.gamma), mode);
    for (const auto& [x, t] : extra.entries()) src.hints.extend(x, t);
  }
  if (!f.regions.empty()) src.regions = parse_regions(read_file(f.regions));
  return src;
}

void require_mode(const SourceFile& src, Mode m, const char* what) {
  if (src.mode != m) throw UsageError(std::string(what) + " expects a " + (m == Mode::Global ? ".glo" : ".reg") + " file");
}

std::ostream& output(const Flags& f, std::ofstream& file) {
  if (f.out.empty()) return std::cout;
  file.open(f.out);
  if (!file) throw UsageError("cannot write " + f.out);
  return file;
}

RunOptions run_options(const Flags& f) {
  RunOptions o;
  o.fuel = f.fuel;
  o.record_trace = !f.trace.empty();
  o.full_snapshots = f.full_snapshots;
  return o;
}

void emit_trace(std::ostream& os, const Flags& f, const std::vector<TraceStep>& trace, Mode mode) {
  if (f.trace == "json") {
    auto records = trace_to_json(trace, mode);
    os << "[\n";
    for (std::size_t i = 0; i < records.size(); ++i) os << records[i].dump() << (i + 1 < records.size() ? ",\n" : "\n");
    os << "]\n";
  } else if (f.trace == "text") {
    for (const auto& s : trace) os << step_to_text(s, mode) << "\n";
  }
}

int cmd_parse(const Flags& f) {
  auto src = load(f);
  std::ofstream file;
  output(f, file) << print_program(src, {src.mode});
  return 0;
}

int cmd_check_global(const Flags& f) {
  auto src = load(f);
  require_mode(src, Mode::Global, "check-global");
  auto t = gcheck_program(src.program, src.hints);
  std::cout << "main : " << print_type(t.result.type) << "\neffect " << print_effect(t.result.effect) << "\n";
  for (const auto& d : t.diagnostics) std::cout << "note: " << d << "\n";
  return 0;
}

int cmd_check_region(const Flags& f) {
  auto src = load(f);
  require_mode(src, Mode::Region, "check-region");
  if (!src.regions) throw UsageError("no region context: add `region n = [...]` headers or --regions");
  auto t = check_program(*src.regions, src.program, src.hints);
  std::cout << "main : " << print_type(t.result.type, {Mode::Region}) << "\neffect "
            << print_effect(t.result.effect) << "\n";
  return 0;
}

int cmd_eval_global(const Flags& f) {
  auto src = load(f);
  require_mode(src, Mode::Global, "eval-global");
  auto r = grun(initial_global_config(src.program), run_options(f));
  std::ofstream file;
  std::ostream& os = output(f, file);
  emit_trace(os, f, r.trace, Mode::Global);
  os << print_store(r.final.store) << "result: " << print_expr(*r.final.expr) << "\n";
  for (const auto& d : r.diagnostics) os << "note: " << d << "\n";
  os << to_string(r.outcome) << " after " << r.steps << " steps\n";
  if (r.stuck) os << to_string(r.stuck->reason) << ": " << r.stuck->detail << "\n";
  return r.outcome == Outcome::Terminal ? 0 : 1;
}

int cmd_eval_region(const Flags& f) {
  auto src = load(f);
  require_mode(src, Mode::Region, "eval-region");
  if (!src.regions) throw UsageError("no region context: add `region n = [...]` headers or --regions");
  auto r = run(initial_config(*src.regions, src.program), run_options(f));
  std::ofstream file;
  std::ostream& os = output(f, file);
  emit_trace(os, f, r.trace, Mode::Region);
  os << print_region_values(r.final.regions, r.final.store, {Mode::Region})
     << "result: " << print_expr(*r.final.expr, {Mode::Region}) << "\n";
  os << to_string(r.outcome) << " after " << r.steps << " steps\n";
  if (r.stuck) os << to_string(r.stuck->reason) << ": " << r.stuck->detail << "\n";
  return r.outcome == Outcome::Terminal ? 0 : 1;
}

int cmd_imperative(const Flags& f) {
  auto src = load(f);
  require_mode(src, Mode::Global, "imperative");
  auto p = apply_sugar(imperative_program(src.hints, src.program));
  std::ofstream file;
  output(f, file) << print_imperative(p, {!f.ascii});
  return 0;
}

int cmd_regionize(const Flags& f) {
  auto src = load(f);
  require_mode(src, Mode::Global, "regionize");
  auto r = regionize_program(src.hints, src.program);
  SourceFile out{Mode::Region, r.program, r.hints, r.regions};
  std::ofstream file;
  std::ostream& os = output(f, file);
  if (!r.omitted.empty()) {
    os << "# omitted (never read):";
    for (const auto& x : r.omitted) os << " " << x;
    os << "\n";
  }
  os << print_program(out, {Mode::Region});
  return 0;
}

int cmd_diff(const Flags& f) {
  auto src = load(f);
  require_mode(src, Mode::Global, "diff");
  auto r = check_correspondence(src.hints, src.program, f.fuel);
  std::ofstream file;
  std::ostream& os = output(f, file);
  os << format_report(r);
  if (!r.protected_run) os << "unprotected: " << r.stale_detail << "\n";
  return r.verdict == Verdict::Pass ? 0 : 1;
}

int cmd_fuzz(const Flags& f) {
  if (f.size < 1) throw UsageError("--size must be at least 1");
  auto progs = generate_programs(f.seed, f.size, f.count);
  std::size_t pass = 0, unprotected = 0, counterexamples = 0;
  std::ofstream file;
  std::ostream& os = output(f, file);
  auto fails = [&](const GeneratedProgram& g) {
    auto r = check_correspondence(g.hints, g.program, f.fuel);
    return r.protected_run && r.verdict != Verdict::Pass;
  };
  for (const auto& g : progs) {
    auto r = check_correspondence(g.hints, g.program, f.fuel);
    if (r.verdict == Verdict::Pass) ++pass;
    if (!r.protected_run) {
      ++unprotected;
      continue;
    }
    if (r.verdict == Verdict::Pass) continue;
    ++counterexamples;
    auto small = shrink(g, fails);
    os << "counterexample\n" << print_generated(small) << "\n" << format_report(check_correspondence(small.hints, small.program, f.fuel)) << "\n";
  }
  os << progs.size() << " programs, " << pass << " pass, " << unprotected << " unprotected, " << counterexamples
     << " counterexamples\n";
  return counterexamples == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreters, checkers and translators for the global and region calculi"};
  app.require_subcommand(1);
  Flags f;
  auto add_common = [&](CLI::App* sub, bool with_file = true) {
    if (with_file) sub->add_option("file", f.file, "program (.glo global, .reg region)")->required()->check(CLI::ExistingFile);
    sub->add_option("--gamma", f.gamma, "type hints")->check(CLI::ExistingFile);
    sub->add_option("--regions", f.regions, "initial region context")->check(CLI::ExistingFile);
    sub->add_option("--fuel", f.fuel, "step limit");
    sub->add_option("--trace", f.trace, "print the trace")->check(CLI::IsMember({"text", "json"}));
    sub->add_flag("--full-snapshots", f.full_snapshots, "include whole states in the trace");
    sub->add_option("--out", f.out, "write output to a file");
  };
  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const Flags&);
  };
  const Sub subs[] = {
      {"parse", "parse and print in normal form", cmd_parse},
      {"check-global", "global type-and-effect check", cmd_check_global},
      {"check-region", "region type-and-effect check", cmd_check_region},
      {"eval-global", "run a global program", cmd_eval_global},
      {"eval-region", "run a region program", cmd_eval_region},
      {"imperative", "imperative form of a global program", cmd_imperative},
      {"regionize", "translate a global program to regions", cmd_regionize},
      {"diff", "check the variable/region correspondence", cmd_diff},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Flags&)>> handlers;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    if (std::string(s.name) == "imperative") sub->add_flag("--ascii", f.ascii, "ASCII lexemes");
    handlers.push_back({sub, s.fn});
  }
  auto* fuzz = app.add_subcommand("fuzz", "generate programs and check the correspondence");
  add_common(fuzz, false);
  fuzz->add_option("--seed", f.seed, "generator seed");
  fuzz->add_option("--size", f.size, "expression depth bound");
  fuzz->add_option("--count", f.count, "number of programs");
  handlers.push_back({fuzz, cmd_fuzz});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    for (const auto& [sub, fn] : handlers) {
      if (sub->parsed()) return fn(f);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::Syntax ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
