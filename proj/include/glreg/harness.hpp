// Differential checking of global evaluation against the regionized program,
// and a generator of small well-typed global programs.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "glreg/global_eval.hpp"
#include "glreg/region_eval.hpp"
#include "glreg/regionize.hpp"

namespace glreg {

/// Values of region r's variables in allocation order; DanglingEntry when a
/// listed variable is unbound.
std::vector<StorableValue> region_slice(const Store& s, const RegionContext& r, RegionName region);

struct VariableCheck {
  Var name;
  RegionName region = 0;
  bool basic = true;
  std::optional<StorableValue> global_final;
  std::vector<StorableValue> region_values;
  bool no_write = false;  // empty region: compared against the initial value
  std::size_t global_writes = 0;  // rebindings of the variable in the global run
  std::size_t region_writes = 0;  // allocations into its region in the region run
  bool ok = false;
  std::string detail;
};

enum class Verdict { Pass, Fail, GlobalStuck, RegionStuck, OutOfFuel, Rejected };
const char* to_string(Verdict v);

struct CorrespondenceReport {
  Verdict verdict = Verdict::Rejected;
  std::vector<VariableCheck> variables;
  bool variables_ok = false;
  /// Every global received as many writes as its region received values.
  bool structure_ok = false;
  bool result_ok = false;
  std::string result_detail;
  bool region_typed = false;  // the regionized program passed check_program
  /// No global was overwritten while the rest of the expression still
  /// referred to it (a dynamic stand-in for substructural protection).
  bool protected_run = false;
  std::string stale_detail;
  std::size_t global_steps = 0;
  std::size_t region_steps = 0;
  std::string error;  // rejection or stuck message

  /// Names of the variables that failed.
  std::vector<Var> failing() const;
};

/// Free occurrences of x in expression positions (qualifiers excluded).
std::size_t count_free_occurrences(const Expr& e, const Var& x);

/// First step of the global run that overwrites a global while another free
/// reference to it is pending, if any.
std::optional<std::string> find_stale_write(const Program& p, std::size_t fuel = 100000);

/// Lets tests tamper with the translation before it is run.
using Tamper = std::function<void(RegionizedProgram&)>;

CorrespondenceReport check_correspondence(const TypeContext& hints, const Program& p, std::size_t fuel = 100000,
                                          const Tamper& tamper = {});

/// One line per variable plus a verdict line.
std::string format_report(const CorrespondenceReport& r);

struct GeneratedProgram {
  TypeContext hints;
  Program program;
  std::uint64_t seed = 0;  // per-program seed
};

/// Deterministic for a given (seed, size_bound, count). Every program passes
/// gcheck_program.
std::vector<GeneratedProgram> generate_programs(std::uint64_t seed, int size_bound, std::size_t count);
/// The single program drawn from a per-program seed (may be ill-typed).
GeneratedProgram generate_candidate(std::uint64_t program_seed, int size_bound);

/// Greedy reduction of `g` while `still_fails` holds and gcheck still accepts.
GeneratedProgram shrink(const GeneratedProgram& g, const std::function<bool(const GeneratedProgram&)>& still_fails);

/// Program text with its hints, re-parseable by the frontend.
std::string print_generated(const GeneratedProgram& g);

}  // namespace glreg
