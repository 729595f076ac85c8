// Helpers shared by the test binaries.
#pragma once

#include <algorithm>
#include <cctype>
#include <string>

#include "glreg/frontend.hpp"
#include "glreg/global_eval.hpp"
#include "glreg/region_eval.hpp"

namespace glreg::testing {

inline std::string corpus(const std::string& name) { return std::string(GLREG_CORPUS_DIR) + "/" + name; }

inline std::string golden(const std::string& name) { return read_file(std::string(GLREG_GOLDEN_DIR) + "/" + name); }

struct Loaded {
  Program program;
  TypeContext hints;
  std::optional<RegionContext> regions;
};

/// Reads corpus/<stem>.glo (or .reg) and corpus/<stem>.gamma when present.
inline Loaded load(const std::string& file, const std::string& gamma = {}) {
  auto path = corpus(file);
  Mode mode = mode_for_path(path);
  auto src = parse_program(read_file(path), {mode, true});
  Loaded out{src.program, src.hints, src.regions};
  if (!gamma.empty()) {
    TypeContext extra = parse_gamma(read_file(corpus(gamma)), mode);
    for (const auto& [x, t] : extra.entries()) out.hints.extend(x, t);
  }
  return out;
}

inline Program global_src(const std::string& text) { return parse_program(text, {Mode::Global}).program; }
inline SourceFile region_src(const std::string& text) { return parse_program(text, {Mode::Region}); }

inline std::int64_t as_int(const StorableValue& v) { return std::get<std::int64_t>(v.ground().v); }
inline bool as_bool(const StorableValue& v) { return std::get<bool>(v.ground().v); }
inline std::vector<std::int64_t> as_array(const StorableValue& v) {
  return std::get<std::vector<std::int64_t>>(v.ground().v);
}

/// Store and main of a program without headers or type hints.
inline std::string bare_program(const Program& p, Mode mode) {
  return print_store(p.store, {mode}) + "main = " + print_expr(*p.main, {mode}) + "\n";
}

/// First position where two token lists differ, or npos.
inline std::size_t first_difference(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    if (i >= a.size() || i >= b.size() || a[i] != b[i]) return i;
  }
  return std::string::npos;
}

/// Whitespace-separated tokens, with brackets and punctuation split off.
inline std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      flush();
      ++i;
      continue;
    }
    if (std::string("()[]{},;.").find(static_cast<char>(c)) != std::string::npos) {
      flush();
      out.push_back(std::string(1, static_cast<char>(c)));
      ++i;
      continue;
    }
    // multi-byte lexemes (⟨ ⟩ λ → ≡) stand alone
    if (c >= 0x80) {
      std::size_t len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : 2;
      flush();
      out.push_back(s.substr(i, len));
      i += len;
      continue;
    }
    cur += static_cast<char>(c);
    ++i;
  }
  flush();
  return out;
}

}  // namespace glreg::testing
