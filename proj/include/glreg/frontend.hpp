// Concrete syntax: parser and printer for both languages.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glreg/machine.hpp"

namespace glreg {

enum class Mode { Global, Region };

struct SourceFile {
  Mode mode = Mode::Global;
  Program program;
  /// Store-value annotations `x : T = v`, in store order.
  TypeContext hints;
  /// `region n = [x, ...];` headers (region mode only).
  std::optional<RegionContext> regions;
};

struct ParseOptions {
  Mode mode = Mode::Global;
  /// Accept names of the reserved namespace x1, x2, ... (printed states).
  bool allow_reserved = false;
};

SourceFile parse_program(std::string_view src, const ParseOptions& opts);
ExprPtr parse_expr(std::string_view src, const ParseOptions& opts);
Type parse_type(std::string_view src, Mode mode);
Pattern parse_pattern(std::string_view src);
/// Lines of the form `x : T` (an optional `;` separates entries).
TypeContext parse_gamma(std::string_view src, Mode mode);
/// `region n = [x, ...];` statements.
RegionContext parse_regions(std::string_view src);

std::string read_file(const std::filesystem::path& p);
/// `.reg` files hold region programs, everything else global ones.
Mode mode_for_path(const std::filesystem::path& p);

struct PrintOptions {
  Mode mode = Mode::Global;
  bool unicode = false;
};

std::string print_qual(const Qual& q);
std::string print_effect(const Effect& e);
std::string print_pattern(const Pattern& p, bool unicode = false);
std::string print_type(const Type& t, const PrintOptions& opts = {});
std::string print_expr(const Expr& e, const PrintOptions& opts = {});
std::string print_value(const StorableValue& v, const PrintOptions& opts = {});
/// One `x = v;` line per binding (with `: T` when a hint is present).
std::string print_store(const Store& s, const PrintOptions& opts = {}, const TypeContext* hints = nullptr);
std::string print_region_headers(const RegionContext& r);
/// Whole program in re-parseable form.
std::string print_program(const SourceFile& f, const PrintOptions& opts);
/// Two-column view: one `n: v v v` line per region, values in allocation order.
std::string print_region_values(const RegionContext& r, const Store& s, const PrintOptions& opts = {});

}  // namespace glreg
