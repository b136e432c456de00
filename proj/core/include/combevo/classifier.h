#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "combevo/regex.h"

namespace combevo {

enum class StructureKind : std::uint8_t {
  kVarDecl,
  kBracketPlaceholder,
  kClassHeader,
  kMethodHeader,
  kClassDef,
  kMethodDef,
};

std::string_view ToString(StructureKind kind);
std::optional<StructureKind> ParseStructureKind(std::string_view text);

// Structural kinds score their body recursively; fragments score flat.
constexpr bool IsStructural(StructureKind kind) {
  return kind == StructureKind::kClassDef || kind == StructureKind::kMethodDef;
}

struct StructurePattern {
  std::string name;
  StructureKind kind;
  std::uint32_t value;
  Regex matcher;
};

// Ordered, immutable collection of compiled structure patterns.
//
// File format: one entry per line, four tab-separated fields
//   name <TAB> kind <TAB> value <TAB> regex
// Lines starting with '#' and blank lines are ignored. kind is one of
// var_decl, bracket_placeholder, class_header, method_header, class_def,
// method_def. Patterns are matched against the whole canonical text.
class PatternSet {
 public:
  PatternSet() = default;

  // Throws ParseError for malformed lines and PatternError (message naming
  // the entry and position) for regexes that do not compile.
  static PatternSet Parse(std::string_view text, std::string_view source = "<patterns>");
  static PatternSet Load(const std::filesystem::path& path);
  static PatternSet Builtin();
  // "builtin" or a file path.
  static PatternSet Resolve(std::string_view name);

  // Serializes in the file format above; Parse(Dump()) reproduces the set.
  std::string Dump() const;

  void Add(std::string name, StructureKind kind, std::uint32_t value, std::string_view regex);

  std::span<const StructurePattern> patterns() const { return patterns_; }
  std::size_t size() const { return patterns_.size(); }

  // First pattern of the given kind, if any.
  const StructurePattern* Find(StructureKind kind) const;

  std::uint64_t Hash() const;

 private:
  std::vector<StructurePattern> patterns_;
};

// Token-index span [first, first + count) of a recognized structure.
struct StructureMatch {
  StructureKind kind;
  std::size_t first;
  std::size_t count;
  std::uint32_t value;

  friend bool operator==(const StructureMatch&, const StructureMatch&) = default;
};

struct Classification {
  std::uint32_t total = 0;
  std::vector<StructureMatch> matched;
};

// Tokens joined by exactly one space.
std::string Canonicalize(std::span<const std::string> tokens);
std::string Canonicalize(std::span<const std::string_view> tokens);

// Scores canonical token text:
//  1. whole text matches class_def or method_def: the structure value plus
//     the values of the items of its brace body. Inside a class, items
//     matching method_def score recursively and items matching var_decl
//     score their value; inside a method only var_decl items score.
//  2. otherwise, whole text matches a fragment pattern: that pattern's value.
//  3. otherwise 0.
// Pure and reentrant.
class Classifier {
 public:
  explicit Classifier(PatternSet patterns);

  Classification Classify(std::string_view canonical) const;

  // Same total as Classify(canonical).total without collecting matches.
  std::uint32_t Score(std::string_view canonical) const;

  bool IsAdmissible(std::string_view canonical) const { return Score(canonical) >= 1; }

  const PatternSet& patterns() const { return patterns_; }

 private:
  std::uint32_t Evaluate(std::string_view canonical, std::vector<StructureMatch>* matched) const;
  std::uint32_t ScoreStructure(const StructurePattern& pattern,
                               std::span<const std::string_view> tokens, std::size_t offset,
                               std::vector<StructureMatch>* matched) const;

  PatternSet patterns_;
  const StructurePattern* Pattern(std::size_t index) const {
    return index == kNone ? nullptr : &patterns_.patterns()[index];
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  // Indices into patterns_, so copies stay self-contained.
  std::vector<std::size_t> structural_;
  std::vector<std::size_t> fragments_;
  std::size_t var_decl_ = kNone;
  std::size_t method_def_ = kNone;
};

}  // namespace combevo
