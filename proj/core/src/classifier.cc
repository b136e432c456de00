#include "combevo/classifier.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "combevo/alphabet.h"
#include "combevo/error.h"
#include "embedded_data.h"

namespace combevo {
namespace {

constexpr std::pair<StructureKind, std::string_view> kKindNames[] = {
    {StructureKind::kVarDecl, "var_decl"},
    {StructureKind::kBracketPlaceholder, "bracket_placeholder"},
    {StructureKind::kClassHeader, "class_header"},
    {StructureKind::kMethodHeader, "method_header"},
    {StructureKind::kClassDef, "class_def"},
    {StructureKind::kMethodDef, "method_def"},
};

std::vector<std::string_view> SplitTokens(std::string_view canonical) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (start < canonical.size()) {
    std::size_t end = canonical.find(' ', start);
    if (end == std::string_view::npos) end = canonical.size();
    tokens.push_back(canonical.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

std::string Join(std::span<const std::string_view> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i != 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

struct Item {
  std::size_t first;
  std::size_t count;
};

// Splits the tokens between an opening brace and its partner into top-level
// items: a lone PLACEHOLDER, a run ending in ';' at depth 0, or a run ending
// with the '}' that returns to depth 0.
std::vector<Item> BodyItems(std::span<const std::string_view> body) {
  std::vector<Item> items;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const std::string_view token = body[i];
    bool closes = false;
    if (token == "{") {
      ++depth;
    } else if (token == "}") {
      closes = --depth == 0;
    } else if (depth == 0) {
      closes = token == ";" || (token == kPlaceholderText && i == start);
    }
    if (closes) {
      items.push_back({start, i + 1 - start});
      start = i + 1;
    }
  }
  if (start < body.size()) items.push_back({start, body.size() - start});
  return items;
}

}  // namespace

std::string_view ToString(StructureKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<StructureKind> ParseStructureKind(std::string_view text) {
  for (const auto& [kind, name] : kKindNames) {
    if (name == text) return kind;
  }
  return std::nullopt;
}

std::string Canonicalize(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i != 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string Canonicalize(std::span<const std::string_view> tokens) { return Join(tokens); }

void PatternSet::Add(std::string name, StructureKind kind, std::uint32_t value,
                     std::string_view regex) {
  if (value == 0) throw ValidationError("pattern '" + name + "': value must be >= 1");
  std::optional<Regex> matcher;
  try {
    matcher = Regex::Compile(regex);
  } catch (const PatternError& e) {
    throw PatternError("pattern '" + name + "': " + e.what(), e.position());
  }
  patterns_.push_back({std::move(name), kind, value, std::move(*matcher)});
}

PatternSet PatternSet::Parse(std::string_view text, std::string_view source) {
  PatternSet set;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (int i = 0; i < 3; ++i) {
      const std::size_t tab = rest.find('\t');
      if (tab == std::string_view::npos) {
        throw ParseError(where + ": expected name<TAB>kind<TAB>value<TAB>regex");
      }
      fields.push_back(rest.substr(0, tab));
      rest.remove_prefix(tab + 1);
    }
    fields.push_back(rest);
    if (fields[0].empty()) throw ParseError(where + ": empty pattern name");
    const auto kind = ParseStructureKind(fields[1]);
    if (!kind) throw ParseError(where + ": unknown kind '" + std::string(fields[1]) + "'");
    std::uint32_t value = 0;
    const auto [end, ec] =
        std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), value);
    if (ec != std::errc() || end != fields[2].data() + fields[2].size() || value == 0) {
      throw ParseError(where + ": value must be a positive integer");
    }
    try {
      set.Add(std::string(fields[0]), *kind, value, fields[3]);
    } catch (const PatternError& e) {
      throw PatternError(where + ": " + e.what(), e.position());
    }
  }
  return set;
}

PatternSet PatternSet::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read pattern file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path.string());
}

PatternSet PatternSet::Builtin() { return Parse(embedded::kBuiltinPatterns, "builtin:patterns"); }

PatternSet PatternSet::Resolve(std::string_view name) {
  if (name.empty() || name == "builtin") return Builtin();
  return Load(std::filesystem::path(name));
}

std::string PatternSet::Dump() const {
  std::string out = "# name\tkind\tvalue\tregex\n";
  for (const auto& p : patterns_) {
    out += p.name + '\t' + std::string(ToString(p.kind)) + '\t' + std::to_string(p.value) + '\t' +
           p.matcher.source() + '\n';
  }
  return out;
}

const StructurePattern* PatternSet::Find(StructureKind kind) const {
  for (const auto& p : patterns_) {
    if (p.kind == kind) return &p;
  }
  return nullptr;
}

std::uint64_t PatternSet::Hash() const { return Fnv1a64(Dump()); }

Classifier::Classifier(PatternSet patterns) : patterns_(std::move(patterns)) {
  const auto all = patterns_.patterns();
  for (std::size_t i = 0; i < all.size(); ++i) {
    (IsStructural(all[i].kind) ? structural_ : fragments_).push_back(i);
    if (all[i].kind == StructureKind::kVarDecl && var_decl_ == kNone) var_decl_ = i;
    if (all[i].kind == StructureKind::kMethodDef && method_def_ == kNone) method_def_ = i;
  }
}

Classification Classifier::Classify(std::string_view canonical) const {
  Classification result;
  result.total = Evaluate(canonical, &result.matched);
  return result;
}

std::uint32_t Classifier::Score(std::string_view canonical) const {
  return Evaluate(canonical, nullptr);
}

std::uint32_t Classifier::Evaluate(std::string_view canonical,
                                   std::vector<StructureMatch>* matched) const {
  for (std::size_t index : structural_) {
    const StructurePattern* pattern = Pattern(index);
    if (pattern->matcher.FullMatch(canonical)) {
      const auto tokens = SplitTokens(canonical);
      return ScoreStructure(*pattern, tokens, 0, matched);
    }
  }
  for (std::size_t index : fragments_) {
    const StructurePattern* pattern = Pattern(index);
    if (pattern->matcher.FullMatch(canonical)) {
      if (matched != nullptr) {
        matched->push_back({pattern->kind, 0, SplitTokens(canonical).size(), pattern->value});
      }
      return pattern->value;
    }
  }
  return 0;
}

std::uint32_t Classifier::ScoreStructure(const StructurePattern& pattern,
                                         std::span<const std::string_view> tokens,
                                         std::size_t offset,
                                         std::vector<StructureMatch>* matched) const {
  if (matched != nullptr) matched->push_back({pattern.kind, offset, tokens.size(), pattern.value});
  std::uint32_t total = pattern.value;

  std::size_t open = 0;
  while (open < tokens.size() && tokens[open] != "{") ++open;
  if (open == tokens.size()) return total;
  std::size_t close = open;
  for (int depth = 0; close < tokens.size(); ++close) {
    if (tokens[close] == "{") ++depth;
    if (tokens[close] == "}" && --depth == 0) break;
  }
  if (close == tokens.size()) return total;

  const auto body = tokens.subspan(open + 1, close - open - 1);
  const StructurePattern* method_def = Pattern(method_def_);
  const StructurePattern* var_decl = Pattern(var_decl_);
  const bool methods_allowed = pattern.kind == StructureKind::kClassDef && method_def != nullptr;
  for (const Item& item : BodyItems(body)) {
    const auto item_tokens = body.subspan(item.first, item.count);
    const std::size_t item_offset = offset + open + 1 + item.first;
    if (item_tokens.size() == 1 && item_tokens.front() == kPlaceholderText) continue;
    const std::string text = Join(item_tokens);
    if (methods_allowed && method_def->matcher.FullMatch(text)) {
      total += ScoreStructure(*method_def, item_tokens, item_offset, matched);
    } else if (var_decl != nullptr && var_decl->matcher.FullMatch(text)) {
      total += var_decl->value;
      if (matched != nullptr) {
        matched->push_back({var_decl->kind, item_offset, item_tokens.size(), var_decl->value});
      }
    }
  }
  return total;
}

}  // namespace combevo
