#include "combevo/alphabet.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "combevo/code_block.h"
#include "combevo/error.h"
#include "embedded_data.h"

namespace combevo {
namespace {

bool HasWhitespace(std::string_view text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Patterns reference these; a run without them cannot score anything.
constexpr std::string_view kRequiredTokens[] = {
    "boolean", "byte",    "char",      "double", "float", "int", "long",
    "short",   "class",   "void",      "public", "private", "protected", "NAME",
    "PLACEHOLDER", "{",   "}",         "(",      ")",     ";",
};

}  // namespace

std::string_view ToString(TokenKind kind) {
  switch (kind) {
    case TokenKind::kKeyword:
      return "keyword";
    case TokenKind::kSpecialChar:
      return "special_char";
    case TokenKind::kPlaceholderMarker:
      return "placeholder_marker";
    case TokenKind::kNameMarker:
      return "name_marker";
    case TokenKind::kMainMarker:
      return "main_marker";
  }
  return "unknown";
}

TokenKind ClassifyTokenText(std::string_view text) {
  if (text == kPlaceholderText) return TokenKind::kPlaceholderMarker;
  if (text == kNameText) return TokenKind::kNameMarker;
  if (text == kMainText) return TokenKind::kMainMarker;
  const auto first = static_cast<unsigned char>(text.front());
  if (std::isalpha(first) || first == '_' || first == '$') return TokenKind::kKeyword;
  return TokenKind::kSpecialChar;
}

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

Alphabet::Alphabet(std::vector<std::string> texts, std::uint32_t base_weight)
    : base_weight_(base_weight) {
  if (base_weight == 0) throw ValidationError("alphabet: base_weight must be positive");
  if (texts.size() > 0xFFFF) throw ValidationError("alphabet: more than 65535 tokens");
  tokens_.reserve(texts.size());
  bool have_placeholder = false;
  bool have_name = false;
  bool have_main = false;
  for (auto& text : texts) {
    if (text.empty()) throw ValidationError("alphabet: empty token");
    if (HasWhitespace(text)) {
      throw ValidationError("alphabet: token '" + text + "' contains whitespace");
    }
    const auto id = static_cast<TokenId>(tokens_.size());
    if (!index_.emplace(text, id).second) {
      throw ValidationError("alphabet: duplicate token '" + text + "'");
    }
    const TokenKind kind = ClassifyTokenText(text);
    switch (kind) {
      case TokenKind::kPlaceholderMarker:
        placeholder_ = id, have_placeholder = true;
        break;
      case TokenKind::kNameMarker:
        name_ = id, have_name = true;
        break;
      case TokenKind::kMainMarker:
        main_ = id, have_main = true;
        break;
      default:
        break;
    }
    tokens_.push_back({std::move(text), kind});
  }
  if (!have_placeholder) throw ValidationError("alphabet: missing marker PLACEHOLDER");
  if (!have_name) throw ValidationError("alphabet: missing marker NAME");
  if (!have_main) throw ValidationError("alphabet: missing marker main");
  std::string missing;
  for (std::string_view required : kRequiredTokens) {
    if (!index_.contains(std::string(required))) {
      if (!missing.empty()) missing += ' ';
      missing += required;
    }
  }
  if (!missing.empty()) throw ValidationError("alphabet: missing required tokens: " + missing);
  hash_ = Fnv1a64(Serialize());
}

Alphabet Alphabet::Parse(std::string_view text, std::string_view source) {
  std::vector<std::string> texts;
  std::uint32_t base_weight = 1;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!HasWhitespace(line)) {
      texts.emplace_back(line);
      continue;
    }
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || Trim(line.substr(0, eq)) != "base_weight") {
      throw ParseError(where + ": expected a single token or 'base_weight = N', got '" +
                       std::string(line) + "'");
    }
    const std::string_view number = Trim(line.substr(eq + 1));
    std::uint32_t value = 0;
    const auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc() || end != number.data() + number.size()) {
      throw ParseError(where + ": base_weight is not an unsigned integer");
    }
    base_weight = value;
  }
  return Alphabet(std::move(texts), base_weight);
}

Alphabet Alphabet::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read alphabet file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path.string());
}

Alphabet Alphabet::Default() { return Parse(embedded::kJavaAlphabet, "builtin:java"); }

Alphabet Alphabet::Minimal() { return Parse(embedded::kMinimalAlphabet, "builtin:java-minimal"); }

Alphabet Alphabet::Resolve(std::string_view name) {
  if (name.empty() || name == "builtin" || name == "default" || name == "java") return Default();
  if (name == "minimal" || name == "java-minimal") return Minimal();
  return Load(std::filesystem::path(name));
}

std::string Alphabet::Serialize() const {
  std::string out = "base_weight = " + std::to_string(base_weight_) + "\n";
  for (const auto& token : tokens_) {
    out += token.text;
    out += '\n';
  }
  return out;
}

void Alphabet::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << Serialize();
  if (!out) throw IoError("cannot write alphabet file " + path.string());
}

std::optional<TokenId> Alphabet::Find(std::string_view text) const {
  const auto it = index_.find(std::string(text));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<TokenId> Alphabet::Tokenize(std::string_view canonical) const {
  std::vector<TokenId> out;
  std::size_t start = 0;
  while (start <= canonical.size()) {
    std::size_t end = canonical.find(' ', start);
    if (end == std::string_view::npos) end = canonical.size();
    const std::string_view piece = canonical.substr(start, end - start);
    if (piece.empty()) {
      throw ValidationError("token text '" + std::string(canonical) +
                            "' is not single-space separated");
    }
    const auto id = Find(piece);
    if (!id) throw ValidationError("unknown token '" + std::string(piece) + "'");
    out.push_back(*id);
    start = end + 1;
  }
  return out;
}

void Alphabet::RenderInto(std::span<const TokenId> tokens, std::string& out) const {
  out.clear();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i != 0) out += ' ';
    out += tokens_[ToIndex(tokens[i])].text;
  }
}

std::string Alphabet::Render(std::span<const TokenId> tokens) const {
  std::string out;
  RenderInto(tokens, out);
  return out;
}

std::vector<CodeBlock> SeedBlocks(const Alphabet& alphabet) {
  std::vector<CodeBlock> seeds;
  seeds.reserve(alphabet.size());
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    CodeBlock block;
    block.id = static_cast<BlockId>(i);
    block.tokens = {static_cast<TokenId>(i)};
    block.value = 0;
    block.weight = alphabet.base_weight();
    seeds.push_back(std::move(block));
  }
  return seeds;
}

}  // namespace combevo
