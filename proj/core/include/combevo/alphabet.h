#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace combevo {

enum class TokenKind : std::uint8_t {
  kKeyword,
  kSpecialChar,
  kPlaceholderMarker,
  kNameMarker,
  kMainMarker,
};

std::string_view ToString(TokenKind kind);

// Index of a token inside its Alphabet.
enum class TokenId : std::uint16_t {};

constexpr std::uint16_t ToIndex(TokenId id) {
  return static_cast<std::uint16_t>(id);
}

inline constexpr std::string_view kPlaceholderText = "PLACEHOLDER";
inline constexpr std::string_view kNameText = "NAME";
inline constexpr std::string_view kMainText = "main";

struct Token {
  std::string text;
  TokenKind kind;

  friend bool operator==(const Token&, const Token&) = default;
};

// Derives the kind of a token from its text: the three marker spellings
// map to markers, text starting with a letter, '_' or '$' is a keyword and
// anything else is a special character.
TokenKind ClassifyTokenText(std::string_view text);

// The seed vocabulary of a run. Immutable once constructed.
//
// File format: UTF-8 text, one token per line. '#' starts a comment line,
// blank lines are ignored, and surrounding whitespace is trimmed. The only
// directive is `base_weight = N` (the line contains whitespace, so it can
// never be mistaken for a token).
class Alphabet {
 public:
  // Validates and takes ownership of the token list. Throws ValidationError.
  explicit Alphabet(std::vector<std::string> texts, std::uint32_t base_weight = 1);

  // Throws ParseError on malformed text and ValidationError on invariant
  // violations. `source` names the input in messages.
  static Alphabet Parse(std::string_view text, std::string_view source = "<alphabet>");

  // Throws IoError if the file cannot be read, otherwise as Parse.
  static Alphabet Load(const std::filesystem::path& path);

  // Full Java SE reserved-word list plus special characters and markers.
  // Identical to data/alphabets/java.txt.
  static Alphabet Default();

  // The smallest alphabet covering every token the builtin classifier
  // patterns reference plus the example tokens String, for, '&' and '='.
  // Identical to data/alphabets/java-minimal.txt.
  static Alphabet Minimal();

  // Resolves "builtin"/"default", "minimal", or a file path.
  static Alphabet Resolve(std::string_view name);

  std::string Serialize() const;
  void Save(const std::filesystem::path& path) const;

  std::span<const Token> tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  std::uint32_t base_weight() const { return base_weight_; }

  const Token& token(TokenId id) const { return tokens_[ToIndex(id)]; }
  const std::string& text(TokenId id) const { return tokens_[ToIndex(id)].text; }
  std::optional<TokenId> Find(std::string_view text) const;

  TokenId placeholder() const { return placeholder_; }
  TokenId name() const { return name_; }
  TokenId main() const { return main_; }

  // FNV-1a 64 over the serialized form; used to refuse restoring a
  // snapshot against a different vocabulary.
  std::uint64_t Hash() const { return hash_; }

  // Splits canonical text on single spaces and maps every piece to its id.
  // Throws ValidationError on unknown tokens or empty input.
  std::vector<TokenId> Tokenize(std::string_view canonical) const;

  // Joins token texts with single spaces.
  std::string Render(std::span<const TokenId> tokens) const;
  void RenderInto(std::span<const TokenId> tokens, std::string& out) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.tokens_ == b.tokens_ && a.base_weight_ == b.base_weight_;
  }

 private:
  std::vector<Token> tokens_;
  std::uint32_t base_weight_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId placeholder_{};
  TokenId name_{};
  TokenId main_{};
  std::uint64_t hash_ = 0;
};

// FNV-1a 64-bit hash.
std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

}  // namespace combevo
