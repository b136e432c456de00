#pragma once

#include <bitset>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace combevo {

// Small backtracking regular-expression engine for the classifier's
// structure patterns. Byte oriented; supports literals, '.', escapes
// (\d \w \s \D \W \S \t \n \r and escaped metacharacters), bracket classes
// with ranges and negation, groups '(...)' and '(?:...)', lookahead
// '(?=...)' and '(?!...)', alternation, the quantifiers ? * + {m} {m,}
// {m,n} with optional lazy '?', and the anchors ^ and $.
//
// Loops over bodies that can match the empty string are guarded against
// spinning, so any pattern terminates.
class Regex {
 public:
  // Throws PatternError with the byte offset of the problem.
  static Regex Compile(std::string_view pattern);

  // Whole-string match (Java's Matcher.matches / std::regex_match).
  bool FullMatch(std::string_view text) const;

  // Match starting anywhere (std::regex_search).
  bool Search(std::string_view text) const;

  const std::string& source() const { return source_; }
  std::size_t program_size() const { return program_.size(); }

  enum class Op : std::uint8_t {
    kByte,
    kAny,
    kClass,
    kSplit,      // try x, then y
    kJmp,
    kBol,
    kEol,
    kLookahead,  // sub-program at x, continue at y; flag = negative
    kMark,       // register x := pos
    kProgress,   // fail if pos == register x
    kMatch,
  };

  struct Inst {
    Op op;
    bool flag = false;
    unsigned char byte = 0;
    std::uint32_t x = 0;
    std::uint32_t y = 0;
  };

 private:
  Regex() = default;
  bool Run(std::uint32_t pc, std::string_view text, std::size_t pos, bool full) const;
  void ComputeFirstBytes();

  std::string source_;
  std::vector<Inst> program_;
  std::vector<std::bitset<256>> classes_;
  std::uint32_t registers_ = 0;
  std::bitset<256> first_bytes_;
  bool can_match_empty_ = false;
  bool anchored_start_ = false;
};

}  // namespace combevo
