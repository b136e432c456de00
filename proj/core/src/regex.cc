#include "combevo/regex.h"

#include <cctype>
#include <memory>
#include <string>
#include <utility>

#include "combevo/error.h"

namespace combevo {
namespace {

constexpr int kUnbounded = -1;
constexpr int kMaxCountedRepeat = 1000;

struct Node {
  enum class Kind { kEmpty, kByte, kAny, kClass, kConcat, kAlt, kRepeat, kLook, kBol, kEol };
  Kind kind = Kind::kEmpty;
  unsigned char byte = 0;
  std::size_t class_index = 0;
  int min = 0;
  int max = 0;
  bool greedy = true;
  bool negative = false;
  std::vector<std::unique_ptr<Node>> children;
};

using NodePtr = std::unique_ptr<Node>;

NodePtr MakeNode(Node::Kind kind) {
  auto node = std::make_unique<Node>();
  node->kind = kind;
  return node;
}

bool Nullable(const Node& node) {
  switch (node.kind) {
    case Node::Kind::kEmpty:
    case Node::Kind::kLook:
    case Node::Kind::kBol:
    case Node::Kind::kEol:
      return true;
    case Node::Kind::kByte:
    case Node::Kind::kAny:
    case Node::Kind::kClass:
      return false;
    case Node::Kind::kConcat:
      for (const auto& child : node.children) {
        if (!Nullable(*child)) return false;
      }
      return true;
    case Node::Kind::kAlt:
      for (const auto& child : node.children) {
        if (Nullable(*child)) return true;
      }
      return false;
    case Node::Kind::kRepeat:
      return node.min == 0 || Nullable(*node.children.front());
  }
  return true;
}

class Parser {
 public:
  Parser(std::string_view pattern, std::vector<std::bitset<256>>& classes)
      : pattern_(pattern), classes_(classes) {}

  NodePtr ParseAll() {
    NodePtr root = ParseAlternation();
    if (!AtEnd()) {
      // Only a stray ')' can stop the top-level alternation early.
      Fail("unbalanced parenthesis: unexpected ')'", pos_);
    }
    return root;
  }

 private:
  [[noreturn]] void Fail(const std::string& what, std::size_t at) const {
    throw PatternError(what + " at position " + std::to_string(at), at);
  }

  bool AtEnd() const { return pos_ >= pattern_.size(); }
  char Peek() const { return pattern_[pos_]; }

  NodePtr ParseAlternation() {
    auto first = ParseConcat();
    if (AtEnd() || Peek() != '|') return first;
    auto alt = MakeNode(Node::Kind::kAlt);
    alt->children.push_back(std::move(first));
    while (!AtEnd() && Peek() == '|') {
      ++pos_;
      alt->children.push_back(ParseConcat());
    }
    return alt;
  }

  NodePtr ParseConcat() {
    auto concat = MakeNode(Node::Kind::kConcat);
    while (!AtEnd() && Peek() != '|' && Peek() != ')') {
      concat->children.push_back(ParseRepeat());
    }
    if (concat->children.size() == 1) return std::move(concat->children.front());
    return concat;
  }

  NodePtr ParseRepeat() {
    const std::size_t atom_start = pos_;
    NodePtr atom = ParseAtom();
    // Bare anchors and lookaheads cannot be quantified; a group around one can.
    const bool bare_assertion = pattern_[atom_start] != '(' ||
                                (pattern_[atom_start + 1] == '?' && pattern_[atom_start + 2] != ':');
    while (!AtEnd()) {
      int min = 0;
      int max = 0;
      const std::size_t quant_pos = pos_;
      const char c = Peek();
      if (c == '*') {
        min = 0, max = kUnbounded, ++pos_;
      } else if (c == '+') {
        min = 1, max = kUnbounded, ++pos_;
      } else if (c == '?') {
        min = 0, max = 1, ++pos_;
      } else if (c == '{' && LooksLikeCount()) {
        ParseCount(min, max);
      } else {
        break;
      }
      if (bare_assertion && (atom->kind == Node::Kind::kBol || atom->kind == Node::Kind::kEol ||
                             atom->kind == Node::Kind::kLook)) {
        Fail("nothing to repeat", quant_pos);
      }
      auto repeat = MakeNode(Node::Kind::kRepeat);
      repeat->min = min;
      repeat->max = max;
      if (!AtEnd() && Peek() == '?') {
        repeat->greedy = false;
        ++pos_;
      }
      repeat->children.push_back(std::move(atom));
      atom = std::move(repeat);
    }
    return atom;
  }

  bool LooksLikeCount() const {
    std::size_t i = pos_ + 1;
    if (i >= pattern_.size() || !std::isdigit(static_cast<unsigned char>(pattern_[i]))) {
      return false;
    }
    while (i < pattern_.size() &&
           (std::isdigit(static_cast<unsigned char>(pattern_[i])) || pattern_[i] == ',')) {
      ++i;
    }
    return i < pattern_.size() && pattern_[i] == '}';
  }

  int ParseNumber() {
    const std::size_t start = pos_;
    long value = 0;
    while (!AtEnd() && std::isdigit(static_cast<unsigned char>(Peek()))) {
      value = value * 10 + (Peek() - '0');
      if (value > kMaxCountedRepeat) Fail("repetition count too large", start);
      ++pos_;
    }
    return static_cast<int>(value);
  }

  void ParseCount(int& min, int& max) {
    const std::size_t start = pos_;
    ++pos_;  // '{'
    min = ParseNumber();
    max = min;
    if (Peek() == ',') {
      ++pos_;
      max = Peek() == '}' ? kUnbounded : ParseNumber();
    }
    if (Peek() != '}') Fail("malformed repetition count", start);
    ++pos_;
    if (max != kUnbounded && max < min) Fail("repetition range out of order", start);
  }

  NodePtr ParseAtom() {
    const std::size_t start = pos_;
    const char c = Peek();
    switch (c) {
      case '(':
        return ParseGroup();
      case '[':
        return ParseClass();
      case '.':
        ++pos_;
        return MakeNode(Node::Kind::kAny);
      case '^':
        ++pos_;
        return MakeNode(Node::Kind::kBol);
      case '$':
        ++pos_;
        return MakeNode(Node::Kind::kEol);
      case '\\':
        return ParseEscape();
      case '*':
      case '+':
      case '?':
        Fail("nothing to repeat", start);
      default:
        ++pos_;
        return ByteNode(static_cast<unsigned char>(c));
    }
  }

  NodePtr ByteNode(unsigned char b) {
    auto node = MakeNode(Node::Kind::kByte);
    node->byte = b;
    return node;
  }

  NodePtr ClassNode(const std::bitset<256>& set) {
    auto node = MakeNode(Node::Kind::kClass);
    node->class_index = classes_.size();
    classes_.push_back(set);
    return node;
  }

  NodePtr ParseGroup() {
    const std::size_t open = pos_;
    ++pos_;  // '('
    bool look = false;
    bool negative = false;
    if (!AtEnd() && Peek() == '?') {
      if (pos_ + 1 >= pattern_.size()) Fail("unterminated group", open);
      const char kind = pattern_[pos_ + 1];
      if (kind == ':') {
        pos_ += 2;
      } else if (kind == '=' || kind == '!') {
        look = true;
        negative = kind == '!';
        pos_ += 2;
      } else {
        Fail("unsupported group syntax", pos_);
      }
    }
    NodePtr body = ParseAlternation();
    if (AtEnd() || Peek() != ')') Fail("unbalanced parenthesis: missing ')'", open);
    ++pos_;
    if (!look) return body;
    auto node = MakeNode(Node::Kind::kLook);
    node->negative = negative;
    node->children.push_back(std::move(body));
    return node;
  }

  static std::bitset<256> Shorthand(char c) {
    std::bitset<256> set;
    switch (c) {
      case 'd':
      case 'D':
        for (int b = '0'; b <= '9'; ++b) set.set(b);
        break;
      case 'w':
      case 'W':
        for (int b = 0; b < 256; ++b) {
          if (std::isalnum(b) || b == '_') set.set(b);
        }
        break;
      case 's':
      case 'S':
        for (char b : {' ', '\t', '\n', '\r', '\f', '\v'}) set.set(static_cast<unsigned char>(b));
        break;
      default:
        break;
    }
    if (std::isupper(static_cast<unsigned char>(c))) set.flip();
    return set;
  }

  static bool IsShorthand(char c) { return std::string_view("dDwWsS").find(c) != std::string_view::npos; }

  static unsigned char EscapedByte(char c) {
    switch (c) {
      case 't':
        return '\t';
      case 'n':
        return '\n';
      case 'r':
        return '\r';
      case 'f':
        return '\f';
      case 'v':
        return '\v';
      case '0':
        return '\0';
      default:
        return static_cast<unsigned char>(c);
    }
  }

  NodePtr ParseEscape() {
    const std::size_t start = pos_;
    ++pos_;
    if (AtEnd()) Fail("trailing backslash", start);
    const char c = Peek();
    ++pos_;
    if (IsShorthand(c)) return ClassNode(Shorthand(c));
    if (std::isalnum(static_cast<unsigned char>(c)) &&
        std::string_view("tnrfv0").find(c) == std::string_view::npos) {
      Fail(std::string("unsupported escape \\") + c, start);
    }
    return ByteNode(EscapedByte(c));
  }

  NodePtr ParseClass() {
    const std::size_t open = pos_;
    ++pos_;  // '['
    bool negate = false;
    if (!AtEnd() && Peek() == '^') {
      negate = true;
      ++pos_;
    }
    std::bitset<256> set;
    bool first = true;
    while (true) {
      if (AtEnd()) Fail("unterminated character class", open);
      char c = Peek();
      if (c == ']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      unsigned char low = 0;
      if (c == '\\') {
        ++pos_;
        if (AtEnd()) Fail("unterminated character class", open);
        const char e = Peek();
        ++pos_;
        if (IsShorthand(e)) {
          set |= Shorthand(e);
          continue;
        }
        low = EscapedByte(e);
      } else {
        low = static_cast<unsigned char>(c);
        ++pos_;
      }
      unsigned char high = low;
      if (pos_ + 1 < pattern_.size() && Peek() == '-' && pattern_[pos_ + 1] != ']') {
        const std::size_t range_pos = pos_;
        ++pos_;
        char h = Peek();
        ++pos_;
        if (h == '\\') {
          if (AtEnd()) Fail("unterminated character class", open);
          h = static_cast<char>(EscapedByte(Peek()));
          ++pos_;
        }
        high = static_cast<unsigned char>(h);
        if (high < low) Fail("character range out of order", range_pos);
      }
      for (int b = low; b <= high; ++b) set.set(b);
    }
    if (negate) set.flip();
    return ClassNode(set);
  }

  std::string_view pattern_;
  std::vector<std::bitset<256>>& classes_;
  std::size_t pos_ = 0;
};

class Compiler {
 public:
  explicit Compiler(std::vector<Regex::Inst>& program) : program_(program) {}

  std::uint32_t registers() const { return registers_; }

  void Emit(const Node& node) {
    using Op = Regex::Op;
    switch (node.kind) {
      case Node::Kind::kEmpty:
        break;
      case Node::Kind::kByte:
        program_.push_back({Op::kByte, false, node.byte});
        break;
      case Node::Kind::kAny:
        program_.push_back({Op::kAny});
        break;
      case Node::Kind::kClass:
        program_.push_back({Op::kClass, false, 0, static_cast<std::uint32_t>(node.class_index)});
        break;
      case Node::Kind::kBol:
        program_.push_back({Op::kBol});
        break;
      case Node::Kind::kEol:
        program_.push_back({Op::kEol});
        break;
      case Node::Kind::kConcat:
        for (const auto& child : node.children) Emit(*child);
        break;
      case Node::Kind::kAlt:
        EmitAlternation(node);
        break;
      case Node::Kind::kRepeat:
        EmitRepeat(node);
        break;
      case Node::Kind::kLook: {
        const std::uint32_t look = Here();
        program_.push_back({Op::kLookahead, node.negative, 0, look + 1});
        Emit(*node.children.front());
        program_.push_back({Op::kMatch});
        program_[look].y = Here();
        break;
      }
    }
  }

 private:
  std::uint32_t Here() const { return static_cast<std::uint32_t>(program_.size()); }

  void EmitAlternation(const Node& node) {
    using Op = Regex::Op;
    std::vector<std::uint32_t> exits;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const bool last = i + 1 == node.children.size();
      std::uint32_t split = 0;
      if (!last) {
        split = Here();
        program_.push_back({Op::kSplit, false, 0, split + 1});
      }
      Emit(*node.children[i]);
      if (!last) {
        exits.push_back(Here());
        program_.push_back({Op::kJmp});
        program_[split].y = Here();
      }
    }
    for (std::uint32_t jump : exits) program_[jump].x = Here();
  }

  // Greedy splits try the body first, lazy ones the exit.
  void PatchSplit(std::uint32_t split, std::uint32_t body, std::uint32_t exit, bool greedy) {
    program_[split].x = greedy ? body : exit;
    program_[split].y = greedy ? exit : body;
  }

  void EmitRepeat(const Node& node) {
    using Op = Regex::Op;
    const Node& body = *node.children.front();
    for (int i = 0; i < node.min; ++i) Emit(body);
    if (node.max == kUnbounded) {
      const bool guard = Nullable(body);
      const std::uint32_t reg = guard ? registers_++ : 0;
      const std::uint32_t loop = Here();
      program_.push_back({Op::kSplit});
      const std::uint32_t body_start = Here();
      if (guard) program_.push_back({Op::kMark, false, 0, reg});
      Emit(body);
      if (guard) program_.push_back({Op::kProgress, false, 0, reg});
      program_.push_back({Op::kJmp, false, 0, loop});
      PatchSplit(loop, body_start, Here(), node.greedy);
      return;
    }
    std::vector<std::uint32_t> splits;
    for (int i = node.min; i < node.max; ++i) {
      splits.push_back(Here());
      program_.push_back({Op::kSplit});
      Emit(body);
    }
    const std::uint32_t exit = Here();
    for (std::uint32_t split : splits) PatchSplit(split, split + 1, exit, node.greedy);
  }

  std::vector<Regex::Inst>& program_;
  std::uint32_t registers_ = 0;
};

struct Frame {
  std::uint32_t pc;
  std::uint32_t pos;
  // When restore is set this frame resets register `pc` to `pos`.
  bool restore;
};

struct Scratch {
  std::vector<Frame> stack;
  std::vector<std::uint32_t> registers;
};

Scratch& ThreadScratch() {
  thread_local Scratch scratch;
  return scratch;
}

}  // namespace

Regex Regex::Compile(std::string_view pattern) {
  Regex regex;
  regex.source_ = std::string(pattern);
  Parser parser(pattern, regex.classes_);
  NodePtr root = parser.ParseAll();
  Compiler compiler(regex.program_);
  compiler.Emit(*root);
  regex.program_.push_back({Op::kMatch});
  regex.registers_ = compiler.registers();
  regex.ComputeFirstBytes();
  return regex;
}

void Regex::ComputeFirstBytes() {
  // Epsilon closure from pc 0; lookaheads are skipped, which only widens
  // the set.
  std::vector<bool> seen(program_.size(), false);
  std::vector<std::uint32_t> work{0};
  while (!work.empty()) {
    const std::uint32_t pc = work.back();
    work.pop_back();
    if (pc >= program_.size() || seen[pc]) continue;
    seen[pc] = true;
    const Inst& inst = program_[pc];
    switch (inst.op) {
      case Op::kByte:
        first_bytes_.set(inst.byte);
        break;
      case Op::kAny:
        first_bytes_.set();
        break;
      case Op::kClass:
        first_bytes_ |= classes_[inst.x];
        break;
      case Op::kSplit:
        work.push_back(inst.x);
        work.push_back(inst.y);
        break;
      case Op::kJmp:
        work.push_back(inst.x);
        break;
      case Op::kLookahead:
        work.push_back(inst.y);
        break;
      case Op::kBol:
      case Op::kEol:
      case Op::kMark:
      case Op::kProgress:
        work.push_back(pc + 1);
        break;
      case Op::kMatch:
        can_match_empty_ = true;
        break;
    }
  }
}

bool Regex::Run(std::uint32_t start_pc, std::string_view text, std::size_t start_pos,
                bool full) const {
  Scratch& scratch = ThreadScratch();
  std::vector<Frame>& stack = scratch.stack;
  std::vector<std::uint32_t>& regs = scratch.registers;
  if (regs.size() < registers_) regs.resize(registers_);
  const std::size_t base = stack.size();
  const auto size = static_cast<std::uint32_t>(text.size());
  const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());

  std::uint32_t pc = start_pc;
  auto pos = static_cast<std::uint32_t>(start_pos);
  bool matched = false;

  while (true) {
    bool fail = false;
    const Inst& inst = program_[pc];
    switch (inst.op) {
      case Op::kByte:
        if (pos < size && bytes[pos] == inst.byte) {
          ++pos, ++pc;
        } else {
          fail = true;
        }
        break;
      case Op::kAny:
        if (pos < size) {
          ++pos, ++pc;
        } else {
          fail = true;
        }
        break;
      case Op::kClass:
        if (pos < size && classes_[inst.x][bytes[pos]]) {
          ++pos, ++pc;
        } else {
          fail = true;
        }
        break;
      case Op::kSplit:
        stack.push_back({inst.y, pos, false});
        pc = inst.x;
        break;
      case Op::kJmp:
        pc = inst.x;
        break;
      case Op::kBol:
        if (pos == 0) {
          ++pc;
        } else {
          fail = true;
        }
        break;
      case Op::kEol:
        if (pos == size) {
          ++pc;
        } else {
          fail = true;
        }
        break;
      case Op::kLookahead: {
        const bool found = Run(inst.x, text, pos, false);
        if (found != inst.flag) {
          pc = inst.y;
        } else {
          fail = true;
        }
        break;
      }
      case Op::kMark:
        stack.push_back({inst.x, regs[inst.x], true});
        regs[inst.x] = pos;
        ++pc;
        break;
      case Op::kProgress:
        if (pos != regs[inst.x]) {
          ++pc;
        } else {
          fail = true;
        }
        break;
      case Op::kMatch:
        if (!full || pos == size) {
          matched = true;
        } else {
          fail = true;
        }
        break;
    }
    if (matched) break;
    if (fail) {
      bool resumed = false;
      while (stack.size() > base) {
        const Frame frame = stack.back();
        stack.pop_back();
        if (frame.restore) {
          regs[frame.pc] = frame.pos;
          continue;
        }
        pc = frame.pc;
        pos = frame.pos;
        resumed = true;
        break;
      }
      if (!resumed) break;
    }
  }
  // Unwind remaining frames, restoring registers for the enclosing run.
  while (stack.size() > base) {
    const Frame frame = stack.back();
    stack.pop_back();
    if (frame.restore) regs[frame.pc] = frame.pos;
  }
  return matched;
}

bool Regex::FullMatch(std::string_view text) const {
  if (text.empty()) {
    if (!can_match_empty_) return false;
  } else if (!first_bytes_[static_cast<unsigned char>(text.front())]) {
    return false;
  }
  return Run(0, text, 0, true);
}

bool Regex::Search(std::string_view text) const {
  for (std::size_t start = 0; start <= text.size(); ++start) {
    if (start < text.size() && !first_bytes_[static_cast<unsigned char>(text[start])] &&
        !can_match_empty_) {
      continue;
    }
    if (start == text.size() && !can_match_empty_) break;
    if (Run(0, text, start, false)) return true;
  }
  return false;
}

}  // namespace combevo
