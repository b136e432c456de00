#include "combevo/regex.h"

#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <string>

#include "combevo/error.h"

namespace combevo {
namespace {

TEST(RegexTest, Literals) {
  const Regex re = Regex::Compile("abc");
  EXPECT_TRUE(re.FullMatch("abc"));
  EXPECT_FALSE(re.FullMatch("abcd"));
  EXPECT_FALSE(re.FullMatch("ab"));
  EXPECT_TRUE(re.Search("xxabcxx"));
  EXPECT_FALSE(re.Search("xxabxcx"));
}

TEST(RegexTest, Anchors) {
  EXPECT_TRUE(Regex::Compile("^ab$").FullMatch("ab"));
  EXPECT_FALSE(Regex::Compile("^b").Search("ab"));
  EXPECT_TRUE(Regex::Compile("b$").Search("ab"));
  EXPECT_FALSE(Regex::Compile("a$").Search("ab"));
}

TEST(RegexTest, ClassesAndEscapes) {
  const Regex re = Regex::Compile("[a-c]+\\d\\s[^x]\\.");
  EXPECT_TRUE(re.FullMatch("abca7 y."));
  EXPECT_FALSE(re.FullMatch("abca7 x."));
  EXPECT_FALSE(re.FullMatch("abca7 yz"));
  EXPECT_TRUE(Regex::Compile("\\{ PLACEHOLDER \\}").FullMatch("{ PLACEHOLDER }"));
  EXPECT_TRUE(Regex::Compile("\\w+").FullMatch("a_Z9"));
  EXPECT_FALSE(Regex::Compile("\\W").FullMatch("a"));
}

TEST(RegexTest, AlternationAndGroups) {
  const Regex re = Regex::Compile("(protected|private|public) class NAME");
  EXPECT_TRUE(re.FullMatch("public class NAME"));
  EXPECT_TRUE(re.FullMatch("private class NAME"));
  EXPECT_FALSE(re.FullMatch("static class NAME"));
  EXPECT_TRUE(Regex::Compile("(?:ab)*c").FullMatch("ababc"));
  EXPECT_FALSE(Regex::Compile("(?:ab)*c").FullMatch("abac"));
}

TEST(RegexTest, Counted) {
  const Regex re = Regex::Compile("a{2,3}");
  EXPECT_FALSE(re.FullMatch("a"));
  EXPECT_TRUE(re.FullMatch("aa"));
  EXPECT_TRUE(re.FullMatch("aaa"));
  EXPECT_FALSE(re.FullMatch("aaaa"));
  EXPECT_TRUE(Regex::Compile("a{2}").FullMatch("aa"));
  EXPECT_TRUE(Regex::Compile("a{2,}").FullMatch("aaaaa"));
  EXPECT_TRUE(Regex::Compile("a{,2}").FullMatch("a{,2}"));
}

TEST(RegexTest, Lookahead) {
  const Regex re = Regex::Compile("(PH(?! PH) ?)+");
  EXPECT_TRUE(re.FullMatch("PH"));
  EXPECT_FALSE(re.FullMatch("PH PH"));
  EXPECT_TRUE(Regex::Compile("a(?=b)b").FullMatch("ab"));
  EXPECT_FALSE(Regex::Compile("a(?=c)b").FullMatch("ab"));
}

TEST(RegexTest, NullableLoopsTerminate) {
  EXPECT_TRUE(Regex::Compile("(a*)*b").FullMatch("aaab"));
  EXPECT_FALSE(Regex::Compile("(a*)*b").FullMatch(std::string(18, 'a')));
  EXPECT_TRUE(Regex::Compile("(|a)+").FullMatch("aaa"));
  EXPECT_TRUE(Regex::Compile("(a?)*").FullMatch(""));
}

TEST(RegexTest, Lazy) {
  EXPECT_TRUE(Regex::Compile("a+?b").FullMatch("aaab"));
  EXPECT_TRUE(Regex::Compile("a??").FullMatch("a"));
}

void ExpectError(const char* pattern, std::size_t position) {
  try {
    Regex::Compile(pattern);
    ADD_FAILURE() << "compiled: " << pattern;
  } catch (const PatternError& e) {
    EXPECT_EQ(e.position(), position) << pattern << ": " << e.what();
  }
}

TEST(RegexTest, CompileErrors) {
  ExpectError("(abc", 0);
  ExpectError("abc)", 3);
  ExpectError("*a", 0);
  ExpectError("a|+", 2);
  ExpectError("[abc", 0);
  ExpectError("abc\\", 3);
  ExpectError("a{3,2}", 1);
  ExpectError("(?<x>a)", 1);
}

// Random patterns over a two-letter alphabet, checked against std::regex.
class RandomPattern {
 public:
  explicit RandomPattern(std::uint64_t seed) : gen_(seed) {}

  std::string Next() { return Alternation(3); }

 private:
  int Pick(int n) { return static_cast<int>(gen_() % static_cast<unsigned>(n)); }

  std::string Alternation(int depth) {
    std::string out = Sequence(depth);
    while (Pick(4) == 0) out += "|" + Sequence(depth);
    return out;
  }

  std::string Sequence(int depth) {
    std::string out;
    const int n = 1 + Pick(3);
    for (int i = 0; i < n; ++i) out += Quantified(depth);
    return out;
  }

  std::string Quantified(int depth) {
    std::string atom = Atom(depth);
    if (atom.starts_with("(?")) return atom;
    // Unbounded loops around groups make std::regex exponential; keep those
    // to single-character atoms.
    if (atom.starts_with("(")) {
      switch (Pick(4)) {
        case 0: return atom + "?";
        case 1: return atom + "{1,2}";
        case 2: return atom + "??";
        default: return atom;
      }
    }
    switch (Pick(9)) {
      case 0: return atom + "*";
      case 1: return atom + "+";
      case 2: return atom + "?";
      case 3: return atom + "{1,2}";
      case 4: return atom + "*?";
      default: return atom;
    }
  }

  std::string Atom(int depth) {
    const int choice = depth > 0 ? Pick(9) : Pick(5);
    switch (choice) {
      case 0: return "a";
      case 1: return "b";
      case 2: return ".";
      case 3: return "[ab]";
      case 4: return "[^a]";
      case 5:
      case 6: return "(" + Alternation(depth - 1) + ")";
      case 7: return "(?=" + Alternation(depth - 1) + ")";
      default: return "(?!" + Alternation(depth - 1) + ")";
    }
  }

  std::mt19937_64 gen_;
};

TEST(RegexTest, AgreesWithStdRegexOnRandomPatterns) {
  RandomPattern patterns(12345);
  std::mt19937_64 gen(99);
  for (int p = 0; p < 2000; ++p) {
    const std::string source = patterns.Next();
    SCOPED_TRACE(source);
    const Regex mine = Regex::Compile(source);
    const std::regex theirs(source, std::regex::ECMAScript);
    for (int t = 0; t < 40; ++t) {
      std::string text;
      const int len = static_cast<int>(gen() % 7);
      for (int i = 0; i < len; ++i) text += "ab"[gen() % 2];
      ASSERT_EQ(mine.FullMatch(text), std::regex_match(text, theirs))
          << "pattern " << source << " text '" << text << "'";
      ASSERT_EQ(mine.Search(text), std::regex_search(text, theirs))
          << "pattern " << source << " text '" << text << "'";
    }
  }
}

}  // namespace
}  // namespace combevo
