#include "combevo/alphabet.h"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "combevo/code_block.h"
#include "combevo/error.h"
#include "test_util.h"

namespace combevo {
namespace {

const std::filesystem::path kDataDir = COMBEVO_DATA_DIR;

// Smallest alphabet that satisfies every required-token rule.
std::vector<std::string> SmallestTokens() {
  return {"boolean", "byte", "char", "double", "float", "int", "long",
          "short",   "class", "void", "public", "private", "protected",
          "{",       "}",     "(",    ")",      ";",       "PLACEHOLDER",
          "NAME",    "main"};
}

TEST(AlphabetTest, DefaultFileHasCoreVocabulary) {
  const Alphabet alphabet = Alphabet::Load(kDataDir / "alphabets/java.txt");
  for (const char* text : {"int", "class", "PLACEHOLDER", "NAME", "main", "{", ";", "for",
                           "String", "&", "="}) {
    EXPECT_TRUE(alphabet.Find(text).has_value()) << text;
  }
  EXPECT_EQ(alphabet.base_weight(), 1u);
  EXPECT_EQ(alphabet.text(alphabet.placeholder()), "PLACEHOLDER");
  EXPECT_EQ(alphabet.text(alphabet.name()), "NAME");
  EXPECT_EQ(alphabet.text(alphabet.main()), "main");
}

TEST(AlphabetTest, EmbeddedDefaultMatchesShippedFile) {
  EXPECT_EQ(Alphabet::Default(), Alphabet::Load(kDataDir / "alphabets/java.txt"));
  EXPECT_EQ(Alphabet::Minimal(), Alphabet::Load(kDataDir / "alphabets/java-minimal.txt"));
  EXPECT_EQ(Alphabet::Resolve("builtin"), Alphabet::Default());
  EXPECT_EQ(Alphabet::Resolve("minimal"), Alphabet::Minimal());
}

TEST(AlphabetTest, TokenKinds) {
  const Alphabet alphabet = Alphabet::Default();
  EXPECT_EQ(alphabet.token(*alphabet.Find("int")).kind, TokenKind::kKeyword);
  EXPECT_EQ(alphabet.token(*alphabet.Find("{")).kind, TokenKind::kSpecialChar);
  EXPECT_EQ(alphabet.token(*alphabet.Find("PLACEHOLDER")).kind, TokenKind::kPlaceholderMarker);
  EXPECT_EQ(alphabet.token(*alphabet.Find("NAME")).kind, TokenKind::kNameMarker);
  EXPECT_EQ(alphabet.token(*alphabet.Find("main")).kind, TokenKind::kMainMarker);
}

TEST(AlphabetTest, MissingPlaceholderRejected) {
  auto tokens = SmallestTokens();
  std::erase(tokens, "PLACEHOLDER");
  EXPECT_THROW(Alphabet{tokens}, ValidationError);

  std::string text;
  for (const auto& t : tokens) text += t + "\n";
  EXPECT_THROW(Alphabet::Parse(text), ValidationError);
}

TEST(AlphabetTest, DuplicateRejected) {
  auto tokens = SmallestTokens();
  tokens.push_back("int");
  try {
    Alphabet alphabet{tokens};
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate token 'int'"), std::string::npos);
  }
}

TEST(AlphabetTest, MissingRequiredTokenRejected) {
  for (const char* required : {"short", "void", "protected", ";", "NAME", "main"}) {
    auto tokens = SmallestTokens();
    std::erase(tokens, required);
    EXPECT_THROW(Alphabet{tokens}, ValidationError) << required;
  }
  EXPECT_NO_THROW(Alphabet{SmallestTokens()});
}

TEST(AlphabetTest, MalformedLinesRejected) {
  std::string text;
  for (const auto& t : SmallestTokens()) text += t + "\n";
  EXPECT_THROW(Alphabet::Parse(text + "two words\n"), ParseError);
  EXPECT_THROW(Alphabet::Parse("base_weight = x\n" + text), ParseError);
  EXPECT_THROW(Alphabet::Parse("base_weight = 0\n" + text), ValidationError);
  EXPECT_EQ(Alphabet::Parse("# comment\n\nbase_weight = 3\n" + text).base_weight(), 3u);
}

TEST(AlphabetTest, MissingFileIsIoError) {
  EXPECT_THROW(Alphabet::Load("/nonexistent/alphabet.txt"), IoError);
}

TEST(AlphabetTest, SaveLoadRoundTrip) {
  const auto dir = testing::ScratchDir();
  for (const Alphabet& original : {Alphabet::Default(), Alphabet::Minimal(),
                                   Alphabet(SmallestTokens(), 5)}) {
    original.Save(dir / "a.txt");
    const Alphabet loaded = Alphabet::Load(dir / "a.txt");
    ASSERT_EQ(loaded.size(), original.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
      EXPECT_EQ(loaded.tokens()[i], original.tokens()[i]);
    }
    EXPECT_EQ(loaded.base_weight(), original.base_weight());
    EXPECT_EQ(loaded.Hash(), original.Hash());
  }
}

TEST(AlphabetTest, TokenizeAndRender) {
  const Alphabet alphabet = Alphabet::Default();
  const auto tokens = alphabet.Tokenize("public class NAME { PLACEHOLDER }");
  ASSERT_EQ(tokens.size(), 6u);
  EXPECT_EQ(tokens[4], alphabet.placeholder());
  EXPECT_EQ(alphabet.Render(tokens), "public class NAME { PLACEHOLDER }");
  EXPECT_THROW(alphabet.Tokenize("public  class"), ValidationError);
  EXPECT_THROW(alphabet.Tokenize("public klass"), ValidationError);
  EXPECT_THROW(alphabet.Tokenize(""), ValidationError);
}

TEST(SeedBlocksTest, OneBlockPerToken) {
  for (const Alphabet& alphabet : {Alphabet(SmallestTokens()), Alphabet::Minimal(),
                                   Alphabet::Default(), Alphabet(SmallestTokens(), 4)}) {
    const auto seeds = SeedBlocks(alphabet);
    ASSERT_EQ(seeds.size(), alphabet.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const CodeBlock& block = seeds[i];
      EXPECT_EQ(block.id, i);
      ASSERT_EQ(block.tokens.size(), 1u);
      EXPECT_EQ(ToIndex(block.tokens[0]), i);
      EXPECT_EQ(block.value, 0u);
      EXPECT_EQ(block.weight, alphabet.base_weight());
      EXPECT_TRUE(block.parents.empty());
      EXPECT_EQ(block.generation, 0u);
      EXPECT_TRUE(block.is_seed());
    }
  }
}

TEST(SeedBlocksTest, SpecificTokens) {
  const Alphabet alphabet = Alphabet::Default();
  const auto seeds = SeedBlocks(alphabet);
  const auto short_id = *alphabet.Find("short");
  EXPECT_EQ(alphabet.Render(seeds[ToIndex(short_id)].tokens), "short");
  const auto brace = *alphabet.Find("{");
  EXPECT_EQ(alphabet.Render(seeds[ToIndex(brace)].tokens), "{");
}

}  // namespace
}  // namespace combevo
