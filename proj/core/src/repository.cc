#include "combevo/repository.h"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "combevo/error.h"
#include "combevo/event_log.h"

namespace combevo {

Repository::Repository(Alphabet alphabet) : alphabet_(std::move(alphabet)) {
  for (auto& seed : SeedBlocks(alphabet_)) Append(std::move(seed));
  seed_count_ = blocks_.size();
}

Repository::Repository(Alphabet alphabet, std::vector<CodeBlock> blocks)
    : alphabet_(std::move(alphabet)) {
  blocks_.reserve(blocks.size());
  cumulative_.reserve(blocks.size());
  bool in_seed_prefix = true;
  for (auto& block : blocks) {
    const std::string where = "block " + std::to_string(block.id);
    if (block.id != blocks_.size()) throw ValidationError(where + ": ids are not dense");
    if (block.tokens.empty()) throw ValidationError(where + ": no tokens");
    for (TokenId t : block.tokens) {
      if (ToIndex(t) >= alphabet_.size()) throw ValidationError(where + ": token out of range");
    }
    if (block.weight == 0) throw ValidationError(where + ": zero weight");
    if (block.is_seed()) {
      if (!in_seed_prefix) throw ValidationError(where + ": seed after admitted blocks");
      if (block.generation != 0) throw ValidationError(where + ": seed with generation > 0");
    } else {
      in_seed_prefix = false;
      if (block.value == 0) throw ValidationError(where + ": admitted block with value 0");
      if (block.parents.size() < 2) throw ValidationError(where + ": fewer than two parents");
      std::uint32_t generation = 0;
      for (BlockId parent : block.parents) {
        if (parent >= block.id) throw ValidationError(where + ": parent id not older");
        generation = std::max(generation, blocks_[parent].generation);
      }
      if (block.generation != generation + 1) {
        throw ValidationError(where + ": generation inconsistent with parents");
      }
      if (block.weight != block.value) throw ValidationError(where + ": weight != value");
    }
    if (index_.contains(Key(block.tokens))) throw ValidationError(where + ": duplicate tokens");
    Append(std::move(block));
    if (in_seed_prefix) seed_count_ = blocks_.size();
  }
}

std::string Repository::Key(std::span<const TokenId> tokens) {
  std::string key(tokens.size() * sizeof(TokenId), '\0');
  std::memcpy(key.data(), tokens.data(), key.size());
  return key;
}

BlockId Repository::Append(CodeBlock block) {
  const auto id = static_cast<BlockId>(blocks_.size());
  block.id = id;
  total_weight_ += block.weight;
  cumulative_.push_back(total_weight_);
  max_value_ = std::max(max_value_, block.value);
  index_.emplace(Key(block.tokens), id);
  blocks_.push_back(std::move(block));
  return id;
}

std::optional<BlockId> Repository::AddSeed(std::vector<TokenId> tokens, std::uint32_t value,
                                           std::uint64_t weight) {
  if (seed_count_ != blocks_.size()) {
    throw std::logic_error("AddSeed after admitted blocks");
  }
  if (tokens.empty()) throw std::invalid_argument("AddSeed: empty token list");
  if (weight == 0) throw std::invalid_argument("AddSeed: zero weight");
  if (Contains(tokens)) return std::nullopt;
  CodeBlock block;
  block.tokens = std::move(tokens);
  block.value = value;
  block.weight = weight;
  const BlockId id = Append(std::move(block));
  seed_count_ = blocks_.size();
  return id;
}

std::optional<BlockId> Repository::Insert(std::span<const TokenId> tokens, std::uint32_t value,
                                          std::span<const BlockId> parents,
                                          std::uint64_t iteration) {
  if (value == 0) throw std::invalid_argument("Insert: value must be >= 1");
  if (tokens.empty()) throw std::invalid_argument("Insert: empty token list");
  if (parents.size() < 2) throw std::invalid_argument("Insert: fewer than two parents");
  std::uint32_t generation = 0;
  for (BlockId parent : parents) {
    if (parent >= blocks_.size()) {
      throw std::invalid_argument("Insert: unknown parent id " + std::to_string(parent));
    }
    generation = std::max(generation, blocks_[parent].generation);
  }
  std::string key = Key(tokens);
  if (index_.contains(key)) return std::nullopt;
  CodeBlock block;
  block.tokens.assign(tokens.begin(), tokens.end());
  block.value = value;
  block.weight = value;
  block.parents.assign(parents.begin(), parents.end());
  block.discovered_at = iteration;
  block.generation = generation + 1;
  return Append(std::move(block));
}

std::optional<BlockId> Repository::Find(std::span<const TokenId> tokens) const {
  const auto it = index_.find(Key(tokens));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

BlockId Repository::SampleOne(Rng& rng) const {
  if (blocks_.empty()) throw std::logic_error("sample from empty repository");
  const std::uint64_t r = rng.Below(total_weight_);
  // First block whose cumulative weight exceeds r.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  return static_cast<BlockId>(it - cumulative_.begin());
}

void Repository::Sample(Rng& rng, std::size_t k, std::vector<BlockId>& out) const {
  out.clear();
  for (std::size_t i = 0; i < k; ++i) out.push_back(SampleOne(rng));
}

std::vector<BlockId> Repository::Sample(Rng& rng, std::size_t k) const {
  std::vector<BlockId> out;
  Sample(rng, k, out);
  return out;
}

std::uint64_t Repository::RecomputeTotalWeight() const {
  std::uint64_t sum = 0;
  for (const auto& block : blocks_) sum += block.weight;
  return sum;
}

// Snapshot format, version 1. Line oriented, '\n' terminated:
//
//   combevo-snapshot 1
//   alphabet_hash <16 hex>
//   alphabet_tokens <n>
//   token <text>                        (n lines, alphabet order)
//   base_weight <w>
//   cursor <iteration> <seed> <position> <admitted> <discarded>   (optional)
//   total_weight <sum>
//   blocks <count>
//   fields id value weight generation discovered_at parents text
//   b <id> <value> <weight> <generation> <discovered_at> <p1,p2,..|-> <text>
//   end <fnv1a64 of every preceding byte, 16 hex>
namespace {

constexpr std::string_view kSnapshotMagic = "combevo-snapshot";
constexpr int kSnapshotVersion = 1;
constexpr std::string_view kFieldsLine =
    "fields id value weight generation discovered_at parents text";

class LineReader {
 public:
  LineReader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  // Returns the next line without its terminator; every line must end in
  // '\n', otherwise the file was cut short.
  std::string_view Next() {
    if (pos_ >= text_.size()) Corrupt("unexpected end of file");
    const std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) Corrupt("unterminated last line (truncated file)");
    const std::string_view line = text_.substr(pos_, end - pos_);
    line_start_ = pos_;
    pos_ = end + 1;
    ++line_no_;
    return line;
  }

  // Expects "<key> <rest>" and returns rest.
  std::string_view Field(std::string_view line, std::string_view key) {
    if (line.size() <= key.size() || line.substr(0, key.size()) != key || line[key.size()] != ' ') {
      Corrupt("expected '" + std::string(key) + "' record");
    }
    return line.substr(key.size() + 1);
  }

  std::uint64_t Number(std::string_view text) {
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
      Corrupt("bad number '" + std::string(text) + "'");
    }
    return value;
  }

  std::uint64_t Hex(std::string_view text) {
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
    if (ec != std::errc() || end != text.data() + text.size()) Corrupt("bad hex value");
    return value;
  }

  [[noreturn]] void Corrupt(const std::string& what) const {
    throw CorruptFileError(source_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  std::size_t line_start() const { return line_start_; }
  bool AtEnd() const { return pos_ >= text_.size(); }

 private:
  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> SplitSpaces(std::string_view text, std::size_t max_parts) {
  std::vector<std::string_view> parts;
  while (parts.size() + 1 < max_parts) {
    const std::size_t space = text.find(' ');
    if (space == std::string_view::npos) break;
    parts.push_back(text.substr(0, space));
    text.remove_prefix(space + 1);
  }
  parts.push_back(text);
  return parts;
}

}  // namespace

void WriteSnapshot(const Repository& repo, const std::filesystem::path& path,
                   const std::optional<RunCursor>& cursor) {
  const Alphabet& alphabet = repo.alphabet();
  std::string out;
  out.reserve(64 * repo.size() + 32 * alphabet.size());
  out += kSnapshotMagic;
  out += ' ' + std::to_string(kSnapshotVersion) + '\n';
  out += "alphabet_hash " + HexHash(alphabet.Hash()) + '\n';
  out += "alphabet_tokens " + std::to_string(alphabet.size()) + '\n';
  for (const auto& token : alphabet.tokens()) out += "token " + token.text + '\n';
  out += "base_weight " + std::to_string(alphabet.base_weight()) + '\n';
  if (cursor) {
    out += "cursor " + std::to_string(cursor->iteration) + ' ' + std::to_string(cursor->rng_seed) +
           ' ' + std::to_string(cursor->rng_position) + ' ' + std::to_string(cursor->admitted) +
           ' ' + std::to_string(cursor->discarded) + '\n';
  }
  out += "total_weight " + std::to_string(repo.total_weight()) + '\n';
  out += "blocks " + std::to_string(repo.size()) + '\n';
  out += kFieldsLine;
  out += '\n';
  std::string text;
  for (const auto& block : repo.blocks()) {
    out += "b ";
    out += std::to_string(block.id) + ' ' + std::to_string(block.value) + ' ' +
           std::to_string(block.weight) + ' ' + std::to_string(block.generation) + ' ' +
           std::to_string(block.discovered_at) + ' ';
    if (block.parents.empty()) {
      out += '-';
    } else {
      for (std::size_t i = 0; i < block.parents.size(); ++i) {
        if (i != 0) out += ',';
        out += std::to_string(block.parents[i]);
      }
    }
    alphabet.RenderInto(block.tokens, text);
    out += ' ';
    out += text;
    out += '\n';
  }
  out += "end " + HexHash(Fnv1a64(out)) + '\n';

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + tmp.string() + " for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    file.flush();
    if (!file) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move snapshot into place at " + path.string() + ": " + ec.message());
}

Snapshot ReadSnapshot(const std::filesystem::path& path, const Alphabet* expected) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read snapshot " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  const std::string content = buffer.str();
  LineReader reader(content, path.string());

  const std::string_view magic = reader.Next();
  const auto magic_parts = SplitSpaces(magic, 2);
  if (magic_parts.size() != 2 || magic_parts[0] != kSnapshotMagic) reader.Corrupt("not a snapshot");
  if (reader.Number(magic_parts[1]) != kSnapshotVersion) {
    reader.Corrupt("unsupported snapshot version " + std::string(magic_parts[1]));
  }
  const std::uint64_t alphabet_hash = reader.Hex(reader.Field(reader.Next(), "alphabet_hash"));
  const std::uint64_t token_count = reader.Number(reader.Field(reader.Next(), "alphabet_tokens"));
  std::vector<std::string> texts;
  texts.reserve(token_count);
  for (std::uint64_t i = 0; i < token_count; ++i) {
    texts.emplace_back(reader.Field(reader.Next(), "token"));
  }
  const auto base_weight =
      static_cast<std::uint32_t>(reader.Number(reader.Field(reader.Next(), "base_weight")));

  std::optional<RunCursor> cursor;
  std::string_view line = reader.Next();
  if (line.starts_with("cursor ")) {
    const auto parts = SplitSpaces(reader.Field(line, "cursor"), 5);
    if (parts.size() != 5) reader.Corrupt("cursor record needs 5 fields");
    cursor = RunCursor{reader.Number(parts[0]), reader.Number(parts[1]), reader.Number(parts[2]),
                       reader.Number(parts[3]), reader.Number(parts[4])};
    line = reader.Next();
  }
  const std::uint64_t total_weight = reader.Number(reader.Field(line, "total_weight"));
  const std::uint64_t block_count = reader.Number(reader.Field(reader.Next(), "blocks"));
  if (reader.Next() != kFieldsLine) reader.Corrupt("unexpected field list");

  // Lines are checked structurally first; the alphabet is needed to map
  // token texts, so it is built before the blocks.
  std::vector<std::string_view> block_lines;
  block_lines.reserve(block_count);
  for (std::uint64_t i = 0; i < block_count; ++i) block_lines.push_back(reader.Next());
  const std::string_view end_line = reader.Next();
  const std::size_t checksum_end = reader.line_start();
  const std::uint64_t checksum = reader.Hex(reader.Field(end_line, "end"));
  if (!reader.AtEnd()) reader.Corrupt("trailing data after end record");
  if (checksum != Fnv1a64(std::string_view(content).substr(0, checksum_end))) {
    reader.Corrupt("checksum mismatch");
  }

  Alphabet alphabet = [&] {
    try {
      return Alphabet(std::move(texts), base_weight);
    } catch (const ValidationError& e) {
      throw CorruptFileError(path.string() + ": embedded alphabet invalid: " + e.what());
    }
  }();
  if (alphabet.Hash() != alphabet_hash) {
    throw CorruptFileError(path.string() + ": embedded alphabet does not match its hash");
  }
  if (expected != nullptr && expected->Hash() != alphabet_hash) {
    throw ValidationError(path.string() + ": snapshot alphabet " + HexHash(alphabet_hash) +
                          " does not match the run's alphabet " + HexHash(expected->Hash()));
  }

  std::vector<CodeBlock> blocks;
  blocks.reserve(block_count);
  for (const std::string_view block_line : block_lines) {
    const auto parts = SplitSpaces(block_line, 8);
    if (parts.size() != 8 || parts[0] != "b") {
      throw CorruptFileError(path.string() + ": malformed block record");
    }
    CodeBlock block;
    block.id = static_cast<BlockId>(reader.Number(parts[1]));
    block.value = static_cast<std::uint32_t>(reader.Number(parts[2]));
    block.weight = reader.Number(parts[3]);
    block.generation = static_cast<std::uint32_t>(reader.Number(parts[4]));
    block.discovered_at = reader.Number(parts[5]);
    if (parts[6] != "-") {
      std::string_view list = parts[6];
      while (true) {
        const std::size_t comma = list.find(',');
        block.parents.push_back(static_cast<BlockId>(reader.Number(list.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
      }
    }
    try {
      block.tokens = alphabet.Tokenize(parts[7]);
    } catch (const ValidationError& e) {
      throw CorruptFileError(path.string() + ": block " + std::to_string(block.id) + ": " +
                             e.what());
    }
    blocks.push_back(std::move(block));
  }

  Repository repo = [&] {
    try {
      return Repository(std::move(alphabet), std::move(blocks));
    } catch (const ValidationError& e) {
      throw CorruptFileError(path.string() + ": " + e.what());
    }
  }();
  if (repo.total_weight() != total_weight) {
    throw CorruptFileError(path.string() + ": total_weight record does not match block weights");
  }
  return Snapshot{std::move(repo), cursor};
}

}  // namespace combevo
