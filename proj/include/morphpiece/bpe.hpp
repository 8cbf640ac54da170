#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace morphpiece {

// Remapped form of the ASCII space byte (U+0120).
inline constexpr std::string_view kSpaceSymbol = "\xC4\xA0";

// The printable byte remap used by GPT-2 style byte-level BPE: printable
// Latin-1 bytes map to themselves, the remaining 68 bytes to U+0100 onwards.
const std::array<std::string, 256>& byte_symbols();
std::optional<std::uint8_t> symbol_byte(char32_t symbol);

std::string remap_bytes(std::string_view raw);

// Concatenates tokens and maps each symbol back to its byte. Throws
// Error(UnknownToken) for symbols outside the remapped alphabet.
std::string decode_bytes(std::span<const std::string> tokens);

struct Pretoken {
  enum class Kind { Contraction, Letters, Digits, Other, Space };

  // Raw UTF-8, leading space included.
  std::string text;
  Kind kind = Kind::Other;
  bool had_leading_space = false;

  std::string_view surface() const {
    return had_leading_space ? std::string_view(text).substr(1) : std::string_view(text);
  }

  friend bool operator==(const Pretoken&, const Pretoken&) = default;
};

// GPT-2 split: 's|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+
// Throws Error(InvalidUtf8) on malformed input.
std::vector<Pretoken> pretokenize(std::string_view text);

using Merge = std::pair<std::string, std::string>;

class BpeModel {
 public:
  // Base alphabet only: 256 byte symbols with ids in byte order.
  BpeModel();

  // Vocabulary is the byte alphabet followed by each new merge output in
  // merge order. Throws Error(ParseError) when a merge refers to a symbol not
  // yet produced.
  static BpeModel from_merges(std::vector<Merge> merges);

  const std::vector<Merge>& merges() const noexcept { return merges_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t vocab_size() const noexcept { return tokens_.size(); }
  std::optional<std::uint32_t> id(std::string_view token) const;
  bool contains(std::string_view token) const { return id(token).has_value(); }

  // Applies merges by rank to an already remapped symbol string.
  std::vector<std::string> encode_symbols(std::string_view remapped) const;
  std::vector<std::string> encode_pretoken(const Pretoken& pretoken) const;
  std::vector<std::string> encode(std::string_view text) const;

  // Model file: "bpe-v1 <vocab_size>" then "left right" per merge.
  // Vocab file: "token<TAB>id" per line in id order.
  void save(std::ostream& model, std::ostream& vocab) const;
  void save(const std::filesystem::path& model_path, const std::filesystem::path& vocab_path) const;
  static BpeModel load(std::istream& model, std::istream& vocab);
  static BpeModel load(const std::filesystem::path& model_path, const std::filesystem::path& vocab_path);

  // Reads a merges list alone: either our model file or a published
  // "#version" merges.txt.
  static BpeModel load_merges(std::istream& in);
  static BpeModel load_merges(const std::filesystem::path& path);

  friend bool operator==(const BpeModel& a, const BpeModel& b) { return a.merges_ == b.merges_; }

 private:
  void add_token(std::string token);

  std::vector<Merge> merges_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  // "left right" -> rank
  std::unordered_map<std::string, std::uint32_t> ranks_;
};

// Remapped pretoken string -> occurrence count.
using WordCounts = std::unordered_map<std::string, std::uint64_t>;
using ExclusionFn = std::function<bool(std::string_view surface)>;

// Pretokenizes each document and counts remapped pretokens, dropping those
// whose space-stripped surface is excluded. Shards are counted independently
// and summed, so the result does not depend on `threads`.
WordCounts count_words(std::span<const std::string> documents, const ExclusionFn& excluded = {},
                       std::size_t threads = 1);

struct TrainOptions {
  std::size_t target_size = 32000;
  std::uint64_t min_pair_count = 2;
};

// Greedy merge training. Ties on pair count go to the lexicographically
// smaller merged token, then the smaller left symbol. Stops when the
// vocabulary reaches target_size or no pair reaches min_pair_count.
BpeModel train(const WordCounts& words, const TrainOptions& options);

BpeModel train(std::span<const std::string> documents, const TrainOptions& options,
               const ExclusionFn& excluded = {}, std::size_t threads = 1);

}  // namespace morphpiece
