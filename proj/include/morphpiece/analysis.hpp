#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "morphpiece/bpe.hpp"
#include "morphpiece/tokenizer.hpp"

namespace morphpiece {

class TokenizerAdapter {
 public:
  virtual ~TokenizerAdapter() = default;
  virtual std::string name() const = 0;
  virtual std::size_t count_tokens(std::string_view document) const = 0;
};

// Whitespace-delimited words; the word-count proxy for fertility.
std::size_t count_words(std::string_view document);

class WhitespaceAdapter final : public TokenizerAdapter {
 public:
  std::string name() const override { return "whitespace"; }
  std::size_t count_tokens(std::string_view document) const override { return count_words(document); }
};

// One token per code point, spaces included.
class CharacterAdapter final : public TokenizerAdapter {
 public:
  std::string name() const override { return "character"; }
  std::size_t count_tokens(std::string_view document) const override;
};

class BpeAdapter final : public TokenizerAdapter {
 public:
  BpeAdapter(std::shared_ptr<const BpeModel> model, std::string name = "bpe")
      : model_(std::move(model)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::size_t count_tokens(std::string_view document) const override;

 private:
  std::shared_ptr<const BpeModel> model_;
  std::string name_;
};

// Greedy longest-match-first WordPiece over a published vocab.txt. Basic
// pre-splitting follows BERT: whitespace, then each punctuation or symbol
// character on its own. Lowercasing is ASCII only.
class WordPieceAdapter final : public TokenizerAdapter {
 public:
  WordPieceAdapter(const std::filesystem::path& vocab_txt, bool lowercase = true, std::string name = "wordpiece");
  WordPieceAdapter(std::vector<std::string> vocab, bool lowercase = true, std::string name = "wordpiece");
  std::string name() const override { return name_; }
  std::size_t count_tokens(std::string_view document) const override;
  std::vector<std::string> tokenize(std::string_view document) const;

 private:
  std::unordered_map<std::string, std::uint32_t> vocab_;
  bool lowercase_;
  std::string name_;
};

class MorphPieceAdapter final : public TokenizerAdapter {
 public:
  explicit MorphPieceAdapter(std::shared_ptr<const MorphPieceTokenizer> tokenizer, bool count_joiners = false)
      : tokenizer_(std::move(tokenizer)), count_joiners_(count_joiners) {}
  std::string name() const override { return "morphpiece"; }
  std::size_t count_tokens(std::string_view document) const override;

 private:
  std::shared_ptr<const MorphPieceTokenizer> tokenizer_;
  bool count_joiners_;
};

struct FertilityRow {
  std::string tokenizer;
  std::uint64_t tokens = 0;
  double average_length = 0;
  double fertility = 0;
};

struct FertilityReport {
  std::uint64_t documents = 0;
  std::uint64_t words = 0;
  std::vector<FertilityRow> rows;
};

// Empty lines are not documents. Throws Error(EmptyCorpus) when no document
// holds a word. Fertility is total tokens over total whitespace words.
FertilityReport fertility(std::span<const std::string> documents, std::span<const TokenizerAdapter* const> adapters,
                          std::size_t threads = 1);

struct HandlerCounts {
  std::uint64_t morph_table = 0;
  std::uint64_t bpe_whole = 0;
  std::uint64_t bpe_split = 0;

  std::uint64_t total() const { return morph_table + bpe_whole + bpe_split; }
  void add(Handler h);
  HandlerCounts& operator+=(const HandlerCounts& other);
  friend bool operator==(const HandlerCounts&, const HandlerCounts&) = default;
};

struct CoverageReport {
  // Code-point length of the space-stripped pretoken -> counts per handler.
  std::map<std::size_t, HandlerCounts> by_length;
  // Space-stripped pretokens not handled by the MorphTable.
  std::map<std::string, std::uint64_t> unsplit;
  std::uint64_t pretokens = 0;

  void merge(const CoverageReport& other);
  // Top k by count (ties by token), frequency relative to all pretokens.
  std::vector<std::pair<std::string, double>> ranking(std::size_t k) const;

  friend bool operator==(const CoverageReport&, const CoverageReport&) = default;
};

// Whitespace-only pretokens are not counted.
CoverageReport coverage(std::span<const std::string> documents, const MorphPieceTokenizer& tokenizer,
                        std::size_t threads = 1);

enum class ReportFormat { Tsv, Json };

void emit_fertility(const FertilityReport& report, ReportFormat format, std::ostream& out);
void emit_coverage(const CoverageReport& report, ReportFormat format, std::ostream& out);
void emit_unsplit(const CoverageReport& report, std::size_t top_k, ReportFormat format, std::ostream& out);

// Runs `emit` against a file stream; throws Error(Io) when `path` cannot be written.
void emit_to_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& emit);

// Stacked bar chart of handler counts by word length, as SVG.
void write_coverage_svg(const CoverageReport& report, std::ostream& out);

}  // namespace morphpiece
