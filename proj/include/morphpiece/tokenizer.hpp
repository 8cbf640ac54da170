#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphpiece/bpe.hpp"
#include "morphpiece/morphtable.hpp"
#include "morphpiece/vocab.hpp"

namespace morphpiece {

enum class TokenLabel { Prefix, Stem, Suffix, Hash, Bpe };

std::string_view to_string(TokenLabel label);

enum class CasePolicy {
  Exact,
  // Retry an ASCII-lowercased lookup on a miss. Detokenized text then comes
  // back lowercased for those words.
  LowercaseFallback,
};

enum class Handler { MorphTable, BpeWhole, BpeSplit };

std::string_view to_string(Handler handler);

struct TokenizerConfig {
  CasePolicy case_policy = CasePolicy::Exact;
  bool nospace_joiner = true;
};

struct EncodedSequence {
  std::vector<std::uint32_t> ids;
  std::vector<std::string> tokens;
};

// Token stream with the label each token was produced under; nullopt marks
// special tokens.
struct LabeledTokens {
  std::vector<std::string> tokens;
  std::vector<std::optional<TokenLabel>> labels;
};

struct TraceItem {
  Pretoken pretoken;
  Handler handler;
  std::size_t token_count;
};

// Artifact file names inside an artifact directory.
struct ArtifactPaths {
  std::filesystem::path morphtable;
  std::filesystem::path bpe_model;
  std::filesystem::path bpe_vocab;
  std::filesystem::path vocab;

  static ArtifactPaths in(const std::filesystem::path& dir);
};

class MorphPieceTokenizer {
 public:
  // Throws Error(InconsistentArtifacts) if any token either path can emit is
  // missing from the vocabulary.
  MorphPieceTokenizer(MorphTable table, BpeModel bpe, MergedVocabulary vocab, TokenizerConfig config = {});

  static MorphPieceTokenizer load(const std::filesystem::path& dir, TokenizerConfig config = {});

  std::vector<std::string> tokenize(std::string_view text) const;
  LabeledTokens tokenize_labeled(std::string_view text) const;
  EncodedSequence encode(std::string_view text) const;
  std::vector<Handler> coverage_trace(std::string_view text) const;
  std::vector<TraceItem> trace(std::string_view text) const;

  std::string detokenize(std::span<const std::string> tokens, std::size_t* unverified = nullptr) const;
  std::string decode(std::span<const std::uint32_t> ids, std::size_t* unverified = nullptr) const;

  const MorphTable& table() const noexcept { return table_; }
  const BpeModel& bpe() const noexcept { return bpe_; }
  const MergedVocabulary& vocab() const noexcept { return vocab_; }
  const ReverseMorphTable& reverse_table() const noexcept { return reverse_; }
  const std::vector<ReverseMorphTable::Collision>& collisions() const noexcept { return collisions_; }
  const TokenizerConfig& config() const noexcept { return config_; }

 private:
  std::optional<std::vector<std::string>> morph_lookup(const Pretoken& pt) const;

  MorphTable table_;
  BpeModel bpe_;
  MergedVocabulary vocab_;
  TokenizerConfig config_;
  ReverseMorphTable reverse_;
  std::vector<ReverseMorphTable::Collision> collisions_;
};

}  // namespace morphpiece
