#include "morphpiece/tokenizer.hpp"

#include <algorithm>

#include "morphpiece/detokenizer.hpp"
#include "morphpiece/error.hpp"
#include "morphpiece/unicode.hpp"

namespace morphpiece {

std::string_view to_string(TokenLabel label) {
  switch (label) {
    case TokenLabel::Prefix: return "prefix";
    case TokenLabel::Stem: return "stem";
    case TokenLabel::Suffix: return "suffix";
    case TokenLabel::Hash: return "hash";
    case TokenLabel::Bpe: return "bpe";
  }
  return "bpe";
}

std::string_view to_string(Handler handler) {
  switch (handler) {
    case Handler::MorphTable: return "MorphTable";
    case Handler::BpeWhole: return "BpeWhole";
    case Handler::BpeSplit: return "BpeSplit";
  }
  return "BpeSplit";
}

ArtifactPaths ArtifactPaths::in(const std::filesystem::path& dir) {
  return {dir / "morphtable.tsv", dir / "bpe.model", dir / "bpe.vocab", dir / "vocab.tsv"};
}

MorphPieceTokenizer::MorphPieceTokenizer(MorphTable table, BpeModel bpe, MergedVocabulary vocab,
                                         TokenizerConfig config)
    : table_(std::move(table)), bpe_(std::move(bpe)), vocab_(std::move(vocab)), config_(config) {
  auto require = [this](std::string_view tok, std::string_view source) {
    if (!vocab_.id(tok)) {
      throw Error(ErrorCode::InconsistentArtifacts,
                  std::string(source) + " token '" + std::string(tok) + "' is missing from the vocabulary");
    }
  };
  for (const auto& tok : table_.inventory()) require(tok, "morph");
  for (const auto& tok : bpe_.tokens()) require(tok, "bpe");
  if (config_.nospace_joiner) require(kNoSpace, "special");
  reverse_ = ReverseMorphTable::build(table_, &collisions_);
}

MorphPieceTokenizer MorphPieceTokenizer::load(const std::filesystem::path& dir, TokenizerConfig config) {
  auto paths = ArtifactPaths::in(dir);
  for (const auto& p : {paths.morphtable, paths.bpe_model, paths.bpe_vocab, paths.vocab}) {
    if (!std::filesystem::exists(p)) throw Error(ErrorCode::ArtifactMissing, p.string() + " not found");
  }
  return MorphPieceTokenizer(MorphTable::load(paths.morphtable), BpeModel::load(paths.bpe_model, paths.bpe_vocab),
                             MergedVocabulary::load(paths.vocab), config);
}

std::optional<std::vector<std::string>> MorphPieceTokenizer::morph_lookup(const Pretoken& pt) const {
  if (pt.kind != Pretoken::Kind::Letters) return std::nullopt;
  auto word = pt.surface();
  auto hit = table_.lookup(word);
  if (!hit && config_.case_policy == CasePolicy::LowercaseFallback) {
    std::string lower(word);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; });
    if (lower != word) hit = table_.lookup(lower);
  }
  return hit;
}

LabeledTokens MorphPieceTokenizer::tokenize_labeled(std::string_view text) const {
  LabeledTokens out;
  auto push = [&out](std::string tok, std::optional<TokenLabel> label) {
    out.tokens.push_back(std::move(tok));
    out.labels.push_back(label);
  };
  const auto pretokens = pretokenize(text);
  for (std::size_t i = 0; i < pretokens.size(); ++i) {
    const auto& pt = pretokens[i];
    auto morphs = morph_lookup(pt);
    if (!morphs) {
      for (auto& tok : bpe_.encode_pretoken(pt)) push(std::move(tok), TokenLabel::Bpe);
      continue;
    }
    if (config_.nospace_joiner) {
      // Morph words render with a space unless the stream starts with them or
      // a joiner precedes them. A spaced word at the very start therefore
      // carries its space as a BPE symbol.
      if (pt.had_leading_space && i == 0) {
        push(std::string(kSpaceSymbol), TokenLabel::Bpe);
        push(std::string(kNoSpace), std::nullopt);
      } else if (!pt.had_leading_space && i > 0) {
        push(std::string(kNoSpace), std::nullopt);
      }
    }
    for (auto& tok : *morphs) {
      TokenLabel label = TokenLabel::Stem;
      if (tok == kHashToken) {
        label = TokenLabel::Hash;
      } else if (tok.back() == '#') {
        label = TokenLabel::Prefix;
      } else if (tok.front() == '#') {
        label = TokenLabel::Suffix;
      }
      push(std::move(tok), label);
    }
  }
  return out;
}

std::vector<std::string> MorphPieceTokenizer::tokenize(std::string_view text) const {
  return tokenize_labeled(text).tokens;
}

EncodedSequence MorphPieceTokenizer::encode(std::string_view text) const {
  EncodedSequence seq;
  seq.tokens = tokenize(text);
  seq.ids.reserve(seq.tokens.size());
  for (const auto& tok : seq.tokens) {
    auto id = vocab_.id(tok);
    if (!id) throw Error(ErrorCode::InconsistentArtifacts, "emitted token '" + tok + "' has no id");
    seq.ids.push_back(*id);
  }
  return seq;
}

std::vector<TraceItem> MorphPieceTokenizer::trace(std::string_view text) const {
  std::vector<TraceItem> out;
  for (auto& pt : pretokenize(text)) {
    if (auto morphs = morph_lookup(pt)) {
      out.push_back({std::move(pt), Handler::MorphTable, morphs->size()});
      continue;
    }
    auto n = bpe_.encode_pretoken(pt).size();
    out.push_back({std::move(pt), n == 1 ? Handler::BpeWhole : Handler::BpeSplit, n});
  }
  return out;
}

std::vector<Handler> MorphPieceTokenizer::coverage_trace(std::string_view text) const {
  std::vector<Handler> out;
  for (const auto& item : trace(text)) out.push_back(item.handler);
  return out;
}

std::string MorphPieceTokenizer::detokenize(std::span<const std::string> tokens, std::size_t* unverified) const {
  auto result = morphpiece::detokenize(tokens, vocab_, reverse_);
  if (unverified) *unverified = result.unverified_words;
  return std::move(result.text);
}

std::string MorphPieceTokenizer::decode(std::span<const std::uint32_t> ids, std::size_t* unverified) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (auto id : ids) tokens.push_back(vocab_.token(id));
  return detokenize(tokens, unverified);
}

}  // namespace morphpiece
