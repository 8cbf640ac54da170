#include "morphpiece/detokenizer.hpp"

#include <algorithm>
#include <memory>
#include <optional>

#include "morphpiece/bpe.hpp"
#include "morphpiece/error.hpp"

namespace morphpiece {
namespace {

std::optional<TokenLabel> surface_label(std::string_view tok) {
  if (tok == kHashToken) return TokenLabel::Hash;
  if (tok.starts_with(kSpaceSymbol)) return TokenLabel::Bpe;
  if (tok.size() > 1 && tok.back() == '#') return TokenLabel::Prefix;
  if (tok.size() > 1 && tok.front() == '#') return TokenLabel::Suffix;
  return std::nullopt;
}

bool stem_capable(const MergedVocabulary& vocab, std::string_view tok) {
  auto tag = vocab.tag(tok);
  if (!tag) throw Error(ErrorCode::UnknownToken, "token '" + std::string(tok) + "' is not in the vocabulary");
  if (*tag == SourceTag::Special) {
    throw Error(ErrorCode::InvalidArgument, "special token '" + std::string(tok) + "' must be removed first");
  }
  return *tag == SourceTag::MorphStem || *tag == SourceTag::Shared;
}

bool flag(std::span<const bool> joined, std::size_t i) { return i < joined.size() && joined[i]; }

// Continuation edges; Stem->Stem is decided separately.
bool continues(TokenLabel prev, TokenLabel next) {
  using L = TokenLabel;
  switch (prev) {
    case L::Prefix: return next == L::Prefix || next == L::Stem || next == L::Suffix;
    case L::Stem: return next == L::Suffix || next == L::Hash;
    case L::Hash: return next == L::Stem;
    case L::Suffix: return next == L::Suffix;
    case L::Bpe: return next == L::Bpe;
  }
  return false;
}

}  // namespace

std::vector<TokenLabel> classify(std::span<const std::string> tokens, const MergedVocabulary& vocab,
                                 const ReverseMorphTable& reverse, std::span<const bool> joined) {
  std::vector<TokenLabel> labels;
  labels.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    const bool capable = stem_capable(vocab, tok);
    if (auto label = surface_label(tok)) {
      labels.push_back(*label);
      continue;
    }
    TokenLabel label = TokenLabel::Bpe;
    if (capable) {
      if (flag(joined, i) || (!labels.empty() && labels.back() != TokenLabel::Bpe)) {
        label = TokenLabel::Stem;
      } else if (i + 1 < tokens.size() && !flag(joined, i + 1)) {
        // After BPE text a plain token starts a morph word only if the next
        // token carries on with that word.
        const auto& next = tokens[i + 1];
        auto next_label = surface_label(next);
        if (next_label == TokenLabel::Suffix || next_label == TokenLabel::Hash) {
          label = TokenLabel::Stem;
        } else if (!next_label && stem_capable(vocab, next)) {
          const std::string pair[] = {tok, next};
          if (reverse.is_key_prefix(pair)) label = TokenLabel::Stem;
        }
      }
    }
    labels.push_back(label);
  }
  return labels;
}

std::vector<WordGroup> segment(std::span<const std::string> tokens, std::span<const TokenLabel> labels,
                               const ReverseMorphTable& reverse, std::span<const bool> joined) {
  if (tokens.size() != labels.size()) throw Error(ErrorCode::InvalidArgument, "labels must parallel tokens");
  std::vector<WordGroup> groups;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const TokenLabel label = labels[i];
    bool extend = false;
    if (!groups.empty() && !flag(joined, i)) {
      auto& current = groups.back();
      const TokenLabel prev = current.labels.back();
      if (prev == TokenLabel::Stem && label == TokenLabel::Stem) {
        std::vector<std::string> candidate = current.tokens;
        candidate.push_back(tokens[i]);
        extend = reverse.is_key_prefix(candidate);
      } else {
        extend = continues(prev, label);
      }
    }
    if (!extend) {
      WordGroup group;
      group.kind = label == TokenLabel::Bpe ? WordGroup::Kind::BpeRun : WordGroup::Kind::MorphWord;
      group.attached = flag(joined, i);
      group.verified = group.kind == WordGroup::Kind::BpeRun;
      groups.push_back(std::move(group));
    }
    groups.back().tokens.push_back(tokens[i]);
    groups.back().labels.push_back(label);
  }
  return groups;
}

std::string reverse_word(WordGroup& group, const ReverseMorphTable& reverse) {
  if (auto surface = reverse.find(group.tokens)) {
    group.verified = true;
    return std::string(*surface);
  }
  group.verified = false;
  std::string out;
  for (const auto& tok : group.tokens) {
    for (char c : tok) {
      if (c != '#') out.push_back(c);
    }
  }
  return out;
}

DetokenizeResult detokenize(std::span<const std::string> tokens, const MergedVocabulary& vocab,
                            const ReverseMorphTable& reverse) {
  DetokenizeResult result;
  std::size_t i = 0;
  bool first_segment = true;
  while (i <= tokens.size()) {
    // Each end-of-text delimited segment renders as a fresh text start.
    std::vector<std::string> content;
    std::vector<bool> joined_vec;
    bool pending_join = false;
    for (; i < tokens.size() && tokens[i] != kEndOfText; ++i) {
      if (tokens[i] == kNoSpace) {
        pending_join = true;
        continue;
      }
      content.push_back(tokens[i]);
      joined_vec.push_back(pending_join);
      pending_join = false;
    }
    if (!first_segment) result.text += kEndOfText;
    first_segment = false;

    auto joined_flags = std::make_unique<bool[]>(joined_vec.size());
    std::copy(joined_vec.begin(), joined_vec.end(), joined_flags.get());
    std::span<const bool> joined(joined_flags.get(), joined_vec.size());
    auto labels = classify(content, vocab, reverse, joined);
    auto groups = segment(content, labels, reverse, joined);
    bool at_start = true;
    for (auto& group : groups) {
      if (group.kind == WordGroup::Kind::BpeRun) {
        result.text += decode_bytes(group.tokens);
      } else {
        if (!at_start && !group.attached) result.text.push_back(' ');
        result.text += reverse_word(group, reverse);
        ++result.morph_words;
        if (!group.verified) ++result.unverified_words;
      }
      at_start = false;
    }
    ++i;
  }
  return result;
}

}  // namespace morphpiece
