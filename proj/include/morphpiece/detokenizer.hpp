#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "morphpiece/morphtable.hpp"
#include "morphpiece/tokenizer.hpp"
#include "morphpiece/vocab.hpp"

namespace morphpiece {

struct WordGroup {
  enum class Kind { MorphWord, BpeRun };

  std::vector<std::string> tokens;
  std::vector<TokenLabel> labels;
  Kind kind = Kind::BpeRun;
  // Preceded by the no-space joiner.
  bool attached = false;
  bool verified = false;
};

// Surface-form labels for a stream with special tokens removed. `joined[i]`
// says token i followed a no-space joiner; empty means none did.
//
// "#" is Hash, a leading space symbol is Bpe, a trailing '#' is Prefix and a
// leading '#' is Suffix. A plain token is Stem only when the vocabulary has it
// from the MorphTable side and its context calls for a stem: after a morph
// token or a joiner, or, after BPE text, when the next token continues a
// morph word.
std::vector<TokenLabel> classify(std::span<const std::string> tokens, const MergedVocabulary& vocab,
                                 const ReverseMorphTable& reverse, std::span<const bool> joined = {});

// Groups labeled tokens into words using the continuation table. Never fails:
// invalid transitions close the current group.
std::vector<WordGroup> segment(std::span<const std::string> tokens, std::span<const TokenLabel> labels,
                               const ReverseMorphTable& reverse, std::span<const bool> joined = {});

// Exact reverse lookup; on a miss the tokens are concatenated with '#'
// markers stripped and the group stays unverified.
std::string reverse_word(WordGroup& group, const ReverseMorphTable& reverse);

struct DetokenizeResult {
  std::string text;
  std::size_t morph_words = 0;
  std::size_t unverified_words = 0;
};

DetokenizeResult detokenize(std::span<const std::string> tokens, const MergedVocabulary& vocab,
                            const ReverseMorphTable& reverse);

}  // namespace morphpiece
