#include <fstream>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "morphpiece/error.hpp"
#include "morphpiece/pipeline.hpp"
#include "morphpiece/tokenizer.hpp"
#include "support.hpp"

using namespace morphpiece;
using Tokens = std::vector<std::string>;

namespace {

const MorphPieceTokenizer& mini() {
  static const auto tokenizer = fixtures::mini_tokenizer();
  return tokenizer;
}

MorphPieceTokenizer with_config(TokenizerConfig config) {
  const auto& t = mini();
  return MorphPieceTokenizer(t.table(), t.bpe(), t.vocab(), config);
}

const std::string kSpace(kSpaceSymbol);
const std::string kJoin(kNoSpace);

}  // namespace

TEST(Tokenize, TableOneWords) {
  EXPECT_EQ(mini().tokenize("batting"), (Tokens{"bat", "#ing"}));
  EXPECT_EQ(mini().tokenize("disengage"), (Tokens{"dis#", "en#", "gage"}));
  EXPECT_EQ(mini().tokenize("archeologists"), (Tokens{"archaeo#", "#logy", "#ist", "#s"}));
  EXPECT_EQ(mini().tokenize("decompress"), (Tokens{"de#", "compress"}));
  EXPECT_EQ(mini().tokenize("photographers"), (Tokens{"photo#", "#graph", "#er", "#s"}));
}

TEST(Tokenize, Empty) {
  EXPECT_TRUE(mini().tokenize("").empty());
  EXPECT_TRUE(mini().encode("").ids.empty());
}

TEST(Tokenize, SpacedMorphWordsCarryNoMarker) {
  auto tokens = mini().tokenize("He was investigating diligently");
  EXPECT_EQ(tokens, (Tokens{"He", kSpace + "was", "in#", "vestigate", "#ing", "diligent", "#ly"}));
}

TEST(Tokenize, AttachedMorphWordGetsJoiner) {
  EXPECT_EQ(mini().tokenize("(batting"), (Tokens{"(", kJoin, "bat", "#ing"}));
  auto plain = with_config({.nospace_joiner = false});
  EXPECT_EQ(plain.tokenize("(batting"), (Tokens{"(", "bat", "#ing"}));
}

TEST(Tokenize, LeadingSpaceBeforeFirstMorphWordSurvives) {
  auto tokens = mini().tokenize(" batting");
  EXPECT_EQ(tokens, (Tokens{kSpace, kJoin, "bat", "#ing"}));
  EXPECT_EQ(mini().detokenize(tokens), " batting");
}

TEST(Tokenize, CasePolicy) {
  auto exact = mini().trace("Batting");
  ASSERT_EQ(exact.size(), 1u);
  EXPECT_NE(exact[0].handler, Handler::MorphTable);
  auto folding = with_config({.case_policy = CasePolicy::LowercaseFallback});
  EXPECT_EQ(folding.tokenize("Batting"), (Tokens{"bat", "#ing"}));
}

TEST(Tokenize, NonLetterPretokensNeverHitTheTable) {
  MorphTable table({testing_support::entry("it's", {{"it", Role::Stem}, {"'s", Role::Suffix}})});
  auto bpe = train(fixtures::mini_corpus(), {.target_size = 300});
  auto vocab = build_vocabulary(table, bpe);
  MorphPieceTokenizer t(table, bpe, vocab);
  for (auto h : t.coverage_trace("it's")) EXPECT_NE(h, Handler::MorphTable);
}

TEST(Tokenize, EncodeMatchesTokenize) {
  auto seq = mini().encode("batting and walking quickly");
  EXPECT_EQ(seq.tokens, mini().tokenize("batting and walking quickly"));
  ASSERT_EQ(seq.ids.size(), seq.tokens.size());
  for (std::size_t i = 0; i < seq.ids.size(); ++i) EXPECT_EQ(mini().vocab().token(seq.ids[i]), seq.tokens[i]);
}

TEST(Tokenize, RejectsInvalidUtf8) {
  try {
    mini().tokenize("bad \xE2\x82");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidUtf8);
  }
}

TEST(CoverageTrace, Handlers) {
  EXPECT_EQ(mini().coverage_trace("batting"), (std::vector<Handler>{Handler::MorphTable}));
  EXPECT_EQ(mini().coverage_trace("zxqv"), (std::vector<Handler>{Handler::BpeSplit}));
  auto docs = fixtures::mini_corpus();
  docs.push_back("you you you you");
  auto table = fixtures::mini_table();
  auto bpe = train_filtered_bpe(table, docs, 1000);
  ASSERT_TRUE(bpe.contains("you"));
  MorphPieceTokenizer t(table, bpe, build_vocabulary(table, bpe));
  EXPECT_EQ(t.coverage_trace("you"), (std::vector<Handler>{Handler::BpeWhole}));
}

TEST(CoverageTrace, PathsAreExclusiveAndPure) {
  std::mt19937_64 rng(41);
  std::vector<std::string> words;
  for (const auto& [surface, e] : mini().table().entries()) words.push_back(surface);
  for (int i = 0; i < 500; ++i) {
    auto s = testing_support::round_trip_sentence(rng, words);
    auto trace = mini().trace(s);
    auto pretokens = pretokenize(s);
    ASSERT_EQ(trace.size(), pretokens.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const auto& item = trace[k];
      EXPECT_EQ(item.pretoken, pretokens[k]);
      auto hit = mini().table().lookup(item.pretoken.surface());
      bool letters = item.pretoken.kind == Pretoken::Kind::Letters;
      EXPECT_EQ(item.handler == Handler::MorphTable, hit.has_value() && letters);
      if (item.handler == Handler::MorphTable) {
        EXPECT_EQ(item.token_count, hit->size());
      } else {
        auto pieces = mini().bpe().encode_pretoken(item.pretoken);
        std::string joined;
        for (const auto& p : pieces) joined += p;
        EXPECT_EQ(joined, remap_bytes(item.pretoken.text));
        EXPECT_EQ(item.handler == Handler::BpeWhole, pieces.size() == 1);
      }
    }
  }
}

TEST(Tokenizer, EveryEmittedTokenHasAnId) {
  std::mt19937_64 rng(42);
  std::vector<std::string> words;
  for (const auto& [surface, e] : mini().table().entries()) words.push_back(surface);
  for (int i = 0; i < 500; ++i) {
    auto s = testing_support::round_trip_sentence(rng, words);
    auto seq = mini().encode(s);
    std::vector<std::uint32_t> ids = seq.ids;
    EXPECT_EQ(mini().decode(ids), s);
  }
}

TEST(Tokenizer, MissingVocabularyTokenIsInconsistent) {
  const auto& t = mini();
  std::set<std::string> partial_morph;
  auto vocab = MergedVocabulary::merge(partial_morph, t.bpe().tokens(), default_specials());
  try {
    MorphPieceTokenizer(t.table(), t.bpe(), vocab);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentArtifacts);
  }
}

TEST(Tokenizer, ArtifactsRoundTripThroughDisk) {
  testing_support::TempDir dir;
  const auto& t = mini();
  save_artifacts(dir.path(), t.table(), t.bpe(), t.vocab());
  auto loaded = MorphPieceTokenizer::load(dir.path());
  EXPECT_EQ(loaded.table(), t.table());
  EXPECT_EQ(loaded.bpe(), t.bpe());
  EXPECT_EQ(loaded.vocab(), t.vocab());
  EXPECT_EQ(loaded.encode("He was investigating diligently").ids, t.encode("He was investigating diligently").ids);

  std::filesystem::remove(ArtifactPaths::in(dir.path()).vocab);
  try {
    MorphPieceTokenizer::load(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ArtifactMissing);
  }
}

TEST(Tokenizer, ConcurrentEncodesAgree) {
  std::vector<std::string> words;
  for (const auto& [surface, e] : mini().table().entries()) words.push_back(surface);
  std::mt19937_64 rng(43);
  std::vector<std::string> inputs;
  for (int i = 0; i < 200; ++i) inputs.push_back(testing_support::round_trip_sentence(rng, words));
  std::vector<std::vector<std::uint32_t>> expected;
  for (const auto& s : inputs) expected.push_back(mini().encode(s).ids);
  std::vector<int> mismatches(4, 0);
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < 4; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
          if (mini().encode(inputs[i]).ids != expected[i]) ++mismatches[w];
        }
      });
    }
  }
  EXPECT_EQ(mismatches, (std::vector<int>(4, 0)));
}

TEST(Tokenizer, HandlerNames) {
  EXPECT_EQ(to_string(Handler::MorphTable), "MorphTable");
  EXPECT_EQ(to_string(Handler::BpeWhole), "BpeWhole");
  EXPECT_EQ(to_string(Handler::BpeSplit), "BpeSplit");
}
