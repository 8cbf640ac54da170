#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphpiece/bpe.hpp"
#include "morphpiece/morphtable.hpp"
#include "morphpiece/tokenizer.hpp"
#include "morphpiece/vocab.hpp"

namespace morphpiece {

// BPE trained only on pretokens the MorphTable will not handle.
BpeModel train_filtered_bpe(const MorphTable& table, std::span<const std::string> documents, std::size_t target_size,
                            std::size_t threads = 1);

MergedVocabulary build_vocabulary(const MorphTable& table, const BpeModel& bpe);

void save_artifacts(const std::filesystem::path& dir, const MorphTable& table, const BpeModel& bpe,
                    const MergedVocabulary& vocab);

// One document per line; empty lines are kept so line numbers line up.
std::vector<std::string> read_documents(std::istream& in);
std::vector<std::string> read_documents(const std::filesystem::path& path);

namespace fixtures {

// Canonical-format morphology bundled with the library.
std::string_view mini_morphology();
std::string_view mini_corpus_text();
std::vector<std::string> mini_corpus();

MorphTable mini_table();
MorphPieceTokenizer mini_tokenizer(std::size_t bpe_size = 1000);

}  // namespace fixtures

// Runs the bundled fixture checks, writing one line per check to `log`.
bool run_selftest(std::ostream& log);

}  // namespace morphpiece
