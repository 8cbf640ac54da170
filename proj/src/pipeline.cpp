#include "morphpiece/pipeline.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "morphpiece/detokenizer.hpp"
#include "morphpiece/error.hpp"
#include "text_util.hpp"

namespace morphpiece {

namespace fixtures::embedded {
extern const std::string_view kMiniMorphology;
extern const std::string_view kMiniCorpus;
}  // namespace fixtures::embedded

BpeModel train_filtered_bpe(const MorphTable& table, std::span<const std::string> documents, std::size_t target_size,
                            std::size_t threads) {
  TrainOptions options;
  options.target_size = target_size;
  return train(documents, options, [&table](std::string_view surface) { return table.contains(surface); }, threads);
}

MergedVocabulary build_vocabulary(const MorphTable& table, const BpeModel& bpe) {
  return MergedVocabulary::merge(table.inventory(), bpe.tokens(), default_specials());
}

void save_artifacts(const std::filesystem::path& dir, const MorphTable& table, const BpeModel& bpe,
                    const MergedVocabulary& vocab) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  auto paths = ArtifactPaths::in(dir);
  table.save(paths.morphtable);
  bpe.save(paths.bpe_model, paths.bpe_vocab);
  vocab.save(paths.vocab);
}

std::vector<std::string> read_documents(std::istream& in) {
  std::vector<std::string> docs;
  std::string line;
  while (detail::read_line(in, line)) docs.push_back(line);
  return docs;
}

std::vector<std::string> read_documents(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return read_documents(in);
}

namespace fixtures {

std::string_view mini_morphology() { return embedded::kMiniMorphology; }
std::string_view mini_corpus_text() { return embedded::kMiniCorpus; }

std::vector<std::string> mini_corpus() {
  std::istringstream in{std::string(mini_corpus_text())};
  auto docs = read_documents(in);
  std::erase_if(docs, [](const std::string& d) { return d.empty(); });
  return docs;
}

MorphTable mini_table() {
  std::istringstream in{std::string(mini_morphology())};
  return ingest(in, ColumnMap::canonical()).table;
}

MorphPieceTokenizer mini_tokenizer(std::size_t bpe_size) {
  auto table = mini_table();
  auto corpus = mini_corpus();
  auto bpe = train_filtered_bpe(table, corpus, bpe_size);
  auto vocab = build_vocabulary(table, bpe);
  return MorphPieceTokenizer(std::move(table), std::move(bpe), std::move(vocab));
}

}  // namespace fixtures

namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

bool run_selftest(std::ostream& log) {
  bool all = true;
  auto check = [&](const std::string& name, bool ok, const std::string& detail = {}) {
    log << (ok ? "PASS " : "FAIL ") << name;
    if (!ok && !detail.empty()) log << " (" << detail << ")";
    log << '\n';
    all = all && ok;
  };

  try {
    const auto tokenizer = fixtures::mini_tokenizer();

    const std::pair<const char*, const char*> table1[] = {
        {"batting", "bat #ing"},
        {"disengage", "dis# en# gage"},
        {"archeologists", "archaeo# #logy #ist #s"},
        {"decompress", "de# compress"},
        {"photographers", "photo# #graph #er #s"},
    };
    for (const auto& [word, expected] : table1) {
      auto got = join(tokenizer.tokenize(word));
      check(std::string("segmentation ") + word, got == expected, got);
    }

    const std::vector<std::string> stream = {"He", "\xC4\xA0was", "in#", "vestigate", "#ing", "diligent", "#ly"};
    const auto& vocab = tokenizer.vocab();
    const auto& rt = tokenizer.reverse_table();
    auto labels = classify(stream, vocab, rt);
    std::vector<std::string> names;
    for (auto l : labels) names.emplace_back(to_string(l));
    check("worked example labels", join(names) == "bpe bpe prefix stem suffix stem suffix", join(names));
    auto groups = segment(stream, labels, rt);
    bool groups_ok = groups.size() == 3 && join(groups[1].tokens) == "in# vestigate #ing" &&
                     join(groups[2].tokens) == "diligent #ly";
    check("worked example boundaries", groups_ok);
    auto text = tokenizer.detokenize(stream);
    check("worked example text", text == "He was investigating diligently", text);

    std::size_t failures = 0;
    std::string first_failure;
    for (const auto& doc : fixtures::mini_corpus()) {
      auto back = tokenizer.detokenize(tokenizer.tokenize(doc));
      if (back != doc) {
        if (!failures) first_failure = back;
        ++failures;
      }
    }
    check("mini corpus round trip", failures == 0, first_failure);
  } catch (const std::exception& e) {
    check("fixture construction", false, e.what());
  }
  return all;
}

}  // namespace morphpiece
