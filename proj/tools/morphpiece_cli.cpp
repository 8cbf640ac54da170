#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "morphpiece/analysis.hpp"
#include "morphpiece/error.hpp"
#include "morphpiece/pipeline.hpp"

namespace fs = std::filesystem;
using namespace morphpiece;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kSelftestFailure = 3;

struct PipelineConfig {
  std::vector<std::string> sources;
  std::vector<std::string> formats;
  std::string corpus;
  std::string dir;
  std::size_t min_count = 5;
  std::size_t bpe_size = 32000;
  // Informational total budget, GPT-2 sized.
  std::size_t vocab_budget = 50257;
  std::string case_policy = "exact";
  bool joiner = true;
  std::size_t threads = 1;
};

fs::path artifact_dir(const PipelineConfig& cfg) {
  if (!cfg.dir.empty()) return cfg.dir;
  if (const char* env = std::getenv("MORPHPIECE_DIR"); env && *env) return env;
  return fs::current_path();
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::Io, path.string() + " does not exist");
}

ColumnMap column_map(const std::string& format) {
  if (format == "canonical") return ColumnMap::canonical();
  if (format == "morphynet-inflectional") return ColumnMap::morphynet_inflectional();
  if (format == "morphynet-derivational") return ColumnMap::morphynet_derivational();
  throw Error(ErrorCode::InvalidArgument, "unknown morphology format '" + format + "'");
}

TokenizerConfig tokenizer_config(const PipelineConfig& cfg) {
  TokenizerConfig tc;
  tc.case_policy = cfg.case_policy == "lowercase-fallback" ? CasePolicy::LowercaseFallback : CasePolicy::Exact;
  tc.nospace_joiner = cfg.joiner;
  return tc;
}

std::string join(const std::vector<std::string>& items, char sep = ' ') {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out.push_back(sep);
    out += s;
  }
  return out;
}

void print_histogram(std::ostream& out, const std::string& title, const MorphTable& table) {
  out << title << ":";
  std::size_t tail = 0;
  for (const auto& [n, count] : morph_histogram(table)) {
    if (n >= 8) {
      tail += count;
    } else {
      out << ' ' << n << '=' << count;
    }
  }
  if (tail) out << " 8+=" << tail;
  out << " total=" << table.size() << '\n';
}

int build_morphtable(const PipelineConfig& cfg, const std::string& collisions_path) {
  if (cfg.sources.empty()) throw CLI::ValidationError("--source", "at least one source is required");
  std::vector<std::pair<fs::path, ColumnMap>> sources;
  for (std::size_t i = 0; i < cfg.sources.size(); ++i) {
    require_file(cfg.sources[i]);
    std::string format = cfg.formats.empty() ? "canonical" : cfg.formats[std::min(i, cfg.formats.size() - 1)];
    sources.emplace_back(cfg.sources[i], column_map(format));
  }
  auto result = ingest(sources);
  std::cerr << "records=" << result.records << " skipped=" << result.skipped_lines.size()
            << " entries=" << result.table.size() << " inventory=" << result.table.inventory().size() << '\n';
  print_histogram(std::cerr, "full", result.table);
  auto trimmed = trim(result.table, cfg.min_count);
  print_histogram(std::cerr, "trimmed", trimmed);
  std::cerr << "trimmed inventory=" << trimmed.inventory().size() << '\n';

  std::vector<ReverseMorphTable::Collision> collisions;
  ReverseMorphTable::build(trimmed, &collisions);
  std::cerr << "reverse collisions=" << collisions.size() << '\n';
  if (!collisions_path.empty()) {
    emit_to_file(collisions_path, [&](std::ostream& out) {
      for (const auto& c : collisions) out << join(c.sequence) << '\t' << c.winner << '\t' << join(c.losers, ',') << '\n';
    });
  }
  const auto dir = artifact_dir(cfg);
  fs::create_directories(dir);
  trimmed.save(ArtifactPaths::in(dir).morphtable);
  return 0;
}

int train_bpe(const PipelineConfig& cfg) {
  require_file(cfg.corpus);
  const auto paths = ArtifactPaths::in(artifact_dir(cfg));
  require_file(paths.morphtable);
  auto table = MorphTable::load(paths.morphtable);
  auto docs = read_documents(cfg.corpus);
  auto bpe = train_filtered_bpe(table, docs, cfg.bpe_size, cfg.threads);
  bpe.save(paths.bpe_model, paths.bpe_vocab);
  std::cerr << "merges=" << bpe.merges().size() << " vocab=" << bpe.vocab_size() << '\n';
  return 0;
}

int build_vocab(const PipelineConfig& cfg) {
  const auto paths = ArtifactPaths::in(artifact_dir(cfg));
  require_file(paths.morphtable);
  require_file(paths.bpe_model);
  require_file(paths.bpe_vocab);
  auto table = MorphTable::load(paths.morphtable);
  auto bpe = BpeModel::load(paths.bpe_model, paths.bpe_vocab);
  auto vocab = build_vocabulary(table, bpe);
  vocab.save(paths.vocab);
  std::cerr << "morph=" << table.inventory().size() << " bpe=" << bpe.vocab_size()
            << " shared=" << vocab.count(SourceTag::Shared) << " specials=" << vocab.count(SourceTag::Special)
            << " merged=" << vocab.size() << " budget=" << cfg.vocab_budget << '\n';
  return 0;
}

std::vector<std::string> input_lines(const std::string& text, const std::string& input) {
  if (!text.empty()) return {text};
  if (!input.empty()) {
    require_file(input);
    return read_documents(fs::path(input));
  }
  return read_documents(std::cin);
}

int encode(const PipelineConfig& cfg, const std::string& text, const std::string& input, const std::string& emit) {
  auto tokenizer = MorphPieceTokenizer::load(artifact_dir(cfg), tokenizer_config(cfg));
  for (const auto& line : input_lines(text, input)) {
    if (emit == "trace") {
      std::vector<std::string> handlers;
      for (auto h : tokenizer.coverage_trace(line)) handlers.emplace_back(to_string(h));
      std::cout << join(handlers) << '\n';
    } else if (emit == "ids") {
      auto seq = tokenizer.encode(line);
      std::vector<std::string> ids;
      for (auto id : seq.ids) ids.push_back(std::to_string(id));
      std::cout << join(ids) << '\n';
    } else {
      std::cout << join(tokenizer.tokenize(line)) << '\n';
    }
  }
  return 0;
}

int decode(const PipelineConfig& cfg, const std::string& text, const std::string& input, const std::string& from,
           bool report_unverified) {
  auto tokenizer = MorphPieceTokenizer::load(artifact_dir(cfg), tokenizer_config(cfg));
  std::size_t unverified_total = 0;
  for (const auto& line : input_lines(text, input)) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    for (std::string f; in >> f;) fields.push_back(f);
    std::size_t unverified = 0;
    if (from == "ids") {
      std::vector<std::uint32_t> ids;
      for (const auto& f : fields) {
        try {
          std::size_t used = 0;
          auto v = std::stoul(f, &used);
          if (used != f.size()) throw std::invalid_argument(f);
          ids.push_back(static_cast<std::uint32_t>(v));
        } catch (const std::exception&) {
          throw Error(ErrorCode::ParseError, "'" + f + "' is not an id");
        }
      }
      std::cout << tokenizer.decode(ids, &unverified) << '\n';
    } else {
      std::cout << tokenizer.detokenize(fields, &unverified) << '\n';
    }
    unverified_total += unverified;
  }
  if (report_unverified) std::cerr << "unverified=" << unverified_total << '\n';
  return 0;
}

std::vector<std::unique_ptr<TokenizerAdapter>> make_adapters(const std::string& list, const PipelineConfig& cfg,
                                                             std::shared_ptr<const MorphPieceTokenizer>& morphpiece) {
  auto load_morphpiece = [&] {
    if (!morphpiece) {
      morphpiece = std::make_shared<const MorphPieceTokenizer>(
          MorphPieceTokenizer::load(artifact_dir(cfg), tokenizer_config(cfg)));
    }
    return morphpiece;
  };
  std::vector<std::unique_ptr<TokenizerAdapter>> adapters;
  std::istringstream in(list);
  for (std::string spec; std::getline(in, spec, ',');) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "whitespace") {
      adapters.push_back(std::make_unique<WhitespaceAdapter>());
    } else if (kind == "character") {
      adapters.push_back(std::make_unique<CharacterAdapter>());
    } else if (kind == "morphpiece") {
      adapters.push_back(std::make_unique<MorphPieceAdapter>(load_morphpiece()));
    } else if (kind == "bpe" && arg.empty()) {
      auto mp = load_morphpiece();
      adapters.push_back(std::make_unique<BpeAdapter>(std::make_shared<const BpeModel>(mp->bpe()), "bpe-internal"));
    } else if (kind == "bpe") {
      require_file(arg);
      adapters.push_back(std::make_unique<BpeAdapter>(std::make_shared<const BpeModel>(BpeModel::load_merges(fs::path(arg)))));
    } else if (kind == "wordpiece" || kind == "wordpiece-cased") {
      require_file(arg);
      adapters.push_back(std::make_unique<WordPieceAdapter>(fs::path(arg), kind == "wordpiece", kind));
    } else {
      throw CLI::ValidationError("--tokenizers", "unknown tokenizer '" + spec + "'");
    }
  }
  return adapters;
}

int stats(const PipelineConfig& cfg, const std::string& tokenizers, const std::string& report, std::size_t top,
          const std::string& format, const std::string& plot, const std::string& out_path) {
  require_file(cfg.corpus);
  const auto fmt = format == "json" ? ReportFormat::Json : ReportFormat::Tsv;
  std::shared_ptr<const MorphPieceTokenizer> morphpiece;
  auto docs = read_documents(cfg.corpus);

  std::function<void(std::ostream&)> emit;
  if (report == "fertility") {
    auto adapters = make_adapters(tokenizers, cfg, morphpiece);
    std::vector<const TokenizerAdapter*> raw;
    for (const auto& a : adapters) raw.push_back(a.get());
    auto result = fertility(docs, raw, cfg.threads);
    emit = [result, fmt](std::ostream& out) { emit_fertility(result, fmt, out); };
  } else {
    morphpiece = std::make_shared<const MorphPieceTokenizer>(
        MorphPieceTokenizer::load(artifact_dir(cfg), tokenizer_config(cfg)));
    auto result = coverage(docs, *morphpiece, cfg.threads);
    if (!plot.empty()) emit_to_file(plot, [&](std::ostream& out) { write_coverage_svg(result, out); });
    if (report == "coverage") {
      emit = [result, fmt](std::ostream& out) { emit_coverage(result, fmt, out); };
    } else {
      emit = [result, fmt, top](std::ostream& out) { emit_unsplit(result, top, fmt, out); };
    }
  }
  if (out_path.empty()) {
    emit(std::cout);
  } else {
    emit_to_file(out_path, emit);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MorphPiece: morphology-aware subword tokenization", "morphpiece"};
  app.require_subcommand(1);
  PipelineConfig cfg;

  auto add_dir = [&cfg](CLI::App* sub) {
    sub->add_option("--dir", cfg.dir, "Artifact directory (default: $MORPHPIECE_DIR or the working directory)");
  };
  auto add_tokenizer_flags = [&cfg](CLI::App* sub) {
    sub->add_option("--case", cfg.case_policy, "MorphTable case policy")
        ->check(CLI::IsMember({"exact", "lowercase-fallback"}));
    sub->add_flag("!--no-joiner", cfg.joiner, "Do not emit <|nospace|> before attached morph words");
  };

  std::string collisions_path;
  auto* build = app.add_subcommand("build-morphtable", "Ingest and trim a morphology database");
  build->add_option("--source", cfg.sources, "Tab-separated morphology file (repeatable)")->required();
  build->add_option("--format", cfg.formats, "canonical | morphynet-inflectional | morphynet-derivational, per source")
      ->check(CLI::IsMember({"canonical", "morphynet-inflectional", "morphynet-derivational"}));
  build->add_option("--min-count", cfg.min_count, "Drop entries with a rarer morpheme")->check(CLI::PositiveNumber);
  build->add_option("--collisions", collisions_path, "Write reverse-table collisions here");
  add_dir(build);

  auto* train = app.add_subcommand("train-bpe", "Train BPE on text the MorphTable does not cover");
  train->add_option("--corpus", cfg.corpus, "One document per line")->required();
  train->add_option("--vocab-size", cfg.bpe_size, "Target BPE vocabulary size")->check(CLI::Range(256, 1 << 24));
  train->add_option("--threads", cfg.threads, "Word counting threads")->check(CLI::PositiveNumber);
  add_dir(train);

  auto* vocab = app.add_subcommand("build-vocab", "Merge MorphTable and BPE vocabularies");
  vocab->add_option("--budget", cfg.vocab_budget, "Informational total vocabulary budget");
  add_dir(vocab);

  std::string text;
  std::string input;
  std::string emit_mode = "tokens";
  auto* enc = app.add_subcommand("encode", "Tokenize text");
  enc->add_option("--text", text, "Text to encode (default: stdin, one document per line)");
  enc->add_option("--input", input, "File to encode, one document per line");
  enc->add_option("--emit", emit_mode, "ids | tokens | trace")->check(CLI::IsMember({"ids", "tokens", "trace"}));
  add_dir(enc);
  add_tokenizer_flags(enc);

  std::string from = "ids";
  bool report_unverified = false;
  auto* dec = app.add_subcommand("decode", "Detokenize ids or tokens");
  dec->add_option("--text", text, "One line of ids or tokens");
  dec->add_option("--input", input, "File with one sequence per line");
  dec->add_option("--from", from, "ids | tokens")->check(CLI::IsMember({"ids", "tokens"}));
  dec->add_flag("--report-unverified", report_unverified, "Print the fallback word count to stderr");
  add_dir(dec);
  add_tokenizer_flags(dec);

  std::string tokenizers = "whitespace,morphpiece";
  std::string report = "fertility";
  std::size_t top = 10;
  std::string format = "tsv";
  std::string plot;
  std::string out_path;
  auto* st = app.add_subcommand("stats", "Corpus statistics");
  st->add_option("--corpus", cfg.corpus, "One document per line")->required();
  st->add_option("--tokenizers", tokenizers,
                 "Comma list: whitespace, character, morphpiece, bpe, bpe:MERGES, wordpiece:VOCAB, wordpiece-cased:VOCAB");
  st->add_option("--report", report, "fertility | coverage | unsplit")
      ->check(CLI::IsMember({"fertility", "coverage", "unsplit"}));
  st->add_option("--top", top, "Ranking length for the unsplit report");
  st->add_option("--format", format, "tsv | json")->check(CLI::IsMember({"tsv", "json"}));
  st->add_option("--plot", plot, "Write an SVG chart of coverage by word length");
  st->add_option("--out", out_path, "Report destination (default: stdout)");
  st->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
  add_dir(st);
  add_tokenizer_flags(st);

  auto* self = app.add_subcommand("selftest", "Run the bundled fixture checks");

  if (argc <= 1) {
    std::cout << app.help();
    return kUsageError;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*build) return build_morphtable(cfg, collisions_path);
    if (*train) return train_bpe(cfg);
    if (*vocab) return build_vocab(cfg);
    if (*enc) return encode(cfg, text, input, emit_mode);
    if (*dec) return decode(cfg, text, input, from, report_unverified);
    if (*st) return stats(cfg, tokenizers, report, top, format, plot, out_path);
    if (*self) return run_selftest(std::cout) ? 0 : kSelftestFailure;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
