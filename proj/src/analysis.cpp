#include "morphpiece/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "morphpiece/error.hpp"
#include "morphpiece/unicode.hpp"
#include "text_util.hpp"

namespace morphpiece {
namespace {

// Splits [0, n) into `threads` contiguous chunks and runs `work(begin, end, slot)`.
template <class Work>
void parallel_chunks(std::size_t n, std::size_t threads, Work&& work) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    work(0, n, 0);
    return;
  }
  std::vector<std::exception_ptr> failures(threads);
  {
    std::vector<std::jthread> workers;
    const std::size_t per = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          std::size_t begin = std::min(n, t * per);
          work(begin, std::min(n, begin + per), t);
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

std::string fixed(double value, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

std::size_t count_words(std::string_view document) {
  std::size_t words = 0;
  bool in_word = false;
  std::size_t pos = 0;
  while (pos < document.size()) {
    auto d = unicode::decode_at(document, pos);
    if (!d) throw Error(ErrorCode::InvalidUtf8, "malformed sequence at byte " + std::to_string(pos));
    const bool space = unicode::is_space(d->cp);
    if (!space && !in_word) ++words;
    in_word = !space;
    pos += d->length;
  }
  return words;
}

std::size_t CharacterAdapter::count_tokens(std::string_view document) const {
  unicode::require_utf8(document);
  return unicode::codepoint_count(document);
}

std::size_t BpeAdapter::count_tokens(std::string_view document) const { return model_->encode(document).size(); }

WordPieceAdapter::WordPieceAdapter(const std::filesystem::path& vocab_txt, bool lowercase, std::string name)
    : lowercase_(lowercase), name_(std::move(name)) {
  std::ifstream in(vocab_txt, std::ios::binary);
  if (!in) throw Error(ErrorCode::ArtifactMissing, "cannot open " + vocab_txt.string());
  std::string line;
  std::uint32_t id = 0;
  while (detail::read_line(in, line)) vocab_.emplace(line, id++);
}

WordPieceAdapter::WordPieceAdapter(std::vector<std::string> vocab, bool lowercase, std::string name)
    : lowercase_(lowercase), name_(std::move(name)) {
  std::uint32_t id = 0;
  for (auto& tok : vocab) vocab_.emplace(std::move(tok), id++);
}

std::vector<std::string> WordPieceAdapter::tokenize(std::string_view document) const {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < document.size()) {
    auto d = unicode::decode_at(document, pos);
    if (!d) throw Error(ErrorCode::InvalidUtf8, "malformed sequence at byte " + std::to_string(pos));
    auto piece = document.substr(pos, d->length);
    pos += d->length;
    if (unicode::is_space(d->cp)) {
      flush();
    } else if (!unicode::is_letter(d->cp) && !unicode::is_number(d->cp)) {
      flush();
      words.emplace_back(piece);
    } else if (lowercase_ && d->cp >= 'A' && d->cp <= 'Z') {
      current.push_back(static_cast<char>(d->cp - 'A' + 'a'));
    } else {
      current.append(piece);
    }
  }
  flush();

  std::vector<std::string> out;
  for (const auto& word : words) {
    if (unicode::codepoint_count(word) > 100) {
      out.emplace_back("[UNK]");
      continue;
    }
    std::vector<std::string> pieces;
    std::size_t start = 0;
    bool bad = false;
    while (start < word.size()) {
      std::size_t end = word.size();
      std::string match;
      while (end > start) {
        std::string candidate = (start > 0 ? "##" : "") + word.substr(start, end - start);
        if (vocab_.contains(candidate)) {
          match = std::move(candidate);
          break;
        }
        // Step back one code point.
        do {
          --end;
        } while (end > start && (static_cast<unsigned char>(word[end]) & 0xC0) == 0x80);
      }
      if (match.empty()) {
        bad = true;
        break;
      }
      pieces.push_back(std::move(match));
      start = end;
    }
    if (bad) {
      out.emplace_back("[UNK]");
    } else {
      out.insert(out.end(), pieces.begin(), pieces.end());
    }
  }
  return out;
}

std::size_t WordPieceAdapter::count_tokens(std::string_view document) const { return tokenize(document).size(); }

std::size_t MorphPieceAdapter::count_tokens(std::string_view document) const {
  auto tokens = tokenizer_->tokenize(document);
  if (count_joiners_) return tokens.size();
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const std::string& t) { return t != kNoSpace; }));
}

FertilityReport fertility(std::span<const std::string> documents, std::span<const TokenizerAdapter* const> adapters,
                          std::size_t threads) {
  struct Partial {
    std::uint64_t documents = 0;
    std::uint64_t words = 0;
    std::vector<std::uint64_t> tokens;
  };
  std::vector<Partial> partials(std::max<std::size_t>(1, threads));
  parallel_chunks(documents.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t slot) {
    Partial& p = partials[slot];
    p.tokens.assign(adapters.size(), 0);
    for (std::size_t d = begin; d < end; ++d) {
      const auto& doc = documents[d];
      if (doc.empty()) continue;
      ++p.documents;
      p.words += count_words(doc);
      for (std::size_t a = 0; a < adapters.size(); ++a) p.tokens[a] += adapters[a]->count_tokens(doc);
    }
  });

  FertilityReport report;
  std::vector<std::uint64_t> tokens(adapters.size(), 0);
  for (const auto& p : partials) {
    report.documents += p.documents;
    report.words += p.words;
    for (std::size_t a = 0; a < p.tokens.size(); ++a) tokens[a] += p.tokens[a];
  }
  if (report.documents == 0 || report.words == 0) throw Error(ErrorCode::EmptyCorpus, "corpus has no words");
  for (std::size_t a = 0; a < adapters.size(); ++a) {
    FertilityRow row;
    row.tokenizer = adapters[a]->name();
    row.tokens = tokens[a];
    row.average_length = static_cast<double>(tokens[a]) / static_cast<double>(report.documents);
    row.fertility = static_cast<double>(tokens[a]) / static_cast<double>(report.words);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void HandlerCounts::add(Handler h) {
  switch (h) {
    case Handler::MorphTable: ++morph_table; break;
    case Handler::BpeWhole: ++bpe_whole; break;
    case Handler::BpeSplit: ++bpe_split; break;
  }
}

HandlerCounts& HandlerCounts::operator+=(const HandlerCounts& other) {
  morph_table += other.morph_table;
  bpe_whole += other.bpe_whole;
  bpe_split += other.bpe_split;
  return *this;
}

void CoverageReport::merge(const CoverageReport& other) {
  for (const auto& [len, counts] : other.by_length) by_length[len] += counts;
  for (const auto& [tok, n] : other.unsplit) unsplit[tok] += n;
  pretokens += other.pretokens;
}

std::vector<std::pair<std::string, double>> CoverageReport::ranking(std::size_t k) const {
  std::vector<std::pair<std::string, std::uint64_t>> items(unsplit.begin(), unsplit.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < std::min(k, items.size()); ++i) {
    out.emplace_back(items[i].first, static_cast<double>(items[i].second) / static_cast<double>(pretokens));
  }
  return out;
}

CoverageReport coverage(std::span<const std::string> documents, const MorphPieceTokenizer& tokenizer,
                        std::size_t threads) {
  if (documents.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no documents");
  std::vector<CoverageReport> partials(std::max<std::size_t>(1, threads));
  parallel_chunks(documents.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t slot) {
    CoverageReport& r = partials[slot];
    for (std::size_t d = begin; d < end; ++d) {
      for (const auto& item : tokenizer.trace(documents[d])) {
        if (item.pretoken.kind == Pretoken::Kind::Space) continue;
        auto surface = item.pretoken.surface();
        r.by_length[unicode::codepoint_count(surface)].add(item.handler);
        if (item.handler != Handler::MorphTable) ++r.unsplit[std::string(surface)];
        ++r.pretokens;
      }
    }
  });
  CoverageReport report;
  for (const auto& p : partials) report.merge(p);
  return report;
}

void emit_fertility(const FertilityReport& report, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Tsv) {
    out << "tokenizer\tdocuments\twords\ttokens\taverage_length\tfertility\n";
    for (const auto& row : report.rows) {
      out << row.tokenizer << '\t' << report.documents << '\t' << report.words << '\t' << row.tokens << '\t'
          << fixed(row.average_length) << '\t' << fixed(row.fertility) << '\n';
    }
    return;
  }
  nlohmann::ordered_json j;
  j["report"] = "fertility";
  j["documents"] = report.documents;
  j["words"] = report.words;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["tokenizer"] = row.tokenizer;
    r["tokens"] = row.tokens;
    r["average_length"] = row.average_length;
    r["fertility"] = row.fertility;
    j["rows"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

void emit_coverage(const CoverageReport& report, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Tsv) {
    out << "length\tmorph_table\tbpe_whole\tbpe_split\ttotal\n";
    for (const auto& [len, c] : report.by_length) {
      out << len << '\t' << c.morph_table << '\t' << c.bpe_whole << '\t' << c.bpe_split << '\t' << c.total() << '\n';
    }
    return;
  }
  nlohmann::ordered_json j;
  j["report"] = "coverage";
  j["pretokens"] = report.pretokens;
  j["lengths"] = nlohmann::ordered_json::array();
  for (const auto& [len, c] : report.by_length) {
    nlohmann::ordered_json r;
    r["length"] = len;
    r["morph_table"] = c.morph_table;
    r["bpe_whole"] = c.bpe_whole;
    r["bpe_split"] = c.bpe_split;
    j["lengths"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

void emit_unsplit(const CoverageReport& report, std::size_t top_k, ReportFormat format, std::ostream& out) {
  auto ranking = report.ranking(top_k);
  if (format == ReportFormat::Tsv) {
    out << "rank\ttoken\tcount\trelative_frequency\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      out << i + 1 << '\t' << ranking[i].first << '\t' << report.unsplit.at(ranking[i].first) << '\t'
          << fixed(ranking[i].second) << '\n';
    }
    return;
  }
  nlohmann::ordered_json j;
  j["report"] = "unsplit";
  j["pretokens"] = report.pretokens;
  j["ranking"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    nlohmann::ordered_json r;
    r["rank"] = i + 1;
    r["token"] = ranking[i].first;
    r["count"] = report.unsplit.at(ranking[i].first);
    r["relative_frequency"] = ranking[i].second;
    j["ranking"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

void emit_to_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& emit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  emit(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_coverage_svg(const CoverageReport& report, std::ostream& out) {
  constexpr int kBar = 18;
  constexpr int kGap = 4;
  constexpr int kHeight = 300;
  constexpr int kMargin = 40;
  const std::size_t max_len = report.by_length.empty() ? 0 : report.by_length.rbegin()->first;
  std::uint64_t peak = 1;
  for (const auto& [len, c] : report.by_length) peak = std::max(peak, c.total());
  const int width = kMargin * 2 + static_cast<int>(max_len) * (kBar + kGap);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << kHeight + kMargin * 2
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<text x=\"" << kMargin << "\" y=\"20\">pretokens by word length: morph_table (orange), bpe_whole (teal), "
         "bpe_split (grey)</text>\n";
  for (const auto& [len, c] : report.by_length) {
    if (len == 0) continue;
    const int x = kMargin + static_cast<int>(len - 1) * (kBar + kGap);
    double y = kMargin + kHeight;
    const std::pair<std::uint64_t, const char*> layers[] = {
        {c.bpe_split, "#999999"}, {c.bpe_whole, "#2a9d8f"}, {c.morph_table, "#f4a261"}};
    for (const auto& [n, colour] : layers) {
      const double h = static_cast<double>(n) / static_cast<double>(peak) * kHeight;
      y -= h;
      out << "<rect x=\"" << x << "\" y=\"" << fixed(y, 2) << "\" width=\"" << kBar << "\" height=\"" << fixed(h, 2)
          << "\" fill=\"" << colour << "\"/>\n";
    }
    out << "<text x=\"" << x + 2 << "\" y=\"" << kMargin + kHeight + 14 << "\">" << len << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace morphpiece
