#include "morphpiece/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <thread>
#include <unordered_set>

#include "morphpiece/error.hpp"
#include "morphpiece/unicode.hpp"
#include "text_util.hpp"

namespace morphpiece {
namespace {

struct ByteRemap {
  std::array<std::string, 256> symbols;
  std::array<char32_t, 256> codepoints{};

  ByteRemap() {
    auto printable = [](int b) {
      return (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
    };
    char32_t next = 256;
    for (int b = 0; b < 256; ++b) {
      codepoints[b] = printable(b) ? static_cast<char32_t>(b) : next++;
      unicode::append_utf8(symbols[b], codepoints[b]);
    }
  }
};

const ByteRemap& remap() {
  static const ByteRemap table;
  return table;
}

constexpr std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

bool is_other(char32_t cp) {
  return !unicode::is_space(cp) && !unicode::is_letter(cp) && !unicode::is_number(cp);
}

// Compares left+right concatenations without building them.
int compare_concat(std::string_view l1, std::string_view r1, std::string_view l2, std::string_view r2) {
  std::size_t n1 = l1.size() + r1.size();
  std::size_t n2 = l2.size() + r2.size();
  std::size_t n = std::min(n1, n2);
  for (std::size_t i = 0; i < n; ++i) {
    auto c1 = static_cast<unsigned char>(i < l1.size() ? l1[i] : r1[i - l1.size()]);
    auto c2 = static_cast<unsigned char>(i < l2.size() ? l2[i] : r2[i - l2.size()]);
    if (c1 != c2) return c1 < c2 ? -1 : 1;
  }
  if (n1 == n2) return 0;
  return n1 < n2 ? -1 : 1;
}

}  // namespace

const std::array<std::string, 256>& byte_symbols() { return remap().symbols; }

std::optional<std::uint8_t> symbol_byte(char32_t symbol) {
  static const auto inverse = [] {
    std::unordered_map<char32_t, std::uint8_t> m;
    for (int b = 0; b < 256; ++b) m.emplace(remap().codepoints[b], static_cast<std::uint8_t>(b));
    return m;
  }();
  auto it = inverse.find(symbol);
  if (it == inverse.end()) return std::nullopt;
  return it->second;
}

std::string remap_bytes(std::string_view raw) {
  std::string out;
  out.reserve(raw.size() * 2);
  for (char c : raw) out += remap().symbols[static_cast<unsigned char>(c)];
  return out;
}

std::string decode_bytes(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& tok : tokens) {
    std::size_t pos = 0;
    while (pos < tok.size()) {
      auto d = unicode::decode_at(tok, pos);
      std::optional<std::uint8_t> byte;
      if (d) byte = symbol_byte(d->cp);
      if (!byte) throw Error(ErrorCode::UnknownToken, "token '" + tok + "' has a symbol outside the byte alphabet");
      out.push_back(static_cast<char>(*byte));
      pos += d->length;
    }
  }
  return out;
}

std::vector<Pretoken> pretokenize(std::string_view text) {
  struct Cp {
    char32_t cp;
    std::size_t offset;
  };
  std::vector<Cp> cps;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto d = unicode::decode_at(text, pos);
    if (!d) throw Error(ErrorCode::InvalidUtf8, "malformed sequence at byte " + std::to_string(pos));
    cps.push_back({d->cp, pos});
    pos += d->length;
  }
  const std::size_t n = cps.size();
  auto offset = [&](std::size_t i) { return i < n ? cps[i].offset : text.size(); };
  auto at = [&](std::size_t i) -> char32_t { return i < n ? cps[i].cp : 0; };
  auto run = [&](std::size_t i, auto pred) {
    while (i < n && pred(cps[i].cp)) ++i;
    return i;
  };

  std::vector<Pretoken> out;
  auto emit = [&](std::size_t begin, std::size_t end, Pretoken::Kind kind) {
    Pretoken pt;
    pt.text = std::string(text.substr(offset(begin), offset(end) - offset(begin)));
    pt.kind = kind;
    pt.had_leading_space = kind != Pretoken::Kind::Space && pt.text.size() > 1 && pt.text.front() == ' ';
    out.push_back(std::move(pt));
  };

  std::size_t i = 0;
  while (i < n) {
    const char32_t c = at(i);
    if (c == U'\'') {
      const char32_t c1 = at(i + 1);
      const char32_t c2 = at(i + 2);
      std::size_t len = 0;
      if (c1 == U's' || c1 == U't' || c1 == U'm' || c1 == U'd') {
        len = 2;
      } else if ((c1 == U'r' && c2 == U'e') || (c1 == U'v' && c2 == U'e') || (c1 == U'l' && c2 == U'l')) {
        len = 3;
      }
      if (len) {
        emit(i, i + len, Pretoken::Kind::Contraction);
        i += len;
        continue;
      }
    }
    const std::size_t body = (c == U' ' && i + 1 < n) ? i + 1 : i;
    const char32_t b = at(body);
    if (body < n && unicode::is_letter(b)) {
      auto end = run(body, unicode::is_letter);
      emit(i, end, Pretoken::Kind::Letters);
      i = end;
      continue;
    }
    if (body < n && unicode::is_number(b)) {
      auto end = run(body, unicode::is_number);
      emit(i, end, Pretoken::Kind::Digits);
      i = end;
      continue;
    }
    if (body < n && is_other(b)) {
      auto end = run(body, is_other);
      emit(i, end, Pretoken::Kind::Other);
      i = end;
      continue;
    }
    // Whitespace: \s+(?!\S) leaves the last space for the next token, else \s+.
    auto end = run(i, unicode::is_space);
    if (end < n && end - i >= 2) --end;
    emit(i, end, Pretoken::Kind::Space);
    i = end;
  }
  return out;
}

BpeModel::BpeModel() {
  for (const auto& s : byte_symbols()) add_token(s);
}

void BpeModel::add_token(std::string token) {
  auto id = static_cast<std::uint32_t>(tokens_.size());
  if (ids_.emplace(token, id).second) tokens_.push_back(std::move(token));
}

BpeModel BpeModel::from_merges(std::vector<Merge> merges) {
  BpeModel model;
  model.merges_.reserve(merges.size());
  for (auto& [left, right] : merges) {
    if (!model.contains(left) || !model.contains(right)) {
      throw Error(ErrorCode::ParseError, "merge '" + left + " " + right + "' uses an unknown symbol",
                  model.merges_.size() + 1);
    }
    model.ranks_.try_emplace(left + " " + right, static_cast<std::uint32_t>(model.merges_.size()));
    model.add_token(left + right);
    model.merges_.emplace_back(std::move(left), std::move(right));
  }
  return model;
}

std::optional<std::uint32_t> BpeModel::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> BpeModel::encode_symbols(std::string_view remapped) const {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < remapped.size()) {
    auto d = unicode::decode_at(remapped, pos);
    if (!d || !symbol_byte(d->cp)) {
      throw Error(ErrorCode::UnknownToken, "symbol outside the byte alphabet at byte " + std::to_string(pos));
    }
    parts.emplace_back(remapped.substr(pos, d->length));
    pos += d->length;
  }
  std::string key;
  while (parts.size() > 1) {
    std::uint32_t best = UINT32_MAX;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      key.assign(parts[i]).append(" ").append(parts[i + 1]);
      auto it = ranks_.find(key);
      if (it != ranks_.end() && it->second < best) best = it->second;
    }
    if (best == UINT32_MAX) break;
    const auto& [left, right] = merges_[best];
    std::vector<std::string> next;
    next.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size();) {
      if (i + 1 < parts.size() && parts[i] == left && parts[i + 1] == right) {
        next.push_back(left + right);
        i += 2;
      } else {
        next.push_back(std::move(parts[i]));
        ++i;
      }
    }
    parts = std::move(next);
  }
  return parts;
}

std::vector<std::string> BpeModel::encode_pretoken(const Pretoken& pretoken) const {
  return encode_symbols(remap_bytes(pretoken.text));
}

std::vector<std::string> BpeModel::encode(std::string_view text) const {
  std::vector<std::string> out;
  for (const auto& pt : pretokenize(text)) {
    auto toks = encode_pretoken(pt);
    out.insert(out.end(), std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end()));
  }
  return out;
}

void BpeModel::save(std::ostream& model, std::ostream& vocab) const {
  model << "bpe-v1 " << tokens_.size() << '\n';
  for (const auto& [left, right] : merges_) model << left << ' ' << right << '\n';
  for (std::size_t i = 0; i < tokens_.size(); ++i) vocab << tokens_[i] << '\t' << i << '\n';
}

void BpeModel::save(const std::filesystem::path& model_path, const std::filesystem::path& vocab_path) const {
  std::ofstream model(model_path, std::ios::binary);
  std::ofstream vocab(vocab_path, std::ios::binary);
  if (!model || !vocab) throw Error(ErrorCode::Io, "cannot write BPE model files");
  save(model, vocab);
  if (!model || !vocab) throw Error(ErrorCode::Io, "write failed for BPE model files");
}

namespace {

// Validates symbol order as it reads, so errors name the offending file line.
std::vector<Merge> read_merges(std::istream& in, std::optional<std::size_t>* declared_size) {
  std::vector<Merge> merges;
  std::unordered_set<std::string> known(byte_symbols().begin(), byte_symbols().end());
  std::string line;
  std::size_t lineno = 0;
  while (detail::read_line(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line.rfind("#version", 0) == 0) continue;
      if (line.rfind("bpe-v1 ", 0) == 0) {
        try {
          if (declared_size) *declared_size = std::stoull(line.substr(7));
        } catch (const std::exception&) {
          throw Error(ErrorCode::ParseError, "bad header '" + line + "'", lineno);
        }
        continue;
      }
    }
    if (line.empty()) continue;
    auto parts = detail::split(line, ' ');
    if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
      throw Error(ErrorCode::ParseError, "expected 'left right' merge", lineno);
    }
    std::string left(parts[0]);
    std::string right(parts[1]);
    if (!known.count(left) || !known.count(right)) {
      throw Error(ErrorCode::ParseError, "merge '" + line + "' uses an unknown symbol", lineno);
    }
    known.insert(left + right);
    merges.emplace_back(std::move(left), std::move(right));
  }
  return merges;
}

}  // namespace

BpeModel BpeModel::load_merges(std::istream& in) {
  return from_merges(read_merges(in, nullptr));
}

BpeModel BpeModel::load_merges(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ArtifactMissing, "cannot open " + path.string());
  return load_merges(in);
}

BpeModel BpeModel::load(std::istream& model_in, std::istream& vocab_in) {
  std::optional<std::size_t> declared;
  auto merges = read_merges(model_in, &declared);
  if (!declared) throw Error(ErrorCode::ParseError, "missing 'bpe-v1' header", 1);
  auto model = from_merges(std::move(merges));
  if (model.vocab_size() != *declared) {
    throw Error(ErrorCode::InconsistentArtifacts, "header declares " + std::to_string(*declared) +
                                                      " tokens, merges produce " + std::to_string(model.vocab_size()));
  }
  std::string line;
  std::size_t lineno = 0;
  std::size_t seen = 0;
  while (detail::read_line(vocab_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::ParseError, "expected token<TAB>id", lineno);
    std::size_t id = 0;
    try {
      id = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad id", lineno);
    }
    if (id != seen || id >= model.tokens_.size() || model.tokens_[id] != line.substr(0, tab)) {
      throw Error(ErrorCode::InconsistentArtifacts, "vocab line disagrees with merges", lineno);
    }
    ++seen;
  }
  if (seen != model.vocab_size()) {
    throw Error(ErrorCode::InconsistentArtifacts, "vocab file lists " + std::to_string(seen) + " of " +
                                                      std::to_string(model.vocab_size()) + " tokens");
  }
  return model;
}

BpeModel BpeModel::load(const std::filesystem::path& model_path, const std::filesystem::path& vocab_path) {
  std::ifstream model(model_path, std::ios::binary);
  if (!model) throw Error(ErrorCode::ArtifactMissing, "cannot open " + model_path.string());
  std::ifstream vocab(vocab_path, std::ios::binary);
  if (!vocab) throw Error(ErrorCode::ArtifactMissing, "cannot open " + vocab_path.string());
  return load(model, vocab);
}

WordCounts count_words(std::span<const std::string> documents, const ExclusionFn& excluded, std::size_t threads) {
  auto count_range = [&](std::size_t begin, std::size_t end) {
    WordCounts counts;
    for (std::size_t d = begin; d < end; ++d) {
      for (const auto& pt : pretokenize(documents[d])) {
        if (excluded && excluded(pt.surface())) continue;
        ++counts[remap_bytes(pt.text)];
      }
    }
    return counts;
  };

  threads = std::max<std::size_t>(1, std::min(threads, documents.size()));
  if (threads == 1) return count_range(0, documents.size());

  std::vector<WordCounts> shards(threads);
  std::vector<std::exception_ptr> failures(threads);
  {
    std::vector<std::jthread> workers;
    const std::size_t per = (documents.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          std::size_t begin = std::min(documents.size(), t * per);
          shards[t] = count_range(begin, std::min(documents.size(), begin + per));
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  WordCounts total = std::move(shards[0]);
  for (std::size_t t = 1; t < threads; ++t) {
    for (auto& [word, n] : shards[t]) total[word] += n;
  }
  return total;
}

BpeModel train(const WordCounts& word_counts, const TrainOptions& options) {
  if (options.target_size < 256) {
    throw Error(ErrorCode::InvalidArgument, "target size must cover the 256 byte symbols");
  }
  if (word_counts.empty()) throw Error(ErrorCode::EmptyEffectiveCorpus, "no pretokens left to train on");

  BpeModel base;
  std::vector<std::string> tokens = base.tokens();
  std::unordered_map<std::string, std::uint32_t> ids;
  for (std::uint32_t i = 0; i < tokens.size(); ++i) ids.emplace(tokens[i], i);

  struct Word {
    std::vector<std::uint32_t> symbols;
    std::int64_t freq;
  };
  // Sorted so that where-lists and heap pushes happen in a fixed order.
  std::map<std::string, std::uint64_t> ordered(word_counts.begin(), word_counts.end());
  std::vector<Word> words;
  words.reserve(ordered.size());
  for (const auto& [remapped, freq] : ordered) {
    Word w{{}, static_cast<std::int64_t>(freq)};
    std::size_t pos = 0;
    while (pos < remapped.size()) {
      auto d = unicode::decode_at(remapped, pos);
      auto byte = d ? symbol_byte(d->cp) : std::nullopt;
      if (!byte) throw Error(ErrorCode::InvalidArgument, "word is not in the remapped alphabet");
      w.symbols.push_back(*byte);
      pos += d->length;
    }
    words.push_back(std::move(w));
  }

  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where;
  for (std::uint32_t w = 0; w < words.size(); ++w) {
    const auto& s = words[w].symbols;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      auto key = pair_key(s[i], s[i + 1]);
      pair_counts[key] += words[w].freq;
      auto& list = where[key];
      if (list.empty() || list.back() != w) list.push_back(w);
    }
  }

  struct Candidate {
    std::int64_t count;
    std::uint32_t left;
    std::uint32_t right;
  };
  // Max-heap order: count, then smaller merged token, then smaller left symbol.
  auto lower_priority = [&tokens](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count < b.count;
    int c = compare_concat(tokens[a.left], tokens[a.right], tokens[b.left], tokens[b.right]);
    if (c != 0) return c > 0;
    return tokens[a.left] > tokens[b.left];
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(lower_priority)> heap(lower_priority);
  {
    std::vector<std::uint64_t> keys;
    keys.reserve(pair_counts.size());
    for (const auto& [key, count] : pair_counts) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    for (auto key : keys) {
      heap.push({pair_counts[key], static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key)});
    }
  }

  std::vector<Merge> merges;
  const auto min_count = static_cast<std::int64_t>(std::max<std::uint64_t>(1, options.min_pair_count));
  std::vector<std::uint64_t> touched;
  while (tokens.size() < options.target_size && !heap.empty()) {
    Candidate top = heap.top();
    heap.pop();
    const auto key = pair_key(top.left, top.right);
    auto current = pair_counts.find(key);
    if (current == pair_counts.end() || current->second != top.count) continue;
    if (top.count < min_count) break;

    std::string merged = tokens[top.left] + tokens[top.right];
    std::uint32_t merged_id;
    if (auto it = ids.find(merged); it != ids.end()) {
      merged_id = it->second;
    } else {
      merged_id = static_cast<std::uint32_t>(tokens.size());
      ids.emplace(merged, merged_id);
      tokens.push_back(merged);
    }
    merges.emplace_back(tokens[top.left], tokens[top.right]);

    auto affected = std::move(where[key]);
    where.erase(key);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    touched.clear();
    for (auto w : affected) {
      auto& s = words[w].symbols;
      const auto freq = words[w].freq;
      bool present = false;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == top.left && s[i + 1] == top.right) {
          present = true;
          break;
        }
      }
      if (!present) continue;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        auto k = pair_key(s[i], s[i + 1]);
        pair_counts[k] -= freq;
        touched.push_back(k);
      }
      std::vector<std::uint32_t> next;
      next.reserve(s.size());
      for (std::size_t i = 0; i < s.size();) {
        if (i + 1 < s.size() && s[i] == top.left && s[i + 1] == top.right) {
          next.push_back(merged_id);
          i += 2;
        } else {
          next.push_back(s[i]);
          ++i;
        }
      }
      s = std::move(next);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        auto k = pair_key(s[i], s[i + 1]);
        pair_counts[k] += freq;
        touched.push_back(k);
        if (s[i] == merged_id || s[i + 1] == merged_id) {
          auto& list = where[k];
          if (list.empty() || list.back() != w) list.push_back(w);
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (auto k : touched) {
      auto count = pair_counts[k];
      if (count > 0) heap.push({count, static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k)});
    }
  }
  return BpeModel::from_merges(std::move(merges));
}

BpeModel train(std::span<const std::string> documents, const TrainOptions& options, const ExclusionFn& excluded,
               std::size_t threads) {
  return train(count_words(documents, excluded, threads), options);
}

}  // namespace morphpiece
