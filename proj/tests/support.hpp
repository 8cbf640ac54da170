#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphpiece/bpe.hpp"
#include "morphpiece/morphtable.hpp"
#include "morphpiece/unicode.hpp"

namespace testing_support {

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 seq{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("morphpiece-test-" + std::to_string(seq()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string random_ascii(std::mt19937_64& rng, std::size_t max_len, std::string_view alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out;
  for (std::size_t n = len(rng); n > 0; --n) out.push_back(alphabet[pick(rng)]);
  return out;
}

// Valid UTF-8 drawn from every encoded length, ASCII whitespace included.
inline std::string random_utf8(std::mt19937_64& rng, std::size_t max_codepoints) {
  std::uniform_int_distribution<std::size_t> len(0, max_codepoints);
  std::uniform_int_distribution<int> band(0, 5);
  std::string out;
  for (std::size_t n = len(rng); n > 0; --n) {
    char32_t cp = 0;
    switch (band(rng)) {
      case 0: cp = std::uniform_int_distribution<char32_t>(0x20, 0x7E)(rng); break;
      case 1: cp = U" \t\n'"[std::uniform_int_distribution<int>(0, 3)(rng)]; break;
      case 2: cp = std::uniform_int_distribution<char32_t>(0x00, 0x7F)(rng); break;
      case 3: cp = std::uniform_int_distribution<char32_t>(0x80, 0x7FF)(rng); break;
      case 4:
        do cp = std::uniform_int_distribution<char32_t>(0x800, 0xFFFF)(rng);
        while (cp >= 0xD800 && cp <= 0xDFFF);
        break;
      default: cp = std::uniform_int_distribution<char32_t>(0x10000, 0x10FFFF)(rng); break;
    }
    morphpiece::unicode::append_utf8(out, cp);
  }
  return out;
}

inline std::vector<std::string> split_symbols(std::string_view remapped) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < remapped.size()) {
    auto d = morphpiece::unicode::decode_at(remapped, pos);
    out.emplace_back(remapped.substr(pos, d->length));
    pos += d->length;
  }
  return out;
}

inline std::vector<std::string> apply_merge(const std::vector<std::string>& symbols, const morphpiece::Merge& merge) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < symbols.size();) {
    if (i + 1 < symbols.size() && symbols[i] == merge.first && symbols[i + 1] == merge.second) {
      out.push_back(symbols[i] + symbols[i + 1]);
      i += 2;
    } else {
      out.push_back(symbols[i++]);
    }
  }
  return out;
}

// Recounts every pair from scratch before each merge decision.
inline std::vector<morphpiece::Merge> brute_force_train(const morphpiece::WordCounts& counts, std::size_t target_size,
                                                        std::uint64_t min_pair_count = 2) {
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> words;
  for (const auto& [word, n] : counts) words.emplace_back(split_symbols(word), n);
  std::vector<std::string> vocab;
  for (const auto& s : morphpiece::byte_symbols()) vocab.push_back(s);

  std::vector<morphpiece::Merge> merges;
  while (vocab.size() < target_size) {
    std::map<morphpiece::Merge, std::uint64_t> pairs;
    for (const auto& [symbols, n] : words) {
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) pairs[{symbols[i], symbols[i + 1]}] += n;
    }
    const morphpiece::Merge* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [pair, n] : pairs) {
      if (!best || n > best_count ||
          (n == best_count && (pair.first + pair.second < best->first + best->second ||
                               (pair.first + pair.second == best->first + best->second && pair.first < best->first)))) {
        best = &pair;
        best_count = n;
      }
    }
    if (!best || best_count < min_pair_count) break;
    auto merge = *best;
    merges.push_back(merge);
    if (std::find(vocab.begin(), vocab.end(), merge.first + merge.second) == vocab.end()) {
      vocab.push_back(merge.first + merge.second);
    }
    for (auto& [symbols, n] : words) symbols = apply_merge(symbols, merge);
  }
  return merges;
}

// Applies the lowest-ranked adjacent pair until none applies.
inline std::vector<std::string> brute_force_encode(const std::vector<morphpiece::Merge>& merges,
                                                   std::string_view remapped) {
  auto symbols = split_symbols(remapped);
  for (;;) {
    std::size_t best = merges.size();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      for (std::size_t r = 0; r < best; ++r) {
        if (merges[r].first == symbols[i] && merges[r].second == symbols[i + 1]) {
          best = r;
          break;
        }
      }
    }
    if (best == merges.size()) return symbols;
    symbols = apply_merge(symbols, merges[best]);
  }
}

// Sentences mixing MorphTable words with BPE-path text: random letters,
// digits, punctuation, contractions, non-ASCII and irregular spacing. No '#'.
inline std::string round_trip_sentence(std::mt19937_64& rng, const std::vector<std::string>& table_words) {
  static const std::vector<std::string> filler{"the", "you", "a",    "of",  "and",  "He",   "was",  "walk",
                                               "kind", "play", "The", "it",  "naïve", "café", "über", "日本"};
  static const std::vector<std::string> punct{".", ",", "!", "?", "(", ")", "\"", "-", ":", ";", "...", "'"};
  static const std::vector<std::string> contractions{"'s", "'t", "'re", "'ll", "'d", "'ve", "'m"};
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<int> words(1, 14);
  std::string out;
  if (std::uniform_int_distribution<int>(0, 5)(rng) == 0) out += " ";
  const int n = words(rng);
  for (int i = 0; i < n; ++i) {
    std::string piece;
    switch (kind(rng)) {
      case 0:
      case 1:
      case 2:
      case 3: piece = table_words[std::uniform_int_distribution<std::size_t>(0, table_words.size() - 1)(rng)]; break;
      case 4:
      case 5: piece = filler[std::uniform_int_distribution<std::size_t>(0, filler.size() - 1)(rng)]; break;
      case 6: piece = random_ascii(rng, 8, "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ") + "q"; break;
      case 7: piece = std::to_string(std::uniform_int_distribution<int>(0, 99999)(rng)); break;
      case 8: piece = punct[std::uniform_int_distribution<std::size_t>(0, punct.size() - 1)(rng)]; break;
      default: piece = random_utf8(rng, 3); break;
    }
    if (piece.find('#') != std::string::npos) continue;
    int glue = std::uniform_int_distribution<int>(0, 11)(rng);
    if (i > 0) {
      if (glue == 0) {
        out += contractions[std::uniform_int_distribution<std::size_t>(0, contractions.size() - 1)(rng)];
      }
      if (glue <= 1) {
        out += punct[std::uniform_int_distribution<std::size_t>(0, punct.size() - 1)(rng)];
      } else if (glue == 2) {
        out += "  ";
      } else if (glue == 3) {
        out += "\t";
      } else if (glue != 4) {
        out += " ";
      }
    }
    out += piece;
  }
  if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) out += ".";
  if (std::uniform_int_distribution<int>(0, 9)(rng) == 0) out += " ";
  return out;
}

inline morphpiece::MorphEntry entry(std::string surface, std::vector<std::pair<std::string, morphpiece::Role>> parts,
                                    std::vector<std::size_t> breaks = {}) {
  morphpiece::MorphEntry e;
  e.surface = std::move(surface);
  for (auto& [text, role] : parts) e.morphemes.push_back({std::move(text), role});
  e.compound_breaks = std::move(breaks);
  return e;
}

}  // namespace testing_support
