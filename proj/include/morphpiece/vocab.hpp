#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace morphpiece {

inline constexpr std::string_view kEndOfText = "<|endoftext|>";
inline constexpr std::string_view kNoSpace = "<|nospace|>";

enum class SourceTag { Special, MorphAffix, MorphStem, Bpe, Shared };

std::string_view to_string(SourceTag tag);
std::optional<SourceTag> parse_source_tag(std::string_view text);

std::vector<std::string> default_specials();

class MergedVocabulary {
 public:
  struct Entry {
    std::string token;
    SourceTag tag;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  MergedVocabulary() = default;

  // Ids: specials, then morph tokens in sorted order, then the remaining BPE
  // tokens in their given order. A token in both sources gets one id, tagged
  // Shared. Throws Error(InvalidArgument) if a special collides with either
  // source or repeats.
  static MergedVocabulary merge(const std::set<std::string>& morph_inventory,
                                std::span<const std::string> bpe_tokens,
                                std::span<const std::string> specials);

  std::optional<std::uint32_t> id(std::string_view token) const;
  const std::string& token(std::uint32_t id) const;  // throws Error(UnknownId)
  std::optional<SourceTag> tag(std::string_view token) const;
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  // Shared plus Special never overlap, so these partition the vocabulary.
  std::size_t count(SourceTag tag) const;

  // "token<TAB>id<TAB>tag" per line, sorted by id.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static MergedVocabulary load(std::istream& in);
  static MergedVocabulary load(const std::filesystem::path& path);

  friend bool operator==(const MergedVocabulary& a, const MergedVocabulary& b) { return a.entries_ == b.entries_; }

 private:
  void push(std::string token, SourceTag tag);

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

}  // namespace morphpiece
