#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace morphpiece {

// Standalone separator token emitted between the stems of a compound word.
inline constexpr std::string_view kHashToken = "#";

enum class Role { Prefix, Stem, Suffix };

std::string_view to_string(Role role);

struct Morpheme {
  std::string text;
  Role role = Role::Stem;

  // Prefix renders as "text#", Suffix as "#text", Stem as "text".
  std::string rendered() const;

  friend bool operator==(const Morpheme&, const Morpheme&) = default;
};

struct MorphEntry {
  std::string surface;
  std::vector<Morpheme> morphemes;
  // A value k places a separator between morphemes[k - 1] and morphemes[k].
  std::vector<std::size_t> compound_breaks;

  std::vector<std::string> rendered() const;

  friend bool operator==(const MorphEntry&, const MorphEntry&) = default;
};

// Throws Error(InvalidArgument) when the entry breaks a structural rule:
// empty or whitespace-bearing text, '#' inside a morpheme, fewer than two
// morphemes, or a compound break that does not sit between two stems.
void validate(const MorphEntry& entry);

// Inverse of MorphEntry::rendered(). Throws Error(ParseError) on tokens such
// as "#x#" that cannot come from any morpheme.
MorphEntry parse_rendered(std::string surface, std::span<const std::string> tokens);

class MorphTable {
 public:
  using EntryMap = std::map<std::string, MorphEntry, std::less<>>;

  MorphTable() = default;
  // Duplicate surfaces keep the segmentation with fewer morphemes, then the
  // lexicographically smaller rendered sequence.
  explicit MorphTable(std::vector<MorphEntry> entries);

  std::optional<std::vector<std::string>> lookup(std::string_view word) const;
  const MorphEntry* find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != nullptr; }

  const EntryMap& entries() const noexcept { return entries_; }
  const std::set<std::string>& inventory() const noexcept { return inventory_; }
  const std::map<std::string, std::size_t>& counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Surfaces that lost duplicate resolution during construction.
  std::size_t duplicates_resolved() const noexcept { return duplicates_resolved_; }

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static MorphTable load(std::istream& in);
  static MorphTable load(const std::filesystem::path& path);

  friend bool operator==(const MorphTable& a, const MorphTable& b) { return a.entries_ == b.entries_; }

 private:
  EntryMap entries_;
  std::map<std::string, std::vector<std::string>, std::less<>> rendered_;
  std::set<std::string> inventory_;
  std::map<std::string, std::size_t> counts_;
  std::size_t duplicates_resolved_ = 0;
};

// How a tab-separated morphology file maps onto entries.
struct ColumnMap {
  enum class Convention {
    // morphemes column holds `text:role(,text:role)*`; a bare `#` item marks a
    // compound break. When no stem-role item is listed the stem column is
    // inserted after the leading prefixes ("-" or empty means none).
    Canonical,
    // morphemes column holds `stem|suffix|suffix...` (MorphyNet inflectional).
    PipeSegmented,
    // morphemes column holds one affix, role_column says prefix or suffix
    // (MorphyNet derivational).
    AffixColumn,
  };

  std::size_t surface = 0;
  std::size_t stem = 1;
  std::size_t morphemes = 2;
  std::optional<std::size_t> role_column;
  Convention convention = Convention::Canonical;

  static ColumnMap canonical() { return {}; }
  static ColumnMap morphynet_inflectional() { return {1, 0, 3, std::nullopt, Convention::PipeSegmented}; }
  static ColumnMap morphynet_derivational() { return {1, 0, 4, 5, Convention::AffixColumn}; }
};

struct IngestResult {
  MorphTable table;
  std::size_t records = 0;
  // 1-based line numbers of malformed records that were skipped.
  std::vector<std::size_t> skipped_lines;
};

IngestResult ingest(std::istream& in, const ColumnMap& columns);
IngestResult ingest(const std::filesystem::path& path, const ColumnMap& columns);
// Several source files feed one table, e.g. inflectional plus derivational.
IngestResult ingest(std::span<const std::pair<std::filesystem::path, ColumnMap>> sources);

// Keeps entries whose every morpheme reaches `min_count` in the given table's
// counts; inventory and counts are recomputed on the survivors.
MorphTable trim(const MorphTable& table, std::size_t min_count);

// Morpheme count -> number of entries.
std::map<std::size_t, std::size_t> morph_histogram(const MorphTable& table);

class ReverseMorphTable {
 public:
  struct Collision {
    std::vector<std::string> sequence;
    std::string winner;
    std::vector<std::string> losers;
  };

  ReverseMorphTable();

  // Colliding sequences resolve to the lexicographically smallest surface.
  static ReverseMorphTable build(const MorphTable& table, std::vector<Collision>* collisions = nullptr);

  std::optional<std::string_view> find(std::span<const std::string> sequence) const;
  // True when `sequence` is a (not necessarily proper) prefix of some key.
  bool is_key_prefix(std::span<const std::string> sequence) const;
  std::size_t size() const noexcept { return size_; }

 private:
  struct Node {
    std::map<std::string, std::uint32_t, std::less<>> children;
    std::optional<std::string> surface;
  };

  const Node* walk(std::span<const std::string> sequence) const;

  std::vector<Node> nodes_;
  std::size_t size_ = 0;
};

}  // namespace morphpiece
