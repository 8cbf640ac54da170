#include "morphpiece/morphtable.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "morphpiece/error.hpp"
#include "morphpiece/unicode.hpp"
#include "text_util.hpp"

namespace morphpiece {
namespace {

bool has_space(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto d = unicode::decode_at(text, pos);
    if (!d) return true;
    if (unicode::is_space(d->cp)) return true;
    pos += d->length;
  }
  return false;
}

// Fewer morphemes first, then the smaller rendered sequence.
bool better_segmentation(const MorphEntry& a, const MorphEntry& b) {
  if (a.morphemes.size() != b.morphemes.size()) return a.morphemes.size() < b.morphemes.size();
  return a.rendered() < b.rendered();
}

std::optional<Role> parse_role(std::string_view s) {
  if (s == "prefix") return Role::Prefix;
  if (s == "stem") return Role::Stem;
  if (s == "suffix") return Role::Suffix;
  return std::nullopt;
}

// Parses one record; nullopt marks a malformed line.
std::optional<MorphEntry> parse_record(const std::vector<std::string_view>& cols, const ColumnMap& map) {
  MorphEntry entry;
  entry.surface = std::string(cols[map.surface]);
  const std::string_view stem = cols[map.stem];
  const std::string_view morph_col = cols[map.morphemes];

  switch (map.convention) {
    case ColumnMap::Convention::Canonical: {
      if (morph_col.empty()) return std::nullopt;
      struct Item {
        bool is_break;
        Morpheme morpheme;
      };
      std::vector<Item> items;
      bool listed_stem = false;
      for (auto raw : detail::split(morph_col, ',')) {
        if (raw == kHashToken) {
          items.push_back({true, {}});
          continue;
        }
        auto colon = raw.rfind(':');
        if (colon == std::string_view::npos) return std::nullopt;
        auto role = parse_role(raw.substr(colon + 1));
        if (!role) return std::nullopt;
        listed_stem = listed_stem || *role == Role::Stem;
        items.push_back({false, {std::string(raw.substr(0, colon)), *role}});
      }
      if (!listed_stem && !stem.empty() && stem != "-") {
        auto it = std::find_if(items.begin(), items.end(), [](const Item& item) {
          return item.is_break || item.morpheme.role != Role::Prefix;
        });
        items.insert(it, Item{false, {std::string(stem), Role::Stem}});
      }
      for (const auto& item : items) {
        if (item.is_break) {
          entry.compound_breaks.push_back(entry.morphemes.size());
        } else {
          entry.morphemes.push_back(item.morpheme);
        }
      }
      break;
    }
    case ColumnMap::Convention::PipeSegmented: {
      auto pieces = detail::split(morph_col, '|');
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        entry.morphemes.push_back({std::string(pieces[i]), i == 0 ? Role::Stem : Role::Suffix});
      }
      break;
    }
    case ColumnMap::Convention::AffixColumn: {
      auto role = parse_role(cols[*map.role_column]);
      if (!role || *role == Role::Stem) return std::nullopt;
      Morpheme affix{std::string(morph_col), *role};
      Morpheme base{std::string(stem), Role::Stem};
      if (*role == Role::Prefix) {
        entry.morphemes = {affix, base};
      } else {
        entry.morphemes = {base, affix};
      }
      break;
    }
  }

  if (map.convention != ColumnMap::Convention::Canonical) {
    for (std::size_t k = 1; k < entry.morphemes.size(); ++k) {
      if (entry.morphemes[k - 1].role == Role::Stem && entry.morphemes[k].role == Role::Stem) {
        entry.compound_breaks.push_back(k);
      }
    }
  }

  try {
    validate(entry);
  } catch (const Error&) {
    return std::nullopt;
  }
  return entry;
}

std::size_t required_columns(const ColumnMap& map) {
  std::size_t n = std::max({map.surface, map.stem, map.morphemes});
  if (map.role_column) n = std::max(n, *map.role_column);
  return n + 1;
}

void ingest_stream(std::istream& in, const ColumnMap& columns, std::vector<MorphEntry>& entries,
                   IngestResult& result, bool& saw_enough_columns, bool& saw_any_line) {
  if (columns.convention == ColumnMap::Convention::AffixColumn && !columns.role_column) {
    throw Error(ErrorCode::InvalidArgument, "affix-column convention needs a role column");
  }
  const std::size_t need = required_columns(columns);
  std::string line;
  std::size_t lineno = 0;
  while (detail::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    saw_any_line = true;
    auto cols = detail::split(line, '\t');
    if (cols.size() >= need) saw_enough_columns = true;
    std::optional<MorphEntry> entry;
    if (cols.size() >= need && unicode::is_valid_utf8(line)) entry = parse_record(cols, columns);
    if (!entry) {
      result.skipped_lines.push_back(lineno);
      continue;
    }
    ++result.records;
    entries.push_back(std::move(*entry));
  }
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Prefix: return "prefix";
    case Role::Stem: return "stem";
    case Role::Suffix: return "suffix";
  }
  return "stem";
}

std::string Morpheme::rendered() const {
  switch (role) {
    case Role::Prefix: return text + std::string(kHashToken);
    case Role::Suffix: return std::string(kHashToken) + text;
    case Role::Stem: break;
  }
  return text;
}

std::vector<std::string> MorphEntry::rendered() const {
  std::vector<std::string> out;
  out.reserve(morphemes.size() + compound_breaks.size());
  auto next_break = compound_breaks.begin();
  for (std::size_t i = 0; i < morphemes.size(); ++i) {
    while (next_break != compound_breaks.end() && *next_break == i) {
      out.emplace_back(kHashToken);
      ++next_break;
    }
    out.push_back(morphemes[i].rendered());
  }
  return out;
}

void validate(const MorphEntry& entry) {
  if (entry.surface.empty() || has_space(entry.surface)) {
    throw Error(ErrorCode::InvalidArgument, "surface must be non-empty without whitespace");
  }
  if (entry.morphemes.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "entry '" + entry.surface + "' needs at least two morphemes");
  }
  for (const auto& m : entry.morphemes) {
    if (m.text.empty() || has_space(m.text) || m.text.find('#') != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "bad morpheme '" + m.text + "' in '" + entry.surface + "'");
    }
  }
  std::size_t previous = 0;
  for (auto k : entry.compound_breaks) {
    if (k == 0 || k >= entry.morphemes.size() || k <= previous ||
        entry.morphemes[k - 1].role != Role::Stem || entry.morphemes[k].role != Role::Stem) {
      throw Error(ErrorCode::InvalidArgument, "compound break must sit between two stems in '" + entry.surface + "'");
    }
    previous = k;
  }
}

MorphEntry parse_rendered(std::string surface, std::span<const std::string> tokens) {
  MorphEntry entry;
  entry.surface = std::move(surface);
  for (const auto& tok : tokens) {
    if (tok == kHashToken) {
      entry.compound_breaks.push_back(entry.morphemes.size());
      continue;
    }
    const bool lead = tok.front() == '#';
    const bool trail = tok.back() == '#';
    if (lead && trail) throw Error(ErrorCode::ParseError, "token '" + tok + "' is marked on both sides");
    if (trail) {
      entry.morphemes.push_back({tok.substr(0, tok.size() - 1), Role::Prefix});
    } else if (lead) {
      entry.morphemes.push_back({tok.substr(1), Role::Suffix});
    } else {
      entry.morphemes.push_back({tok, Role::Stem});
    }
  }
  return entry;
}

MorphTable::MorphTable(std::vector<MorphEntry> entries) {
  for (auto& e : entries) {
    validate(e);
    auto it = entries_.find(e.surface);
    if (it == entries_.end()) {
      std::string key = e.surface;
      entries_.emplace(std::move(key), std::move(e));
      continue;
    }
    ++duplicates_resolved_;
    if (better_segmentation(e, it->second)) it->second = std::move(e);
  }
  for (const auto& [surface, entry] : entries_) {
    auto tokens = entry.rendered();
    for (const auto& tok : tokens) {
      inventory_.insert(tok);
      ++counts_[tok];
    }
    rendered_.emplace(surface, std::move(tokens));
  }
}

std::optional<std::vector<std::string>> MorphTable::lookup(std::string_view word) const {
  auto it = rendered_.find(word);
  if (it == rendered_.end()) return std::nullopt;
  return it->second;
}

const MorphEntry* MorphTable::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

void MorphTable::save(std::ostream& out) const {
  for (const auto& [surface, tokens] : rendered_) {
    out << surface << '\t';
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out << ' ';
      out << tokens[i];
    }
    out << '\n';
  }
}

void MorphTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  save(out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

MorphTable MorphTable::load(std::istream& in) {
  std::vector<MorphEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (detail::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw Error(ErrorCode::ParseError, "expected surface<TAB>morphemes", lineno);
    }
    std::vector<std::string> tokens;
    for (auto tok : detail::split(std::string_view(line).substr(tab + 1), ' ')) {
      if (tok.empty()) throw Error(ErrorCode::ParseError, "empty morpheme token", lineno);
      tokens.emplace_back(tok);
    }
    try {
      auto entry = parse_rendered(line.substr(0, tab), tokens);
      validate(entry);
      entries.push_back(std::move(entry));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.what(), lineno);
    }
  }
  return MorphTable(std::move(entries));
}

MorphTable MorphTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ArtifactMissing, "cannot open " + path.string());
  return load(in);
}

IngestResult ingest(std::istream& in, const ColumnMap& columns) {
  IngestResult result;
  std::vector<MorphEntry> entries;
  bool enough = false;
  bool any = false;
  ingest_stream(in, columns, entries, result, enough, any);
  if (any && !enough) {
    throw Error(ErrorCode::ColumnOutOfRange,
                "no line has the " + std::to_string(required_columns(columns)) + " columns the map references");
  }
  if (entries.empty()) throw Error(ErrorCode::ZeroValidRecords, "no valid morphology records");
  result.table = MorphTable(std::move(entries));
  return result;
}

IngestResult ingest(const std::filesystem::path& path, const ColumnMap& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return ingest(in, columns);
}

IngestResult ingest(std::span<const std::pair<std::filesystem::path, ColumnMap>> sources) {
  IngestResult result;
  std::vector<MorphEntry> entries;
  for (const auto& [path, columns] : sources) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    bool enough = false;
    bool any = false;
    IngestResult part;
    ingest_stream(in, columns, entries, part, enough, any);
    if (any && !enough) throw Error(ErrorCode::ColumnOutOfRange, "column map does not fit " + path.string());
    result.records += part.records;
    result.skipped_lines.insert(result.skipped_lines.end(), part.skipped_lines.begin(), part.skipped_lines.end());
  }
  if (entries.empty()) throw Error(ErrorCode::ZeroValidRecords, "no valid morphology records");
  result.table = MorphTable(std::move(entries));
  return result;
}

MorphTable trim(const MorphTable& table, std::size_t min_count) {
  if (min_count == 0) throw Error(ErrorCode::InvalidArgument, "min_count must be positive");
  const auto& counts = table.counts();
  std::vector<MorphEntry> kept;
  for (const auto& [surface, entry] : table.entries()) {
    bool ok = std::all_of(entry.morphemes.begin(), entry.morphemes.end(),
                          [&](const Morpheme& m) { return counts.at(m.rendered()) >= min_count; });
    if (ok) kept.push_back(entry);
  }
  return MorphTable(std::move(kept));
}

std::map<std::size_t, std::size_t> morph_histogram(const MorphTable& table) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& [surface, entry] : table.entries()) ++hist[entry.morphemes.size()];
  return hist;
}

ReverseMorphTable::ReverseMorphTable() : nodes_(1) {}

ReverseMorphTable ReverseMorphTable::build(const MorphTable& table, std::vector<Collision>* collisions) {
  ReverseMorphTable rt;
  std::map<std::vector<std::string>, std::size_t> collision_index;
  // entries() iterates in surface order, so the first writer is the smallest.
  for (const auto& [surface, entry] : table.entries()) {
    auto seq = entry.rendered();
    std::uint32_t node = 0;
    for (const auto& tok : seq) {
      auto it = rt.nodes_[node].children.find(tok);
      if (it == rt.nodes_[node].children.end()) {
        auto next = static_cast<std::uint32_t>(rt.nodes_.size());
        rt.nodes_[node].children.emplace(tok, next);
        rt.nodes_.emplace_back();
        node = next;
      } else {
        node = it->second;
      }
    }
    auto& slot = rt.nodes_[node].surface;
    if (!slot) {
      slot = surface;
      ++rt.size_;
      continue;
    }
    if (!collisions) continue;
    auto [it, inserted] = collision_index.try_emplace(seq, collisions->size());
    if (inserted) collisions->push_back({seq, *slot, {}});
    (*collisions)[it->second].losers.push_back(surface);
  }
  return rt;
}

const ReverseMorphTable::Node* ReverseMorphTable::walk(std::span<const std::string> sequence) const {
  const Node* node = &nodes_[0];
  for (const auto& tok : sequence) {
    auto it = node->children.find(tok);
    if (it == node->children.end()) return nullptr;
    node = &nodes_[it->second];
  }
  return node;
}

std::optional<std::string_view> ReverseMorphTable::find(std::span<const std::string> sequence) const {
  const Node* node = walk(sequence);
  if (!node || !node->surface) return std::nullopt;
  return std::string_view(*node->surface);
}

bool ReverseMorphTable::is_key_prefix(std::span<const std::string> sequence) const {
  return walk(sequence) != nullptr;
}

}  // namespace morphpiece
