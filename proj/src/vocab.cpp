#include "morphpiece/vocab.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "morphpiece/error.hpp"
#include "text_util.hpp"

namespace morphpiece {
namespace {

bool is_affix(std::string_view token) {
  return !token.empty() && (token.front() == '#' || token.back() == '#');
}

}  // namespace

std::string_view to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::Special: return "special";
    case SourceTag::MorphAffix: return "morph-affix";
    case SourceTag::MorphStem: return "morph-stem";
    case SourceTag::Bpe: return "bpe";
    case SourceTag::Shared: return "shared";
  }
  return "bpe";
}

std::optional<SourceTag> parse_source_tag(std::string_view text) {
  for (auto tag : {SourceTag::Special, SourceTag::MorphAffix, SourceTag::MorphStem, SourceTag::Bpe, SourceTag::Shared}) {
    if (to_string(tag) == text) return tag;
  }
  return std::nullopt;
}

std::vector<std::string> default_specials() { return {std::string(kEndOfText), std::string(kNoSpace)}; }

void MergedVocabulary::push(std::string token, SourceTag tag) {
  auto id = static_cast<std::uint32_t>(entries_.size());
  ids_.emplace(token, id);
  entries_.push_back({std::move(token), tag});
}

MergedVocabulary MergedVocabulary::merge(const std::set<std::string>& morph_inventory,
                                         std::span<const std::string> bpe_tokens,
                                         std::span<const std::string> specials) {
  std::unordered_set<std::string_view> bpe(bpe_tokens.begin(), bpe_tokens.end());
  MergedVocabulary v;
  for (const auto& s : specials) {
    if (morph_inventory.contains(s) || bpe.contains(s) || v.ids_.contains(s)) {
      throw Error(ErrorCode::InvalidArgument, "special token '" + s + "' collides with another token");
    }
    v.push(s, SourceTag::Special);
  }
  for (const auto& tok : morph_inventory) {
    SourceTag tag = bpe.contains(tok) ? SourceTag::Shared : is_affix(tok) ? SourceTag::MorphAffix : SourceTag::MorphStem;
    v.push(tok, tag);
  }
  for (const auto& tok : bpe_tokens) {
    if (!v.ids_.contains(tok)) v.push(tok, SourceTag::Bpe);
  }
  return v;
}

std::optional<std::uint32_t> MergedVocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& MergedVocabulary::token(std::uint32_t id) const {
  if (id >= entries_.size()) throw Error(ErrorCode::UnknownId, "id " + std::to_string(id) + " is out of range");
  return entries_[id].token;
}

std::optional<SourceTag> MergedVocabulary::tag(std::string_view token) const {
  auto i = id(token);
  if (!i) return std::nullopt;
  return entries_[*i].tag;
}

std::size_t MergedVocabulary::count(SourceTag tag) const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tag == tag;
  return n;
}

void MergedVocabulary::save(std::ostream& out) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out << entries_[i].token << '\t' << i << '\t' << to_string(entries_[i].tag) << '\n';
  }
}

void MergedVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  save(out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

MergedVocabulary MergedVocabulary::load(std::istream& in) {
  MergedVocabulary v;
  std::string line;
  std::size_t lineno = 0;
  while (detail::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 3 || cols[0].empty()) throw Error(ErrorCode::ParseError, "expected token<TAB>id<TAB>tag", lineno);
    std::size_t id = 0;
    try {
      std::size_t used = 0;
      id = std::stoull(std::string(cols[1]), &used);
      if (used != cols[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad id '" + std::string(cols[1]) + "'", lineno);
    }
    auto tag = parse_source_tag(cols[2]);
    if (!tag) throw Error(ErrorCode::ParseError, "unknown source tag '" + std::string(cols[2]) + "'", lineno);
    std::string token(cols[0]);
    if (v.ids_.contains(token)) throw Error(ErrorCode::DuplicateToken, "token '" + token + "' repeats", lineno);
    if (id != v.entries_.size()) {
      throw Error(ErrorCode::NonDenseIds, "expected id " + std::to_string(v.entries_.size()), lineno);
    }
    v.push(std::move(token), *tag);
  }
  return v;
}

MergedVocabulary MergedVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ArtifactMissing, "cannot open " + path.string());
  return load(in);
}

}  // namespace morphpiece
