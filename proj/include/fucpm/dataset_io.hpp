#pragma once

// Text formats for q-sequence databases, external utility tables and mining
// results, plus a seeded uniform generator for synthetic databases.
//
// Database file, one sequence per line:
//     b:2 f:4 -1 a:2 e:2 -1 c:2 e:1 -1 -2
// Utility table file, one `name weight` pair per line. Item ids follow the
// order of first appearance in the utility table.
// Results file, one pattern per line:
//     a -1 c -1 #UTIL: 36

#include <charconv>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core.hpp"

namespace fucpm {

enum class ParseErrorKind {
  malformed_token,
  duplicate_item,
  non_ascending_items,
  unknown_item,
  non_positive_quantity,
  non_positive_weight,
  duplicate_name,
  empty_itemset,
  empty_sequence,
  unterminated_sequence,
};

inline const char* to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::malformed_token: return "malformed token";
    case ParseErrorKind::duplicate_item: return "duplicate item in itemset";
    case ParseErrorKind::non_ascending_items: return "items not in ascending order";
    case ParseErrorKind::unknown_item: return "unknown item (missing external utility)";
    case ParseErrorKind::non_positive_quantity: return "quantity must be positive";
    case ParseErrorKind::non_positive_weight: return "weight must be positive";
    case ParseErrorKind::duplicate_name: return "duplicate item in utility table";
    case ParseErrorKind::empty_itemset: return "empty itemset";
    case ParseErrorKind::empty_sequence: return "empty sequence";
    case ParseErrorKind::unterminated_sequence: return "sequence not terminated by -2";
  }
  return "parse error";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& detail)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + to_string(kind) +
                           (detail.empty() ? "" : " (" + detail + ")")),
        kind_(kind), line_(line), column_(column) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> split_tokens(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    out.push_back({line.substr(i, j - i), i + 1});
    i = j;
  }
  return out;
}

/// Calls f(line_number, line) for every LF-separated line.
template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    f(++line_no, text.substr(pos, nl - pos));
    pos = nl + 1;
  }
}

/// Signed decimal integer; the whole token must be consumed.
inline std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace detail

/// Parsed utility table: names in id order plus their weights.
struct UtilityTableText {
  std::vector<std::string> names;
  ExternalUtilityTable eut;
};

inline UtilityTableText parse_utility_table(std::string_view text) {
  UtilityTableText out;
  std::unordered_map<std::string, std::uint32_t> seen;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    auto toks = detail::split_tokens(line);
    if (toks.empty()) return;
    if (toks.size() != 2) {
      const auto& bad = toks.size() > 2 ? toks[2] : toks[0];
      throw ParseError(ParseErrorKind::malformed_token, line_no, bad.column, "expected `name weight`");
    }
    std::string name(toks[0].text);
    auto w = detail::parse_int(toks[1].text);
    if (!w) throw ParseError(ParseErrorKind::malformed_token, line_no, toks[1].column, std::string(toks[1].text));
    if (*w <= 0) throw ParseError(ParseErrorKind::non_positive_weight, line_no, toks[1].column, name);
    if (!seen.emplace(name, static_cast<std::uint32_t>(out.names.size())).second)
      throw ParseError(ParseErrorKind::duplicate_name, line_no, toks[0].column, name);
    out.names.push_back(std::move(name));
    out.eut.weights.push_back(*w);
  });
  return out;
}

struct ParsedDatabase {
  QSequenceDatabase db;
  ExternalUtilityTable eut;
};

/// Parses a database against its utility table. Itemsets must already be in
/// ascending id order; nothing is re-sorted. Blank lines are skipped and
/// sids are assigned 1, 2, ... in line order.
inline ParsedDatabase parse_database(std::string_view db_text, std::string_view eut_text) {
  ParsedDatabase out;
  {
    auto table = parse_utility_table(eut_text);
    out.db.names = std::move(table.names);
    out.eut = std::move(table.eut);
  }
  std::unordered_map<std::string_view, std::uint32_t> ids;
  for (std::uint32_t i = 0; i < out.db.names.size(); ++i) ids.emplace(out.db.names[i], i);

  Sid next_sid = 1;
  detail::for_each_line(db_text, [&](std::size_t line_no, std::string_view line) {
    auto toks = detail::split_tokens(line);
    if (toks.empty()) return;
    std::vector<QItemset> itemsets;
    QItemset current;
    bool terminated = false;
    for (const auto& tok : toks) {
      if (terminated)
        throw ParseError(ParseErrorKind::malformed_token, line_no, tok.column, "token after -2");
      if (tok.text == "-1") {
        if (current.entries.empty())
          throw ParseError(ParseErrorKind::empty_itemset, line_no, tok.column, "");
        itemsets.push_back(std::move(current));
        current = QItemset{};
        continue;
      }
      if (tok.text == "-2") {
        if (!current.entries.empty())
          throw ParseError(ParseErrorKind::malformed_token, line_no, tok.column, "itemset not closed by -1");
        if (itemsets.empty()) throw ParseError(ParseErrorKind::empty_sequence, line_no, tok.column, "");
        terminated = true;
        continue;
      }
      const auto colon = tok.text.rfind(':');
      if (colon == std::string_view::npos || colon == 0)
        throw ParseError(ParseErrorKind::malformed_token, line_no, tok.column, std::string(tok.text));
      const auto name = tok.text.substr(0, colon);
      const auto qty = detail::parse_int(tok.text.substr(colon + 1));
      if (!qty) throw ParseError(ParseErrorKind::malformed_token, line_no, tok.column, std::string(tok.text));
      if (*qty <= 0) throw ParseError(ParseErrorKind::non_positive_quantity, line_no, tok.column, std::string(tok.text));
      auto it = ids.find(name);
      if (it == ids.end()) throw ParseError(ParseErrorKind::unknown_item, line_no, tok.column, std::string(name));
      const Item item{it->second};
      if (!current.entries.empty()) {
        const Item prev = current.entries.back().item;
        if (prev == item) throw ParseError(ParseErrorKind::duplicate_item, line_no, tok.column, std::string(name));
        if (item < prev) {
          if (current.find(item))
            throw ParseError(ParseErrorKind::duplicate_item, line_no, tok.column, std::string(name));
          throw ParseError(ParseErrorKind::non_ascending_items, line_no, tok.column, std::string(name));
        }
      }
      current.entries.push_back({item, *qty});
    }
    if (!terminated) throw ParseError(ParseErrorKind::unterminated_sequence, line_no, line.size() + 1, "");
    out.db.sequences.push_back(QSequence::single(next_sid++, std::move(itemsets)));
  });
  return out;
}

inline std::string serialize_utility_table(const QSequenceDatabase& db, const ExternalUtilityTable& eut) {
  std::string out;
  for (std::size_t i = 0; i < eut.weights.size(); ++i) {
    out += db.name_of(Item{static_cast<std::uint32_t>(i)});
    out += ' ';
    detail::append_int(out, eut.weights[i]);
    out += '\n';
  }
  return out;
}

/// Serializes an unrevised database. Segmented sequences have no text form.
inline std::string serialize_database(const QSequenceDatabase& db) {
  std::string out;
  for (const auto& q : db.sequences) {
    if (q.segments.size() != 1 || q.segments.front().first != 1)
      throw std::invalid_argument("cannot serialize a segmented sequence");
    for (const auto& set : q.segments.front().itemsets) {
      for (const auto& qi : set.entries) {
        out += db.name_of(qi.item);
        out += ':';
        detail::append_int(out, qi.quantity);
        out += ' ';
      }
      out += "-1 ";
    }
    out += "-2\n";
  }
  return out;
}

using PatternUtility = std::pair<Pattern, Utility>;

/// One line per pattern, sorted into canonical order.
inline std::string serialize_results(std::vector<PatternUtility> results, const std::vector<std::string>& names) {
  std::stable_sort(results.begin(), results.end(),
                   [](const auto& a, const auto& b) { return CanonicalLess{}(a.first, b.first); });
  auto name_of = [&](Item i) { return i.id < names.size() ? names[i.id] : std::to_string(i.id); };
  std::string out;
  for (const auto& [pattern, utility] : results) {
    for (const auto& set : pattern.itemsets) {
      for (Item i : set) {
        out += name_of(i);
        out += ' ';
      }
      out += "-1 ";
    }
    out += "#UTIL: ";
    detail::append_int(out, utility.value());
    out += '\n';
  }
  return out;
}

struct GeneratorParams {
  std::uint64_t sequence_count = 1;
  std::uint32_t distinct_items = 1;
  std::uint32_t max_itemsets_per_seq = 1;
  std::uint32_t max_items_per_itemset = 1;
  std::int64_t max_quantity = 1;
  std::int64_t max_weight = 1;
  std::uint64_t seed = 0;
};

inline void check(const GeneratorParams& p) {
  if (p.sequence_count < 1) throw std::invalid_argument("sequence_count must be >= 1");
  if (p.distinct_items < 1) throw std::invalid_argument("distinct_items must be >= 1");
  if (p.max_itemsets_per_seq < 1) throw std::invalid_argument("max_itemsets_per_seq must be >= 1");
  if (p.max_items_per_itemset < 1) throw std::invalid_argument("max_items_per_itemset must be >= 1");
  if (p.max_quantity < 1) throw std::invalid_argument("max_quantity must be >= 1");
  if (p.max_weight < 1) throw std::invalid_argument("max_weight must be >= 1");
}

/// Uniform synthetic generator (not IBM Quest). Sequence lengths, itemset
/// sizes, quantities and weights are uniform in [1, max]; itemset size is
/// capped by distinct_items. Item i is named by its decimal id. Output depends
/// only on params: mt19937_64 is fully specified and draws use modulo
/// reduction rather than library distributions.
inline ParsedDatabase generate_synthetic(const GeneratorParams& p) {
  check(p);
  std::mt19937_64 rng(p.seed);
  auto uniform = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };

  ParsedDatabase out;
  out.db.names.reserve(p.distinct_items);
  out.eut.weights.reserve(p.distinct_items);
  for (std::uint32_t i = 0; i < p.distinct_items; ++i) {
    out.db.names.push_back(std::to_string(i));
    out.eut.weights.push_back(static_cast<std::int64_t>(uniform(1, static_cast<std::uint64_t>(p.max_weight))));
  }

  const std::uint32_t set_cap = std::min(p.max_items_per_itemset, p.distinct_items);
  std::vector<std::uint32_t> pool(p.distinct_items);
  out.db.sequences.reserve(p.sequence_count);
  for (std::uint64_t s = 0; s < p.sequence_count; ++s) {
    const auto len = uniform(1, p.max_itemsets_per_seq);
    std::vector<QItemset> sets;
    sets.reserve(len);
    for (std::uint64_t k = 0; k < len; ++k) {
      const auto size = static_cast<std::uint32_t>(uniform(1, set_cap));
      // Partial Fisher-Yates over a pool that is restored afterwards.
      for (std::uint32_t i = 0; i < p.distinct_items; ++i) pool[i] = i;
      QItemset set;
      for (std::uint32_t j = 0; j < size; ++j) {
        const auto pick = static_cast<std::uint32_t>(uniform(j, p.distinct_items - 1));
        std::swap(pool[j], pool[pick]);
        set.entries.push_back({Item{pool[j]}, 0});
      }
      std::sort(set.entries.begin(), set.entries.end(), [](const QItem& a, const QItem& b) { return a.item < b.item; });
      for (auto& qi : set.entries) qi.quantity = static_cast<std::int64_t>(uniform(1, static_cast<std::uint64_t>(p.max_quantity)));
      sets.push_back(std::move(set));
    }
    out.db.sequences.push_back(QSequence::single(static_cast<Sid>(s + 1), std::move(sets)));
  }
  return out;
}

/// Checks every structural invariant of a database and its utility table.
/// Returns one message per violation; empty means valid.
inline std::vector<std::string> validate(const QSequenceDatabase& db, const ExternalUtilityTable& eut) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < eut.weights.size(); ++i)
    if (eut.weights[i] < 1) v.push_back("item " + std::to_string(i) + ": non-positive external utility");
  std::optional<Sid> prev_sid;
  for (const auto& q : db.sequences) {
    const std::string where = "sequence " + std::to_string(q.sid);
    if (prev_sid && q.sid <= *prev_sid) v.push_back(where + ": sids not unique and ascending");
    prev_sid = q.sid;
    if (q.segments.empty()) v.push_back(where + ": empty sequence");
    std::optional<Position> prev_last;
    for (const auto& seg : q.segments) {
      if (seg.itemsets.empty()) v.push_back(where + ": empty segment");
      if (seg.first < 1) v.push_back(where + ": positions are 1-based");
      if (prev_last && seg.first <= *prev_last + 1) v.push_back(where + ": segments must be separated by a gap");
      if (!seg.itemsets.empty()) prev_last = seg.last();
      for (const auto& set : seg.itemsets) {
        if (set.entries.empty()) v.push_back(where + ": empty itemset");
        for (std::size_t k = 0; k < set.entries.size(); ++k) {
          const auto& qi = set.entries[k];
          if (k > 0 && !(set.entries[k - 1].item < qi.item))
            v.push_back(where + ": itemset items not strictly ascending");
          if (qi.quantity < 1) v.push_back(where + ": non-positive quantity");
          if (qi.item.id >= eut.weights.size())
            v.push_back(where + ": missing external utility for item " + db.name_of(qi.item));
        }
      }
    }
  }
  return v;
}

}  // namespace fucpm
