#pragma once

// Domain types and exact utility calculus for quantitative sequence databases
// under contiguous matching.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fucpm {

/// Thrown when a utility sum or product leaves the signed 64-bit range.
class UtilityOverflow : public std::overflow_error {
 public:
  UtilityOverflow() : std::overflow_error("utility overflow") {}
};

/// Item requested at an itemset that does not hold it.
class AbsentItemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pattern has no instance at the requested ending position (or at all).
class NoInstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact non-negative utility. Arithmetic is checked; overflow throws.
class Utility {
 public:
  constexpr Utility() = default;
  constexpr explicit Utility(std::int64_t v) : value_(v) {}

  constexpr std::int64_t value() const { return value_; }

  Utility& operator+=(Utility rhs) {
    if (__builtin_add_overflow(value_, rhs.value_, &value_)) throw UtilityOverflow();
    return *this;
  }
  friend Utility operator+(Utility a, Utility b) { return a += b; }

  friend Utility operator-(Utility a, Utility b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a.value_, b.value_, &r)) throw UtilityOverflow();
    return Utility(r);
  }

  static Utility product(std::int64_t quantity, std::int64_t weight) {
    std::int64_t r;
    if (__builtin_mul_overflow(quantity, weight, &r)) throw UtilityOverflow();
    return Utility(r);
  }

  friend constexpr auto operator<=>(Utility, Utility) = default;
  friend std::ostream& operator<<(std::ostream& os, Utility u) { return os << u.value_; }

 private:
  std::int64_t value_ = 0;
};

/// Interned item identifier. Ids are dense from 0; order is numeric.
struct Item {
  std::uint32_t id = 0;
  friend constexpr auto operator<=>(Item, Item) = default;
};

using Position = std::uint32_t;  // 1-based itemset position
using Sid = std::uint32_t;

struct QItem {
  Item item;
  std::int64_t quantity = 1;
  friend bool operator==(const QItem&, const QItem&) = default;
};

struct QItemset {
  std::vector<QItem> entries;  // strictly ascending by item

  const QItem* find(Item i) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), i,
                               [](const QItem& q, Item x) { return q.item < x; });
    return (it != entries.end() && it->item == i) ? &*it : nullptr;
  }
  friend bool operator==(const QItemset&, const QItemset&) = default;
};

/// Run of itemsets with consecutive positions starting at `first`.
struct Segment {
  Position first = 1;
  std::vector<QItemset> itemsets;

  Position last() const { return first + static_cast<Position>(itemsets.size()) - 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// A q-sequence. Unrevised sequences have exactly one segment starting at 1;
/// pruning may split a sequence into segments while keeping the original
/// position numbering. No instance may cross a segment boundary.
struct QSequence {
  Sid sid = 0;
  std::vector<Segment> segments;

  static QSequence single(Sid sid, std::vector<QItemset> itemsets) {
    QSequence q;
    q.sid = sid;
    q.segments.push_back(Segment{1, std::move(itemsets)});
    return q;
  }

  /// One past the largest position (0 if empty).
  Position end_position() const {
    return segments.empty() ? 0 : segments.back().last() + 1;
  }

  /// Itemset at position p, or nullptr for a gap or an out-of-range position.
  const QItemset* itemset_at(Position p) const {
    for (const auto& seg : segments) {
      if (p < seg.first) return nullptr;
      if (p <= seg.last()) return &seg.itemsets[p - seg.first];
    }
    return nullptr;
  }

  std::size_t itemset_count() const {
    std::size_t n = 0;
    for (const auto& seg : segments) n += seg.itemsets.size();
    return n;
  }

  friend bool operator==(const QSequence&, const QSequence&) = default;
};

struct QSequenceDatabase {
  std::vector<QSequence> sequences;
  std::vector<std::string> names;  // names[id] is the external name of Item{id}

  std::string name_of(Item i) const {
    return i.id < names.size() ? names[i.id] : std::to_string(i.id);
  }
  friend bool operator==(const QSequenceDatabase&, const QSequenceDatabase&) = default;
};

/// Per-item external utility p(i), indexed by item id.
struct ExternalUtilityTable {
  std::vector<std::int64_t> weights;

  bool has(Item i) const { return i.id < weights.size() && weights[i.id] >= 1; }
  std::int64_t weight(Item i) const {
    if (!has(i)) throw std::out_of_range("missing external utility for item " + std::to_string(i.id));
    return weights[i.id];
  }
  friend bool operator==(const ExternalUtilityTable&, const ExternalUtilityTable&) = default;
};

/// Candidate pattern: ordered itemsets, each strictly ascending and non-empty.
struct Pattern {
  std::vector<std::vector<Item>> itemsets;

  Pattern() = default;
  explicit Pattern(std::vector<std::vector<Item>> sets) : itemsets(std::move(sets)) {}

  static Pattern of(Item i) { return Pattern({{i}}); }

  /// Number of items (|S|).
  std::size_t length() const {
    std::size_t n = 0;
    for (const auto& s : itemsets) n += s.size();
    return n;
  }
  std::size_t size() const { return itemsets.size(); }
  Item last_item() const { return itemsets.back().back(); }

  Pattern i_extended(Item i) const {
    Pattern p = *this;
    p.itemsets.back().push_back(i);
    return p;
  }
  Pattern s_extended(Item i) const {
    Pattern p = *this;
    p.itemsets.push_back({i});
    return p;
  }

  /// Flattened encoding: item ids, with -1 after each itemset.
  std::vector<std::int64_t> encoding() const {
    std::vector<std::int64_t> code;
    for (const auto& s : itemsets) {
      for (Item i : s) code.push_back(i.id);
      code.push_back(-1);
    }
    return code;
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Canonical order: shorter flattened encoding first, then lexicographic over
/// the encoding (separators sort before every item).
struct CanonicalLess {
  bool operator()(const Pattern& a, const Pattern& b) const {
    auto ea = a.encoding();
    auto eb = b.encoding();
    if (ea.size() != eb.size()) return ea.size() < eb.size();
    return ea < eb;
  }
};

// ---------------------------------------------------------------------------
// Utility calculus

inline Utility item_utility(Item i, Position j, const QSequence& q, const ExternalUtilityTable& eut) {
  if (j == 0 || j >= q.end_position())
    throw std::out_of_range("itemset position " + std::to_string(j) + " out of range");
  const QItemset* set = q.itemset_at(j);
  const QItem* qi = set ? set->find(i) : nullptr;
  if (!qi)
    throw AbsentItemError("absent item " + std::to_string(i.id) + " at position " + std::to_string(j));
  return Utility::product(qi->quantity, eut.weight(i));
}

inline Utility itemset_utility(const QItemset& set, const ExternalUtilityTable& eut) {
  Utility u;
  for (const auto& qi : set.entries) u += Utility::product(qi.quantity, eut.weight(qi.item));
  return u;
}

inline Utility q_sequence_utility(const QSequence& q, const ExternalUtilityTable& eut) {
  Utility u;
  for (const auto& seg : q.segments)
    for (const auto& set : seg.itemsets) u += itemset_utility(set, eut);
  return u;
}

inline Utility db_utility(const QSequenceDatabase& db, const ExternalUtilityTable& eut) {
  Utility u;
  for (const auto& q : db.sequences) u += q_sequence_utility(q, eut);
  return u;
}

namespace detail {

inline bool itemset_covers(const std::vector<Item>& pattern_set, const QItemset& set) {
  auto it = set.entries.begin();
  for (Item i : pattern_set) {
    it = std::lower_bound(it, set.entries.end(), i,
                          [](const QItem& q, Item x) { return q.item < x; });
    if (it == set.entries.end() || it->item != i) return false;
  }
  return true;
}

}  // namespace detail

/// Ascending ending positions of every contiguous instance of `s` in `q`.
inline std::vector<Position> ending_positions(const Pattern& s, const QSequence& q) {
  std::vector<Position> out;
  const std::size_t m = s.size();
  if (m == 0) return out;
  for (const auto& seg : q.segments) {
    const auto& sets = seg.itemsets;
    if (sets.size() < m) continue;
    for (std::size_t start = 0; start + m <= sets.size(); ++start) {
      bool ok = true;
      for (std::size_t k = 0; k < m && ok; ++k) ok = detail::itemset_covers(s.itemsets[k], sets[start + k]);
      if (ok) out.push_back(seg.first + static_cast<Position>(start + m - 1));
    }
  }
  return out;
}

inline bool contains(const Pattern& s, const QSequence& q) { return !ending_positions(s, q).empty(); }

/// u(S, p, Q): utility of the unique alignment of `s` ending at position p.
inline Utility instance_utility(const Pattern& s, Position p, const QSequence& q,
                                const ExternalUtilityTable& eut) {
  const auto eps = ending_positions(s, q);
  if (!std::binary_search(eps.begin(), eps.end(), p))
    throw NoInstanceError("no instance ending at position " + std::to_string(p));
  const std::size_t m = s.size();
  Utility u;
  for (std::size_t k = 0; k < m; ++k) {
    const Position at = p - static_cast<Position>(m - 1 - k);
    for (Item i : s.itemsets[k]) u += item_utility(i, at, q, eut);
  }
  return u;
}

/// u(S, Q): maximum instance utility.
inline Utility pattern_utility_in_sequence(const Pattern& s, const QSequence& q,
                                           const ExternalUtilityTable& eut) {
  const auto eps = ending_positions(s, q);
  if (eps.empty()) throw NoInstanceError("sequence does not contain pattern");
  Utility best;
  for (Position p : eps) best = std::max(best, instance_utility(s, p, q, eut));
  return best;
}

/// u(S): sum of per-sequence maxima over containing sequences.
inline Utility pattern_utility(const Pattern& s, const QSequenceDatabase& db, const ExternalUtilityTable& eut) {
  Utility u;
  for (const auto& q : db.sequences)
    if (contains(s, q)) u += pattern_utility_in_sequence(s, q, eut);
  return u;
}

/// Utility of every q-item strictly after item `i` in itemset `j`, in the
/// order (position ascending, item id ascending). Later segments count.
inline Utility remaining_utility_after(const QSequence& q, Position j, Item i, const ExternalUtilityTable& eut) {
  (void)item_utility(i, j, q, eut);  // validates position and presence
  Utility u;
  for (const auto& seg : q.segments) {
    for (std::size_t k = 0; k < seg.itemsets.size(); ++k) {
      const Position at = seg.first + static_cast<Position>(k);
      if (at < j) continue;
      for (const auto& qi : seg.itemsets[k].entries)
        if (at > j || qi.item > i) u += Utility::product(qi.quantity, eut.weight(qi.item));
    }
  }
  return u;
}

}  // namespace fucpm
