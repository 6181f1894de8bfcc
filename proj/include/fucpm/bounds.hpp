#pragma once

// Utility thresholds, the SWU and IEU upper bounds, global unpromising item
// deletion (GUIP) and local unpromising item pruning (LUIP).

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "index.hpp"

namespace fucpm {

class ThresholdError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact rational threshold xi in [0, 1] applied to a fixed database utility.
/// min_utility = xi * u(D) is never rounded; comparisons cross-multiply.
class Threshold {
 public:
  /// Accepts `0`, `1`, `0.25`, `.5`, and the percent form `25%`.
  static Threshold parse(std::string_view text, Utility db_utility) {
    std::string_view s = text;
    std::uint64_t den = 1;
    if (!s.empty() && s.back() == '%') {
      s.remove_suffix(1);
      den = 100;
    }
    const auto dot = s.find('.');
    const auto int_part = s.substr(0, dot);
    const auto frac_part = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw ThresholdError("malformed threshold: '" + std::string(text) + "'");
    if (int_part.size() + frac_part.size() > 18) throw ThresholdError("threshold has too many digits");
    std::uint64_t num = 0;
    for (std::string_view part : {int_part, frac_part})
      for (char c : part) {
        if (c < '0' || c > '9') throw ThresholdError("malformed threshold: '" + std::string(text) + "'");
        num = num * 10 + static_cast<std::uint64_t>(c - '0');
      }
    for (std::size_t k = 0; k < frac_part.size(); ++k) den *= 10;
    if (num > den) throw ThresholdError("threshold out of range [0, 1]: '" + std::string(text) + "'");
    return Threshold(num, den, db_utility);
  }

  Threshold(std::uint64_t num, std::uint64_t den, Utility db_utility)
      : num_(num), den_(den), db_utility_(db_utility) {
    if (den == 0 || num > den) throw ThresholdError("threshold out of range [0, 1]");
  }

  /// u >= xi * u(D)
  bool admits(Utility u) const {
    return static_cast<__int128>(u.value()) * den_ >= static_cast<__int128>(num_) * db_utility_.value();
  }
  /// bound < xi * u(D)
  bool prunes(Utility bound) const { return !admits(bound); }

  std::uint64_t numerator() const { return num_; }
  std::uint64_t denominator() const { return den_; }
  Utility db_utility() const { return db_utility_; }

  /// min_utility as an exact decimal string (den is a power of ten).
  std::string min_utility_string() const {
    const __int128 scaled = static_cast<__int128>(num_) * db_utility_.value();
    const auto whole = static_cast<std::uint64_t>(scaled / den_);
    auto frac = static_cast<std::uint64_t>(scaled % den_);
    std::string out = std::to_string(whole);
    if (frac == 0) return out;
    std::string digits;
    for (std::uint64_t d = den_ / 10; d > 0; d /= 10) {
      digits += static_cast<char>('0' + frac / d);
      frac %= d;
    }
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    return out + "." + digits;
  }

 private:
  std::uint64_t num_;
  std::uint64_t den_;
  Utility db_utility_;
};

/// SWU per item present in the database, dense by item id.
class SwuTable {
 public:
  explicit SwuTable(std::size_t item_count = 0) : swu_(item_count), present_(item_count, false) {}

  std::optional<Utility> find(Item i) const {
    if (i.id >= swu_.size() || !present_[i.id]) return std::nullopt;
    return swu_[i.id];
  }
  Utility at(Item i) const {
    auto v = find(i);
    if (!v) throw std::out_of_range("item not present");
    return *v;
  }
  void add(Item i, Utility u) {
    if (i.id >= swu_.size()) {
      swu_.resize(i.id + 1);
      present_.resize(i.id + 1, false);
    }
    present_[i.id] = true;
    swu_[i.id] += u;
  }
  std::vector<Item> items() const {
    std::vector<Item> out;
    for (std::uint32_t i = 0; i < swu_.size(); ++i)
      if (present_[i]) out.push_back(Item{i});
    return out;
  }

 private:
  std::vector<Utility> swu_;
  std::vector<bool> present_;
};

inline SwuTable swu_per_item(const QSequenceDatabase& db, const ExternalUtilityTable& eut) {
  SwuTable table(eut.weights.size());
  std::vector<std::size_t> stamp(eut.weights.size(), SIZE_MAX);
  for (std::size_t s = 0; s < db.sequences.size(); ++s) {
    const auto& q = db.sequences[s];
    const Utility uq = q_sequence_utility(q, eut);
    for (const auto& seg : q.segments)
      for (const auto& set : seg.itemsets)
        for (const auto& qi : set.entries) {
          if (qi.item.id >= stamp.size()) stamp.resize(qi.item.id + 1, SIZE_MAX);
          if (stamp[qi.item.id] == s) continue;
          stamp[qi.item.id] = s;
          table.add(qi.item, uq);
        }
  }
  return table;
}

struct GuipOutcome {
  QSequenceDatabase db;
  std::set<Item> deleted;
  std::size_t rounds = 0;  // passes that deleted at least one item
};

/// Removes q-items of `keep == false` items. Itemsets emptied by deletion
/// split their sequence into segments; original positions are kept and
/// sequences left without items are dropped.
inline QSequence remove_items(const QSequence& q, const std::vector<bool>& keep) {
  QSequence out;
  out.sid = q.sid;
  for (const auto& seg : q.segments) {
    bool open = false;
    for (std::size_t k = 0; k < seg.itemsets.size(); ++k) {
      QItemset kept;
      for (const auto& qi : seg.itemsets[k].entries)
        if (qi.item.id < keep.size() && keep[qi.item.id]) kept.entries.push_back(qi);
      if (kept.entries.empty()) {
        open = false;
        continue;
      }
      if (!open) {
        out.segments.push_back(Segment{seg.first + static_cast<Position>(k), {}});
        open = true;
      }
      out.segments.back().itemsets.push_back(std::move(kept));
    }
  }
  return out;
}

/// Fixpoint deletion of items whose SWU is below `t`. The threshold keeps the
/// utility of the original database throughout.
inline GuipOutcome guip_revise(const QSequenceDatabase& db, const ExternalUtilityTable& eut, const Threshold& t) {
  GuipOutcome out;
  out.db = db;
  std::vector<bool> keep(eut.weights.size(), true);
  for (;;) {
    const SwuTable swu = swu_per_item(out.db, eut);
    bool changed = false;
    for (Item i : swu.items())
      if (t.prunes(swu.at(i))) {
        keep[i.id] = false;
        out.deleted.insert(i);
        changed = true;
      }
    if (!changed) break;
    ++out.rounds;
    std::vector<QSequence> next;
    next.reserve(out.db.sequences.size());
    for (const auto& q : out.db.sequences) {
      QSequence r = remove_items(q, keep);
      if (!r.segments.empty()) next.push_back(std::move(r));
    }
    out.db.sequences = std::move(next);
  }
  return out;
}

/// Per-sequence IEU of the extension of `prefix` by `i`; index-aligned with
/// prefix.lists. A sequence with no qualifying ending position contributes 0.
inline std::vector<Utility> ieu_per_sequence(const IChain& prefix, Item i, Extension kind, std::span<const Sil> sils) {
  std::vector<Utility> out;
  out.reserve(prefix.lists.size());
  for (const auto& list : prefix.lists) {
    const Sil& sil = sils[list.seq];
    Utility best;
    for (const auto& el : list.elements) {
      Position at = el.epos;
      if (kind == Extension::sequence) {
        if (!sil.has_successor(el.epos)) continue;
        at = el.epos + 1;
      }
      if (const SilEntry* e = sil.find(at, i)) best = std::max(best, el.utility + e->utility + e->remaining);
    }
    out.push_back(best);
  }
  return out;
}

inline Utility ieu(const IChain& prefix, Item i, Extension kind, std::span<const Sil> sils) {
  Utility total;
  for (Utility u : ieu_per_sequence(prefix, i, kind, sils)) total += u;
  return total;
}

inline Utility ieu_i_extension(const IChain& prefix, Item i, std::span<const Sil> sils) {
  return ieu(prefix, i, Extension::item, sils);
}

inline Utility ieu_s_extension(const IChain& prefix, Item i, std::span<const Sil> sils) {
  return ieu(prefix, i, Extension::sequence, sils);
}

/// LUIP test: the extension survives iff its IEU reaches min_utility.
inline bool luip_admits(Utility ieu_value, const Threshold& t) { return t.admits(ieu_value); }

struct ScoredExtension {
  Item item;
  Extension kind;
  Utility ieu;
};

/// Extension items of `chain` with their IEU values, I-extensions first and
/// each group in ascending item order. Equivalent to collect_extension_items
/// followed by ieu() per item, in one pass over the chain. Scratch buffers
/// are reused across calls and left zeroed.
class ExtensionScorer {
 public:
  explicit ExtensionScorer(std::size_t item_count) : best_(item_count), total_i_(item_count), total_s_(item_count),
                                                      seen_i_(item_count, false), seen_s_(item_count, false) {}

  std::vector<ScoredExtension> score(const IChain& chain, std::span<const Sil> sils) {
    const Item last = chain.pattern.last_item();
    std::vector<std::uint32_t> items_i, items_s;
    for (const auto& list : chain.lists) {
      const Sil& sil = sils[list.seq];
      accumulate(list, sil, last, Extension::item, items_i, total_i_, seen_i_);
      accumulate(list, sil, last, Extension::sequence, items_s, total_s_, seen_s_);
    }
    std::vector<ScoredExtension> out;
    out.reserve(items_i.size() + items_s.size());
    drain(items_i, Extension::item, total_i_, seen_i_, out);
    drain(items_s, Extension::sequence, total_s_, seen_s_, out);
    return out;
  }

 private:
  void ensure(std::uint32_t id) {
    if (id < best_.size()) return;
    best_.resize(id + 1);
    total_i_.resize(id + 1);
    total_s_.resize(id + 1);
    seen_i_.resize(id + 1, false);
    seen_s_.resize(id + 1, false);
  }

  void accumulate(const InstanceList& list, const Sil& sil, Item last, Extension kind,
                  std::vector<std::uint32_t>& items, std::vector<Utility>& total, std::vector<bool>& seen) {
    touched_.clear();
    for (const auto& el : list.elements) {
      Position at = el.epos;
      if (kind == Extension::sequence) {
        if (!sil.has_successor(el.epos)) continue;
        at = el.epos + 1;
      }
      for (const auto& e : sil.itemset(at)) {
        if (kind == Extension::item && !(last < e.item)) continue;
        ensure(e.item.id);
        const Utility v = el.utility + e.utility + e.remaining;
        auto& b = best_[e.item.id];
        if (b.value() == 0) touched_.push_back(e.item.id);
        if (v > b) b = v;
      }
    }
    for (std::uint32_t id : touched_) {
      total[id] += best_[id];
      best_[id] = Utility{};
      if (!seen[id]) {
        seen[id] = true;
        items.push_back(id);
      }
    }
  }

  static void drain(std::vector<std::uint32_t>& items, Extension kind, std::vector<Utility>& total,
                    std::vector<bool>& seen, std::vector<ScoredExtension>& out) {
    std::sort(items.begin(), items.end());
    for (std::uint32_t id : items) {
      out.push_back({Item{id}, kind, total[id]});
      total[id] = Utility{};
      seen[id] = false;
    }
  }

  std::vector<Utility> best_;
  std::vector<Utility> total_i_, total_s_;
  std::vector<bool> seen_i_, seen_s_;
  std::vector<std::uint32_t> touched_;
};

}  // namespace fucpm
