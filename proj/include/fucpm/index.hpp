#pragma once

// Sequence information lists (per q-item utility and remaining utility) and
// instance chains (ending position and utility of every instance of a
// pattern), with construction for 1-sequences and for I-/S-extensions.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "core.hpp"

namespace fucpm {

struct SilEntry {
  Item item;
  Utility utility;
  Utility remaining;
  friend bool operator==(const SilEntry&, const SilEntry&) = default;
};

/// Sequence information list of one q-sequence. Itemsets are addressed by
/// their original 1-based position; positions removed by pruning are gaps.
class Sil {
 public:
  static constexpr std::uint32_t kGap = UINT32_MAX;

  Sil() = default;

  Sil(const QSequence& q, const ExternalUtilityTable& eut) : sid_(q.sid) {
    const Position end = q.end_position();
    begin_.assign(end == 0 ? 1 : end, 0);
    segment_.assign(end == 0 ? 0 : end - 1, kGap);
    for (std::uint32_t s = 0; s < q.segments.size(); ++s) {
      const auto& seg = q.segments[s];
      for (std::size_t k = 0; k < seg.itemsets.size(); ++k) segment_[seg.first + k - 1] = s;
    }
    // begin_[p-1]..begin_[p] spans the entries of position p.
    for (Position p = 1; p < end; ++p) {
      if (const QItemset* set = q.itemset_at(p))
        for (const auto& qi : set->entries)
          entries_.push_back({qi.item, Utility::product(qi.quantity, eut.weight(qi.item)), Utility{}});
      begin_[p] = static_cast<std::uint32_t>(entries_.size());
    }
    Utility suffix;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
      it->remaining = suffix;
      suffix += it->utility;
    }
    total_ = suffix;
  }

  Sid sid() const { return sid_; }
  Utility total() const { return total_; }

  /// One past the last position.
  Position end_position() const { return static_cast<Position>(begin_.size()); }

  std::span<const SilEntry> entries() const { return entries_; }

  /// Entries of the itemset at position p; empty for gaps and out-of-range.
  std::span<const SilEntry> itemset(Position p) const {
    if (p == 0 || p >= end_position()) return {};
    return std::span<const SilEntry>(entries_).subspan(begin_[p - 1], begin_[p] - begin_[p - 1]);
  }

  const SilEntry* find(Position p, Item i) const {
    auto set = itemset(p);
    auto it = std::lower_bound(set.begin(), set.end(), i, [](const SilEntry& e, Item x) { return e.item < x; });
    return (it != set.end() && it->item == i) ? &*it : nullptr;
  }

  /// Segment index of position p, or kGap.
  std::uint32_t segment(Position p) const {
    return (p == 0 || p >= end_position()) ? kGap : segment_[p - 1];
  }

  /// True when p+1 holds an itemset of the same segment as p.
  bool has_successor(Position p) const {
    const auto s = segment(p);
    return s != kGap && segment(p + 1) == s;
  }

  /// Bracketed text form, e.g. `(b,4,19)(f,4,15)/(a,6,9)(e,2,7)`; segment
  /// breaks are written as `//`.
  std::string to_string(const std::vector<std::string>& names = {}) const {
    std::string out;
    std::uint32_t prev_seg = kGap;
    for (Position p = 1; p < end_position(); ++p) {
      const auto seg = segment(p);
      if (seg == kGap) continue;
      if (prev_seg != kGap) out += (seg == prev_seg ? "/" : "//");
      prev_seg = seg;
      for (const auto& e : itemset(p)) {
        out += '(';
        out += e.item.id < names.size() ? names[e.item.id] : std::to_string(e.item.id);
        out += ',' + std::to_string(e.utility.value()) + ',' + std::to_string(e.remaining.value()) + ')';
      }
    }
    return out;
  }

 private:
  Sid sid_ = 0;
  Utility total_;
  std::vector<SilEntry> entries_;
  std::vector<std::uint32_t> begin_;
  std::vector<std::uint32_t> segment_;
};

inline std::vector<Sil> build_sil(const QSequenceDatabase& db, const ExternalUtilityTable& eut) {
  std::vector<Sil> sils;
  sils.reserve(db.sequences.size());
  for (const auto& q : db.sequences) sils.emplace_back(q, eut);
  return sils;
}

struct IChainElement {
  Position epos = 0;
  Utility utility;
  friend bool operator==(const IChainElement&, const IChainElement&) = default;
};

struct InstanceList {
  std::uint32_t seq = 0;  // index into the SIL vector
  Sid sid = 0;
  std::vector<IChainElement> elements;  // epos strictly ascending
  friend bool operator==(const InstanceList&, const InstanceList&) = default;
};

/// Instance chain of a pattern. An empty `lists` means the pattern has no
/// instance.
struct IChain {
  Pattern pattern;
  std::vector<InstanceList> lists;  // sid strictly ascending

  bool empty() const { return lists.empty(); }
  std::size_t element_count() const {
    std::size_t n = 0;
    for (const auto& l : lists) n += l.elements.size();
    return n;
  }
};

enum class Extension { item, sequence };

/// IChains of all 1-sequences in one scan of the SILs.
inline std::map<Item, IChain> build_initial_ichains(std::span<const Sil> sils) {
  std::map<Item, IChain> chains;
  for (std::uint32_t s = 0; s < sils.size(); ++s) {
    const Sil& sil = sils[s];
    for (Position p = 1; p < sil.end_position(); ++p) {
      for (const auto& e : sil.itemset(p)) {
        auto [it, fresh] = chains.try_emplace(e.item);
        IChain& chain = it->second;
        if (fresh) chain.pattern = Pattern::of(e.item);
        if (chain.lists.empty() || chain.lists.back().seq != s) chain.lists.push_back({s, sil.sid(), {}});
        chain.lists.back().elements.push_back({p, e.utility});
      }
    }
  }
  return chains;
}

/// IChain of <prefix (+) i> for I-extension or <prefix (x) i> for S-extension.
inline IChain extend_ichain(const IChain& prefix, Item i, Extension kind, std::span<const Sil> sils) {
  IChain out;
  out.pattern = kind == Extension::item ? prefix.pattern.i_extended(i) : prefix.pattern.s_extended(i);
  for (const auto& list : prefix.lists) {
    const Sil& sil = sils[list.seq];
    InstanceList next{list.seq, list.sid, {}};
    for (const auto& el : list.elements) {
      Position at = el.epos;
      if (kind == Extension::sequence) {
        if (!sil.has_successor(el.epos)) continue;
        at = el.epos + 1;
      }
      if (const SilEntry* e = sil.find(at, i)) next.elements.push_back({at, el.utility + e->utility});
    }
    if (!next.elements.empty()) out.lists.push_back(std::move(next));
  }
  return out;
}

inline IChain extend_ichain_i(const IChain& prefix, Item i, std::span<const Sil> sils) {
  return extend_ichain(prefix, i, Extension::item, sils);
}

inline IChain extend_ichain_s(const IChain& prefix, Item i, std::span<const Sil> sils) {
  return extend_ichain(prefix, i, Extension::sequence, sils);
}

/// u(S): sum over instance lists of the maximal element utility.
inline Utility ichain_pattern_utility(const IChain& chain) {
  Utility u;
  for (const auto& list : chain.lists) {
    Utility best;
    for (const auto& el : list.elements) best = std::max(best, el.utility);
    u += best;
  }
  return u;
}

struct ExtensionItems {
  std::vector<Item> i_items;
  std::vector<Item> s_items;
};

inline ExtensionItems collect_extension_items(const IChain& chain, std::span<const Sil> sils) {
  ExtensionItems out;
  const Item last = chain.pattern.last_item();
  for (const auto& list : chain.lists) {
    const Sil& sil = sils[list.seq];
    for (const auto& el : list.elements) {
      for (const auto& e : sil.itemset(el.epos))
        if (last < e.item) out.i_items.push_back(e.item);
      if (sil.has_successor(el.epos))
        for (const auto& e : sil.itemset(el.epos + 1)) out.s_items.push_back(e.item);
    }
  }
  for (auto* v : {&out.i_items, &out.s_items}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return out;
}

}  // namespace fucpm
