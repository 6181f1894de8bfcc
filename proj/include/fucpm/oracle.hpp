#pragma once

// Brute-force reference miner. Enumerates every (window, per-itemset subset)
// instance of every sequence and aggregates utilities as max per sequence,
// summed over sequences. Shares only item_utility with the miner.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "core.hpp"
#include "miner.hpp"

namespace fucpm {

class UniverseTooLarge : public std::runtime_error {
 public:
  explicit UniverseTooLarge(std::uint64_t estimate, std::uint64_t cap)
      : std::runtime_error("universe too large: " + std::to_string(estimate) + " instances exceed cap " +
                           std::to_string(cap)) {}
};

inline constexpr std::uint64_t kDefaultOracleCap = 10'000'000;

struct PatternUniverse {
  std::map<std::vector<std::int64_t>, std::pair<Pattern, Utility>> patterns;  // keyed by encoding
  std::uint64_t instances = 0;

  std::optional<Utility> find(const Pattern& p) const {
    auto it = patterns.find(p.encoding());
    if (it == patterns.end()) return std::nullopt;
    return it->second.second;
  }
};

namespace detail {

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}
inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

/// Sum over windows of the product of (2^size - 1), saturating.
inline std::uint64_t instance_estimate(const QSequence& q, std::optional<std::size_t> max_len) {
  std::uint64_t total = 0;
  for (const auto& seg : q.segments) {
    const auto& sets = seg.itemsets;
    for (std::size_t start = 0; start < sets.size(); ++start) {
      std::uint64_t prod = 1;
      for (std::size_t end = start; end < sets.size(); ++end) {
        if (max_len && end - start + 1 > *max_len) break;
        const auto n = sets[end].entries.size();
        prod = saturating_mul(prod, n >= 64 ? UINT64_MAX : (std::uint64_t{1} << n) - 1);
        total = saturating_add(total, prod);
      }
    }
  }
  return total;
}

}  // namespace detail

/// Every pattern with at least one instance, with its exact utility.
/// `max_len` bounds the pattern length in items.
inline PatternUniverse enumerate_patterns(const QSequenceDatabase& db, const ExternalUtilityTable& eut,
                                          std::optional<std::size_t> max_len = std::nullopt,
                                          std::uint64_t cap = kDefaultOracleCap) {
  std::uint64_t estimate = 0;
  for (const auto& q : db.sequences) estimate = detail::saturating_add(estimate, detail::instance_estimate(q, max_len));
  if (estimate > cap) throw UniverseTooLarge(estimate, cap);

  PatternUniverse universe;
  for (const auto& q : db.sequences) {
    std::map<std::vector<std::int64_t>, std::pair<Pattern, Utility>> best;  // max per sequence
    for (const auto& seg : q.segments) {
      const auto& sets = seg.itemsets;
      for (std::size_t start = 0; start < sets.size(); ++start) {
        // Odometer over non-empty subset masks of sets[start..end].
        for (std::size_t end = start; end < sets.size(); ++end) {
          const std::size_t width = end - start + 1;
          if (max_len && width > *max_len) break;
          std::vector<std::uint64_t> mask(width, 1);
          for (;;) {
            Pattern p;
            Utility u;
            std::size_t len = 0;
            for (std::size_t k = 0; k < width; ++k) {
              const auto& entries = sets[start + k].entries;
              std::vector<Item> chosen;
              for (std::size_t b = 0; b < entries.size(); ++b)
                if (mask[k] >> b & 1) {
                  chosen.push_back(entries[b].item);
                  u += item_utility(entries[b].item, seg.first + static_cast<Position>(start + k), q, eut);
                }
              len += chosen.size();
              p.itemsets.push_back(std::move(chosen));
            }
            ++universe.instances;
            if (!max_len || len <= *max_len) {
              auto key = p.encoding();
              auto [it, fresh] = best.try_emplace(std::move(key), std::move(p), u);
              if (!fresh && u > it->second.second) it->second.second = u;
            }
            std::size_t k = width;
            while (k > 0) {
              --k;
              const std::uint64_t limit = std::uint64_t{1} << sets[start + k].entries.size();
              if (++mask[k] < limit) break;
              mask[k] = 1;
              if (k == 0) {
                k = width + 1;
                break;
              }
            }
            if (k == width + 1) break;
          }
        }
      }
    }
    for (auto& [key, entry] : best) {
      auto [it, fresh] = universe.patterns.try_emplace(key, entry);
      if (!fresh) it->second.second += entry.second;
    }
  }
  return universe;
}

inline ResultSet oracle_mine(const QSequenceDatabase& db, const ExternalUtilityTable& eut, std::string_view xi,
                             std::optional<std::size_t> max_len = std::nullopt,
                             std::uint64_t cap = kDefaultOracleCap) {
  const Threshold t = Threshold::parse(xi, db_utility(db, eut));
  const PatternUniverse universe = enumerate_patterns(db, eut, max_len, cap);
  ResultSet out;
  for (const auto& [key, entry] : universe.patterns)
    if (t.admits(entry.second)) out.push_back(entry);
  canonicalize(out);
  return out;
}

}  // namespace fucpm
