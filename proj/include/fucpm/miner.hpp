#pragma once

// Depth-first pattern growth over instance chains. Global unpromising items
// are deleted up front; each extension is checked against its IEU before its
// chain is built.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "core.hpp"
#include "dataset_io.hpp"
#include "index.hpp"

namespace fucpm {

/// A runtime bound assertion failed (only raised with assert_bounds on).
class BoundViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct MiningConfig {
  std::string xi = "0";
  bool enable_guip = true;
  bool enable_luip = true;
  std::optional<std::size_t> max_pattern_length;
  bool assert_bounds = false;
};

struct MiningStats {
  std::uint64_t candidates = 0;
  std::uint64_t hucsps = 0;
  std::uint64_t guip_deleted_items = 0;
  std::uint64_t guip_rounds = 0;
  std::uint64_t luip_pruned = 0;
  friend bool operator==(const MiningStats&, const MiningStats&) = default;
};

using ResultSet = std::vector<PatternUtility>;

struct MiningResult {
  ResultSet patterns;
  MiningStats stats;
};

inline void canonicalize(ResultSet& results) {
  std::sort(results.begin(), results.end(),
            [](const PatternUtility& a, const PatternUtility& b) { return CanonicalLess{}(a.first, b.first); });
}

/// hucsps / candidates as a percentage with two decimals, rounded half up.
inline std::string effective_search_rate(const MiningStats& stats) {
  if (stats.candidates == 0) throw std::domain_error("undefined ESR: no candidates");
  const unsigned __int128 scaled =
      (static_cast<unsigned __int128>(stats.hucsps) * 20000 + stats.candidates) / (2 * stats.candidates);
  const auto v = static_cast<std::uint64_t>(scaled);
  std::string frac = std::to_string(v % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(v / 100) + "." + frac + "%";
}

struct LuipAdmit {
  bool operator()(Utility ieu_value, const Threshold& t) const { return luip_admits(ieu_value, t); }
};

/// Mutable state shared by one mining run.
struct SearchContext {
  std::span<const Sil> sils;
  const Threshold& threshold;
  const MiningConfig& config;
  ExtensionScorer scorer;
  ResultSet results;
  MiningStats stats;
};

/// Expands the subtree below `prefix`, whose IEU (or SWU for a 1-sequence)
/// is `prefix_bound`. Extensions are visited I-items first, then S-items,
/// each in ascending item order. Uses an explicit stack, so depth is bounded
/// by memory rather than the call stack.
template <class Admit = LuipAdmit>
void recursive_search(IChain prefix, Utility prefix_bound, SearchContext& ctx, Admit admit = {}) {
  struct Frame {
    IChain chain;
    std::vector<ScoredExtension> extensions;
    std::size_t next = 0;
    Utility bound;
  };
  const auto& cfg = ctx.config;
  auto expand = [&](IChain chain, Utility bound) {
    Frame f{std::move(chain), {}, 0, bound};
    if (!cfg.max_pattern_length || f.chain.pattern.length() < *cfg.max_pattern_length)
      f.extensions = ctx.scorer.score(f.chain, ctx.sils);
    return f;
  };

  std::vector<Frame> stack;
  stack.push_back(expand(std::move(prefix), prefix_bound));
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.extensions.size()) {
      stack.pop_back();
      continue;
    }
    const ScoredExtension ext = top.extensions[top.next++];
    ++ctx.stats.candidates;
    if (cfg.assert_bounds && ext.ieu > top.bound)
      throw BoundViolation("IEU increased under extension: child " + std::to_string(ext.ieu.value()) +
                           " > parent " + std::to_string(top.bound.value()));
    if (cfg.enable_luip && !admit(ext.ieu, ctx.threshold)) {
      ++ctx.stats.luip_pruned;
      continue;
    }
    IChain child = extend_ichain(top.chain, ext.item, ext.kind, ctx.sils);
    const Utility u = ichain_pattern_utility(child);
    if (cfg.assert_bounds && u > ext.ieu)
      throw BoundViolation("utility " + std::to_string(u.value()) + " exceeds IEU " +
                           std::to_string(ext.ieu.value()));
    if (ctx.threshold.admits(u)) {
      ctx.results.emplace_back(child.pattern, u);
      ++ctx.stats.hucsps;
    }
    stack.push_back(expand(std::move(child), ext.ieu));  // invalidates `top`
  }
}

/// Mines the complete set of high-utility contiguous sequential patterns.
/// `admit` replaces the LUIP comparison; tests use it to inject faults.
template <class Admit = LuipAdmit>
MiningResult mine(const QSequenceDatabase& db, const ExternalUtilityTable& eut, const MiningConfig& config,
                  Admit admit = {}) {
  const Threshold t = Threshold::parse(config.xi, db_utility(db, eut));

  MiningStats stats;
  std::optional<GuipOutcome> revised;
  if (config.enable_guip) {
    revised = guip_revise(db, eut, t);
    stats.guip_deleted_items = revised->deleted.size();
    stats.guip_rounds = revised->rounds;
  }
  const QSequenceDatabase& working = revised ? revised->db : db;

  const std::vector<Sil> sils = build_sil(working, eut);
  auto roots = build_initial_ichains(sils);

  SearchContext ctx{sils, t, config, ExtensionScorer(eut.weights.size()), {}, stats};
  for (auto& [item, chain] : roots) {
    ++ctx.stats.candidates;
    const Utility u = ichain_pattern_utility(chain);
    if (t.admits(u)) {
      ctx.results.emplace_back(chain.pattern, u);
      ++ctx.stats.hucsps;
    }
    Utility swu;
    for (const auto& list : chain.lists) swu += sils[list.seq].total();
    recursive_search(std::move(chain), swu, ctx, admit);
  }
  canonicalize(ctx.results);
  return {std::move(ctx.results), ctx.stats};
}

}  // namespace fucpm
