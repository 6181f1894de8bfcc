#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fucpm {
namespace {

using namespace fucpm::testing;

using Elements = std::vector<IChainElement>;

// (sid, [(epos, utility)...]) view of a chain for compact comparisons.
std::vector<std::pair<Sid, Elements>> view(const IChain& chain) {
  std::vector<std::pair<Sid, Elements>> out;
  for (const auto& l : chain.lists) out.emplace_back(l.sid, l.elements);
  return out;
}

Elements els(std::initializer_list<std::pair<Position, std::int64_t>> xs) {
  Elements out;
  for (auto [p, u] : xs) out.push_back({p, Utility(u)});
  return out;
}

TEST(BuildSil, MatchesSilOfFirstSequence) {
  const auto r = running_example();
  const auto sils = build_sil(r.db, r.eut);
  ASSERT_EQ(sils.size(), 5u);
  EXPECT_EQ(sils[0].to_string(r.db.names), "(b,4,19)(f,4,15)/(a,6,9)(e,2,7)/(c,6,1)(e,1,0)");
  EXPECT_EQ(sils[0].total(), Utility(23));
}

TEST(BuildSil, FifthSequence) {
  const auto r = running_example();
  const auto sils = build_sil(r.db, r.eut);
  EXPECT_EQ(sils[4].to_string(r.db.names), "(a,6,19)/(a,3,16)(c,9,7)/(c,3,4)(f,2,2)/(b,2,0)");
}

TEST(BuildSil, SingleItem) {
  QSequenceDatabase db;
  db.names = {"a"};
  db.sequences.push_back(QSequence::single(1, {qset({{a, 1}})}));
  const auto sils = build_sil(db, ExternalUtilityTable{{3}});
  EXPECT_EQ(sils[0].to_string(db.names), "(a,3,0)");
}

TEST(BuildSil, SegmentsAndGaps) {
  QSequence q;
  q.sid = 4;
  q.segments.push_back(Segment{2, {qset({{a, 1}}), qset({{b, 2}})}});
  q.segments.push_back(Segment{5, {qset({{c, 1}})}});
  const Sil sil(q, ExternalUtilityTable{{1, 1, 1}});
  EXPECT_EQ(sil.to_string({"a", "b", "c"}), "(a,1,3)/(b,2,1)//(c,1,0)");
  EXPECT_TRUE(sil.itemset(1).empty());
  EXPECT_TRUE(sil.itemset(4).empty());
  EXPECT_TRUE(sil.has_successor(2));
  EXPECT_FALSE(sil.has_successor(3));
  EXPECT_FALSE(sil.has_successor(5));
  EXPECT_EQ(sil.end_position(), 6u);
}

// Property: entry.remaining = next.remaining + next.utility, last is 0, and
// every entry agrees with the calculus.
TEST(BuildSil, TelescopesAndMatchesCalculus) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = random_small_db(seed);
    const auto sils = build_sil(r.db, r.eut);
    for (std::size_t s = 0; s < sils.size(); ++s) {
      const auto entries = sils[s].entries();
      ASSERT_FALSE(entries.empty());
      EXPECT_EQ(entries.back().remaining, Utility(0));
      for (std::size_t k = 0; k + 1 < entries.size(); ++k)
        EXPECT_EQ(entries[k].remaining, entries[k + 1].remaining + entries[k + 1].utility);
      const auto& q = r.db.sequences[s];
      for (Position p = 1; p < sils[s].end_position(); ++p)
        for (const auto& en : sils[s].itemset(p)) {
          EXPECT_EQ(en.utility, item_utility(en.item, p, q, r.eut));
          EXPECT_EQ(en.remaining, remaining_utility_after(q, p, en.item, r.eut));
        }
    }
  }
}

TEST(InitialIChains, RunningExample) {
  const auto r = running_example();
  const auto sils = build_sil(r.db, r.eut);
  const auto chains = build_initial_ichains(sils);
  EXPECT_EQ(chains.size(), 6u);
  EXPECT_EQ(view(chains.at(a)), (std::vector<std::pair<Sid, Elements>>{{1, els({{2, 6}})},
                                                                       {2, els({{1, 3}, {3, 3}})},
                                                                       {3, els({{3, 9}})},
                                                                       {5, els({{1, 6}, {2, 3}})}}));
  EXPECT_EQ(view(chains.at(d)),
            (std::vector<std::pair<Sid, Elements>>{{2, els({{2, 2}})}, {3, els({{3, 2}})}, {4, els({{1, 2}})}}));
  EXPECT_FALSE(chains.contains(Item{6}));
}

TEST(ExtendIChain, IExtension) {
  const auto r = running_example();
  const auto sils = build_sil(r.db, r.eut);
  const auto chains = build_initial_ichains(sils);
  const IChain ae = extend_ichain_i(chains.at(a), e, sils);
  EXPECT_EQ(ae.pattern, pat({{a, e}}));
  EXPECT_EQ(view(ae), (std::vector<std::pair<Sid, Elements>>{{1, els({{2, 8}})}, {2, els({{3, 5}})}}));

  const IChain bf = extend_ichain_i(chains.at(b), f, sils);
  EXPECT_EQ(view(bf), (std::vector<std::pair<Sid, Elements>>{
                          {1, els({{1, 8}})}, {3, els({{1, 6}})}, {4, els({{2, 13}})}}));
  EXPECT_EQ(ichain_pattern_utility(bf), Utility(27));

  EXPECT_TRUE(extend_ichain_i(chains.at(a), Item{6}, sils).empty());
}

TEST(ExtendIChain, SExtension) {
  const auto r = running_example();
  const auto sils = build_sil(r.db, r.eut);
  const auto chains = build_initial_ichains(sils);
  const IChain ac = extend_ichain_s(chains.at(a), c, sils);
  EXPECT_EQ(ac.pattern, pat({{a}, {c}}));
  EXPECT_EQ(view(ac), (std::vector<std::pair<Sid, Elements>>{
                          {1, els({{3, 12}})}, {2, els({{2, 9}})}, {5, els({{2, 15}, {3, 6}})}}));
  EXPECT_EQ(ac.lists.size(), 3u);
  EXPECT_EQ(ac.element_count(), 4u);
  EXPECT_EQ(ichain_pattern_utility(ac), Utility(36));
}

TEST(ExtendIChain, LastItemsetHasNoSuccessor) {
  const auto r = running_example();
  const auto sils = build_sil(r.db, r.eut);
  // <{b}> occurs in S5 only at the last position.
  IChain b_in_s5;
  b_in_s5.pattern = Pattern::of(b);
  b_in_s5.lists.push_back({4, 5, els({{4, 2}})});
  for (std::uint32_t i = 0; i < 6; ++i) EXPECT_TRUE(extend_ichain_s(b_in_s5, Item{i}, sils).empty());
}

TEST(IChainUtility, EmptyChainIsZero) { EXPECT_EQ(ichain_pattern_utility(IChain{}), Utility(0)); }

TEST(ExtensionItems, RunningExample) {
  const auto r = running_example();
  const auto sils = build_sil(r.db, r.eut);
  const auto chains = build_initial_ichains(sils);
  const auto all = collect_extension_items(chains.at(a), sils);
  EXPECT_EQ(all.i_items, (std::vector<Item>{b, c, d, e}));
  EXPECT_EQ(all.s_items, (std::vector<Item>{a, c, d, e, f}));

  IChain a_in_s2 = chains.at(a);
  a_in_s2.lists = {a_in_s2.lists[1]};
  ASSERT_EQ(a_in_s2.lists.front().sid, 2u);
  const auto s2 = collect_extension_items(a_in_s2, sils);
  EXPECT_EQ(s2.i_items, (std::vector<Item>{b, e}));
  EXPECT_EQ(s2.s_items, (std::vector<Item>{c, d}));
}

TEST(ExtensionItems, SegmentEndsYieldNoSItems) {
  const auto r = running_example();
  const auto sils = build_sil(r.db, r.eut);
  const auto chains = build_initial_ichains(sils);
  // e occurs at the last itemset of S1 (pos 3) and S2 (pos 3) and S4 pos 3;
  // keep only the last-position occurrences.
  IChain tail;
  tail.pattern = Pattern::of(e);
  for (const auto& l : chains.at(e).lists) {
    InstanceList kept{l.seq, l.sid, {}};
    for (const auto& el : l.elements)
      if (!sils[l.seq].has_successor(el.epos)) kept.elements.push_back(el);
    if (!kept.elements.empty()) tail.lists.push_back(kept);
  }
  ASSERT_FALSE(tail.empty());
  EXPECT_TRUE(collect_extension_items(tail, sils).s_items.empty());
}

// Oracle cross-check: for every pattern with an instance, the chain built by
// extension has exactly the ending positions and instance utilities of the
// calculus, and lists exactly the containing sequences. Includes databases
// split into segments by item removal.
void cross_check(const ParsedDatabase& r) {
  const auto sils = build_sil(r.db, r.eut);
  const auto universe = enumerate_patterns(r.db, r.eut, 5);
  for (const auto& [key, entry] : universe.patterns) {
    const Pattern& p = entry.first;
    const IChain chain = chain_for(p, sils);
    ASSERT_EQ(chain.pattern, p);
    std::size_t li = 0;
    for (std::size_t s = 0; s < r.db.sequences.size(); ++s) {
      const auto& q = r.db.sequences[s];
      const auto eps = ending_positions(p, q);
      if (eps.empty()) {
        EXPECT_TRUE(li >= chain.lists.size() || chain.lists[li].seq != s);
        continue;
      }
      ASSERT_LT(li, chain.lists.size());
      const auto& list = chain.lists[li++];
      ASSERT_EQ(list.seq, s);
      EXPECT_EQ(list.sid, q.sid);
      ASSERT_EQ(list.elements.size(), eps.size());
      for (std::size_t k = 0; k < eps.size(); ++k) {
        EXPECT_EQ(list.elements[k].epos, eps[k]);
        EXPECT_EQ(list.elements[k].utility, instance_utility(p, eps[k], q, r.eut));
      }
    }
    EXPECT_EQ(li, chain.lists.size());
    EXPECT_EQ(ichain_pattern_utility(chain), entry.second);
  }
}

TEST(IChainOracle, RandomDatabases) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) cross_check(random_small_db(seed));
}

TEST(IChainOracle, SegmentedDatabases) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    auto r = random_small_db(seed);
    std::vector<bool> keep(r.eut.weights.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = rng() % 3 != 0;
    std::vector<QSequence> revised;
    for (const auto& q : r.db.sequences) {
      auto x = remove_items(q, keep);
      if (!x.segments.empty()) revised.push_back(std::move(x));
    }
    r.db.sequences = std::move(revised);
    cross_check(r);
  }
}

}  // namespace
}  // namespace fucpm
