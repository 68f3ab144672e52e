#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "psig/indexer.hpp"
#include "test_util.hpp"

using namespace psig;
using psig::testing::make_record;

namespace {

TemplateSet words(int n = 1) {
  return TemplateSet(Schema{"title"}, {{1, {Extractor::consecutive("title", static_cast<std::size_t>(n))}, {}}});
}

std::vector<Record> victoria() { return {make_record(1, {"victoria street"}), make_record(2, {"victoria st"})}; }

std::vector<Record> random_records(std::mt19937& rng, std::size_t n, std::size_t vocab) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const auto len = 1 + rng() % 6;
    for (std::size_t j = 0; j < len; ++j) s += "w" + std::to_string(rng() % vocab) + " ";
    out.push_back(make_record(static_cast<RecordId>(i), {s}));
  }
  return out;
}

}  // namespace

TEST(BuildIndex, VictoriaKeptAtLowRho) {
  const auto recs = victoria();
  const auto idx = build_index(recs, words(), {2.0, 0.25}, 0.4);
  ASSERT_EQ(idx.size(), 3u);
  const auto* v = idx.find("1|victoria");
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->postings, (std::vector<RecordId>{1, 2}));
  EXPECT_DOUBLE_EQ(v->p, 0.5);
  ASSERT_NE(idx.find("1|street"), nullptr);
  EXPECT_NEAR(idx.find("1|st")->p, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(idx.stats().total_keys_seen, 3u);
  EXPECT_EQ(idx.stats().keys_pruned_by_rho, 0u);
  EXPECT_EQ(idx.stats().max_posting_len, 2u);
}

TEST(BuildIndex, VictoriaPrunedAtHighRho) {
  const auto recs = victoria();
  const auto idx = build_index(recs, words(), {2.0, 0.25}, 0.6);
  EXPECT_EQ(idx.find("1|victoria"), nullptr);
  EXPECT_NE(idx.find("1|street"), nullptr);
  EXPECT_NE(idx.find("1|st"), nullptr);
  EXPECT_EQ(idx.stats().keys_pruned_by_rho, 1u);
}

TEST(BuildIndex, EmptyRecordSet) {
  const std::vector<Record> none;
  EXPECT_TRUE(build_index(none, words(), {2.0, 0.25}, 0.4).empty());
}

TEST(BuildIndex, EntryInvariants) {
  std::mt19937 rng(1);
  const auto recs = random_records(rng, 300, 40);
  const ProbabilityModel m{1.5, 0.02};
  const auto idx = build_index(recs, words(2), m, 0.3, 3);
  const auto cap = max_recurrence(m, 0.3).k;
  for (const auto& e : idx.entries()) {
    EXPECT_FALSE(e.postings.empty());
    EXPECT_TRUE(std::is_sorted(e.postings.begin(), e.postings.end()));
    EXPECT_EQ(std::adjacent_find(e.postings.begin(), e.postings.end()), e.postings.end());
    EXPECT_LE(e.postings.size(), cap);
    EXPECT_EQ(e.p, signature_probability(m, e.postings.size()));
    EXPECT_GT(e.p, 0.3);
  }
  EXPECT_TRUE(std::is_sorted(idx.entries().begin(), idx.entries().end(), index_order));
  for (const auto& e : idx.entries()) EXPECT_EQ(idx.find(e.key), &e);
  EXPECT_EQ(idx.find("1|no.such.key"), nullptr);
}

TEST(SubrecordOf, Examples) {
  const TokenSeq v{"victoria"}, vs{"victoria", "street"}, sg{"st", "george"}, gs{"george", "st"};
  EXPECT_TRUE(subrecord_of(v, vs));
  EXPECT_FALSE(subrecord_of(sg, gs));
  EXPECT_TRUE(subrecord_of(vs, vs));
  EXPECT_TRUE(subrecord_of(TokenSeq{}, vs));
  EXPECT_FALSE(subrecord_of(vs, v));
}

TEST(IndexProperties, SuperrecordPostingsContained) {
  std::mt19937 rng(2);
  const auto recs = random_records(rng, 400, 12);
  TemplateSet ts(Schema{"title"}, {{1, {Extractor::consecutive("title", 1)}, 1},
                                   {2, {Extractor::consecutive("title", 2)}, 1}});
  const auto groups = group_candidates(recs, ts);
  std::size_t checked = 0;
  for (const auto& hi : groups.entries) {
    if (hi.template_id != 2) continue;
    const auto d = ts.decode(hi.key);
    for (const auto& tok : d.parts[0]) {
      auto lo = std::find_if(groups.entries.begin(), groups.entries.end(),
                             [&](const IndexEntry& e) { return e.key == "1|" + tok; });
      ASSERT_NE(lo, groups.entries.end());
      EXPECT_TRUE(std::includes(lo->postings.begin(), lo->postings.end(), hi.postings.begin(), hi.postings.end()));
      ++checked;
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(IndexProperties, PruningEquivalence) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto recs = random_records(rng, 60, 8 + trial);
    const ProbabilityModel m{1.3 + 0.1 * trial, 0.05};
    const double rho = 0.1 + 0.03 * trial;
    const auto pruned = build_index(recs, words(), m, rho);
    const auto loose = build_index(recs, words(), m, 1e-12);
    ASSERT_FALSE(loose.stats().hit_hard_cap);
    std::vector<IndexEntry> filtered;
    for (const auto& e : loose.entries())
      if (e.p > rho) filtered.push_back(e);
    ASSERT_EQ(filtered.size(), pruned.size());
    for (std::size_t i = 0; i < filtered.size(); ++i) {
      EXPECT_EQ(filtered[i].key, pruned.entries()[i].key);
      EXPECT_EQ(filtered[i].postings, pruned.entries()[i].postings);
      EXPECT_EQ(filtered[i].p, pruned.entries()[i].p);
    }
  }
}

TEST(IndexProperties, DeterministicDumpAcrossThreadCounts) {
  std::mt19937 rng(4);
  const auto recs = random_records(rng, 500, 30);
  std::ostringstream one, four, again;
  dump_index(build_index(recs, words(2), {1.4, 0.1}, 0.2, 1), one);
  dump_index(build_index(recs, words(2), {1.4, 0.1}, 0.2, 4), four);
  dump_index(build_index(recs, words(2), {1.4, 0.1}, 0.2, 1), again);
  EXPECT_EQ(one.str(), four.str());
  EXPECT_EQ(one.str(), again.str());
  EXPECT_FALSE(one.str().empty());
}

TEST(DumpIndex, Format) {
  const auto recs = victoria();
  std::ostringstream out;
  dump_index(build_index(recs, words(), {2.0, 0.25}, 0.4), out);
  EXPECT_EQ(out.str(), "1|st\t0.666666666667\t2\n1|street\t0.666666666667\t1\n1|victoria\t0.5\t1,2\n");
}
