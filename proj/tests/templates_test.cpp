#include <gtest/gtest.h>

#include <random>
#include <set>

#include "psig/indexer.hpp"
#include "psig/templates.hpp"
#include "test_util.hpp"

using namespace psig;
using psig::testing::make_record;

namespace {

const Schema kPeople{"name", "address", "phone"};

SignatureTemplate tmpl(int id, std::vector<Extractor> parts) { return {id, std::move(parts), std::nullopt}; }

}  // namespace

TEST(Extract, ConsecutiveWordsSlidingWindow) {
  Schema schema{"title"};
  TemplateSet ts(schema, {tmpl(1, {Extractor::consecutive("title", 3)})});
  auto r = make_record(0, {"scalable entity resolution using"});
  EXPECT_EQ(ts.extract(0, r).keys,
            (std::vector<std::string>{"1|entity.resolution.using", "1|scalable.entity.resolution"}));
}

TEST(Extract, RandomWordsAllSortedCombinations) {
  TemplateSet ts(kPeople, {tmpl(1, {Extractor::random_words("name", 2)})});
  auto r = make_record(0, {"john james duncan", "", ""});
  const auto keys = ts.extract(0, r).keys;
  EXPECT_EQ(keys, (std::vector<std::string>{"1|duncan.james", "1|duncan.john", "1|james.john"}));
}

TEST(Extract, NameAndLastSixPhoneDigits) {
  TemplateSet ts(kPeople, {tmpl(2, {Extractor::random_words("name", 2), Extractor::last_digits("phone", 6)})});
  auto r = make_record(0, {"Mary Poppins", "", "0261234567"});
  EXPECT_EQ(ts.extract(0, r).keys, (std::vector<std::string>{"2|mary.poppins|234567"}));
}

TEST(Extract, LastDigitsConcatenatesDigitTokens) {
  TemplateSet ts(kPeople, {tmpl(2, {Extractor::last_digits("phone", 6)})});
  EXPECT_EQ(ts.extract(0, make_record(0, {"", "", "(02) 6123 4567"})).keys,
            (std::vector<std::string>{"2|234567"}));
  EXPECT_TRUE(ts.extract(0, make_record(0, {"", "", "12 345"})).keys.empty());
}

TEST(Extract, EmptyPartEmptiesTemplate) {
  TemplateSet ts(kPeople, {tmpl(1, {Extractor::random_words("name", 2), Extractor::consecutive("address", 2)})});
  EXPECT_TRUE(ts.extract(0, make_record(0, {"ann lee", "", ""})).keys.empty());
  EXPECT_TRUE(ts.extract(0, make_record(0, {"ann", "1 main st", ""})).keys.empty());
}

TEST(Extract, FullAttribute) {
  TemplateSet ts(kPeople, {tmpl(4, {Extractor::full("name")})});
  EXPECT_EQ(ts.extract(0, make_record(0, {"Ann  Lee", "", ""})).keys, (std::vector<std::string>{"4|ann.lee"}));
}

TEST(Extract, CombinationCapSkips) {
  ExtractLimits limits;
  limits.combination_cap = 4;
  TemplateSet ts(Schema{"title"}, {tmpl(1, {Extractor::consecutive("title", 1)})}, limits);
  auto small = ts.extract(0, make_record(0, {"a b c d"}));
  EXPECT_FALSE(small.skipped);
  EXPECT_EQ(small.keys.size(), 4u);
  auto big = ts.extract(0, make_record(0, {"a b c d e"}));
  EXPECT_TRUE(big.skipped);
  EXPECT_TRUE(big.keys.empty());
}

TEST(Extract, RandomWordsSkipsLongAttributes) {
  TemplateSet ts(Schema{"title"}, {tmpl(1, {Extractor::random_words("title", 1)})});
  EXPECT_EQ(ts.extract(0, make_record(0, {"a b c d e f g h i j k l"})).keys.size(), 12u);
  EXPECT_TRUE(ts.extract(0, make_record(0, {"a b c d e f g h i j k l m"})).keys.empty());
}

TEST(Extract, TemplateIdPreventsCollisions) {
  TemplateSet ts(Schema{"title"},
                 {tmpl(1, {Extractor::consecutive("title", 1)}), tmpl(2, {Extractor::consecutive("title", 1)})});
  auto r = make_record(0, {"smith"});
  EXPECT_NE(ts.extract(0, r).keys, ts.extract(1, r).keys);
}

TEST(Validate, UnknownAttributeNamed) {
  auto rep = validate_config({tmpl(1, {Extractor::consecutive("venue", 1)})}, Schema{"title"});
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.errors[0].find("venue"), std::string::npos);
}

TEST(Validate, SingleWordOfLongTextWarns) {
  Schema schema(std::vector<AttributeSpec>{{"title", true}});
  auto rep = validate_config({tmpl(1, {Extractor::consecutive("title", 1)})}, schema);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.warnings.size(), 1u);
}

TEST(Validate, EmptyTemplateListIsError) { EXPECT_FALSE(validate_config({}, Schema{"title"}).ok()); }

TEST(Validate, ZeroPartsAndZeroParamAreErrors) {
  EXPECT_FALSE(validate_config({tmpl(1, {})}, Schema{"title"}).ok());
  EXPECT_FALSE(validate_config({tmpl(1, {Extractor::consecutive("title", 0)})}, Schema{"title"}).ok());
}

TEST(Validate, DuplicateIdIsError) {
  EXPECT_FALSE(validate_config({tmpl(1, {Extractor::consecutive("title", 1)}),
                                tmpl(1, {Extractor::consecutive("title", 2)})},
                               Schema{"title"})
                   .ok());
}

TEST(Validate, LongYieldWarns) {
  auto rep = validate_config({tmpl(1, {Extractor::consecutive("title", 7)})}, Schema{"title"});
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.warnings.size(), 1u);
}

TEST(Validate, FamilyMembersMustMatchShape) {
  SignatureTemplate a{1, {Extractor::consecutive("title", 1)}, 1};
  SignatureTemplate b{2, {Extractor::consecutive("title", 2)}, 1};
  SignatureTemplate c{3, {Extractor::random_words("title", 2)}, 1};
  EXPECT_TRUE(validate_config({a, b}, Schema{"title"}).ok());
  EXPECT_FALSE(validate_config({a, c}, Schema{"title"}).ok());
}

TEST(Validate, SeparatorsMustBePunctuation) {
  KeyFormat fmt{'x', '.'};
  EXPECT_FALSE(validate_config({tmpl(1, {Extractor::full("title")})}, Schema{"title"}, {}, fmt).ok());
  TemplateSet bad_ok(Schema{"title"}, {tmpl(1, {Extractor::full("title")})}, {}, KeyFormat{'#', '_'});
  EXPECT_EQ(bad_ok.extract(0, make_record(0, {"a b"})).keys, (std::vector<std::string>{"1#a_b"}));
  EXPECT_THROW(TemplateSet(Schema{"title"}, {tmpl(1, {Extractor::full("title")})}, {}, fmt), ConfigError);
}

namespace {

std::string random_text(std::mt19937& rng) {
  static const char* words[] = {"st", "george", "smith", "john", "a", "12", "34", "main", "road", "ann"};
  std::string s;
  const int n = static_cast<int>(rng() % 7);
  for (int i = 0; i < n; ++i) s += std::string(words[rng() % 10]) + (rng() % 3 ? " " : ", ");
  return s;
}

}  // namespace

TEST(ExtractProperties, InjectiveDeterministicBoundedAndSubrecords) {
  std::vector<SignatureTemplate> ts_list{
      tmpl(1, {Extractor::consecutive("name", 2)}),
      tmpl(2, {Extractor::random_words("name", 2), Extractor::last_digits("phone", 3)}),
      tmpl(3, {Extractor::consecutive("address", 1), Extractor::full("name")}),
      tmpl(10, {Extractor::random_words("address", 3)}),
  };
  ExtractLimits limits;
  limits.combination_cap = 30;
  TemplateSet ts(kPeople, ts_list, limits);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto r = make_record(0, {random_text(rng), random_text(rng), random_text(rng)});
    for (std::size_t t = 0; t < ts_list.size(); ++t) {
      const auto ex = ts.extract(t, r);
      EXPECT_EQ(ex.keys, ts.extract(t, r).keys);
      EXPECT_LE(ex.keys.size(), limits.combination_cap);
      std::set<std::pair<int, std::vector<TokenSeq>>> seen;
      for (const auto& k : ex.keys) {
        const auto d = ts.decode(k);
        EXPECT_EQ(d.template_id, ts_list[t].id);
        ASSERT_EQ(d.parts.size(), ts_list[t].parts.size());
        EXPECT_TRUE(seen.insert({d.template_id, d.parts}).second) << "two keys decode identically: " << k;
        for (std::size_t p = 0; p < d.parts.size(); ++p) {
          const auto& ext = ts_list[t].parts[p];
          if (ext.kind == Extractor::Kind::ConsecutiveWords) {
            EXPECT_TRUE(subrecord_of(d.parts[p], r.attribute(kPeople, ext.attr)));
            EXPECT_EQ(d.parts[p].size(), ext.param);
          }
        }
      }
    }
  }
}
