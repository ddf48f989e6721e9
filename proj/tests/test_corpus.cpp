#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "tests/support/fixture.hpp"
#include "vendor/doctest.h"
#include "xling/corpus.hpp"
#include "xling/errors.hpp"
#include "xling/io.hpp"

using namespace xling;
using corpus::Corpus;
using corpus::DatasetDescriptor;
using corpus::MappedLabel;

namespace {

DatasetDescriptor basic_descriptor(const std::string& id = "dsA") {
  DatasetDescriptor d;
  d.dataset_id = id;
  d.language_type = LanguageCode::En;
  d.format = "jsonl";
  d.text_field = "text";
  d.label_field = "label";
  d.raw_label_map = {{"bad", MappedLabel::Abusive},
                     {"ok", MappedLabel::Normal},
                     {"meta", MappedLabel::Drop}};
  return d;
}

Corpus tiny_corpus(const std::string& id, LanguageCode lang, std::size_t per_class) {
  Corpus c;
  c.language_type = lang;
  c.provenance.push_back(id);
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    corpus::Post p;
    p.post_id = id + ":" + std::to_string(i + 1);
    p.text = "word" + std::to_string(i);
    p.label = i < per_class ? BinaryLabel::Abusive : BinaryLabel::Normal;
    p.language_type = lang;
    p.dataset_id = id;
    c.posts.push_back(std::move(p));
  }
  return c;
}

std::size_t count_in(const Corpus& c, const std::vector<std::string>& ids,
                     BinaryLabel label) {
  const auto posts = corpus::subset(c, ids);
  return static_cast<std::size_t>(
      std::count_if(posts.begin(), posts.end(),
                    [&](const corpus::Post& p) { return p.label == label; }));
}

}  // namespace

TEST_CASE("label harmonization follows the map and rejects strangers") {
  const auto d = basic_descriptor();
  CHECK(corpus::harmonize_label(d, "bad") == BinaryLabel::Abusive);
  CHECK(corpus::harmonize_label(d, "ok") == BinaryLabel::Normal);
  CHECK_FALSE(corpus::harmonize_label(d, "meta").has_value());
  CHECK_THROWS_AS(corpus::harmonize_label(d, "other"), UnknownRawLabel);
}

TEST_CASE("ingest numbers ids by raw record, drops and trims") {
  const auto d = basic_descriptor();
  corpus::IngestStats stats;
  const auto c = corpus::ingest_dataset(
      d,
      {{"first post", "bad"},
       {"skip me", "meta"},
       {"  padded  ", "ok"},
       {"   ", "ok"},
       {"last", "bad"}},
      &stats);
  REQUIRE(c.posts.size() == 3);
  CHECK(c.posts[0].post_id == "dsA:1");
  CHECK(c.posts[1].post_id == "dsA:3");
  CHECK(c.posts[1].text == "padded");
  CHECK(c.posts[2].post_id == "dsA:5");
  CHECK(stats.dropped_labels == 1);
  CHECK(stats.rejected_empty == 1);
  CHECK(c.provenance == std::vector<std::string>{"dsA"});
  CHECK(corpus::count_label(c, BinaryLabel::Abusive) == 2);
  CHECK(corpus::count_label(c, BinaryLabel::Normal) == 1);
}

TEST_CASE("expected counts are enforced") {
  auto d = basic_descriptor();
  d.expected_counts = corpus::ExpectedCounts{1, 1};
  CHECK_NOTHROW(corpus::ingest_dataset(d, {{"a", "bad"}, {"b", "ok"}}, nullptr));
  d.expected_counts = corpus::ExpectedCounts{2, 1};
  CHECK_THROWS_AS(corpus::ingest_dataset(d, {{"a", "bad"}, {"b", "ok"}}, nullptr),
                  CountMismatch);
}

TEST_CASE("tsv and jsonl files ingest identically") {
  const auto dir = fixture::fresh_dir("corpus-io");
  io::write_file(dir / "a.tsv", "id\ttext\tlabel\n1\thello there\tbad\n2\tfine\tok\n");
  io::write_file(dir / "a.jsonl",
                 "{\"text\": \"hello there\", \"label\": \"bad\"}\n"
                 "{\"text\": \"fine\", \"label\": \"ok\"}\n");

  auto tsv_desc = basic_descriptor("tsvset");
  tsv_desc.format = "tsv";
  const auto from_tsv = corpus::ingest_file(tsv_desc, dir / "a.tsv");

  auto jsonl_desc = basic_descriptor("tsvset");
  const auto from_jsonl = corpus::ingest_file(jsonl_desc, dir / "a.jsonl");

  REQUIRE(from_tsv.posts.size() == 2);
  REQUIRE(from_jsonl.posts.size() == 2);
  CHECK(from_tsv.posts[0].text == from_jsonl.posts[0].text);
  CHECK(from_tsv.posts[0].post_id == from_jsonl.posts[0].post_id);
  CHECK(corpus::fingerprint(from_tsv) == corpus::fingerprint(from_jsonl));

  auto bad = tsv_desc;
  bad.text_field = "missing";
  CHECK_THROWS_AS(corpus::ingest_file(bad, dir / "a.tsv"), ManifestError);
  auto unknown = tsv_desc;
  unknown.format = "xml";
  CHECK_THROWS_AS(corpus::ingest_file(unknown, dir / "a.tsv"), ManifestError);
}

TEST_CASE("descriptor json round-trips and resolves data paths") {
  const auto dir = fixture::fresh_dir("corpus-desc");
  auto d = basic_descriptor();
  d.data_path = "rel/data.jsonl";
  d.expected_counts = corpus::ExpectedCounts{3, 4};
  const auto round = corpus::descriptor_from_json(corpus::descriptor_to_json(d));
  CHECK(round.dataset_id == d.dataset_id);
  CHECK(round.language_type == d.language_type);
  CHECK(round.format == d.format);
  CHECK(round.data_path == d.data_path);
  CHECK(round.raw_label_map == d.raw_label_map);
  REQUIRE(round.expected_counts.has_value());
  CHECK(round.expected_counts->abusive == 3);
  CHECK(round.expected_counts->normal == 4);

  io::write_file(dir / "desc.json", corpus::descriptor_to_json(d).dump());
  const auto loaded = corpus::load_descriptor(dir / "desc.json");
  CHECK(loaded.data_path == (dir / "rel/data.jsonl").string());
}

TEST_CASE("merge concatenates, keeps provenance, rejects duplicates") {
  const auto a = tiny_corpus("a", LanguageCode::En, 600);
  const auto b = tiny_corpus("b", LanguageCode::En, 400);
  const auto c = tiny_corpus("c", LanguageCode::En, 250);
  const auto merged = corpus::merge_corpora({a, b, c}, LanguageCode::En);
  CHECK(merged.posts.size() == 2 * (600 + 400 + 250));
  CHECK(merged.provenance == std::vector<std::string>{"a", "b", "c"});
  CHECK(corpus::count_label(merged, BinaryLabel::Abusive) == 1250);

  CHECK_THROWS_AS(corpus::merge_corpora({a, a}, LanguageCode::En), DuplicatePostId);
  CHECK_THROWS_AS(corpus::merge_corpora({}, LanguageCode::En), EmptyList);
}

TEST_CASE("stratified split follows the flooring formula exactly") {
  struct Case {
    std::size_t abusive, normal;
  };
  for (const auto& [abusive, normal] : std::vector<Case>{
           {10000, 20000}, {10, 10}, {7, 23}, {999, 501}, {5, 5}, {64, 64}}) {
    Corpus c;
    c.language_type = LanguageCode::Hi;
    c.provenance.push_back("sizes");
    for (std::size_t i = 0; i < abusive + normal; ++i) {
      corpus::Post p;
      p.post_id = "sizes:" + std::to_string(i + 1);
      p.text = "t" + std::to_string(i);
      p.label = i < abusive ? BinaryLabel::Abusive : BinaryLabel::Normal;
      c.posts.push_back(std::move(p));
    }
    const auto split = corpus::stratified_split(c, 77);
    const auto test_a = count_in(c, split.test, BinaryLabel::Abusive);
    const auto test_n = count_in(c, split.test, BinaryLabel::Normal);
    const auto val_a = count_in(c, split.validation, BinaryLabel::Abusive);
    const auto val_n = count_in(c, split.validation, BinaryLabel::Normal);
    CHECK(test_a == abusive * 20 / 100);
    CHECK(test_n == normal * 20 / 100);
    CHECK(val_a == abusive * 10 / 100);
    CHECK(val_n == normal * 10 / 100);
    CHECK(split.train.size() + split.validation.size() + split.test.size() ==
          abusive + normal);

    std::set<std::string> all;
    for (const auto* bucket : {&split.train, &split.validation, &split.test}) {
      for (const auto& id : *bucket) all.insert(id);
    }
    CHECK(all.size() == abusive + normal);
  }
}

TEST_CASE("splits are deterministic in the seed and ordered by corpus") {
  const auto c = tiny_corpus("s", LanguageCode::Bn, 50);
  const auto s1 = corpus::stratified_split(c, 9);
  const auto s2 = corpus::stratified_split(c, 9);
  const auto s3 = corpus::stratified_split(c, 10);
  CHECK(s1.train == s2.train);
  CHECK(s1.validation == s2.validation);
  CHECK(s1.test == s2.test);
  CHECK(s1.test != s3.test);

  auto sorted = s1.train;
  std::sort(sorted.begin(), sorted.end(), [&](const auto& x, const auto& y) {
    auto pos = [&](const std::string& id) {
      for (std::size_t i = 0; i < c.posts.size(); ++i) {
        if (c.posts[i].post_id == id) return i;
      }
      return c.posts.size();
    };
    return pos(x) < pos(y);
  });
  CHECK(s1.train == sorted);

  const auto small = tiny_corpus("tiny", LanguageCode::Bn, 4);
  CHECK_THROWS_AS(corpus::stratified_split(small, 1), ClassTooSmall);
}

TEST_CASE("split json round-trips") {
  const auto c = tiny_corpus("s", LanguageCode::Bn, 30);
  const auto split = corpus::stratified_split(c, 21);
  const auto back = corpus::split_from_json(corpus::split_to_json(split));
  CHECK(back.seed == split.seed);
  CHECK(back.train == split.train);
  CHECK(back.validation == split.validation);
  CHECK(back.test == split.test);
}

TEST_CASE("few-shot sampling is balanced, train-only, per-repeat") {
  const auto c = tiny_corpus("f", LanguageCode::Ur, 60);
  const auto split = corpus::stratified_split(c, 5);
  const std::set<std::string> train_ids(split.train.begin(), split.train.end());

  const auto set_a = corpus::sample_few_shot(split, c, 16, 0, 1234);
  const auto set_b = corpus::sample_few_shot(split, c, 16, 0, 1234);
  const auto set_c = corpus::sample_few_shot(split, c, 16, 1, 1234);
  CHECK(set_a.post_ids == set_b.post_ids);
  CHECK(set_a.post_ids != set_c.post_ids);
  CHECK(set_a.shots_per_label == 16);
  REQUIRE(set_a.post_ids.size() == 32);

  std::set<std::string> unique(set_a.post_ids.begin(), set_a.post_ids.end());
  CHECK(unique.size() == 32);
  for (const auto& id : set_a.post_ids) CHECK(train_ids.contains(id));
  CHECK(count_in(c, set_a.post_ids, BinaryLabel::Abusive) == 16);
  CHECK(count_in(c, set_a.post_ids, BinaryLabel::Normal) == 16);

  // train split holds 42 per class here, so 64 per label cannot be served
  CHECK_THROWS_AS(corpus::sample_few_shot(split, c, 64, 0, 1), InsufficientGold);
}

TEST_CASE("subset preserves the requested order and rejects unknown ids") {
  const auto c = tiny_corpus("o", LanguageCode::Mr, 5);
  const auto posts = corpus::subset(c, {"o:3", "o:1"});
  REQUIRE(posts.size() == 2);
  CHECK(posts[0].post_id == "o:3");
  CHECK(posts[1].post_id == "o:1");
  CHECK_THROWS_AS(corpus::subset(c, {"o:99"}), MissingSplit);
}

TEST_CASE("fingerprint tracks content") {
  auto a = tiny_corpus("fp", LanguageCode::En, 10);
  const auto before = corpus::fingerprint(a);
  CHECK(before == corpus::fingerprint(a));
  a.posts[0].text += "!";
  CHECK(before != corpus::fingerprint(a));
}
