#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "oracle.hpp"
#include "patentlens/error.hpp"
#include "patentlens/ingest/ingest.hpp"
#include "patentlens/store/patent_store.hpp"
#include "patentlens/store/stats.hpp"
#include "synthetic.hpp"

using namespace patentlens;
using namespace patentlens::store;
namespace fs = std::filesystem;
namespace oracle = patentlens::testing::oracle;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("pl_store_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PatentDocument fixture_grant() {
  auto d = testing::minimal_grant("7654321", 0);
  d.filing_date = *Date::parse("20150301");
  d.grant_date = *Date::parse("20180615");
  d.publication_date = *d.grant_date;
  d.inventors = {{"Jane", "Doe"}};
  d.assignees = {"International Business Machines Corporation"};
  d.cpc_codes = {"G06F16"};
  return d;
}

}  // namespace

TEST_SUITE("store") {
  TEST_CASE("percentiles interpolate linearly between order statistics") {
    const std::vector<double> v = {100, 200, 300, 400};
    CHECK(percentile_linear(v, 0.5) == doctest::Approx(250));
    CHECK(percentile_linear(v, 0.1) == doctest::Approx(130));
    CHECK(percentile_linear(v, 0.9) == doctest::Approx(370));
    CHECK(percentile_linear(v, 0.0) == 100);
    CHECK(percentile_linear(v, 1.0) == 400);
    const auto s = summarize_lags("g", {400, 100, 300, 200});
    CHECK(s.mean_days == 250);
    CHECK(s.median_days == 250);
  }

  TEST_CASE("upsert keys on doc number and kind") {
    auto db = PatentStore::in_memory();
    const auto g = fixture_grant();
    CHECK(db.upsert(g) == "grant/7654321");
    db.upsert(g);
    CHECK(db.size() == 1);
    auto app = g;
    app.doc_kind = DocKind::Application;
    app.grant_date.reset();
    app.publication_date = *Date::parse("20160901");
    CHECK(db.upsert(app) == "application/7654321");
    CHECK(db.size() == 2);
    CHECK(db.find_by_number("7654321").size() == 2);
    auto empty = g;
    empty.doc_number.clear();
    CHECK_THROWS_WITH(db.upsert(empty), "missing required field");
  }

  TEST_CASE("replacing a record relinks its entities") {
    auto db = PatentStore::in_memory();
    auto g = fixture_grant();
    db.upsert(g);
    CHECK(db.has_entity({EntityKind::Inventor, "jane-doe"}));
    g.inventors = {{"Ana", "Lopez"}};
    db.upsert(g);
    CHECK_FALSE(db.has_entity({EntityKind::Inventor, "jane-doe"}));
    CHECK(db.has_entity({EntityKind::Inventor, "ana-lopez"}));
  }

  TEST_CASE("single-grant inventor summary") {
    auto db = PatentStore::in_memory();
    db.upsert(fixture_grant());
    const auto s = db.entity_summary({EntityKind::Inventor, "jane-doe"});
    CHECK(s.total_grants == 1);
    CHECK(s.median_grant_lag_days == doctest::Approx(oracle::julian_day(2018, 6, 15) - oracle::julian_day(2015, 3, 1)));
    CHECK(*s.median_grant_lag_days == 1202);
    const auto groups = db.grant_lag_aggregates(LagGrouping::FilingYear);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].group_key == "2015");
    CHECK(groups[0].mean_days == 1202);
    CHECK(groups[0].p10_days == 1202);
    CHECK(groups[0].p90_days == 1202);
    CHECK_THROWS_WITH(db.entity_summary({EntityKind::Inventor, "nobody"}), "entity not found");
  }

  TEST_CASE("alias organisation without documents has an empty summary") {
    auto db = PatentStore::in_memory(AliasTable::load(PL_ALIAS_TABLE));
    const auto s = db.entity_summary({EntityKind::Organisation, "qualcomm"});
    CHECK(s.total_grants == 0);
    CHECK(s.total_pending_applications == 0);
    CHECK(s.per_year_filings.empty());
    CHECK_FALSE(s.median_grant_lag_days);
    CHECK(s.display_name == "Qualcomm");
  }

  TEST_CASE("alias variants collapse into one organisation") {
    auto db = PatentStore::in_memory(AliasTable::load(PL_ALIAS_TABLE));
    auto a = fixture_grant();
    auto b = fixture_grant();
    b.doc_number = "7654322";
    b.assignees = {"IBM Corp."};
    db.upsert(a);
    db.upsert(b);
    CHECK(db.entity_summary({EntityKind::Organisation, "ibm"}).total_grants == 2);
    std::size_t with_documents = 0;
    for (const auto& k : db.entities(EntityKind::Organisation)) with_documents += !db.linked_documents(k).empty();
    CHECK(with_documents == 1);
  }

  TEST_CASE("query contract") {
    auto db = PatentStore::in_memory();
    CHECK(db.query({}, {}).total == 0);
    for (const auto& d : testing::synthetic_corpus(120, 9)) db.upsert(d);
    const auto all = db.query({}, {0, 500});
    CHECK(all.total == 120);
    const auto beyond = db.query({}, {1000, 10});
    CHECK(beyond.total == 120);
    CHECK(beyond.items.empty());
    CHECK_THROWS_WITH(db.query({}, {0, 0}), "limit must be in [1, 500]");
    CHECK_THROWS_WITH(db.query({}, {0, 501}), "limit must be in [1, 500]");
    PatentFilter bad_range;
    bad_range.year_range = {2012, 2010};
    CHECK_THROWS_WITH(db.query(bad_range, {}), "invalid range");
    PatentFilter unknown;
    unknown.entity = EntityKey{EntityKind::Inventor, "no-such-person"};
    CHECK_THROWS_WITH(db.query(unknown, {}), "entity not found");
    // pages tile the full result
    std::vector<std::string> paged;
    for (std::size_t off = 0; off < 120; off += 7) {
      for (const auto& d : db.query({}, {off, 7}).items) paged.push_back(d.doc_number);
    }
    REQUIRE(paged.size() == all.items.size());
    for (std::size_t i = 0; i < paged.size(); ++i) CHECK(paged[i] == all.items[i].doc_number);
  }

  TEST_CASE("aggregates match linear scans on a synthetic corpus") {
    const auto aliases = AliasTable::load(PL_ALIAS_TABLE);
    auto db = PatentStore::in_memory(aliases);
    const auto docs = testing::synthetic_corpus(400, 21);
    for (const auto& d : docs) db.upsert(d);

    for (bool by_section : {false, true}) {
      const auto expected = oracle::lag_groups(docs, by_section);
      const auto got = db.grant_lag_aggregates(by_section ? LagGrouping::CpcSection : LagGrouping::FilingYear);
      REQUIRE(got.size() == expected.size());
      for (const auto& g : got) {
        const auto& e = expected.at(g.group_key);
        CHECK(g.n == e.n);
        CHECK(std::abs(g.mean_days - e.mean) <= 1e-9 * std::abs(e.mean));
        CHECK(g.median_days == doctest::Approx(e.median).epsilon(1e-12));
        CHECK(g.p10_days == doctest::Approx(e.p10).epsilon(1e-12));
        CHECK(g.p90_days == doctest::Approx(e.p90).epsilon(1e-12));
      }
    }

    for (const auto kind : {EntityKind::Inventor, EntityKind::Organisation}) {
      for (const auto& key : db.entities(kind)) {
        const auto s = db.entity_summary(key);
        const auto e = oracle::summary(docs, key, aliases);
        CHECK(s.total_grants == e.grants);
        CHECK(s.total_pending_applications == e.pending);
        CHECK(s.per_year_filings == e.filings_per_year);
        CHECK(s.per_year_grants == e.grants_per_year);
        CHECK(s.cpc_section_histogram == e.sections);
        CHECK(s.median_grant_lag_days.has_value() == e.median_lag.has_value());
        if (e.median_lag) CHECK(*s.median_grant_lag_days == doctest::Approx(*e.median_lag).epsilon(1e-12));
      }
    }

    std::mt19937 rng(4);
    const auto inventors = db.entities(EntityKind::Inventor);
    for (int trial = 0; trial < 60; ++trial) {
      oracle::Filter f;
      PatentFilter pf;
      if (rng() % 2) pf.doc_kind = f.kind = rng() % 2 ? DocKind::Grant : DocKind::Application;
      if (rng() % 2) pf.cpc_section = f.section = "ABCGHY"[rng() % 6];
      if (rng() % 2) {
        const int a = 2004 + static_cast<int>(rng() % 14);
        pf.year_range = f.years = std::pair{a, a + static_cast<int>(rng() % 4)};
      }
      if (rng() % 3 == 0) pf.entity = f.entity = inventors[rng() % inventors.size()];
      const auto expected = oracle::query(docs, f, aliases);
      const auto page = db.query(pf, {0, 500});
      REQUIRE(page.total == expected.size());
      for (std::size_t i = 0; i < page.items.size(); ++i) {
        CHECK(page.items[i].doc_number == expected[i].first);
        CHECK(page.items[i].doc_kind == expected[i].second);
      }
    }
  }

  TEST_CASE("file store persists, tolerates a torn tail and compacts") {
    TempDir tmp;
    const auto path = tmp.path / "store.db";
    const auto docs = testing::synthetic_corpus(30, 2);
    {
      auto db = PatentStore::open(path);
      for (const auto& d : docs) db.upsert(d);
      db.upsert(docs[0]);  // identical upsert: no new record
    }
    const auto size_before = fs::file_size(path);
    {
      auto db = PatentStore::open(path);
      CHECK(db.size() == 30);
      CHECK(*db.get(docs[3].doc_number, docs[3].doc_kind) == docs[3]);
      auto changed = docs[1];
      changed.title = "changed";
      db.upsert(changed);
    }
    CHECK(fs::file_size(path) > size_before);
    {
      std::ofstream out(path, std::ios::binary | std::ios::app);
      out.write("\x40\x00\x00\x00{\"doc", 9);  // length prefix promising more bytes than follow
    }
    {
      auto db = PatentStore::open(path);
      CHECK(db.size() == 30);
      CHECK(db.get(docs[1].doc_number, docs[1].doc_kind)->title == "changed");
      db.compact();
    }
    auto db = PatentStore::open(path);
    CHECK(db.size() == 30);
    CHECK(db.get(docs[1].doc_number, docs[1].doc_kind)->title == "changed");

    const auto foreign = tmp.path / "foreign.db";
    std::ofstream(foreign) << "not a store";
    CHECK_THROWS_AS(PatentStore::open(foreign), Error);
  }

  TEST_CASE("ingesting the same directory twice leaves the store unchanged") {
    auto db = PatentStore::in_memory();
    const fs::path dir = fs::path(PL_TEST_DATA_DIR) / "ingest_pair";
    ingest::ingest_path(dir, [&](PatentDocument d) { db.upsert(std::move(d)); });
    const auto first = db.documents();
    ingest::ingest_path(dir, [&](PatentDocument d) { db.upsert(std::move(d)); });
    CHECK(db.size() == 4);
    CHECK(db.documents() == first);
  }
}
