#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "heavytail/firmpanel.hpp"

using namespace heavytail;
using namespace heavytail::firmpanel;

namespace {

const char* kHeader =
    "firm_id,year,phone,zip,founding_year,sector,ownership,output,"
    "intermediate_input,wages,profits,employment,capital";

std::string row(const std::string& id, int year, const std::string& phone, const std::string& zip,
                const std::string& founding, const std::string& sector, const std::string& own,
                double q, double ii, double w, double pi, double l, double k) {
  std::ostringstream os;
  os << id << ',' << year << ',' << phone << ',' << zip << ',' << founding << ',' << sector << ','
     << own << ',' << q << ',' << ii << ',' << w << ',' << pi << ',' << l << ',' << k;
  return os.str();
}

FirmRecord make_record(const std::string& id, int year, double q, double ii, double w, double pi,
                       double l, double k, const std::string& sector = "S1",
                       const std::string& phone = "", const std::string& zip = "") {
  FirmRecord r;
  r.firm_id = id;
  r.year = year;
  r.phone = phone;
  r.zip = zip;
  r.sector = sector;
  r.output = q;
  r.intermediate_input = ii;
  r.wages = w;
  r.profits = pi;
  r.employment = l;
  r.capital = k;
  return r;
}

}  // namespace

TEST_SUITE("firmpanel") {
  TEST_CASE("ingest accepts valid rows and rejects with reasons") {
    std::ostringstream os;
    os << kHeader << "\n";
    for (int i = 0; i < 5; ++i)
      os << row("F" + std::to_string(i), 2000 + i, "555-01", "310005", "1990", "S1", "private",
                100 + i, 40, 20, 10, 8, 50)
         << "\n";
    std::istringstream in(os.str());
    const auto res = ingest_stream(in);
    CHECK(res.records.size() == 5);
    CHECK(res.rejects.empty());
    CHECK(res.records[0].ownership == Ownership::priv);
    CHECK(res.records[0].founding_year == 1990);
  }

  TEST_CASE("nonnumeric employment is rejected as parse:L") {
    std::istringstream in(std::string(kHeader) + "\n" +
                          "F1,2000,,310005,,S1,soe,100,40,20,10,many,50\n" +
                          "F2,2000,,310005,,S1,soe,100,40,20,10,8,50\n");
    const auto res = ingest_stream(in);
    CHECK(res.records.size() == 1);
    REQUIRE(res.rejects.size() == 1);
    CHECK(res.rejects[0].reason == "parse:L");
    CHECK(res.rejects[0].line_number == 2);
  }

  TEST_CASE("schema errors") {
    std::istringstream dup(std::string(kHeader) + "\n" + std::string(kHeader) + "\n");
    CHECK_THROWS_AS(ingest_stream(dup), SchemaError);
    std::istringstream bad("id,year\nF1,2000\n");
    CHECK_THROWS_AS(ingest_stream(bad), SchemaError);
  }

  TEST_CASE("ingest reason codes for missing and out-of-range fields") {
    std::istringstream in(std::string(kHeader) + "\n" +
                          "F1,1805,,1,,S1,soe,1,1,1,1,1,1\n" +       // range:year
                          "F2,2000,,1,,S1,dynasty,1,1,1,1,1,1\n" +   // parse:ownership
                          "F3,2000,,1,,S1,soe,1,1,1,1,,1\n" +        // missing:L
                          "F4,2000,,1,,S1,soe,1,1,1,1,-3,1\n");      // invalid:L
    const auto res = ingest_stream(in);
    CHECK(res.records.empty());
    REQUIRE(res.rejects.size() == 4);
    CHECK(res.rejects[0].reason == "range:year");
    CHECK(res.rejects[1].reason == "parse:ownership");
    CHECK(res.rejects[2].reason == "missing:L");
    CHECK(res.rejects[3].reason == "invalid:L");
  }

  TEST_CASE("dedupe keeps the first occurrence") {
    std::vector<FirmRecord> rows = {make_record("A", 2000, 1, 0, 0, 0, 1, 1),
                                    make_record("A", 2000, 2, 0, 0, 0, 1, 1),
                                    make_record("A", 2001, 3, 0, 0, 0, 1, 1)};
    const auto res = dedupe(rows);
    CHECK(res.records.size() == 2);
    CHECK(res.records[0].output == 1.0);  // first kept
    REQUIRE(res.duplicates.size() == 1);
    CHECK(res.duplicates[0] == std::pair<std::string, int>{"A", 2000});
  }

  TEST_CASE("dedupe matches the distinct-key count on a large synthetic set") {
    std::mt19937 gen(12);
    std::vector<FirmRecord> rows;
    std::set<std::pair<std::string, int>> keys;
    for (int i = 0; i < 100000; ++i) {
      // ~3% of rows reuse an earlier key
      const int base = (gen() % 100 < 3 && i > 0) ? static_cast<int>(gen() % i) : i;
      const std::string id = "F" + std::to_string(base % 50000);
      const int year = 1998 + (base / 50000) % 10;
      rows.push_back(make_record(id, year, 1, 0, 0, 0, 1, 1));
      keys.emplace(id, year);
    }
    const auto res = dedupe(rows);
    CHECK(res.records.size() == keys.size());
    CHECK(res.records.size() + res.duplicates.size() == rows.size());
  }

  TEST_CASE("linkage by id, then by phone and zip, with ambiguity logging") {
    std::vector<FirmRecord> rows;
    rows.push_back(make_record("A", 2000, 1, 0, 0, 0, 1, 1));
    rows.push_back(make_record("A", 2001, 1, 0, 0, 0, 1, 1));  // id link
    rows.push_back(make_record("B", 2000, 1, 0, 0, 0, 1, 1, "S1", "555", "100"));
    rows.push_back(make_record("C", 2001, 1, 0, 0, 0, 1, 1, "S1", "555", "100"));  // key link
    rows.push_back(make_record("D", 2000, 1, 0, 0, 0, 1, 1, "S1", "777", "200"));
    rows.push_back(make_record("E", 2001, 1, 0, 0, 0, 1, 1, "S1", "777", "200"));  // ambiguous
    rows.push_back(make_record("G", 2001, 1, 0, 0, 0, 1, 1, "S1", "777", "200"));  // ambiguous
    const auto links = link_firms(rows);
    CHECK(links.previous_id.at({"A", 2001}) == "A");
    CHECK(links.previous_id.at({"C", 2001}) == "B");
    CHECK_FALSE(links.linked("E", 2001));
    CHECK_FALSE(links.linked("G", 2001));
    CHECK(links.ambiguities.size() == 1);
  }

  TEST_CASE("deflation divides monetary fields only") {
    DeflatorTable table;
    table.set("S1", 2000, 1.25);
    std::vector<FirmRecord> rows = {make_record("A", 2000, 100, 50, 25, 20, 8, 200),
                                    make_record("B", 2001, 100, 50, 25, 20, 8, 200)};
    const auto res = deflate(rows, table);
    CHECK(res.records[0].output == doctest::Approx(80.0));
    CHECK(res.records[0].intermediate_input == doctest::Approx(40.0));
    CHECK(res.records[0].wages == doctest::Approx(20.0));
    CHECK(res.records[0].profits == doctest::Approx(16.0));
    CHECK(res.records[0].capital == doctest::Approx(160.0));
    CHECK(res.records[0].employment == doctest::Approx(8.0));  // untouched
    // missing (S1, 2001): unchanged, warning counted
    CHECK(res.records[1].output == doctest::Approx(100.0));
    CHECK(res.missing_deflators == 1);
    CHECK_THROWS_AS(table.set("S1", 2002, 0.0), std::invalid_argument);
  }

  TEST_CASE("region assignment takes the longest matching prefix") {
    ZipMap map;
    map.add("3", "wide");
    map.add("31", "narrow");
    std::vector<FirmRecord> rows = {make_record("A", 2000, 1, 0, 0, 0, 1, 1, "S1", "", "310005"),
                                    make_record("B", 2000, 1, 0, 0, 0, 1, 1, "S1", "", "390001"),
                                    make_record("C", 2000, 1, 0, 0, 0, 1, 1, "S1", "", ""),
                                    make_record("D", 2000, 1, 0, 0, 0, 1, 1, "S1", "", "900")};
    const auto out = assign_region(rows, map);
    CHECK(out[0].region == "narrow");
    CHECK(out[1].region == "wide");
    CHECK(out[2].region == "unknown");
    CHECK(out[3].region == "unknown");
  }

  TEST_CASE("derive computes the documented variables") {
    std::vector<FirmRecord> rows = {make_record("A", 2000, 10, 4, 3, 2, 2, 100),
                                    make_record("A", 2001, 16, 4, 3, 11, 2, 110)};
    const auto links = link_firms(rows);
    const auto panel = derive(rows, links);
    REQUIRE(panel.rows.size() == 2);
    const auto& y0 = panel.rows[0];
    CHECK(y0.va == doctest::Approx(6.0));
    CHECK(y0.va_imputed == doctest::Approx(5.0));
    CHECK(*y0.lp == doctest::Approx(3.0));
    CHECK(*y0.ci == doctest::Approx(50.0));
    CHECK(*y0.roc == doctest::Approx(0.02));
    CHECK_FALSE(y0.dlp.has_value());  // no link into 1999
    const auto& y1 = panel.rows[1];
    CHECK(*y1.lp == doctest::Approx(6.0));
    CHECK(*y1.dlp == doctest::Approx(3.0));
    CHECK(*y1.lp_growth == doctest::Approx(1.0));
    CHECK(*y1.ir == doctest::Approx(0.10));
    CHECK(*y1.roc == doctest::Approx(0.10));
  }

  TEST_CASE("zero employment and zero capital carry reason codes") {
    std::vector<FirmRecord> rows = {make_record("A", 2000, 10, 4, 3, 2, 0, 0)};
    const auto panel = derive(rows, link_firms(rows));
    CHECK_FALSE(panel.rows[0].lp.has_value());
    CHECK_FALSE(panel.rows[0].ci.has_value());
    CHECK_FALSE(panel.rows[0].roc.has_value());
    CHECK(panel.rows[0].va == doctest::Approx(6.0));  // VA is still defined
    std::set<std::string> reasons;
    for (const auto& d : panel.drops) reasons.insert(d.variable + "/" + d.reason);
    CHECK(reasons.count("lp/zero_employment"));
    CHECK(reasons.count("ci/zero_employment"));
    CHECK(reasons.count("roc/nonpositive_capital"));
  }

  TEST_CASE("growth-rate singularity guard") {
    // LP_2000 = 0: the absolute change is defined, the growth rate is not
    std::vector<FirmRecord> rows = {make_record("A", 2000, 4, 4, 1, 1, 2, 10),
                                    make_record("A", 2001, 8, 4, 1, 1, 2, 10)};
    const auto panel = derive(rows, link_firms(rows));
    CHECK(*panel.rows[1].dlp == doctest::Approx(2.0));
    CHECK_FALSE(panel.rows[1].lp_growth.has_value());
    bool found = false;
    for (const auto& d : panel.drops)
      if (d.variable == "lp_growth" && d.reason == "singularity") found = true;
    CHECK(found);
  }

  TEST_CASE("telescoping of productivity changes along a linked chain") {
    // dyadic values keep the arithmetic exact
    const double lp_by_year[] = {3.0, 5.5, 2.25, 7.75, 4.5, 9.0};
    std::vector<FirmRecord> rows;
    for (int t = 0; t < 6; ++t) {
      const double lp = lp_by_year[t];
      rows.push_back(make_record("A", 1998 + t, lp * 2.0 + 8.0, 8.0, 1, 1, 2, 16));
    }
    const auto panel = derive(rows, link_firms(rows));
    double sum = 0.0;
    for (const auto& r : panel.rows)
      if (r.dlp) sum += *r.dlp;
    CHECK(sum == lp_by_year[5] - lp_by_year[0]);  // exact
  }

  TEST_CASE("derive is order independent") {
    std::vector<FirmRecord> rows;
    for (int i = 0; i < 50; ++i)
      for (int t = 0; t < 4; ++t)
        rows.push_back(make_record("F" + std::to_string(i), 2000 + t, 10.0 + i + t, 4, 3, 2,
                                   2 + (i % 3), 100 + i));
    auto sorted_panel = [](std::vector<FirmRecord> rs) {
      auto panel = derive(rs, link_firms(rs));
      std::sort(panel.rows.begin(), panel.rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.firm_id, a.year) < std::tie(b.firm_id, b.year);
      });
      return panel;
    };
    const auto p1 = sorted_panel(rows);
    std::mt19937 g(5);
    std::shuffle(rows.begin(), rows.end(), g);
    const auto p2 = sorted_panel(rows);
    REQUIRE(p1.rows.size() == p2.rows.size());
    for (std::size_t i = 0; i < p1.rows.size(); ++i) {
      CHECK(p1.rows[i].firm_id == p2.rows[i].firm_id);
      CHECK(p1.rows[i].va == p2.rows[i].va);
      CHECK(p1.rows[i].dlp.has_value() == p2.rows[i].dlp.has_value());
      if (p1.rows[i].dlp) CHECK(*p1.rows[i].dlp == *p2.rows[i].dlp);
    }
  }

  TEST_CASE("counts conservation per variable and year") {
    std::vector<FirmRecord> rows;
    for (int i = 0; i < 40; ++i) {
      auto r = make_record("F" + std::to_string(i), 2000, 10 + i, 4, 3, 2,
                           i % 7 == 0 ? 0.0 : 2.0, i % 5 == 0 ? 0.0 : 50.0);
      rows.push_back(r);
      if (i % 2 == 0) rows.push_back(make_record("F" + std::to_string(i), 2001, 12 + i, 4, 3, 2,
                                                 2.0, 60.0));
    }
    const auto panel = derive(rows, link_firms(rows));
    const auto rep = build_accounting(panel);
    for (const auto& [year, yc] : rep.years) {
      for (const char* var : AccountingReport::variables) {
        std::size_t dropped = 0;
        for (const auto& [key, n] : yc.dropped)
          if (key.rfind(std::string(var) + "/", 0) == 0) dropped += n;
        const auto avail = yc.available.count(var) ? yc.available.at(var) : 0;
        INFO("year ", year, " variable ", var);
        CHECK(avail + dropped == yc.rows);
      }
    }
  }

  TEST_CASE("deflation homogeneity") {
    auto base_rows = std::vector<FirmRecord>{make_record("A", 2000, 100, 40, 30, 20, 5, 200),
                                             make_record("A", 2001, 120, 40, 30, 24, 5, 220)};
    DeflatorTable table;
    table.set("S1", 2000, 1.1);
    table.set("S1", 2001, 1.3);

    auto derive_with = [&](double money_scale, double deflator_scale) {
      auto rows = base_rows;
      for (auto& r : rows) {
        r.output *= money_scale;
        r.intermediate_input *= money_scale;
        r.wages *= money_scale;
        r.profits *= money_scale;
        r.capital *= money_scale;
      }
      DeflatorTable t2;
      t2.set("S1", 2000, 1.1 * deflator_scale);
      t2.set("S1", 2001, 1.3 * deflator_scale);
      const auto defl = deflate(rows, t2);
      return derive(defl.records, link_firms(defl.records));
    };

    const auto p0 = derive_with(1.0, 1.0);
    // scaling money and deflators together changes nothing downstream
    const auto p1 = derive_with(7.0, 7.0);
    CHECK(*p1.rows[1].lp == doctest::Approx(*p0.rows[1].lp).epsilon(1e-12));
    CHECK(*p1.rows[1].ir == doctest::Approx(*p0.rows[1].ir).epsilon(1e-12));
    CHECK(*p1.rows[1].roc == doctest::Approx(*p0.rows[1].roc).epsilon(1e-12));
    CHECK(*p1.rows[1].ci == doctest::Approx(*p0.rows[1].ci).epsilon(1e-12));
    // scaling money alone scales the currency-denominated variables linearly
    // and leaves the pure ratios alone
    const auto p2 = derive_with(7.0, 1.0);
    CHECK(p2.rows[1].va == doctest::Approx(7.0 * p0.rows[1].va).epsilon(1e-12));
    CHECK(*p2.rows[1].lp == doctest::Approx(7.0 * *p0.rows[1].lp).epsilon(1e-12));
    CHECK(*p2.rows[1].ci == doctest::Approx(7.0 * *p0.rows[1].ci).epsilon(1e-12));
    CHECK(*p2.rows[1].roc == doctest::Approx(*p0.rows[1].roc).epsilon(1e-12));
    CHECK(*p2.rows[1].ir == doctest::Approx(*p0.rows[1].ir).epsilon(1e-12));
  }

  TEST_CASE("derived panel survives a CSV round trip") {
    std::vector<FirmRecord> rows = {make_record("A", 2000, 10, 4, 3, 2, 2, 100),
                                    make_record("A", 2001, 16, 4, 3, 11, 2, 110),
                                    make_record("B", 2000, 50, 10, 5, 5, 0, 25)};
    const auto panel = derive(rows, link_firms(rows));
    const std::string path = "/tmp/heavytail_derived_roundtrip.csv";
    write_derived_csv(path, panel);
    const auto back = read_derived_csv(path);
    REQUIRE(back.rows.size() == panel.rows.size());
    for (std::size_t i = 0; i < back.rows.size(); ++i) {
      CHECK(back.rows[i].firm_id == panel.rows[i].firm_id);
      CHECK(back.rows[i].va == panel.rows[i].va);
      CHECK(back.rows[i].lp.has_value() == panel.rows[i].lp.has_value());
      if (back.rows[i].lp) CHECK(*back.rows[i].lp == *panel.rows[i].lp);
      CHECK(back.rows[i].dlp.has_value() == panel.rows[i].dlp.has_value());
      if (back.rows[i].dlp) CHECK(*back.rows[i].dlp == *panel.rows[i].dlp);
    }
    std::remove(path.c_str());
  }

  TEST_CASE("extract_variable filters by year and region") {
    std::vector<FirmRecord> rows = {make_record("A", 2000, 10, 4, 3, 2, 2, 100),
                                    make_record("B", 2000, 20, 4, 3, 2, 2, 100),
                                    make_record("C", 2001, 30, 4, 3, 2, 2, 100)};
    rows[0].region = "R1";
    rows[1].region = "R2";
    rows[2].region = "R1";
    const auto panel = derive(rows, link_firms(rows));
    CHECK(extract_variable(panel, "lp").size() == 3);
    CHECK(extract_variable(panel, "lp", 2000).size() == 2);
    CHECK(extract_variable(panel, "lp", 2000, "R1").size() == 1);
    CHECK(extract_variable(panel, "lp", -1, "R1").size() == 2);
    CHECK_THROWS_AS(extract_variable(panel, "nope"), std::invalid_argument);
  }
}
