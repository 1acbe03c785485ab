#include <doctest.h>

#include <regex>
#include <set>
#include <string>

#include "support/synthetic.hpp"
#include "tabtrawl/filters.hpp"
#include "tabtrawl/rng.hpp"

using namespace tabtrawl;

namespace {

TableArtifact from_cells(std::vector<std::string> names,
                         std::vector<std::vector<std::string>> rows) {
  return table_from_fields(std::move(names), std::move(rows));
}

// Independent stopword-count oracle over the published bundle.
double stopword_fraction(std::string_view text) {
  std::set<std::string, std::less<>> stops;
  for (std::string_view w : english_stopwords()) stops.emplace(w);
  size_t tokens = 0;
  size_t hits = 0;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    ++tokens;
    if (stops.contains(cur)) ++hits;
    cur.clear();
  };
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    if (c >= 'a' && c <= 'z')
      cur += c;
    else
      flush();
  }
  flush();
  return tokens == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(tokens);
}

}  // namespace

TEST_CASE("english scorer agrees with the stopword oracle") {
  FilterConfig cfg;
  const char* english = "the cat sat on the mat and the dog ran";
  const char* german = "der die das und nicht aber";
  CHECK(stopword_fraction(english) >= 0.3);
  CHECK(english_score(english) >= cfg.english_threshold);
  CHECK(stopword_fraction(german) == 0.0);
  CHECK(english_score(german) < cfg.english_threshold);
  CHECK(english_score("") == 0.0);
}

TEST_CASE("pii detection against a reference pattern corpus") {
  // Reference evaluator: regex equivalents of the documented email and
  // phone rules, applied to whole strings.
  std::regex email(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
  auto reference = [&](const std::string& s, bool phone_expected) {
    return std::regex_search(s, email) || phone_expected;
  };

  struct Case {
    const char* text;
    bool expected;
    bool is_phone;
  };
  const Case cases[] = {
      {"contact a@b.com today", true, false},
      {"a@b.com", true, false},
      {"first.last+tag@sub.domain.org", true, false},
      {"support@example.co", true, false},
      {"user123@mail-server.net", true, false},
      {"not an email a@b", false, false},
      {"ends with dot a@b.", false, false},
      {"missing tld a@.com", false, false},
      {"just an @ sign", false, false},
      {"price @ 5 dollars", false, false},
      {"call +1 (555) 867-5309", true, true},
      {"+1 (555) 867-5309", true, true},
      {"555-867-5309", true, true},
      {"555.867.5309", true, true},
      {"(555) 867-5309", true, true},
      {"+442071838750", true, true},
      {"+44 20 7183 8750", true, true},
      {"867-5309", true, true},
      {"ring 020 7183 8750 now", true, true},
      {"fax: 555 867 5309", true, true},
      {"order id 8675309", false, false},
      {"8675309", false, false},
      {"123456789012345678", false, false},
      {"2024-01-05", false, false},
      {"meeting on 2023-12-31", false, false},
      {"3.1415926", false, false},
      {"pi is 3.14159265", false, false},
      {"1234.56", false, false},
      {"12345.6789", false, false},
      {"version 1.2", false, false},
      {"ratio 10 - 20", false, false},
      {"range 2023 - 2024", false, false},
      {"a plain sentence", false, false},
      {"", false, false},
      {"x" , false, false},
      {"50 off", false, false},
      {"radius 5", false, false},
      {"serial 0012345", false, false},
      {"year 1984", false, false},
      {"sum 1000000", false, false},
      {"call me at 5558675309 maybe", false, false},  // no separator, no prefix
      {"+15558675309", true, true},                   // prefix alone suffices
      {"two ids 12 34", false, false},                // too few digits
      {"code 12-34", false, false},
      {"part 123-4567", true, true},                  // 7 digits with separator
      {"lot 12-3456", false, false},
      {"temp -40.5 today", false, false},
      {"email me: bob@работа.com", false, false},     // non-ascii domain stays out
      {"bob at example dot com", false, false},
      {"(555)8675309", true, true},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    CHECK(detect_pii(c.text) == c.expected);
    if (c.expected) CHECK(reference(c.text, c.is_phone));
  }
}

TEST_CASE("code scorer separates code from prose") {
  FilterConfig cfg;
  CHECK(code_score("def f(x): return x+1") >= cfg.code_threshold);
  CHECK(code_score("the weather is sunny") < cfg.code_threshold);
  CHECK(code_score("") == 0.0);
  CHECK(code_score("O'Brien (manager)") < cfg.code_threshold);
  CHECK(code_score("#include <vector> int main() { return 0; }") >= cfg.code_threshold);
}

TEST_CASE("row-level code patterns") {
  CHECK(detect_code("import os"));
  CHECK(detect_code("from os import path"));
  CHECK(detect_code("def handler(event):"));
  CHECK(detect_code("foo(); bar();"));
  CHECK(detect_code("x => x + 1"));
  CHECK(detect_code("#include <cstdio>"));
  CHECK_FALSE(detect_code("import duties rose sharply"));
  CHECK_FALSE(detect_code("from a to b"));
  CHECK_FALSE(detect_code("the class of 2024"));
  CHECK_FALSE(detect_code("return of the king"));
  CHECK_FALSE(detect_code("definitely fine"));
}

TEST_CASE("table filters fire in documented order with attribution") {
  FilterConfig cfg;
  cfg.min_rows = 2;  // keep fixtures small

  SUBCASE("row count bounds") {
    FilterConfig strict = cfg;
    strict.min_rows = 64;
    TableArtifact t = testing::make_clean_table(1, 10);
    auto res = apply_table_filters(t, strict);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTableRowCount);
  }
  SUBCASE("schema heterogeneity rejects uniform dtype tables") {
    TableArtifact t = from_cells({"a", "b", "c", "d", "e"},
                                 {{"1.5", "2.5", "3.5", "4.5", "5.5"},
                                  {"1.25", "2.25", "3.25", "4.25", "5.25"}});
    auto res = apply_table_filters(t, cfg);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTableSchema);
  }
  SUBCASE("unnamed column fraction") {
    TableArtifact t = from_cells({"Unnamed: 0", "Unnamed: 1", "Unnamed: 2", "d"},
                                 {{"1", "x", "2.5", "true"}, {"2", "y", "3.5", "false"}});
    auto res = apply_table_filters(t, cfg);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTableUnnamed);
  }
  SUBCASE("parse error on duplicate headers") {
    TableArtifact t =
        from_cells({"a", "a"}, {{"1", "x"}, {"2", "y"}});
    auto res = apply_table_filters(t, cfg);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTableParseError);
  }
  SUBCASE("parse error on numeric header majority") {
    TableArtifact t = from_cells({"1", "2", "3", "4", "name"},
                                 {{"1", "2", "3", "4", "x"}, {"4", "5", "6", "7", "y"}});
    auto res = apply_table_filters(t, cfg);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTableParseError);
  }
  SUBCASE("parse error when a header equals the first data row") {
    TableArtifact t =
        from_cells({"id", "when", "n"}, {{"id", "when", "9"}, {"1", "2", "8"}});
    auto res = apply_table_filters(t, cfg);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTableParseError);
  }
  SUBCASE("pii fraction") {
    // An email column in an otherwise clean table: well above a 1% cell share.
    TableArtifact t = testing::make_clean_table(11, 80);
    std::vector<CellValue> emails;
    for (size_t i = 0; i < t.n_rows(); ++i)
      emails.emplace_back("user" + std::to_string(i) + "@example.com");
    t.columns.push_back(emails);
    t.headers.push_back(make_column_meta("contact", emails));
    auto res = apply_table_filters(t, cfg);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTablePii);
  }
  SUBCASE("any code cell rejects the table") {
    TableArtifact t = testing::make_clean_table(13, 80);
    t.columns[3][7] = std::string("def f(x): return x+1");
    auto res = apply_table_filters(t, cfg);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTableCode);
  }
  SUBCASE("overall missing fraction") {
    TableArtifact t =
        from_cells({"a", "b"}, {{"1", ""}, {"2", ""}, {"3", ""}, {"4", "x"}, {"5", "y"}});
    auto res = apply_table_filters(t, cfg);
    CHECK_FALSE(res.accepted);
    CHECK(res.rule == rules::kTableMissing);
  }
  SUBCASE("clean table passes all rules") {
    TableArtifact t = testing::make_clean_table(2, 80);
    auto res = apply_table_filters(t, FilterConfig{});
    CHECK(res.accepted);
    CHECK(res.report.rules.size() == 8);
  }
}

TEST_CASE("column filters remove by rule and re-check the column bound") {
  FilterConfig cfg;
  cfg.min_rows = 2;

  std::string long_header(300, 'h');
  TableArtifact t = from_cells(
      {"keep_num", long_header, "1984", "constant", "keep_cat"},
      {{"1", "1.5", "2.5", "yes", "on"},
       {"2", "2.5", "3.5", "yes", "off"},
       {"3", "3.5", "4.5", "yes", "on"}});
  auto res = apply_column_filters(t, cfg);
  CHECK_FALSE(res.rejected);
  CHECK(res.table.n_cols() == 2);
  CHECK(res.removed.at(long_header) == std::string(rules::kColLongHeader));
  CHECK(res.removed.at("1984") == std::string(rules::kColNumericName));
  CHECK(res.removed.at("constant") == std::string(rules::kColConstant));

  SUBCASE("missing-fraction column rule") {
    TableArtifact sparse = from_cells({"a", "b"}, {{"1", ""}, {"2", ""}, {"3", "x"}});
    auto r = apply_column_filters(sparse, cfg);
    CHECK(r.removed.at("b") == std::string(rules::kColMissing));
    CHECK(r.rejected);  // only one column left
    CHECK(r.rule == rules::kTableColumnCount);
  }
  SUBCASE("non-english text column") {
    TableArtifact mixed = testing::make_clean_table(3, 70);
    std::vector<CellValue> german;
    for (size_t i = 0; i < mixed.n_rows(); ++i)
      german.emplace_back(std::string("der bericht wurde gestern schon gelesen"));
    // Vary one cell so the column is not constant.
    german[0] = std::string("die gruppe war mit dem ergebnis nicht zufrieden");
    mixed.columns.push_back(german);
    mixed.headers.push_back(make_column_meta("bemerkung", german));
    auto r = apply_column_filters(mixed, cfg);
    CHECK(r.removed.at("bemerkung") == std::string(rules::kColNonEnglish));
    CHECK_FALSE(r.removed.contains("notes"));
  }
  SUBCASE("short categorical text is exempt from the english rule") {
    TableArtifact cats = testing::make_clean_table(4, 70);
    auto r = apply_column_filters(cats, cfg);
    CHECK_FALSE(r.removed.contains("category"));
  }
}

TEST_CASE("row filters remove by rule in fixed order") {
  FilterConfig cfg;
  cfg.min_rows = 2;

  SUBCASE("missing then duplicate then content rules") {
    TableArtifact t = from_cells({"a", "b", "c"},
                                 {
                                     {"1", "x", "fine words"},
                                     {"", "", "also fine"},          // missing > 0.5
                                     {"3", "y", "dup me"},
                                     {"3", "y", "dup me"},           // duplicate
                                     {"4", "z", "a@b.com"},          // pii
                                     {"5", "w", "import os"},        // code pattern
                                     {"6", "v", "⌊ subentry"},       // hierarchy marker
                                     {"7", "u", "plain"},
                                 });
    auto res = apply_row_filters(t, cfg);
    CHECK_FALSE(res.rejected);
    CHECK(res.table.n_rows() == 3);
    CHECK(res.removed.at(1) == std::string(rules::kRowMissing));
    CHECK(res.removed.at(3) == std::string(rules::kRowDuplicate));
    CHECK(res.removed.at(4) == std::string(rules::kRowPii));
    CHECK(res.removed.at(5) == std::string(rules::kRowCode));
    CHECK(res.removed.at(6) == std::string(rules::kRowHierarchy));
  }
  SUBCASE("min-row recheck after removals") {
    TableArtifact t =
        from_cells({"a", "b"}, {{"1", "x"}, {"1", "x"}, {"2", "y"}});
    FilterConfig strict = cfg;
    strict.min_rows = 3;
    auto res = apply_row_filters(t, strict);
    CHECK(res.rejected);
    CHECK(res.rule == rules::kTableRowCountFinal);
  }
  SUBCASE("no surviving cell matches the pii patterns") {
    TableArtifact t = testing::make_clean_table(6, 80);
    t.columns[3][5] = std::string("call 555-867-5309");
    t.columns[3][9] = std::string("email x@y.org please");
    auto res = apply_row_filters(t, cfg);
    for (const auto& col : res.table.columns)
      for (const CellValue& v : col)
        if (cell_type(v) != CellType::Null) CHECK_FALSE(detect_pii(render_cell(v)));
  }
}

TEST_CASE("report conservation: rows in = rows out + removed") {
  FilterConfig cfg;
  cfg.min_rows = 2;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    TableArtifact t = testing::make_clean_table(seed, 64 + seed);
    // Inject occasional violations.
    if (seed % 2 == 0) t.columns[3][1] = std::string("x@y.com");
    if (seed % 3 == 0)
      for (auto& col : t.columns) col[4] = col[2];
    auto res = apply_row_filters(t, cfg);
    uint64_t removed = 0;
    for (std::string_view rule : {rules::kRowMissing, rules::kRowDuplicate, rules::kRowPii,
                                  rules::kRowCode, rules::kRowHierarchy}) {
      auto it = res.report.rules.find(std::string(rule));
      if (it != res.report.rules.end()) removed += it->second.removed;
    }
    CHECK(t.n_rows() == res.table.n_rows() + removed);
    CHECK(removed == res.removed.size());
  }
}

TEST_CASE("tightening thresholds never accepts more tables") {
  std::vector<TableArtifact> corpus;
  for (uint64_t seed = 0; seed < 24; ++seed)
    corpus.push_back(testing::make_clean_table(seed, 60 + 3 * seed));

  auto count_accepted = [&](const FilterConfig& cfg) {
    size_t n = 0;
    for (const TableArtifact& t : corpus)
      if (filter_table(t, cfg).table.state == FilterState::Accepted) ++n;
    return n;
  };

  FilterConfig base;
  base.min_rows = 32;
  size_t baseline = count_accepted(base);

  FilterConfig tighter = base;
  tighter.min_rows = 100;
  CHECK(count_accepted(tighter) <= baseline);

  tighter = base;
  tighter.table_missing_fraction = 0.01;
  CHECK(count_accepted(tighter) <= baseline);

  tighter = base;
  tighter.max_rows = 80;
  CHECK(count_accepted(tighter) <= baseline);

  tighter = base;
  tighter.english_threshold = 0.9;
  CHECK(count_accepted(tighter) <= baseline);
}

TEST_CASE("filter report merge is a counter sum") {
  FilterReport a;
  a.count("x", 1);
  a.count("y");
  FilterReport b;
  b.count("x");
  b.count("z", 2);
  a.merge(b);
  CHECK(a.rules["x"].evaluated == 2);
  CHECK(a.rules["x"].removed == 1);
  CHECK(a.rules["z"].removed == 2);
}

TEST_CASE("config validation") {
  FilterConfig cfg;
  cfg.min_rows = 10;
  cfg.max_rows = 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = FilterConfig{};
  cfg.english_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
