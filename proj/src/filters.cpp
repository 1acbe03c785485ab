#include "tabtrawl/filters.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <unordered_set>

namespace tabtrawl {

namespace {

// Minimum alphabetic tokens before a language score is considered
// meaningful; shorter samples pass the English rules unconditionally.
constexpr size_t kMinLanguageTokens = 5;
// Columns whose text cells average fewer characters than this are treated as
// categorical codes and exempt from the column-level English rule.
constexpr double kMinEnglishCellChars = 20.0;
// Cap on the text sample gathered for the table-level language check.
constexpr size_t kLanguageSampleBytes = 4096;

constexpr std::array<std::string_view, 127> kStopwords = {
    "a",       "about",   "above",  "after",   "again",  "against", "all",
    "am",      "an",      "and",    "any",     "are",    "as",      "at",
    "be",      "because", "been",   "before",  "being",  "below",   "between",
    "both",    "but",     "by",     "can",     "did",    "do",      "does",
    "doing",   "down",    "during", "each",    "few",    "for",     "from",
    "further", "had",     "has",    "have",    "having", "he",      "her",
    "here",    "hers",    "herself","him",     "himself","his",     "how",
    "i",       "if",      "in",     "into",    "is",     "it",      "its",
    "itself",  "just",    "me",     "more",    "most",   "my",      "myself",
    "no",      "nor",     "not",    "now",     "of",     "off",     "on",
    "once",    "only",    "or",     "other",   "our",    "ours",    "ourselves",
    "out",     "over",    "own",    "same",    "she",    "should",  "so",
    "some",    "such",    "than",   "that",    "the",    "their",   "theirs",
    "them",    "themselves", "then","there",   "these",  "they",    "this",
    "those",   "through", "to",     "too",     "under",  "until",   "up",
    "very",    "was",     "we",     "were",    "what",   "when",    "where",
    "which",   "while",   "who",    "whom",    "why",    "will",    "with",
    "you",     "your",    "yours",  "yourself","yourselves", "would", "could",
    "it's"};

// Frequent English trigrams. Deliberately excludes trigrams that are also
// common in German function words (der, die, das, und, ich, cht, ber, abe).
constexpr std::array<std::string_view, 48> kTrigrams = {
    "the", "and", "ing", "ion", "tio", "ent", "ati", "for", "her", "ter",
    "hat", "tha", "ere", "ate", "his", "con", "res", "ver", "all", "ons",
    "nce", "men", "ith", "ted", "ers", "pro", "thi", "wit", "are", "ess",
    "ive", "was", "ect", "rea", "com", "eve", "per", "int", "est", "sta",
    "cti", "ica", "ist", "ear", "ain", "one", "our", "iti"};

constexpr std::array<std::string_view, 21> kCodeKeywords = {
    "def",       "return",   "import",   "void",     "function", "#include",
    "printf",    "cout",     "lambda",   "nullptr",  "struct",   "namespace",
    "template",  "elif",     "endif",    "typedef",  "println",  "async",
    "await",     "sizeof",   "malloc"};

const std::unordered_set<std::string_view>& stopword_set() {
  static const std::unordered_set<std::string_view> set(kStopwords.begin(),
                                                        kStopwords.end());
  return set;
}

const std::unordered_set<std::string_view>& trigram_set() {
  static const std::unordered_set<std::string_view> set(kTrigrams.begin(),
                                                        kTrigrams.end());
  return set;
}

const std::unordered_set<std::string_view>& keyword_set() {
  static const std::unordered_set<std::string_view> set(kCodeKeywords.begin(),
                                                        kCodeKeywords.end());
  return set;
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

// Lowercased alphabetic tokens.
std::vector<std::string> alpha_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (is_alpha(c)) {
      cur += lower(c);
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

size_t count_scoreable_tokens(std::string_view text) {
  size_t n = 0;
  for (const auto& t : alpha_tokens(text))
    if (t.size() >= 2) ++n;
  return n;
}

// --- phone scanning --------------------------------------------------------

bool is_phone_sep(char c) { return c == ' ' || c == '-' || c == '.'; }

struct PhoneCandidate {
  std::vector<int> groups;
  std::string seps;
  bool plus = false;
  size_t end = 0;
  size_t total_digits() const {
    size_t n = 0;
    for (int g : groups) n += static_cast<size_t>(g);
    return n;
  }
};

// Parses one candidate starting at `i`. Digit groups of 1-4 characters
// (longer allowed only directly after "+"), optionally parenthesized,
// joined by single separators from {space, dash, dot}.
bool scan_phone_candidate(std::string_view text, size_t i, PhoneCandidate& out) {
  const size_t n = text.size();
  size_t j = i;
  if (text[j] == '+') {
    out.plus = true;
    ++j;
  }
  while (j < n) {
    bool paren = false;
    if (text[j] == '(') {
      paren = true;
      ++j;
    }
    size_t run = 0;
    while (j + run < n && is_digit(text[j + run])) ++run;
    if (run == 0) return false;
    size_t limit = (out.plus && out.groups.empty() && !paren) ? 15 : 4;
    if (run > limit) return false;
    out.groups.push_back(static_cast<int>(run));
    j += run;
    if (paren) {
      if (j >= n || text[j] != ')') return false;
      ++j;
    }
    out.end = j;
    if (j < n && is_phone_sep(text[j]) && j + 1 < n &&
        (is_digit(text[j + 1]) || (text[j + 1] == '(' && j + 2 < n && is_digit(text[j + 2])))) {
      out.seps += text[j];
      ++j;
      continue;
    }
    break;
  }
  return !out.groups.empty();
}

bool looks_like_iso_date(const PhoneCandidate& c, std::string_view span) {
  if (c.groups.size() != 3 || c.groups[0] != 4 || c.groups[1] != 2 || c.groups[2] != 2)
    return false;
  if (c.seps != "--") return false;
  return parse_date(span).has_value();
}

bool phone_match(std::string_view text) {
  const size_t n = text.size();
  for (size_t i = 0; i < n; ++i) {
    char c = text[i];
    bool start = is_digit(c) || (c == '+' && i + 1 < n && is_digit(text[i + 1])) ||
                 (c == '(' && i + 1 < n && is_digit(text[i + 1]));
    if (!start) continue;
    // Digits embedded in a longer digit run were already examined.
    if (is_digit(c) && i > 0 && is_digit(text[i - 1])) continue;
    PhoneCandidate cand;
    if (!scan_phone_candidate(text, i, cand)) continue;
    size_t digits = cand.total_digits();
    if (digits < 7 || digits > 15) continue;
    if (!cand.plus && cand.groups.size() < 2) continue;
    if (looks_like_iso_date(cand, text.substr(i, cand.end - i))) continue;
    // A single dot between two groups is a decimal number, not a phone.
    if (cand.groups.size() == 2 && cand.seps == ".") continue;
    return true;
  }
  return false;
}

bool is_email_local_char(char c) {
  return is_alpha(c) || is_digit(c) || c == '.' || c == '_' || c == '%' || c == '+' ||
         c == '-';
}

bool email_match(std::string_view text) {
  const size_t n = text.size();
  for (size_t at = text.find('@'); at != std::string_view::npos;
       at = text.find('@', at + 1)) {
    size_t start = at;
    while (start > 0 && is_email_local_char(text[start - 1])) --start;
    if (start == at) continue;
    size_t j = at + 1;
    size_t label_len = 0;
    size_t labels = 0;
    bool last_alpha_only = true;
    bool cur_alpha_only = true;
    size_t cur_len = 0;
    while (j < n && (is_alpha(text[j]) || is_digit(text[j]) || text[j] == '-' ||
                     text[j] == '.')) {
      if (text[j] == '.') {
        if (cur_len == 0) break;
        ++labels;
        label_len = cur_len;
        last_alpha_only = cur_alpha_only;
        cur_len = 0;
        cur_alpha_only = true;
      } else {
        if (!is_alpha(text[j])) cur_alpha_only = false;
        ++cur_len;
      }
      ++j;
    }
    (void)label_len;
    if (cur_len >= 2 && labels >= 1 && cur_alpha_only) return true;
    (void)last_alpha_only;
  }
  return false;
}

// --- shared table helpers ---------------------------------------------------

bool header_is_numeric(std::string_view name) {
  if (name.empty()) return false;
  CellValue v = parse_cell(name);
  return cell_type(v) == CellType::Int || cell_type(v) == CellType::Float;
}

std::string table_language_sample(const TableArtifact& t) {
  std::string sample;
  for (const ColumnMeta& h : t.headers) {
    if (std::any_of(h.name.begin(), h.name.end(), is_alpha)) {
      if (!sample.empty()) sample += ' ';
      sample += h.name;
    }
  }
  const size_t rows = t.n_rows();
  for (size_t r = 0; r < rows && sample.size() < kLanguageSampleBytes; ++r) {
    for (size_t c = 0; c < t.n_cols() && sample.size() < kLanguageSampleBytes; ++c) {
      const CellValue& v = t.columns[c][r];
      if (cell_type(v) == CellType::Text) {
        sample += ' ';
        sample += std::get<std::string>(v);
      }
    }
  }
  return sample;
}

std::string row_signature(const TableArtifact& t, size_t row) {
  std::string key;
  for (size_t c = 0; c < t.n_cols(); ++c) {
    const CellValue& v = t.columns[c][row];
    std::string rendered = render_cell(v);
    key += static_cast<char>(cell_type(v));
    key += std::to_string(rendered.size());
    key += ':';
    key += rendered;
  }
  return key;
}

TableArtifact rebuild_with_columns(const TableArtifact& t, const std::vector<size_t>& keep) {
  TableArtifact out;
  out.content_key = t.content_key;
  out.provenance = t.provenance;
  out.state = t.state;
  out.headers.reserve(keep.size());
  out.columns.reserve(keep.size());
  for (size_t c : keep) {
    out.columns.push_back(t.columns[c]);
    out.headers.push_back(make_column_meta(t.headers[c].name, out.columns.back()));
  }
  return out;
}

TableArtifact rebuild_with_rows(const TableArtifact& t, const std::vector<size_t>& keep) {
  TableArtifact out;
  out.content_key = t.content_key;
  out.provenance = t.provenance;
  out.state = t.state;
  out.headers.reserve(t.n_cols());
  out.columns.assign(t.n_cols(), {});
  for (size_t c = 0; c < t.n_cols(); ++c) {
    out.columns[c].reserve(keep.size());
    for (size_t r : keep) out.columns[c].push_back(t.columns[c][r]);
    out.headers.push_back(make_column_meta(t.headers[c].name, out.columns[c]));
  }
  return out;
}

}  // namespace

std::span<const std::string_view> english_stopwords() {
  return {kStopwords.data(), kStopwords.size()};
}

std::span<const std::string_view> english_trigrams() {
  return {kTrigrams.data(), kTrigrams.size()};
}

double english_score(std::string_view text) {
  auto tokens = alpha_tokens(text);
  if (tokens.empty()) return 0.0;
  size_t stop_hits = 0;
  size_t tri_hits = 0;
  size_t tri_total = 0;
  for (const std::string& tok : tokens) {
    if (stopword_set().contains(tok)) ++stop_hits;
    if (tok.size() >= 3) {
      for (size_t i = 0; i + 3 <= tok.size(); ++i) {
        ++tri_total;
        if (trigram_set().contains(std::string_view(tok).substr(i, 3))) ++tri_hits;
      }
    }
  }
  double stop_frac = static_cast<double>(stop_hits) / static_cast<double>(tokens.size());
  double tri_frac =
      tri_total == 0 ? 0.0 : static_cast<double>(tri_hits) / static_cast<double>(tri_total);
  double score = 0.5 * std::min(1.0, stop_frac / 0.25) + 0.5 * std::min(1.0, tri_frac / 0.15);
  return std::min(1.0, score);
}

bool detect_pii(std::string_view text) { return email_match(text) || phone_match(text); }

double code_score(std::string_view text) {
  if (text.empty()) return 0.0;
  static constexpr std::string_view kSymbols = "{}();=<>[]+*/&|^~#\\";
  size_t n_tokens = 0;
  size_t kw_hits = 0;
  size_t camel_hits = 0;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r'))
      ++i;
    if (i >= n) break;
    size_t start = i;
    while (i < n && text[i] != ' ' && text[i] != '\t' && text[i] != '\n' && text[i] != '\r')
      ++i;
    std::string_view tok = text.substr(start, i - start);
    ++n_tokens;
    std::string_view trimmed = tok;
    while (!trimmed.empty() && (trimmed.back() == ':' || trimmed.back() == ';' ||
                                trimmed.back() == ',' || trimmed.back() == ')'))
      trimmed.remove_suffix(1);
    while (!trimmed.empty() && trimmed.front() == '(') trimmed.remove_prefix(1);
    if (keyword_set().contains(trimmed)) ++kw_hits;
    bool camel = false;
    bool paren = false;
    for (size_t j = 0; j + 1 < tok.size(); ++j) {
      if (tok[j] >= 'a' && tok[j] <= 'z' && tok[j + 1] >= 'A' && tok[j + 1] <= 'Z')
        camel = true;
    }
    for (char c : tok)
      if (c == '(') paren = true;
    if (camel && paren) ++camel_hits;
  }
  if (n_tokens == 0) return 0.0;
  size_t sym_count = 0;
  for (char c : text)
    if (kSymbols.find(c) != std::string_view::npos) ++sym_count;
  double kw = std::min(1.0, 3.0 * static_cast<double>(kw_hits) / static_cast<double>(n_tokens));
  double sym = std::min(1.0, (static_cast<double>(sym_count) / static_cast<double>(text.size())) / 0.15);
  double camel =
      std::min(1.0, 5.0 * static_cast<double>(camel_hits) / static_cast<double>(n_tokens));
  return 0.4 * kw + 0.4 * sym + 0.2 * camel;
}

bool detect_code(std::string_view text) {
  for (std::string_view needle :
       {std::string_view("();"), std::string_view("){"), std::string_view("};"),
        std::string_view("=>"), std::string_view("#include <"),
        std::string_view("#include<"), std::string_view("#include \"")}) {
    if (text.find(needle) != std::string_view::npos) return true;
  }
  // "def name(" / "function name(" / "function(".
  auto has_call_def = [&](std::string_view kw) {
    size_t pos = 0;
    while ((pos = text.find(kw, pos)) != std::string_view::npos) {
      bool at_boundary = pos == 0 || !is_alpha(text[pos - 1]);
      size_t j = pos + kw.size();
      if (at_boundary && j < text.size() && (text[j] == ' ' || text[j] == '(')) {
        while (j < text.size() && text[j] == ' ') ++j;
        size_t ident = 0;
        while (j + ident < text.size() &&
               (is_alpha(text[j + ident]) || is_digit(text[j + ident]) || text[j + ident] == '_'))
          ++ident;
        size_t k = j + ident;
        if (k < text.size() && text[k] == '(') return true;
      }
      pos += kw.size();
    }
    return false;
  };
  if (has_call_def("def") || has_call_def("function")) return true;

  // Line-shaped statements.
  size_t line_start = 0;
  while (line_start <= text.size()) {
    size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.remove_suffix(1);
    auto is_module_path = [&](std::string_view s) {
      if (s.empty() || !(is_alpha(s.front()) || s.front() == '_')) return false;
      for (char c : s)
        if (!(is_alpha(c) || is_digit(c) || c == '_' || c == '.')) return false;
      return s.back() != '.';
    };
    if (line.rfind("import ", 0) == 0) {
      std::string_view rest = line.substr(7);
      size_t as_pos = rest.find(" as ");
      std::string_view mod = as_pos == std::string_view::npos ? rest : rest.substr(0, as_pos);
      if (is_module_path(mod)) return true;
    }
    if (line.rfind("from ", 0) == 0 && line.find(" import ") != std::string_view::npos) {
      std::string_view mod = line.substr(5, line.find(" import ") - 5);
      if (is_module_path(mod)) return true;
    }
    if (line.rfind("return ", 0) == 0 && !line.empty() && line.back() == ';') return true;
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  return false;
}

void FilterConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (min_rows > max_rows) throw std::invalid_argument("min_rows > max_rows");
  if (min_cols > max_cols) throw std::invalid_argument("min_cols > max_cols");
  if (min_rows < 0 || min_cols < 0 || max_header_chars < 0)
    throw std::invalid_argument("negative bound");
  for (double v : {table_pii_cell_fraction, table_missing_fraction, unnamed_col_fraction,
                   col_missing_fraction, row_missing_fraction, english_threshold,
                   code_threshold})
    if (!in_unit(v)) throw std::invalid_argument("fraction outside [0,1]");
}

void FilterReport::count(const std::string& rule, uint64_t removed) {
  RuleCounter& c = rules[rule];
  ++c.evaluated;
  c.removed += removed;
}

void FilterReport::merge(const FilterReport& other) {
  for (const auto& [rule, counter] : other.rules) {
    rules[rule].evaluated += counter.evaluated;
    rules[rule].removed += counter.removed;
  }
}

TableFilterResult apply_table_filters(const TableArtifact& t, const FilterConfig& cfg,
                                      const FilterHooks& hooks) {
  cfg.validate();
  TableFilterResult res;
  auto fail = [&](std::string_view rule) {
    res.report.count(std::string(rule), 1);
    res.accepted = false;
    res.rule = rule;
    res.report.rejection_rule = rule;
  };
  auto pass = [&](std::string_view rule) { res.report.count(std::string(rule)); };

  // 1. English.
  {
    std::string sample = table_language_sample(t);
    if (count_scoreable_tokens(sample) >= kMinLanguageTokens &&
        hooks.english(sample) < cfg.english_threshold) {
      fail(rules::kTableEnglish);
      return res;
    }
    pass(rules::kTableEnglish);
  }
  // 2. Schema heterogeneity: every column shares one declared type.
  {
    bool homogeneous = t.n_cols() > 0;
    for (size_t c = 1; c < t.n_cols(); ++c)
      if (t.headers[c].declared_type != t.headers[0].declared_type) homogeneous = false;
    if (homogeneous) {
      fail(rules::kTableSchema);
      return res;
    }
    pass(rules::kTableSchema);
  }
  // 3. Row count bounds.
  {
    const auto rows = static_cast<int64_t>(t.n_rows());
    if (rows < cfg.min_rows || rows > cfg.max_rows) {
      fail(rules::kTableRowCount);
      return res;
    }
    pass(rules::kTableRowCount);
  }
  // 4. Parse-error heuristic: duplicate headers, mostly-numeric headers, or
  // a header equal to the first data row (a data row promoted to header).
  {
    bool suspicious = false;
    std::unordered_set<std::string_view> seen;
    size_t numeric = 0;
    for (const ColumnMeta& h : t.headers) {
      if (!seen.insert(h.name).second) suspicious = true;
      if (header_is_numeric(h.name)) ++numeric;
    }
    if (t.n_cols() > 0 &&
        static_cast<double>(numeric) >= 0.8 * static_cast<double>(t.n_cols()))
      suspicious = true;
    if (!suspicious && t.n_rows() > 0) {
      for (size_t c = 0; c < t.n_cols(); ++c) {
        const CellValue& v = t.columns[c][0];
        if (cell_type(v) != CellType::Null && render_cell(v) == t.headers[c].name)
          suspicious = true;
      }
    }
    if (suspicious) {
      fail(rules::kTableParseError);
      return res;
    }
    pass(rules::kTableParseError);
  }
  // 5. PII cell fraction.
  {
    const size_t cells = t.n_rows() * t.n_cols();
    size_t hits = 0;
    for (const auto& col : t.columns)
      for (const CellValue& v : col)
        if (cell_type(v) != CellType::Null && hooks.pii(render_cell(v))) ++hits;
    if (cells > 0 &&
        static_cast<double>(hits) / static_cast<double>(cells) > cfg.table_pii_cell_fraction) {
      fail(rules::kTablePii);
      return res;
    }
    pass(rules::kTablePii);
  }
  // 6. Any code cell.
  {
    bool found = false;
    for (const auto& col : t.columns) {
      for (const CellValue& v : col)
        if (cell_type(v) != CellType::Null && hooks.code(render_cell(v)) > cfg.code_threshold) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (found) {
      fail(rules::kTableCode);
      return res;
    }
    pass(rules::kTableCode);
  }
  // 7. Unnamed-column fraction.
  {
    size_t unnamed = 0;
    for (const ColumnMeta& h : t.headers)
      if (h.is_unnamed) ++unnamed;
    if (t.n_cols() > 0 && static_cast<double>(unnamed) / static_cast<double>(t.n_cols()) >
                              cfg.unnamed_col_fraction) {
      fail(rules::kTableUnnamed);
      return res;
    }
    pass(rules::kTableUnnamed);
  }
  // 8. Overall missing fraction.
  {
    const size_t cells = t.n_rows() * t.n_cols();
    size_t nulls = 0;
    for (const auto& col : t.columns)
      for (const CellValue& v : col)
        if (cell_type(v) == CellType::Null) ++nulls;
    if (cells > 0 &&
        static_cast<double>(nulls) / static_cast<double>(cells) > cfg.table_missing_fraction) {
      fail(rules::kTableMissing);
      return res;
    }
    pass(rules::kTableMissing);
  }
  res.accepted = true;
  res.report.accepted = true;
  return res;
}

ColumnFilterResult apply_column_filters(const TableArtifact& t, const FilterConfig& cfg,
                                        const FilterHooks& hooks) {
  cfg.validate();
  ColumnFilterResult res;
  std::vector<size_t> keep;
  for (size_t c = 0; c < t.n_cols(); ++c) {
    const std::string& name = t.headers[c].name;
    ColumnMeta meta = make_column_meta(name, t.columns[c]);
    std::string_view removed_by;

    res.report.count(std::string(rules::kColLongHeader));
    if (static_cast<int64_t>(name.size()) > cfg.max_header_chars) {
      removed_by = rules::kColLongHeader;
    } else {
      res.report.count(std::string(rules::kColNumericName));
      if (header_is_numeric(name)) removed_by = rules::kColNumericName;
    }
    if (removed_by.empty()) {
      res.report.count(std::string(rules::kColMissing));
      if (meta.missing_fraction > cfg.col_missing_fraction) removed_by = rules::kColMissing;
    }
    if (removed_by.empty()) {
      res.report.count(std::string(rules::kColNonEnglish));
      if (meta.declared_type == CellType::Text) {
        double total_len = 0.0;
        double score_sum = 0.0;
        size_t n_text = 0;
        for (const CellValue& v : t.columns[c]) {
          if (cell_type(v) != CellType::Text) continue;
          const std::string& s = std::get<std::string>(v);
          total_len += static_cast<double>(s.size());
          score_sum += hooks.english(s);
          ++n_text;
        }
        if (n_text > 0 && total_len / static_cast<double>(n_text) >= kMinEnglishCellChars &&
            score_sum / static_cast<double>(n_text) < cfg.english_threshold)
          removed_by = rules::kColNonEnglish;
      }
    }
    if (removed_by.empty()) {
      res.report.count(std::string(rules::kColConstant));
      bool constant = !t.columns[c].empty();
      for (const CellValue& v : t.columns[c])
        if (!(v == t.columns[c][0])) {
          constant = false;
          break;
        }
      if (constant) removed_by = rules::kColConstant;
    }

    if (removed_by.empty()) {
      keep.push_back(c);
    } else {
      res.report.rules[std::string(removed_by)].removed += 1;
      res.removed[name] = std::string(removed_by);
    }
  }
  res.table = rebuild_with_columns(t, keep);

  res.report.count(std::string(rules::kTableColumnCount));
  const auto cols = static_cast<int64_t>(res.table.n_cols());
  if (cols < cfg.min_cols || cols > cfg.max_cols) {
    res.rejected = true;
    res.rule = rules::kTableColumnCount;
    res.report.rules[std::string(rules::kTableColumnCount)].removed += 1;
    res.report.rejection_rule = res.rule;
  }
  return res;
}

RowFilterResult apply_row_filters(const TableArtifact& t, const FilterConfig& cfg,
                                  const FilterHooks& hooks) {
  cfg.validate();
  RowFilterResult res;
  const size_t rows = t.n_rows();
  const size_t cols = t.n_cols();
  std::vector<size_t> keep;
  keep.reserve(rows);

  // 1. Missing fraction per row.
  for (size_t r = 0; r < rows; ++r) {
    res.report.count(std::string(rules::kRowMissing));
    size_t nulls = 0;
    for (size_t c = 0; c < cols; ++c)
      if (cell_type(t.columns[c][r]) == CellType::Null) ++nulls;
    if (cols > 0 &&
        static_cast<double>(nulls) / static_cast<double>(cols) > cfg.row_missing_fraction) {
      res.report.rules[std::string(rules::kRowMissing)].removed += 1;
      res.removed[r] = std::string(rules::kRowMissing);
    } else {
      keep.push_back(r);
    }
  }
  // 2. Exact duplicates, first occurrence kept.
  {
    std::vector<size_t> dedup;
    std::unordered_set<std::string> seen;
    for (size_t r : keep) {
      res.report.count(std::string(rules::kRowDuplicate));
      if (seen.insert(row_signature(t, r)).second) {
        dedup.push_back(r);
      } else {
        res.report.rules[std::string(rules::kRowDuplicate)].removed += 1;
        res.removed[r] = std::string(rules::kRowDuplicate);
      }
    }
    keep = std::move(dedup);
  }
  // 3-5. PII, code, hierarchy marker.
  {
    std::vector<size_t> survivors;
    for (size_t r : keep) {
      std::string_view removed_by;
      res.report.count(std::string(rules::kRowPii));
      for (size_t c = 0; c < cols && removed_by.empty(); ++c) {
        const CellValue& v = t.columns[c][r];
        if (cell_type(v) != CellType::Null && hooks.pii(render_cell(v)))
          removed_by = rules::kRowPii;
      }
      if (removed_by.empty()) {
        res.report.count(std::string(rules::kRowCode));
        for (size_t c = 0; c < cols && removed_by.empty(); ++c) {
          const CellValue& v = t.columns[c][r];
          if (cell_type(v) != CellType::Null && hooks.row_code(render_cell(v)))
            removed_by = rules::kRowCode;
        }
      }
      if (removed_by.empty()) {
        res.report.count(std::string(rules::kRowHierarchy));
        for (size_t c = 0; c < cols && removed_by.empty(); ++c) {
          const CellValue& v = t.columns[c][r];
          if (cell_type(v) != CellType::Null &&
              render_cell(v).find("\xE2\x8C\x8A") != std::string::npos)
            removed_by = rules::kRowHierarchy;
        }
      }
      if (removed_by.empty()) {
        survivors.push_back(r);
      } else {
        res.report.rules[std::string(removed_by)].removed += 1;
        res.removed[r] = std::string(removed_by);
      }
    }
    keep = std::move(survivors);
  }

  res.table = rebuild_with_rows(t, keep);
  res.report.count(std::string(rules::kTableRowCountFinal));
  if (static_cast<int64_t>(res.table.n_rows()) < cfg.min_rows) {
    res.rejected = true;
    res.rule = rules::kTableRowCountFinal;
    res.report.rules[std::string(rules::kTableRowCountFinal)].removed += 1;
    res.report.rejection_rule = res.rule;
  }
  return res;
}

FilteredTable filter_table(const TableArtifact& t, const FilterConfig& cfg,
                           const FilterHooks& hooks) {
  FilteredTable out;
  TableFilterResult tf = apply_table_filters(t, cfg, hooks);
  out.report = tf.report;
  if (!tf.accepted) {
    out.table = t;
    out.table.state = FilterState::Rejected;
    out.table.rejection_rule = tf.rule;
    return out;
  }
  ColumnFilterResult cf = apply_column_filters(t, cfg, hooks);
  out.report.merge(cf.report);
  if (cf.rejected) {
    out.table = std::move(cf.table);
    out.table.state = FilterState::Rejected;
    out.table.rejection_rule = cf.rule;
    out.report.rejection_rule = cf.rule;
    return out;
  }
  RowFilterResult rf = apply_row_filters(cf.table, cfg, hooks);
  out.report.merge(rf.report);
  if (rf.rejected) {
    out.table = std::move(rf.table);
    out.table.state = FilterState::Rejected;
    out.table.rejection_rule = rf.rule;
    out.report.rejection_rule = rf.rule;
    return out;
  }
  out.table = std::move(rf.table);
  out.table.state = FilterState::Accepted;
  out.report.accepted = true;
  return out;
}

}  // namespace tabtrawl
