#pragma once

// Firm-level panel processing: CSV ingestion with per-row reject reasons,
// (id, year) deduplication, longitudinal linkage by id then by exact
// (phone, zip), industry deflation, ZIP-prefix region assignment, and the
// derived per-firm-year variables
//
//   VA  = Q - II          value added (negative and zero values retained)
//   ~VA = W + Pi          imputed value added
//   LP  = VA / L          labor productivity       (needs L > 0)
//   dLP = LP_t - LP_{t-1} productivity change      (needs a year link)
//   LPg = dLP / LP_{t-1}  productivity growth      (guarded near LP_{t-1}=0)
//   ROC = Pi / K          return on capital        (needs K > 0)
//   IR  = (K_t - K_{t-1}) / K_{t-1}                (needs link, K_{t-1} > 0)
//   CI  = K / L           capital intensity        (needs L > 0)
//
// Every exclusion carries a reason code so that observation counts reconcile
// per variable and year.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heavytail/csv.hpp"

namespace heavytail::firmpanel {

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

enum class Ownership { soe, collective, shareholding, priv, hmt, foreign_owned, other };

inline std::optional<Ownership> parse_ownership(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "soe") return Ownership::soe;
  if (s == "collective") return Ownership::collective;
  if (s == "shareholding") return Ownership::shareholding;
  if (s == "private") return Ownership::priv;
  if (s == "hmt") return Ownership::hmt;
  if (s == "foreign") return Ownership::foreign_owned;
  if (s == "other" || s.empty()) return Ownership::other;
  return std::nullopt;
}

inline const char* ownership_name(Ownership o) {
  switch (o) {
    case Ownership::soe: return "soe";
    case Ownership::collective: return "collective";
    case Ownership::shareholding: return "shareholding";
    case Ownership::priv: return "private";
    case Ownership::hmt: return "hmt";
    case Ownership::foreign_owned: return "foreign";
    default: return "other";
  }
}

// One firm-year row of raw microdata.
struct FirmRecord {
  std::string firm_id;
  int year = 0;
  std::string phone;  // empty = missing
  std::string zip;    // empty = missing
  std::optional<int> founding_year;
  std::string sector;
  Ownership ownership = Ownership::other;
  double output = 0.0;              // Q
  double intermediate_input = 0.0;  // II
  double wages = 0.0;               // W
  double profits = 0.0;             // Pi
  double employment = 0.0;          // L, headcount
  double capital = 0.0;             // K, fixed assets
  std::string region = "unknown";
};

struct RejectedRow {
  std::size_t line_number = 0;  // 1-based, header is line 1
  std::string raw;
  std::string reason;
};

inline constexpr std::array<const char*, 13> input_columns = {
    "firm_id", "year",    "phone",   "zip",     "founding_year", "sector", "ownership",
    "output",  "intermediate_input", "wages",   "profits",       "employment", "capital"};

struct IngestOptions {
  int min_year = 1998;
  int max_year = 2013;
};

struct IngestResult {
  std::vector<FirmRecord> records;
  std::vector<RejectedRow> rejects;
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size() && std::isfinite(out);
}

inline bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoi(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

inline bool is_header(const std::vector<std::string>& fields) {
  if (fields.size() != input_columns.size()) return false;
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i] != input_columns[i]) return false;
  return true;
}

}  // namespace detail

inline IngestResult ingest_stream(std::istream& in, const IngestOptions& opt = {}) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("ingest: empty input");
  if (!detail::is_header(csv::split_line(line)))
    throw SchemaError("ingest: header does not match the documented schema");

  IngestResult out;
  std::size_t line_no = 1;
  // short symbol per monetary/headcount column, used in reject reasons
  const std::array<std::pair<std::size_t, const char*>, 6> numeric_cols = {
      {{7, "Q"}, {8, "II"}, {9, "W"}, {10, "Pi"}, {11, "L"}, {12, "K"}}};
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split_line(line);
    if (detail::is_header(fields)) throw SchemaError("ingest: duplicate header at line " +
                                                     std::to_string(line_no));
    auto reject = [&](const std::string& reason) {
      out.rejects.push_back({line_no, line, reason});
    };
    if (fields.size() != input_columns.size()) {
      reject("columns:" + std::to_string(fields.size()));
      continue;
    }
    FirmRecord r;
    r.firm_id = fields[0];
    if (r.firm_id.empty()) {
      reject("missing:firm_id");
      continue;
    }
    if (!detail::parse_int(fields[1], r.year)) {
      reject("parse:year");
      continue;
    }
    if (r.year < opt.min_year || r.year > opt.max_year) {
      reject("range:year");
      continue;
    }
    r.phone = fields[2];
    r.zip = fields[3];
    if (!fields[4].empty()) {
      int fy = 0;
      if (!detail::parse_int(fields[4], fy)) {
        reject("parse:founding_year");
        continue;
      }
      r.founding_year = fy;
    }
    r.sector = fields[5];
    const auto own = parse_ownership(fields[6]);
    if (!own) {
      reject("parse:ownership");
      continue;
    }
    r.ownership = *own;
    double* slots[6] = {&r.output, &r.intermediate_input, &r.wages,
                        &r.profits, &r.employment, &r.capital};
    bool ok = true;
    for (std::size_t k = 0; k < numeric_cols.size() && ok; ++k) {
      const auto& [idx, sym] = numeric_cols[k];
      if (fields[idx].empty()) {
        reject(std::string("missing:") + sym);
        ok = false;
      } else if (!detail::parse_double(fields[idx], *slots[k])) {
        reject(std::string("parse:") + sym);
        ok = false;
      }
    }
    if (!ok) continue;
    if (r.employment < 0.0) {
      reject("invalid:L");
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

inline IngestResult ingest(const std::string& path, const IngestOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest: cannot open " + path);
  return ingest_stream(in, opt);
}

// ---------------------------------------------------------------------------

struct DedupeResult {
  std::vector<FirmRecord> records;
  std::vector<std::pair<std::string, int>> duplicates;  // logged (id, year) of dropped rows
};

// At most one record per (firm_id, year); the first occurrence wins.
inline DedupeResult dedupe(std::vector<FirmRecord> records) {
  DedupeResult out;
  std::set<std::pair<std::string, int>> seen;
  out.records.reserve(records.size());
  for (auto& r : records) {
    if (seen.emplace(r.firm_id, r.year).second)
      out.records.push_back(std::move(r));
    else
      out.duplicates.emplace_back(r.firm_id, r.year);
  }
  return out;
}

// ---------------------------------------------------------------------------

// Map from a firm-year to the previous-year identity it continues.
struct LinkageMap {
  std::map<std::pair<std::string, int>, std::string> previous_id;
  std::vector<std::string> ambiguities;  // logged unresolvable (phone, zip) collisions

  bool linked(const std::string& id, int year) const {
    return previous_id.count({id, year}) > 0;
  }
};

// Firms are matched across adjacent years first by identical id, then by
// exact (phone, zip) pairs among the still-unmatched; a collision on either
// side leaves the records unlinked and logs the key.
inline LinkageMap link_firms(const std::vector<FirmRecord>& records) {
  LinkageMap out;
  std::set<std::pair<std::string, int>> ids;
  std::set<int> years;
  for (const auto& r : records) {
    ids.emplace(r.firm_id, r.year);
    years.insert(r.year);
  }
  std::set<std::pair<std::string, int>> consumed;  // predecessors already continued
  for (const auto& r : records) {
    if (ids.count({r.firm_id, r.year - 1})) {
      out.previous_id[{r.firm_id, r.year}] = r.firm_id;
      consumed.emplace(r.firm_id, r.year - 1);
    }
  }
  // second pass: (phone, zip) exact matches between adjacent years
  for (int year : years) {
    if (!years.count(year - 1)) continue;
    std::map<std::pair<std::string, std::string>, std::vector<const FirmRecord*>> sources, targets;
    for (const auto& r : records) {
      if (r.phone.empty() || r.zip.empty()) continue;
      const std::pair<std::string, std::string> key{r.phone, r.zip};
      if (r.year == year - 1 && !consumed.count({r.firm_id, r.year}))
        sources[key].push_back(&r);
      else if (r.year == year && !out.previous_id.count({r.firm_id, r.year}))
        targets[key].push_back(&r);
    }
    for (const auto& [key, tgt] : targets) {
      const auto src = sources.find(key);
      if (src == sources.end()) continue;
      if (tgt.size() == 1 && src->second.size() == 1) {
        out.previous_id[{tgt[0]->firm_id, year}] = src->second[0]->firm_id;
        consumed.emplace(src->second[0]->firm_id, year - 1);
      } else {
        out.ambiguities.push_back("year " + std::to_string(year) + " phone=" + key.first +
                                  " zip=" + key.second);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct DeflatorTable {
  std::map<std::pair<std::string, int>, double> values;  // (sector, year) -> index, base = 1

  void set(const std::string& sector, int year, double deflator) {
    if (!(deflator > 0.0)) throw std::invalid_argument("DeflatorTable: deflator must be > 0");
    values[{sector, year}] = deflator;
  }
  std::optional<double> get(const std::string& sector, int year) const {
    const auto it = values.find({sector, year});
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
};

inline DeflatorTable load_deflators(const std::string& path) {
  DeflatorTable table;
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"sector", "year", "deflator"})
    throw SchemaError("deflator file: expected header sector,year,deflator");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 3) throw SchemaError("deflator file: bad row " + std::to_string(i + 1));
    int year = 0;
    double d = 0.0;
    if (!detail::parse_int(rows[i][1], year) || !detail::parse_double(rows[i][2], d))
      throw SchemaError("deflator file: bad row " + std::to_string(i + 1));
    table.set(rows[i][0], year, d);
  }
  return table;
}

struct DeflateResult {
  std::vector<FirmRecord> records;
  std::size_t missing_deflators = 0;  // rows passed through at factor 1.0
};

// Monetary variables are divided by the (sector, year) deflator; employment
// is untouched. A missing deflator deflates by 1.0 and counts a warning so
// coverage gaps stay visible without dropping observations.
inline DeflateResult deflate(std::vector<FirmRecord> records, const DeflatorTable& table) {
  DeflateResult out;
  for (auto& r : records) {
    const auto d = table.get(r.sector, r.year);
    if (!d) {
      ++out.missing_deflators;
    } else {
      r.output /= *d;
      r.intermediate_input /= *d;
      r.wages /= *d;
      r.profits /= *d;
      r.capital /= *d;
    }
  }
  out.records = std::move(records);
  return out;
}

// ---------------------------------------------------------------------------

// ZIP prefix -> province; the longest matching prefix wins.
struct ZipMap {
  std::vector<std::pair<std::string, std::string>> prefixes;  // sorted by length descending

  void add(const std::string& prefix, const std::string& province) {
    if (prefix.empty()) throw std::invalid_argument("ZipMap: empty prefix");
    prefixes.emplace_back(prefix, province);
    std::stable_sort(prefixes.begin(), prefixes.end(), [](const auto& a, const auto& b) {
      return a.first.size() > b.first.size();
    });
  }
  std::string lookup(const std::string& zip) const {
    for (const auto& [prefix, province] : prefixes)
      if (zip.size() >= prefix.size() && zip.compare(0, prefix.size(), prefix) == 0)
        return province;
    return "unknown";
  }
};

inline ZipMap load_zipmap(const std::string& path) {
  ZipMap map;
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"prefix", "province"})
    throw SchemaError("zip map file: expected header prefix,province");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2) throw SchemaError("zip map file: bad row " + std::to_string(i + 1));
    map.add(rows[i][0], rows[i][1]);
  }
  return map;
}

inline std::vector<FirmRecord> assign_region(std::vector<FirmRecord> records, const ZipMap& map) {
  for (auto& r : records) r.region = r.zip.empty() ? "unknown" : map.lookup(r.zip);
  return records;
}

// ---------------------------------------------------------------------------

struct DerivedRow {
  std::string firm_id;
  int year = 0;
  std::string region = "unknown";
  double va = 0.0;
  double va_imputed = 0.0;
  std::optional<double> lp, dlp, lp_growth, roc, ir, ci;
};

struct DropEntry {
  std::string firm_id;
  int year = 0;
  std::string variable;
  std::string reason;
};

struct DerivedPanel {
  std::vector<DerivedRow> rows;
  std::vector<DropEntry> drops;
};

inline constexpr double lp_growth_epsilon = 1e-6;  // singularity guard on LP_{t-1}

// Derive the panel variables. Input must be deduped (and normally deflated);
// year links come from link_firms.
inline DerivedPanel derive(const std::vector<FirmRecord>& records, const LinkageMap& links,
                           double growth_eps = lp_growth_epsilon) {
  DerivedPanel panel;
  panel.rows.reserve(records.size());
  std::map<std::pair<std::string, int>, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!index.emplace(std::make_pair(records[i].firm_id, records[i].year), i).second)
      throw std::invalid_argument("derive: records must be deduped on (firm_id, year)");
  }

  // first pass: per-row variables
  for (const auto& r : records) {
    DerivedRow row;
    row.firm_id = r.firm_id;
    row.year = r.year;
    row.region = r.region;
    row.va = r.output - r.intermediate_input;
    row.va_imputed = r.wages + r.profits;
    if (r.employment > 0.0) {
      row.lp = row.va / r.employment;
      row.ci = r.capital / r.employment;
    } else {
      panel.drops.push_back({r.firm_id, r.year, "lp", "zero_employment"});
      panel.drops.push_back({r.firm_id, r.year, "ci", "zero_employment"});
    }
    if (r.capital > 0.0)
      row.roc = r.profits / r.capital;
    else
      panel.drops.push_back({r.firm_id, r.year, "roc", "nonpositive_capital"});
    panel.rows.push_back(std::move(row));
  }

  // second pass: year-over-year variables through the linkage map
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    auto& row = panel.rows[i];
    const auto& rec = records[i];
    const auto link = links.previous_id.find({rec.firm_id, rec.year});
    if (link == links.previous_id.end()) {
      panel.drops.push_back({rec.firm_id, rec.year, "dlp", "unlinked"});
      panel.drops.push_back({rec.firm_id, rec.year, "lp_growth", "unlinked"});
      panel.drops.push_back({rec.firm_id, rec.year, "ir", "unlinked"});
      continue;
    }
    const auto prev_it = index.find({link->second, rec.year - 1});
    if (prev_it == index.end()) {
      panel.drops.push_back({rec.firm_id, rec.year, "dlp", "missing_previous_record"});
      panel.drops.push_back({rec.firm_id, rec.year, "lp_growth", "missing_previous_record"});
      panel.drops.push_back({rec.firm_id, rec.year, "ir", "missing_previous_record"});
      continue;
    }
    const auto& prev_row = panel.rows[prev_it->second];
    const auto& prev_rec = records[prev_it->second];
    if (row.lp && prev_row.lp) {
      row.dlp = *row.lp - *prev_row.lp;
      if (std::abs(*prev_row.lp) >= growth_eps)
        row.lp_growth = *row.dlp / *prev_row.lp;
      else
        panel.drops.push_back({rec.firm_id, rec.year, "lp_growth", "singularity"});
    } else {
      panel.drops.push_back({rec.firm_id, rec.year, "dlp", "missing_lp"});
      panel.drops.push_back({rec.firm_id, rec.year, "lp_growth", "missing_lp"});
    }
    if (prev_rec.capital > 0.0)
      row.ir = (rec.capital - prev_rec.capital) / prev_rec.capital;
    else
      panel.drops.push_back({rec.firm_id, rec.year, "ir", "nonpositive_previous_capital"});
  }
  return panel;
}

// ---------------------------------------------------------------------------

// Observation accounting per year and variable; rows with a value plus logged
// drops reconcile to the row count.
struct YearCounts {
  std::size_t rows = 0;
  std::map<std::string, std::size_t> available;          // variable -> count
  std::map<std::string, std::size_t> dropped;            // "variable/reason" -> count
};

struct AccountingReport {
  std::map<int, YearCounts> years;
  std::size_t rejected_rows = 0;
  std::size_t duplicate_rows = 0;

  static constexpr std::array<const char*, 6> variables = {"lp", "dlp", "lp_growth",
                                                           "roc", "ir", "ci"};
};

inline AccountingReport build_accounting(const DerivedPanel& panel, std::size_t rejected_rows = 0,
                                         std::size_t duplicate_rows = 0) {
  AccountingReport rep;
  rep.rejected_rows = rejected_rows;
  rep.duplicate_rows = duplicate_rows;
  for (const auto& row : panel.rows) {
    auto& yc = rep.years[row.year];
    ++yc.rows;
    if (row.lp) ++yc.available["lp"];
    if (row.dlp) ++yc.available["dlp"];
    if (row.lp_growth) ++yc.available["lp_growth"];
    if (row.roc) ++yc.available["roc"];
    if (row.ir) ++yc.available["ir"];
    if (row.ci) ++yc.available["ci"];
  }
  for (const auto& d : panel.drops) ++rep.years[d.year].dropped[d.variable + "/" + d.reason];
  return rep;
}

// ---------------------------------------------------------------------------
// Derived-panel serialization (empty field = value not derived for that row).

inline void write_derived_csv(const std::string& path, const DerivedPanel& panel) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "firm_id,year,region,va,va_imputed,lp,dlp,lp_growth,roc,ir,ci\n";
  auto field = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return std::string(buf);
  };
  char buf[64];
  for (const auto& r : panel.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.va);
    out << r.firm_id << ',' << r.year << ',' << r.region << ',' << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.va_imputed);
    out << buf << ',' << field(r.lp) << ',' << field(r.dlp) << ',' << field(r.lp_growth) << ','
        << field(r.roc) << ',' << field(r.ir) << ',' << field(r.ci) << "\n";
  }
}

inline DerivedPanel read_derived_csv(const std::string& path) {
  const auto rows = csv::read_file(path);
  const std::vector<std::string> header = {"firm_id", "year", "region", "va",  "va_imputed", "lp",
                                           "dlp",     "lp_growth", "roc", "ir", "ci"};
  if (rows.empty() || rows[0] != header)
    throw SchemaError("derived panel: unexpected header in " + path);
  DerivedPanel panel;
  panel.rows.reserve(rows.size() - 1);
  auto opt_field = [](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
  };
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != header.size())
      throw SchemaError("derived panel: bad row " + std::to_string(i + 1));
    DerivedRow r;
    r.firm_id = f[0];
    r.year = std::stoi(f[1]);
    r.region = f[2];
    r.va = std::stod(f[3]);
    r.va_imputed = std::stod(f[4]);
    r.lp = opt_field(f[5]);
    r.dlp = opt_field(f[6]);
    r.lp_growth = opt_field(f[7]);
    r.roc = opt_field(f[8]);
    r.ir = opt_field(f[9]);
    r.ci = opt_field(f[10]);
    panel.rows.push_back(std::move(r));
  }
  return panel;
}

// Pull one variable's present values, optionally restricted by year/region.
// year < 0 pools years; region "all" pools regions ("unknown" regions are
// excluded from named-region pulls but kept in pooled ones).
inline std::vector<double> extract_variable(const DerivedPanel& panel, const std::string& variable,
                                            int year = -1, const std::string& region = "all") {
  std::vector<double> out;
  for (const auto& row : panel.rows) {
    if (year >= 0 && row.year != year) continue;
    if (region != "all" && row.region != region) continue;
    const std::optional<double>* v = nullptr;
    if (variable == "lp" || variable == "LP") v = &row.lp;
    else if (variable == "dlp" || variable == "dLP") v = &row.dlp;
    else if (variable == "lp_growth") v = &row.lp_growth;
    else if (variable == "roc" || variable == "ROC") v = &row.roc;
    else if (variable == "ir" || variable == "IR") v = &row.ir;
    else if (variable == "ci" || variable == "CI") v = &row.ci;
    else throw std::invalid_argument("extract_variable: unknown variable " + variable);
    if (*v) out.push_back(**v);
  }
  return out;
}

}  // namespace heavytail::firmpanel
