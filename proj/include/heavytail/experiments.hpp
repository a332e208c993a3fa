#pragma once

// Experiment drivers behind the CLI verbs: synthetic panel generation seeded
// from per-(year, region) stable parameters, per-subsample fit tables with
// two-model comparison, density exports for semi-log plotting, aggregation
// convergence studies, and variance-divergence diagnostics. Every run is a
// pure function of (inputs, seed) and writes a manifest next to its outputs;
// reruns are byte-identical.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "heavytail/aep.hpp"
#include "heavytail/estimation.hpp"
#include "heavytail/firmpanel.hpp"
#include "heavytail/gof.hpp"
#include "heavytail/parallel.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/stable.hpp"
#include "heavytail/version.hpp"

namespace heavytail::experiments {

namespace detail {

inline std::string fmt(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string fmt10(double v) { return fmt(v, "%.10g"); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Key=value configuration with flag overrides.

struct Config {
  std::map<std::string, std::string> values;

  static Config from_file(const std::string& path) {
    Config cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (!key.empty()) cfg.values[key] = val;
    }
    return cfg;
  }

  void set(const std::string& key, const std::string& value) { values[key] = value; }
  std::string get_or(const std::string& key, const std::string& fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
};

// Manifest: resolved configuration, seeds, and the library version, written
// beside every run's outputs. Deliberately timestamp-free.
inline void write_manifest(const std::string& dir,
                           std::vector<std::pair<std::string, std::string>> entries) {
  entries.emplace_back("version", version_string);
  std::sort(entries.begin(), entries.end());
  std::ofstream out(dir + "/manifest.txt");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
}

// ---------------------------------------------------------------------------
// Synthetic firm population.

// One seeded subpopulation: firms in (year, region) whose derived labor
// productivity is an exact stable sample at these parameters.
struct SynthRow {
  int year = 0;
  std::string region;
  stable::StableParams params{1.0, 0.0, 1.0, 0.0};
  std::size_t count = 0;
  double linkage_density = 0.6;  // share of firms carrying their id into year+1
};

struct SynthSpec {
  std::vector<SynthRow> rows;

  void validate() const {
    if (rows.empty()) throw std::invalid_argument("SynthSpec: no rows");
    for (const auto& r : rows) {
      if (r.count == 0) throw std::invalid_argument("SynthSpec: zero count row");
      if (r.linkage_density < 0.0 || r.linkage_density > 1.0)
        throw std::invalid_argument("SynthSpec: linkage density outside [0, 1]");
    }
  }

  // CSV columns: year,region,alpha,beta,gamma,delta,count,linkage_density
  static SynthSpec from_csv(const std::string& path) {
    SynthSpec spec;
    const auto rows = csv::read_file(path);
    const std::vector<std::string> header = {"year",  "region", "alpha", "beta",
                                             "gamma", "delta",  "count", "linkage_density"};
    if (rows.empty() || rows[0] != header)
      throw firmpanel::SchemaError("synth spec: expected header year,region,alpha,beta,gamma,"
                                   "delta,count,linkage_density");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& f = rows[i];
      if (f.size() != header.size())
        throw firmpanel::SchemaError("synth spec: bad row " + std::to_string(i + 1));
      SynthRow r;
      r.year = std::stoi(f[0]);
      r.region = f[1];
      r.params = stable::StableParams(std::stod(f[2]), std::stod(f[3]), std::stod(f[4]),
                                      std::stod(f[5]));
      r.count = static_cast<std::size_t>(std::stoull(f[6]));
      r.linkage_density = std::stod(f[7]);
      spec.rows.push_back(std::move(r));
    }
    spec.validate();
    return spec;
  }
};

struct SynthOutput {
  std::string panel_path;
  std::string deflator_path;
  std::string zipmap_path;
  std::size_t rows_written = 0;
};

// Emit a panel in the ingestion schema whose derived LP is exactly the drawn
// stable sample: choose employment, set value added = LP * L, then split
// output and intermediate input consistently. Firms with index below the
// linkage share keep a year-stable id so productivity-change chains exist.
inline SynthOutput synth_population(const SynthSpec& spec, std::uint64_t seed,
                                    const std::string& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);

  // deterministic zip prefix per region, in first-appearance order
  std::vector<std::string> regions;
  for (const auto& r : spec.rows)
    if (std::find(regions.begin(), regions.end(), r.region) == regions.end())
      regions.push_back(r.region);
  std::map<std::string, std::string> zip_prefix;
  for (std::size_t i = 0; i < regions.size(); ++i)
    zip_prefix[regions[i]] = std::to_string(10 + i);

  std::set<std::pair<std::string, int>> sectors_years;
  const char* ownerships[] = {"soe", "collective", "shareholding", "private",
                              "hmt", "foreign",    "other"};

  SynthOutput out;
  out.panel_path = out_dir + "/panel.csv";
  std::ofstream panel(out.panel_path);
  if (!panel) throw std::runtime_error("synth: cannot write " + out.panel_path);
  panel << "firm_id,year,phone,zip,founding_year,sector,ownership,output,"
           "intermediate_input,wages,profits,employment,capital\n";

  // capital chains per firm id so investment rates are defined where linked
  std::map<std::string, double> capital_prev;

  for (std::size_t ri = 0; ri < spec.rows.size(); ++ri) {
    const auto& row = spec.rows[ri];
    rng::RandomStream rs(seed, rng::derive_stream(rng::stream_of("synth"), ri));
    const std::string& prefix = zip_prefix[row.region];
    const std::size_t keep = static_cast<std::size_t>(row.linkage_density *
                                                      static_cast<double>(row.count));
    for (std::size_t i = 0; i < row.count; ++i) {
      const double lp = stable::sample_one(row.params, rs);
      const double employment = 5.0 + static_cast<double>(rs.next_u32() % 296);
      const double va = lp * employment;
      const double ii = 0.75 * std::abs(va) + 40.0;
      const double q = va + ii;
      const double wages = 0.6 * va;
      const double profits = va - wages;
      // id is stable across years for the first `keep` firms of the region
      const std::string firm_id = i < keep
                                      ? row.region + "-C" + std::to_string(i)
                                      : row.region + "-Y" + std::to_string(row.year) + "-" +
                                            std::to_string(i);
      double capital;
      const auto prev = capital_prev.find(firm_id);
      if (prev != capital_prev.end())
        capital = prev->second * (0.9 + 0.35 * rs.next_double());
      else
        capital = 50.0 + 400.0 * rs.next_double();
      capital_prev[firm_id] = capital;

      const std::string zip = prefix + std::to_string(1000 + i % 9000);
      panel << firm_id << ',' << row.year << ",p-" << firm_id << ',' << zip << ','
            << (row.year - 1 - static_cast<int>(i % 20)) << ",S1,"
            << ownerships[i % 7] << ',' << detail::fmt(q) << ',' << detail::fmt(ii) << ','
            << detail::fmt(wages) << ',' << detail::fmt(profits) << ','
            << detail::fmt(employment) << ',' << detail::fmt(capital) << "\n";
      ++out.rows_written;
      sectors_years.emplace("S1", row.year);
    }
  }
  panel.close();

  out.deflator_path = out_dir + "/deflators.csv";
  std::ofstream defl(out.deflator_path);
  defl << "sector,year,deflator\n";
  for (const auto& [sector, year] : sectors_years) defl << sector << ',' << year << ",1\n";
  defl.close();

  out.zipmap_path = out_dir + "/zipmap.csv";
  std::ofstream zm(out.zipmap_path);
  zm << "prefix,province\n";
  for (const auto& region : regions) zm << zip_prefix[region] << ',' << region << "\n";
  zm.close();
  return out;
}

// ---------------------------------------------------------------------------
// Fit tables.

struct FitTableOptions {
  std::vector<std::string> variables = {"lp"};
  std::string grouping = "year";  // "year", "year_region", or "pooled"
  bool fit_levy = true;
  bool fit_aep = true;
  estimation::GateConfig gates;
};

struct FitRow {
  std::string variable;
  int year = -1;            // -1 = pooled
  std::string region = "all";
  std::string model;
  estimation::SubsampleFit fit;
};

inline std::vector<FitRow> fit_table(const firmpanel::DerivedPanel& panel,
                                     const FitTableOptions& opt) {
  std::set<int> years;
  std::set<std::string> regions;
  for (const auto& row : panel.rows) {
    years.insert(row.year);
    if (row.region != "unknown") regions.insert(row.region);
  }
  struct Group {
    int year;
    std::string region;
  };
  std::vector<Group> groups;
  if (opt.grouping == "pooled") {
    groups.push_back({-1, "all"});
  } else if (opt.grouping == "year") {
    for (int y : years) groups.push_back({y, "all"});
  } else if (opt.grouping == "year_region") {
    for (int y : years)
      for (const auto& r : regions) groups.push_back({y, r});
  } else {
    throw std::invalid_argument("fit_table: unknown grouping " + opt.grouping);
  }

  std::vector<FitRow> rows;
  for (const auto& var : opt.variables)
    for (const auto& g : groups) {
      if (opt.fit_levy) rows.push_back({var, g.year, g.region, "levy", {}});
      if (opt.fit_aep) rows.push_back({var, g.year, g.region, "aep", {}});
    }

  par::parallel_for(rows.size(), [&](std::size_t i) {
    auto& row = rows[i];
    const auto values = firmpanel::extract_variable(panel, row.variable, row.year, row.region);
    const estimation::SubsampleKey key{row.variable, row.year, row.region};
    const auto kind =
        row.model == "levy" ? estimation::ModelKind::levy : estimation::ModelKind::aep;
    row.fit = estimation::fit_subsample(values, key, kind, opt.gates);
  });
  return rows;
}

inline const char* fit_status_name(estimation::FitStatus s) {
  switch (s) {
    case estimation::FitStatus::ok: return "ok";
    case estimation::FitStatus::skipped: return "skipped";
    default: return "failed";
  }
}

// Columns: variable, year, region, model, the four shape parameters in model
// order, n, loglik, aic, sids, the two deltas, preferred label, status.
inline void write_fit_table_csv(const std::string& path, const std::vector<FitRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "variable,year,region,model,alpha_kappa,beta_h,gamma_sigma,delta_xi,n,"
         "loglik,aic,sids,delta_sids,delta_aic,preferred,status\n";

  // pair up levy/aep rows per group for the comparison columns
  std::map<std::string, const estimation::FitResult*> levy_ok, aep_ok;
  auto group_key = [](const FitRow& r) {
    return r.variable + "|" + std::to_string(r.year) + "|" + r.region;
  };
  for (const auto& r : rows) {
    if (r.fit.status != estimation::FitStatus::ok) continue;
    (r.model == "levy" ? levy_ok : aep_ok)[group_key(r)] = &*r.fit.result;
  }

  for (const auto& r : rows) {
    out << r.variable << ',' << (r.year < 0 ? std::string("all") : std::to_string(r.year)) << ','
        << r.region << ',' << r.model << ',';
    if (r.fit.status == estimation::FitStatus::ok) {
      const auto& fr = *r.fit.result;
      if (const auto* sp = std::get_if<stable::StableParams>(&fr.params)) {
        out << detail::fmt10(sp->alpha) << ',' << detail::fmt10(sp->beta) << ','
            << detail::fmt10(sp->gamma) << ',' << detail::fmt10(sp->delta);
      } else {
        const auto& ap = std::get<aep::AepParams>(fr.params);
        out << detail::fmt10(ap.kappa) << ',' << detail::fmt10(ap.h) << ','
            << detail::fmt10(ap.sigma) << ',' << detail::fmt10(ap.xi);
      }
      out << ',' << fr.n << ',' << detail::fmt10(fr.loglik) << ',' << detail::fmt10(fr.aic) << ','
          << detail::fmt10(fr.sids) << ',';
      const auto key = group_key(r);
      if (levy_ok.count(key) && aep_ok.count(key)) {
        const auto cmp = estimation::compare_models(*levy_ok[key], *aep_ok[key]);
        out << detail::fmt10(cmp.delta_sids) << ',' << detail::fmt10(cmp.delta_aic) << ','
            << cmp.preferred;
      } else {
        out << ",,";
      }
      out << ",ok\n";
    } else {
      // empty params, scores, and comparison columns
      out << ",,,,,,,,,,," << fit_status_name(r.fit.status) << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Density export.

struct GridSpec {
  std::size_t bins = 1000;
  std::optional<double> x_min;
  std::optional<double> x_max;
};

struct DensitySeries {
  std::string series_id;
  std::vector<double> x;          // bin centers
  std::vector<double> empirical;  // histogram density over the grid, or empty
  std::vector<double> fitted;     // bin-averaged model density, or empty
};

// Fixed-width-bin export for semi-log plots. The fitted column is the exact
// bin-average (F(b) - F(a)) / w so that sum * width equals covered model
// mass; with the default auto range both columns integrate to 1 within 1e-3.
inline DensitySeries density_export_series(const std::string& series_id,
                                           std::span<const double> values,
                                           const std::optional<gof::FittedModel>& model,
                                           const GridSpec& grid = {}) {
  if (grid.bins < 2) throw std::invalid_argument("density export: need at least 2 bins");
  if (values.empty() && !model)
    throw std::invalid_argument("density export: need sample values or a fitted model");
  double lo, hi;
  if (grid.x_min && grid.x_max) {
    lo = *grid.x_min;
    hi = *grid.x_max;
  } else if (model) {
    lo = gof::model_quantile(*model, 0.0002);
    hi = gof::model_quantile(*model, 0.9998);
  } else {
    auto sorted = std::vector<double>(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    lo = estimation::quantile_type7(sorted, 0.0002);
    hi = estimation::quantile_type7(sorted, 0.9998);
  }
  if (!(hi > lo)) throw std::invalid_argument("density export: empty grid range");

  DensitySeries s;
  s.series_id = series_id;
  const double w = (hi - lo) / static_cast<double>(grid.bins);
  s.x.resize(grid.bins);
  for (std::size_t k = 0; k < grid.bins; ++k)
    s.x[k] = lo + (static_cast<double>(k) + 0.5) * w;

  if (!values.empty()) {
    std::vector<std::size_t> counts(grid.bins, 0);
    std::size_t inside = 0;
    for (double v : values) {
      if (v < lo || v > hi) continue;
      auto idx = static_cast<std::size_t>((v - lo) / w);
      if (idx >= grid.bins) idx = grid.bins - 1;
      ++counts[idx];
      ++inside;
    }
    s.empirical.resize(grid.bins, 0.0);
    if (inside > 0)
      for (std::size_t k = 0; k < grid.bins; ++k)
        s.empirical[k] = static_cast<double>(counts[k]) / (static_cast<double>(inside) * w);
  }
  if (model) {
    s.fitted.resize(grid.bins);
    double prev = gof::model_cdf(*model, lo);
    for (std::size_t k = 0; k < grid.bins; ++k) {
      const double next = gof::model_cdf(*model, lo + (static_cast<double>(k) + 1.0) * w);
      s.fitted[k] = std::max(next - prev, 0.0) / w;
      prev = next;
    }
  }
  return s;
}

inline void write_density_csv(const std::string& path, const std::vector<DensitySeries>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "series_id,x,empirical,fitted\n";
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      out << s.series_id << ',' << detail::fmt10(s.x[k]) << ',';
      if (!s.empirical.empty()) out << detail::fmt10(s.empirical[k]);
      out << ',';
      if (!s.fitted.empty()) out << detail::fmt10(s.fitted[k]);
      out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Aggregation convergence (sums of iid components refit as stable laws).

struct ComponentSpec {
  enum class Kind { stable_law, aep_law, symmetric_pareto, uniform };
  Kind kind = Kind::uniform;
  std::optional<stable::StableParams> stable_params;
  std::optional<aep::AepParams> aep_params;
  double pareto_tail = 1.5;  // symmetric Pareto with |x| >= 1

  std::string describe() const {
    switch (kind) {
      case Kind::stable_law: {
        const auto& p = *stable_params;
        return "stable(alpha=" + detail::fmt(p.alpha, "%.6g") + ",beta=" +
               detail::fmt(p.beta, "%.6g") + ",gamma=" + detail::fmt(p.gamma, "%.6g") +
               ",delta=" + detail::fmt(p.delta, "%.6g") + ")";
      }
      case Kind::aep_law: {
        const auto& p = *aep_params;
        return "aep(kappa=" + detail::fmt(p.kappa, "%.6g") + ",h=" + detail::fmt(p.h, "%.6g") +
               ",sigma=" + detail::fmt(p.sigma, "%.6g") + ",xi=" + detail::fmt(p.xi, "%.6g") + ")";
      }
      case Kind::symmetric_pareto:
        return "pareto(tail=" + detail::fmt(pareto_tail, "%.6g") + ")";
      default:
        return "uniform(0,1)";
    }
  }
};

inline double draw_component(const ComponentSpec& c, rng::RandomStream& rs) {
  switch (c.kind) {
    case ComponentSpec::Kind::stable_law:
      return stable::sample_one(*c.stable_params, rs);
    case ComponentSpec::Kind::aep_law:
      return aep::sample_one(*c.aep_params, rs);
    case ComponentSpec::Kind::symmetric_pareto: {
      const double mag = std::pow(rs.next_open_double(), -1.0 / c.pareto_tail);
      return rs.next_double() < 0.5 ? -mag : mag;
    }
    default:
      return rs.next_double();
  }
}

struct GcltPoint {
  std::size_t n_terms = 0;
  stable::StableParams fit{2.0, 0.0, 1.0, 0.0};
};

struct GcltReport {
  std::string component;
  std::size_t n_sums = 0;
  std::vector<GcltPoint> points;
};

// Draw n_sums sums of n_terms iid components, normalize by median and
// interquartile range (moment normalizations are invalid below the Gaussian
// boundary), and refit the stable index. Finite-variance components drive the
// fitted alpha to 2; tail-index-a components to a.
inline GcltReport gclt_experiment(const ComponentSpec& comp, std::vector<std::size_t> n_terms_list,
                                  std::size_t n_sums, std::uint64_t seed) {
  if (n_sums < estimation::mcculloch_min_n)
    throw std::invalid_argument("gclt: n_sums below the estimation gate");
  GcltReport report;
  report.component = comp.describe();
  report.n_sums = n_sums;
  for (std::size_t ti = 0; ti < n_terms_list.size(); ++ti) {
    const std::size_t n_terms = n_terms_list[ti];
    if (n_terms == 0) throw std::invalid_argument("gclt: zero terms");
    std::vector<double> sums(n_sums);
    par::parallel_for(n_sums, [&](std::size_t j) {
      rng::RandomStream rs(seed, rng::derive_stream(rng::stream_of("gclt") + ti, j));
      double acc = 0.0;
      for (std::size_t k = 0; k < n_terms; ++k) acc += draw_component(comp, rs);
      sums[j] = acc;
    });
    const auto qs = estimation::empirical_quantiles(sums);
    const double iqr = qs.q75 - qs.q25;
    if (!(iqr > 0.0)) throw estimation::DegenerateSpread("gclt: degenerate sums");
    for (auto& v : sums) v = (v - qs.q50) / iqr;
    report.points.push_back({n_terms, estimation::mcculloch_fit(sums)});
  }
  return report;
}

inline void write_gclt_report(const std::string& dir, const GcltReport& report) {
  std::ofstream csv_out(dir + "/gclt.csv");
  csv_out << "component,n_sums,n_terms,alpha,beta,gamma,delta\n";
  for (const auto& pt : report.points)
    csv_out << report.component << ',' << report.n_sums << ',' << pt.n_terms << ','
            << detail::fmt10(pt.fit.alpha) << ',' << detail::fmt10(pt.fit.beta) << ','
            << detail::fmt10(pt.fit.gamma) << ',' << detail::fmt10(pt.fit.delta) << "\n";
  std::ofstream txt(dir + "/gclt.txt");
  txt << "aggregation convergence: component " << report.component << ", " << report.n_sums
      << " sums per point\n";
  for (const auto& pt : report.points)
    txt << "  n_terms " << pt.n_terms << ": fitted alpha " << detail::fmt(pt.fit.alpha, "%.4f")
        << " (beta " << detail::fmt(pt.fit.beta, "%.3f") << ")\n";
}

// ---------------------------------------------------------------------------
// Variance divergence below the Gaussian boundary.

struct VardivPoint {
  std::size_t n = 0;
  double median_variance = 0.0;
};

struct VardivReport {
  stable::StableParams params{1.0, 0.0, 1.0, 0.0};
  std::size_t reps = 0;
  std::vector<VardivPoint> points;
  double measured_slope = 0.0;   // log median variance vs log n
  double exponent_stated = 0.0;  // (2 - alpha) / (2 alpha)
  double exponent_maxterm = 0.0; // 2 / alpha - 1
};

inline VardivReport variance_divergence(const stable::StableParams& params,
                                        std::vector<std::size_t> sizes, std::size_t reps,
                                        std::uint64_t seed) {
  if (params.alpha >= 2.0)
    throw std::domain_error("variance_divergence: variance is finite at the Gaussian boundary");
  if (sizes.size() < 2 || reps == 0)
    throw std::invalid_argument("variance_divergence: need >= 2 sizes and >= 1 rep");
  VardivReport report;
  report.params = params;
  report.reps = reps;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    std::vector<double> variances(reps);
    par::parallel_for(reps, [&](std::size_t r) {
      rng::RandomStream rs(seed, rng::derive_stream(rng::stream_of("vardiv") + si, r));
      const std::size_t n = sizes[si];
      std::vector<double> xs(n);
      for (auto& v : xs) v = stable::sample_one(params, rs);
      double mean = 0.0;
      for (double v : xs) mean += v;
      mean /= static_cast<double>(n);
      double s2 = 0.0;
      for (double v : xs) s2 += (v - mean) * (v - mean);
      variances[r] = s2 / static_cast<double>(n);
    });
    std::nth_element(variances.begin(), variances.begin() + reps / 2, variances.end());
    report.points.push_back({sizes[si], variances[reps / 2]});
  }
  // least-squares slope in log-log coordinates
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(report.points.size());
  for (const auto& pt : report.points) {
    const double x = std::log(static_cast<double>(pt.n));
    const double y = std::log(pt.median_variance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.measured_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  report.exponent_stated = (2.0 - params.alpha) / (2.0 * params.alpha);
  report.exponent_maxterm = 2.0 / params.alpha - 1.0;
  return report;
}

inline void write_vardiv_report(const std::string& dir, const VardivReport& report) {
  std::ofstream csv_out(dir + "/vardiv.csv");
  csv_out << "alpha,n,median_variance\n";
  for (const auto& pt : report.points)
    csv_out << detail::fmt10(report.params.alpha) << ',' << pt.n << ','
            << detail::fmt10(pt.median_variance) << "\n";
  std::ofstream txt(dir + "/vardiv.txt");
  txt << "sample variance vs sample size at alpha = " << detail::fmt(report.params.alpha, "%.4f")
      << " (" << report.reps << " replicates per size)\n";
  for (const auto& pt : report.points)
    txt << "  n " << pt.n << ": median variance " << detail::fmt(pt.median_variance, "%.6g")
        << "\n";
  txt << "measured log-log slope      " << detail::fmt(report.measured_slope, "%.4f") << "\n"
      << "candidate exponent (2-a)/2a " << detail::fmt(report.exponent_stated, "%.4f") << "\n"
      << "candidate exponent 2/a - 1  " << detail::fmt(report.exponent_maxterm, "%.4f") << "\n";
}

}  // namespace heavytail::experiments
