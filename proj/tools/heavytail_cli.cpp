// heavytail command-line driver.
//
// Verbs: synth, derive, fit, gof, export-density, gclt, vardiv. Every verb
// reads an optional key=value config file, lets flags override it, writes its
// outputs into --out, and drops a manifest (resolved options + seed +
// version) beside them so any number in any report can be reproduced.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heavytail/experiments.hpp"

namespace fs = std::filesystem;
using namespace heavytail;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> split_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) out.push_back(std::stoull(item));
  return out;
}

// Effective option value: flag if given on the command line, else config
// entry, else the built-in default.
struct Options {
  experiments::Config config;
  CLI::App* cmd = nullptr;

  std::string get(const std::string& flag, const std::string& key, const std::string& fallback,
                  const std::string& flag_value) const {
    if (cmd->count(flag) > 0) return flag_value;
    return config.get_or(key, fallback);
  }
};

stable::StableParams parse_stable_params(const std::string& csv) {
  const auto parts = split_list(csv);
  if (parts.size() != 4)
    throw CLI::ValidationError("--params", "expected alpha,beta,gamma,delta");
  return stable::StableParams(std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]),
                              std::stod(parts[3]));
}

aep::AepParams parse_aep_params(const std::string& csv) {
  const auto parts = split_list(csv);
  if (parts.size() != 4) throw CLI::ValidationError("--params", "expected kappa,h,sigma,xi");
  return aep::AepParams(std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]),
                        std::stod(parts[3]));
}

std::vector<double> read_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line == "value") continue;
    out.push_back(std::stod(line));
  }
  return out;
}

void write_values_file(const std::string& path, std::span<const double> values) {
  std::ofstream out(path);
  out << "value\n";
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heavy-tail statistics toolkit: stable and AEP fitting on firm panels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version_string));

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "key=value configuration file")->capture_default_str();

  // ---- synth -------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic firm panel from a spec");
  std::string synth_spec_path;
  synth->add_option("--spec", synth_spec_path, "synthetic spec CSV")->required();
  synth->add_option("--out", out_dir, "output directory");
  synth->add_option("--seed", seed, "random seed");

  // ---- derive ------------------------------------------------------------
  auto* derive = app.add_subcommand("derive", "ingest a raw panel and derive the variables");
  std::string panel_path, deflator_path, zipmap_path;
  derive->add_option("--panel", panel_path, "raw panel CSV")->required();
  derive->add_option("--deflators", deflator_path, "deflator CSV (sector,year,deflator)");
  derive->add_option("--zipmap", zipmap_path, "ZIP prefix map CSV (prefix,province)");
  derive->add_option("--out", out_dir, "output directory");

  // ---- fit ---------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "fit stable and AEP models per subsample");
  std::string derived_path, variables = "lp", grouping = "year", models = "levy,aep";
  std::size_t gate_national = 10000, gate_region_year = 5000, gate_region_pooled = 1000;
  fit->add_option("--derived", derived_path, "derived panel CSV")->required();
  fit->add_option("--variables", variables, "comma list: lp,dlp,lp_growth,roc,ir,ci");
  fit->add_option("--grouping", grouping, "year | year_region | pooled");
  fit->add_option("--models", models, "comma list: levy,aep");
  fit->add_option("--gate-national", gate_national, "min n for national-year fits");
  fit->add_option("--gate-region-year", gate_region_year, "min n for region-year fits");
  fit->add_option("--gate-region-pooled", gate_region_pooled, "min n for region-pooled fits");
  fit->add_option("--out", out_dir, "output directory");
  fit->add_option("--seed", seed, "recorded in the manifest");

  // ---- gof ---------------------------------------------------------------
  auto* gof_cmd = app.add_subcommand("gof", "score a sample against fixed parameters");
  std::string gof_values_path, gof_model = "levy", gof_params;
  gof_cmd->add_option("--values", gof_values_path, "one value per line")->required();
  gof_cmd->add_option("--model", gof_model, "levy | aep");
  gof_cmd->add_option("--params", gof_params, "four comma-separated parameters")->required();
  gof_cmd->add_option("--out", out_dir, "output directory");

  // ---- export-density ----------------------------------------------------
  auto* expd = app.add_subcommand("export-density", "densities on a fixed-width grid");
  std::string expd_derived, expd_variable = "lp", expd_params, expd_model = "levy";
  int expd_year = -1;
  std::string expd_region = "all";
  std::size_t expd_bins = 1000;
  double expd_xmin = 0.0, expd_xmax = 0.0;
  expd->add_option("--derived", expd_derived, "derived panel CSV for the empirical column");
  expd->add_option("--variable", expd_variable, "panel variable");
  expd->add_option("--year", expd_year, "year filter (-1 pools)");
  expd->add_option("--region", expd_region, "region filter");
  expd->add_option("--params", expd_params, "fitted parameters for the model column");
  expd->add_option("--model", expd_model, "levy | aep");
  expd->add_option("--bins", expd_bins, "number of fixed-width bins");
  auto* xmin_opt = expd->add_option("--x-min", expd_xmin, "grid lower edge");
  auto* xmax_opt = expd->add_option("--x-max", expd_xmax, "grid upper edge");
  expd->add_option("--out", out_dir, "output directory");

  // ---- gclt --------------------------------------------------------------
  auto* gclt = app.add_subcommand("gclt", "aggregation convergence experiment");
  std::string component = "uniform", comp_params;
  double pareto_tail = 1.5;
  std::string n_terms_list = "1,10,100,1000";
  std::size_t n_sums = 100000;
  gclt->add_option("--component", component, "uniform | pareto | stable | aep");
  gclt->add_option("--tail", pareto_tail, "pareto tail index");
  gclt->add_option("--params", comp_params, "component parameters (stable or aep)");
  gclt->add_option("--n-terms", n_terms_list, "comma list of terms per sum");
  gclt->add_option("--n-sums", n_sums, "sums per point");
  gclt->add_option("--seed", seed, "random seed");
  gclt->add_option("--out", out_dir, "output directory");

  // ---- vardiv ------------------------------------------------------------
  auto* vardiv = app.add_subcommand("vardiv", "sample-variance divergence experiment");
  double vd_alpha = 1.1, vd_beta = 0.0, vd_gamma = 1.0, vd_delta = 0.0;
  std::string vd_sizes = "1000,10000,100000,1000000";
  std::size_t vd_reps = 100;
  vardiv->add_option("--alpha", vd_alpha, "tail index (< 2)");
  vardiv->add_option("--beta", vd_beta, "skew");
  vardiv->add_option("--gamma", vd_gamma, "scale");
  vardiv->add_option("--delta", vd_delta, "location");
  vardiv->add_option("--sizes", vd_sizes, "comma list of sample sizes");
  vardiv->add_option("--reps", vd_reps, "replicates per size");
  vardiv->add_option("--seed", seed, "random seed");
  vardiv->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    experiments::Config cfg;
    if (!config_path.empty()) cfg = experiments::Config::from_file(config_path);
    fs::create_directories(out_dir);
    std::vector<std::pair<std::string, std::string>> manifest;
    manifest.emplace_back("out_dir", out_dir);

    if (synth->parsed()) {
      const auto spec = experiments::SynthSpec::from_csv(synth_spec_path);
      const auto files = experiments::synth_population(spec, seed, out_dir);
      manifest.emplace_back("verb", "synth");
      manifest.emplace_back("spec", synth_spec_path);
      manifest.emplace_back("seed", std::to_string(seed));
      manifest.emplace_back("rows_written", std::to_string(files.rows_written));
      experiments::write_manifest(out_dir, manifest);
      std::printf("synth: %zu rows -> %s\n", files.rows_written, files.panel_path.c_str());
      return 0;
    }

    if (derive->parsed()) {
      auto ingested = firmpanel::ingest(panel_path);
      auto deduped = firmpanel::dedupe(std::move(ingested.records));
      std::size_t missing_deflators = 0;
      if (!deflator_path.empty()) {
        const auto table = firmpanel::load_deflators(deflator_path);
        auto deflated = firmpanel::deflate(std::move(deduped.records), table);
        deduped.records = std::move(deflated.records);
        missing_deflators = deflated.missing_deflators;
      }
      if (!zipmap_path.empty()) {
        const auto zipmap = firmpanel::load_zipmap(zipmap_path);
        deduped.records = firmpanel::assign_region(std::move(deduped.records), zipmap);
      }
      const auto links = firmpanel::link_firms(deduped.records);
      const auto panel = firmpanel::derive(deduped.records, links);

      firmpanel::write_derived_csv(out_dir + "/derived.csv", panel);
      {
        std::ofstream rej(out_dir + "/rejects.csv");
        rej << "line,reason,raw\n";
        for (const auto& r : ingested.rejects)
          rej << r.line_number << ',' << r.reason << ','
              << csv::join_line({r.raw}) << "\n";
      }
      const auto report = firmpanel::build_accounting(panel, ingested.rejects.size(),
                                                      deduped.duplicates.size());
      {
        std::ofstream acc(out_dir + "/accounting.csv");
        acc << "year,rows,variable,available,dropped,reasons\n";
        for (const auto& [year, yc] : report.years) {
          for (const char* var : firmpanel::AccountingReport::variables) {
            std::size_t dropped = 0;
            std::string reasons;
            for (const auto& [key, n] : yc.dropped) {
              if (key.rfind(std::string(var) + "/", 0) != 0) continue;
              dropped += n;
              if (!reasons.empty()) reasons += ';';
              reasons += key.substr(std::string(var).size() + 1) + ":" + std::to_string(n);
            }
            const auto avail = yc.available.count(var) ? yc.available.at(var) : 0;
            acc << year << ',' << yc.rows << ',' << var << ',' << avail << ',' << dropped << ','
                << reasons << "\n";
          }
        }
      }
      manifest.emplace_back("verb", "derive");
      manifest.emplace_back("panel", panel_path);
      manifest.emplace_back("deflators", deflator_path);
      manifest.emplace_back("zipmap", zipmap_path);
      manifest.emplace_back("rows", std::to_string(panel.rows.size()));
      manifest.emplace_back("rejects", std::to_string(ingested.rejects.size()));
      manifest.emplace_back("duplicates", std::to_string(deduped.duplicates.size()));
      manifest.emplace_back("missing_deflators", std::to_string(missing_deflators));
      manifest.emplace_back("link_ambiguities", std::to_string(links.ambiguities.size()));
      experiments::write_manifest(out_dir, manifest);
      std::printf("derive: %zu rows, %zu rejects, %zu duplicates -> %s/derived.csv\n",
                  panel.rows.size(), ingested.rejects.size(), deduped.duplicates.size(),
                  out_dir.c_str());
      return 0;
    }

    if (fit->parsed()) {
      const auto panel = firmpanel::read_derived_csv(derived_path);
      experiments::FitTableOptions opt;
      opt.variables = split_list(fit->count("--variables") ? variables
                                                           : cfg.get_or("variables", variables));
      opt.grouping = fit->count("--grouping") ? grouping : cfg.get_or("grouping", grouping);
      const auto model_list = split_list(models);
      opt.fit_levy = std::find(model_list.begin(), model_list.end(), "levy") != model_list.end();
      opt.fit_aep = std::find(model_list.begin(), model_list.end(), "aep") != model_list.end();
      opt.gates.national_year = gate_national;
      opt.gates.region_year = gate_region_year;
      opt.gates.region_pooled = gate_region_pooled;
      const auto rows = experiments::fit_table(panel, opt);
      experiments::write_fit_table_csv(out_dir + "/fit_table.csv", rows);
      manifest.emplace_back("verb", "fit");
      manifest.emplace_back("derived", derived_path);
      manifest.emplace_back("variables", variables);
      manifest.emplace_back("grouping", opt.grouping);
      manifest.emplace_back("models", models);
      manifest.emplace_back("gate_national", std::to_string(gate_national));
      manifest.emplace_back("gate_region_year", std::to_string(gate_region_year));
      manifest.emplace_back("gate_region_pooled", std::to_string(gate_region_pooled));
      manifest.emplace_back("seed", std::to_string(seed));
      experiments::write_manifest(out_dir, manifest);
      std::printf("fit: %zu table rows -> %s/fit_table.csv\n", rows.size(), out_dir.c_str());
      return 0;
    }

    if (gof_cmd->parsed()) {
      const auto values = read_values_file(gof_values_path);
      gof::FittedModel model = gof_model == "aep"
                                   ? gof::FittedModel(parse_aep_params(gof_params))
                                   : gof::FittedModel(parse_stable_params(gof_params));
      const auto pair = gof::bin_against_model(values, model);
      const double kl = gof::kl_divergence(pair);
      const double sids = gof::soofi_id_score(pair);
      const double loglik = gof::log_likelihood(model, values).value;
      const double aic_v = gof::aic(loglik, 4);
      {
        std::ofstream out(out_dir + "/gof.csv");
        out << "model,n,kl,sids,loglik,aic,below_clip,above_clip\n";
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      gof_model.c_str(), values.size(), kl, sids, loglik, aic_v, pair.below_mass,
                      pair.above_mass);
        out << buf;
      }
      manifest.emplace_back("verb", "gof");
      manifest.emplace_back("values", gof_values_path);
      manifest.emplace_back("model", gof_model);
      manifest.emplace_back("params", gof_params);
      experiments::write_manifest(out_dir, manifest);
      std::printf("gof: n=%zu sids=%.2f aic=%.2f -> %s/gof.csv\n", values.size(), sids, aic_v,
                  out_dir.c_str());
      return 0;
    }

    if (expd->parsed()) {
      std::vector<double> values;
      if (!expd_derived.empty()) {
        const auto panel = firmpanel::read_derived_csv(expd_derived);
        values = firmpanel::extract_variable(panel, expd_variable, expd_year, expd_region);
      }
      std::optional<gof::FittedModel> model;
      if (!expd_params.empty()) {
        model = expd_model == "aep" ? gof::FittedModel(parse_aep_params(expd_params))
                                    : gof::FittedModel(parse_stable_params(expd_params));
      }
      experiments::GridSpec grid;
      grid.bins = expd_bins;
      if (xmin_opt->count()) grid.x_min = expd_xmin;
      if (xmax_opt->count()) grid.x_max = expd_xmax;
      const std::string series_id = expd_variable +
                                    (expd_year >= 0 ? "_" + std::to_string(expd_year) : "") +
                                    (expd_region != "all" ? "_" + expd_region : "");
      const auto series = experiments::density_export_series(series_id, values, model, grid);
      experiments::write_density_csv(out_dir + "/density.csv", {series});
      manifest.emplace_back("verb", "export-density");
      manifest.emplace_back("derived", expd_derived);
      manifest.emplace_back("variable", expd_variable);
      manifest.emplace_back("year", std::to_string(expd_year));
      manifest.emplace_back("region", expd_region);
      manifest.emplace_back("params", expd_params);
      manifest.emplace_back("model", expd_model);
      manifest.emplace_back("bins", std::to_string(expd_bins));
      experiments::write_manifest(out_dir, manifest);
      std::printf("export-density: %zu bins -> %s/density.csv\n", series.x.size(),
                  out_dir.c_str());
      return 0;
    }

    if (gclt->parsed()) {
      experiments::ComponentSpec comp;
      if (component == "uniform") {
        comp.kind = experiments::ComponentSpec::Kind::uniform;
      } else if (component == "pareto") {
        comp.kind = experiments::ComponentSpec::Kind::symmetric_pareto;
        comp.pareto_tail = pareto_tail;
      } else if (component == "stable") {
        comp.kind = experiments::ComponentSpec::Kind::stable_law;
        comp.stable_params = parse_stable_params(comp_params);
      } else if (component == "aep") {
        comp.kind = experiments::ComponentSpec::Kind::aep_law;
        comp.aep_params = parse_aep_params(comp_params);
      } else {
        throw CLI::ValidationError("--component", "unknown component " + component);
      }
      const auto report = experiments::gclt_experiment(comp, split_sizes(n_terms_list), n_sums,
                                                       seed);
      experiments::write_gclt_report(out_dir, report);
      manifest.emplace_back("verb", "gclt");
      manifest.emplace_back("component", report.component);
      manifest.emplace_back("n_terms", n_terms_list);
      manifest.emplace_back("n_sums", std::to_string(n_sums));
      manifest.emplace_back("seed", std::to_string(seed));
      experiments::write_manifest(out_dir, manifest);
      for (const auto& pt : report.points)
        std::printf("gclt: n_terms=%zu alpha_hat=%.4f\n", pt.n_terms, pt.fit.alpha);
      return 0;
    }

    if (vardiv->parsed()) {
      const stable::StableParams p(vd_alpha, vd_beta, vd_gamma, vd_delta);
      const auto report = experiments::variance_divergence(p, split_sizes(vd_sizes), vd_reps,
                                                           seed);
      experiments::write_vardiv_report(out_dir, report);
      manifest.emplace_back("verb", "vardiv");
      manifest.emplace_back("alpha", std::to_string(vd_alpha));
      manifest.emplace_back("sizes", vd_sizes);
      manifest.emplace_back("reps", std::to_string(vd_reps));
      manifest.emplace_back("seed", std::to_string(seed));
      experiments::write_manifest(out_dir, manifest);
      std::printf("vardiv: slope=%.4f (candidates %.4f, %.4f) -> %s/vardiv.txt\n",
                  report.measured_slope, report.exponent_stated, report.exponent_maxterm,
                  out_dir.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
