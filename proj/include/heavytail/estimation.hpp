#pragma once

// Quantile-based estimation of S0 stable parameters from data.
//
// The estimator maps two quantile-ratio index statistics
//   nu_alpha = (q95 - q05) / (q75 - q25)
//   nu_beta  = (q95 + q05 - 2 q50) / (q95 - q05)
// through tabulated inverse functions to (alpha, beta) by bilinear
// interpolation, reads the interquantile-spread factor to get gamma, and the
// median-offset correction to get the location. The tabulated location is
// already the S0 delta (the method's zeta equals the S0 location; converting
// through the S1 parametrization and back cancels analytically), so no
// further shift is applied. Estimates landing outside the admissible box are
// clamped and flagged rather than silently accepted.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "heavytail/aep.hpp"
#include "heavytail/gof.hpp"
#include "heavytail/mcculloch_tables.hpp"
#include "heavytail/stable.hpp"

namespace heavytail::estimation {

struct TooFewObservations : std::runtime_error {
  explicit TooFewObservations(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSpread : std::runtime_error {
  explicit DegenerateSpread(const std::string& what) : std::runtime_error(what) {}
};

// Order statistics consumed by the quantile method.
struct QuantileSummary {
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
  std::size_t n = 0;
};

// Type-7 (linear interpolation of order statistics) empirical quantile.
inline double quantile_type7(std::span<const double> sorted, double p) {
  const std::size_t n = sorted.size();
  const double h = (static_cast<double>(n) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

inline QuantileSummary empirical_quantiles(std::span<const double> sample) {
  if (sample.size() < 5)
    throw TooFewObservations("empirical_quantiles: need at least 5 observations");
  std::vector<double> s(sample.begin(), sample.end());
  for (double v : s)
    if (!std::isfinite(v))
      throw std::invalid_argument("empirical_quantiles: sample must be finite");
  std::sort(s.begin(), s.end());
  QuantileSummary qs;
  qs.n = s.size();
  qs.q05 = quantile_type7(s, 0.05);
  qs.q25 = quantile_type7(s, 0.25);
  qs.q50 = quantile_type7(s, 0.50);
  qs.q75 = quantile_type7(s, 0.75);
  qs.q95 = quantile_type7(s, 0.95);
  return qs;
}

namespace detail {

template <std::size_t Rows, std::size_t Cols>
double bilinear(const std::array<double, Rows>& xs, const std::array<double, Cols>& ys,
                const std::array<std::array<double, Cols>, Rows>& table, double x, double y) {
  x = std::clamp(x, xs.front(), xs.back());
  y = std::clamp(y, ys.front(), ys.back());
  std::size_t i = 0, j = 0;
  while (i + 2 < Rows && xs[i + 1] <= x) ++i;
  while (j + 2 < Cols && ys[j + 1] <= y) ++j;
  const double tx = (x - xs[i]) / (xs[i + 1] - xs[i]);
  const double ty = (y - ys[j]) / (ys[j + 1] - ys[j]);
  return (1 - tx) * ((1 - ty) * table[i][j] + ty * table[i][j + 1]) +
         tx * ((1 - ty) * table[i + 1][j] + ty * table[i + 1][j + 1]);
}

}  // namespace detail

struct McFlags {
  bool alpha_clamped = false;  // estimate hit the [0.5, 2.0] boundary
  bool beta_clamped = false;   // skew pinned at +-1 (boundary point estimate)
  bool index_clamped = false;  // nu statistics fell outside the table grid
};

struct McResult {
  stable::StableParams params;
  McFlags flags;
  QuantileSummary quantiles;
};

inline constexpr std::size_t mcculloch_min_n = 1000;

// Full quantile-method fit with clamp flags.
inline McResult mcculloch_fit_detailed(std::span<const double> sample) {
  if (sample.size() < mcculloch_min_n)
    throw TooFewObservations("mcculloch_fit: need at least 1000 observations, got " +
                             std::to_string(sample.size()));
  const QuantileSummary qs = empirical_quantiles(sample);
  const double iqr = qs.q75 - qs.q25;
  if (!(iqr > 0.0)) throw DegenerateSpread("mcculloch_fit: interquartile range is zero");
  const double wide = qs.q95 - qs.q05;

  double nu_a = wide / iqr;
  double nu_b = (qs.q95 + qs.q05 - 2.0 * qs.q50) / wide;
  const double flip = nu_b < 0.0 ? -1.0 : 1.0;
  double nb = std::min(std::abs(nu_b), 1.0);

  McFlags flags;
  namespace tbl = tables;
  if (nu_a < tbl::nu_alpha_axis.front() || nu_a > tbl::nu_alpha_axis.back())
    flags.index_clamped = true;
  nu_a = std::clamp(nu_a, tbl::nu_alpha_axis.front(), tbl::nu_alpha_axis.back());

  double alpha = detail::bilinear(tbl::nu_alpha_axis, tbl::nu_beta_axis, tbl::alpha_table, nu_a, nb);
  double beta = detail::bilinear(tbl::nu_alpha_axis, tbl::nu_beta_axis, tbl::beta_table, nu_a, nb);
  if (alpha < 0.5 || alpha > 2.0) {
    alpha = std::clamp(alpha, 0.5, 2.0);
    flags.alpha_clamped = true;
  }
  // The inverse skew map is ill-conditioned approaching maximal skew, and a
  // fitted |beta| = 1 with alpha >= 1 puts zero mass on one half line, which
  // no finite sample supports. Estimates are pinned to +-0.95 and flagged as
  // boundary values.
  if (beta > 0.95) {
    beta = 0.95;
    flags.beta_clamped = true;
  }
  beta *= flip;

  const double ab = std::abs(beta);
  const double spread = detail::bilinear(tbl::alpha_axis, tbl::beta_axis, tbl::scale_table, alpha, ab);
  const double gamma = iqr / spread;
  const double nu_zeta =
      detail::bilinear(tbl::alpha_axis, tbl::beta_axis, tbl::location_table, alpha, ab);
  const double delta = qs.q50 + gamma * (beta >= 0.0 ? nu_zeta : -nu_zeta);

  return {stable::StableParams(alpha, beta, gamma, delta), flags, qs};
}

inline stable::StableParams mcculloch_fit(std::span<const double> sample) {
  return mcculloch_fit_detailed(sample).params;
}

// ---------------------------------------------------------------------------
// Subsample fitting with size gates.

enum class ModelKind { levy, aep };

inline const char* model_name(ModelKind m) { return m == ModelKind::levy ? "levy" : "aep"; }

// (variable, year, region); year < 0 or region "all" mean pooled.
struct SubsampleKey {
  std::string variable;
  int year = -1;
  std::string region = "all";

  bool pooled_years() const { return year < 0; }
  bool pooled_regions() const { return region == "all" || region.empty(); }
};

// Minimum observations per subsample class: national-year fits face the
// strictest gate, region-pooled the loosest.
struct GateConfig {
  std::size_t national_year = 10000;
  std::size_t region_year = 5000;
  std::size_t region_pooled = 1000;

  std::size_t gate_for(const SubsampleKey& key) const {
    if (key.pooled_regions()) return national_year;
    if (!key.pooled_years()) return region_year;
    return region_pooled;
  }
};

struct FitResult {
  std::variant<stable::StableParams, aep::AepParams> params{
      stable::StableParams(2.0, 0.0, 1.0, 0.0)};
  std::size_t n = 0;
  double sids = 0.0;
  double aic = 0.0;
  double loglik = 0.0;
  SubsampleKey key;
  McFlags flags;  // meaningful for the stable fit only
};

enum class FitStatus { ok, skipped, failed };

struct SubsampleFit {
  FitStatus status = FitStatus::skipped;
  std::optional<FitResult> result;
  std::string message;
};

// Fit one subsample with the requested model and score it. A gate failure
// yields a skipped record; estimation errors yield a failed record.
inline SubsampleFit fit_subsample(std::span<const double> values, SubsampleKey key, ModelKind model,
                                  const GateConfig& gates = {}) {
  SubsampleFit out;
  const std::size_t gate = gates.gate_for(key);
  if (values.size() < gate) {
    out.status = FitStatus::skipped;
    out.message = "below gate (" + std::to_string(values.size()) + " < " + std::to_string(gate) + ")";
    return out;
  }
  try {
    FitResult fr;
    fr.key = std::move(key);
    fr.n = values.size();
    if (model == ModelKind::levy) {
      const McResult mc = mcculloch_fit_detailed(values);
      fr.params = mc.params;
      fr.flags = mc.flags;
    } else {
      fr.params = aep::fit_lmoments(values);
    }
    const gof::FittedModel fitted =
        model == ModelKind::levy
            ? gof::FittedModel(std::get<stable::StableParams>(fr.params))
            : gof::FittedModel(std::get<aep::AepParams>(fr.params));
    fr.sids = gof::soofi_id_score(gof::bin_against_model(values, fitted));
    fr.loglik = gof::log_likelihood(fitted, values).value;
    fr.aic = gof::aic(fr.loglik, 4);
    out.status = FitStatus::ok;
    out.result = std::move(fr);
  } catch (const std::exception& e) {
    out.status = FitStatus::failed;
    out.message = e.what();
  }
  return out;
}

// Score-level comparison of two fits of the same sample.
inline gof::ModelComparison compare_models(const FitResult& levy, const FitResult& aep_fit) {
  return gof::compare_models({levy.sids, levy.aic}, {aep_fit.sids, aep_fit.aic});
}

}  // namespace heavytail::estimation
