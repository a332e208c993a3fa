#pragma once

// Information-theoretic goodness of fit: binned Kullback-Leibler divergence,
// the 100-scaled information-distinguishability score (100 = perfect match),
// log-likelihood, AIC, and the two-model preference rule.
//
// Binning convention: 200 equal-probability bins under the fitted model,
// support clipped to the model's [0.001, 0.999] quantiles. Model bins then
// carry uniform mass by construction, which keeps tail bins stable; empirical
// mass outside the clip window is reported separately.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "heavytail/aep.hpp"
#include "heavytail/stable.hpp"

namespace heavytail::gof {

struct EmptySupport : std::runtime_error {
  explicit EmptySupport(const std::string& what) : std::runtime_error(what) {}
};

struct SupportMismatch : std::runtime_error {
  explicit SupportMismatch(const std::string& what) : std::runtime_error(what) {}
};

using FittedModel = std::variant<stable::StableParams, aep::AepParams>;

inline double model_quantile(const FittedModel& m, double q) {
  return std::visit([&](const auto& p) { return quantile(p, q); }, m);
}

inline double model_cdf(const FittedModel& m, double x) {
  return std::visit([&](const auto& p) { return cdf(p, x); }, m);
}

// Empirical vs model probabilities over shared bin edges.
struct BinnedDensityPair {
  std::vector<double> edges;  // size bins + 1
  std::vector<double> p;      // empirical bin probabilities, sum 1
  std::vector<double> q;      // model bin probabilities, renormalized on the clip window
  double below_mass = 0.0;    // empirical mass left of the window
  double above_mass = 0.0;    // empirical mass right of it
};

struct BinningOptions {
  std::size_t bins = 200;
  double clip_lo = 0.001;
  double clip_hi = 0.999;
};

// Build the pair for a sample against a fitted model: edges at the model's
// equally spaced quantiles over the clip window.
inline BinnedDensityPair bin_against_model(std::span<const double> sample, const FittedModel& model,
                                           const BinningOptions& opt = {}) {
  if (opt.bins < 2) throw std::invalid_argument("bin_against_model: need at least 2 bins");
  if (sample.empty()) throw std::invalid_argument("bin_against_model: empty sample");
  BinnedDensityPair pair;
  pair.edges.resize(opt.bins + 1);
  std::vector<double> probs(opt.bins + 1);
  for (std::size_t k = 0; k <= opt.bins; ++k) {
    probs[k] = opt.clip_lo + (opt.clip_hi - opt.clip_lo) * static_cast<double>(k) /
                                 static_cast<double>(opt.bins);
    pair.edges[k] = model_quantile(model, probs[k]);
  }
  std::vector<std::size_t> counts(opt.bins, 0);
  std::size_t below = 0, above = 0;
  for (double x : sample) {
    if (!std::isfinite(x)) throw std::invalid_argument("bin_against_model: sample must be finite");
    if (x < pair.edges.front()) {
      ++below;
    } else if (x > pair.edges.back()) {
      ++above;
    } else {
      const auto it = std::upper_bound(pair.edges.begin(), pair.edges.end(), x);
      std::size_t idx = static_cast<std::size_t>(it - pair.edges.begin());
      idx = idx == 0 ? 0 : idx - 1;
      if (idx >= opt.bins) idx = opt.bins - 1;
      ++counts[idx];
    }
  }
  const std::size_t inside = sample.size() - below - above;
  if (inside == 0) throw EmptySupport("bin_against_model: no sample mass inside the clip window");
  pair.p.resize(opt.bins);
  pair.q.resize(opt.bins);
  const double total_q = opt.clip_hi - opt.clip_lo;
  for (std::size_t k = 0; k < opt.bins; ++k) {
    pair.p[k] = static_cast<double>(counts[k]) / static_cast<double>(inside);
    pair.q[k] = (probs[k + 1] - probs[k]) / total_q;
  }
  pair.below_mass = static_cast<double>(below) / static_cast<double>(sample.size());
  pair.above_mass = static_cast<double>(above) / static_cast<double>(sample.size());
  return pair;
}

// D_KL(p || q) = sum_i p_i log(p_i / q_i), zero-count bins contribute zero.
inline double kl_divergence(const BinnedDensityPair& pair) {
  if (pair.p.size() != pair.q.size() || pair.p.empty())
    throw std::invalid_argument("kl_divergence: p and q must be aligned and nonempty");
  double sum_p = 0.0;
  for (double v : pair.p) sum_p += v;
  if (sum_p == 0.0) throw EmptySupport("kl_divergence: empirical distribution has no support");
  if (std::abs(sum_p - 1.0) > 1e-9)
    throw std::invalid_argument("kl_divergence: empirical probabilities must sum to 1");
  num::KahanSum kl;
  for (std::size_t i = 0; i < pair.p.size(); ++i) {
    if (pair.p[i] == 0.0) continue;
    if (pair.q[i] <= 0.0)
      throw SupportMismatch("kl_divergence: empirical mass on a bin with zero model mass");
    kl.add(pair.p[i] * std::log(pair.p[i] / pair.q[i]));
  }
  return std::max(kl.value(), 0.0);
}

// Soofi information-distinguishability score: 100 exp(-KL); 100 means the
// binned distributions are identical, lower means more distinguishable.
inline double soofi_id_score(const BinnedDensityPair& pair) {
  return std::clamp(100.0 * std::exp(-kl_divergence(pair)), 0.0, 100.0);
}

struct LogLikelihood {
  double value = 0.0;
  bool empty_sample = false;
};

// Sum of log densities. Stable models go through the cached inversion
// evaluator (quadrature density centrally, power tail far out); the AEP
// density is closed-form.
inline LogLikelihood log_likelihood(const FittedModel& model, std::span<const double> sample) {
  if (sample.empty()) return {0.0, true};
  num::KahanSum sum;
  if (std::holds_alternative<stable::StableParams>(model)) {
    const stable::DensityEvaluator eval(std::get<stable::StableParams>(model));
    for (double x : sample) {
      if (!std::isfinite(x)) throw std::invalid_argument("log_likelihood: sample must be finite");
      sum.add(eval.log_density(x));
    }
  } else {
    const auto& p = std::get<aep::AepParams>(model);
    for (double x : sample) {
      if (!std::isfinite(x)) throw std::invalid_argument("log_likelihood: sample must be finite");
      sum.add(aep::log_pdf(p, x));
    }
  }
  return {sum.value(), false};
}

// Akaike information criterion, 2k - 2 log L.
inline double aic(double loglik, int k) {
  if (k < 1) throw std::invalid_argument("aic: parameter count must be >= 1");
  return 2.0 * static_cast<double>(k) - 2.0 * loglik;
}

struct ModelScore {
  double sids = 0.0;
  double aic = 0.0;
};

struct ModelComparison {
  double levy_sids = 0.0, levy_aic = 0.0;
  double aep_sids = 0.0, aep_aic = 0.0;
  double delta_sids = 0.0;  // levy - aep
  double delta_aic = 0.0;   // levy - aep, negative favors the stable model
  std::string preferred;    // "levy", "aep", "even", or "-"
};

// Preference rule: a model qualifies only with SIDS > 95. With one qualifier
// the choice is forced; with both, the model that is at least as good in both
// SIDS and AIC (and better in one) wins, disagreement is "even"; with none,
// no preference is expressed.
inline ModelComparison compare_models(const ModelScore& levy, const ModelScore& aep) {
  ModelComparison c;
  c.levy_sids = levy.sids;
  c.levy_aic = levy.aic;
  c.aep_sids = aep.sids;
  c.aep_aic = aep.aic;
  c.delta_sids = levy.sids - aep.sids;
  c.delta_aic = levy.aic - aep.aic;
  const bool elig_levy = levy.sids > 95.0;
  const bool elig_aep = aep.sids > 95.0;
  if (!elig_levy && !elig_aep) {
    c.preferred = "-";
  } else if (elig_levy != elig_aep) {
    c.preferred = elig_levy ? "levy" : "aep";
  } else {
    const double ds = c.delta_sids;        // > 0 favors levy
    const double da = -c.delta_aic;        // > 0 favors levy
    if (ds == 0.0 && da == 0.0)
      c.preferred = "even";
    else if (ds >= 0.0 && da >= 0.0)
      c.preferred = "levy";
    else if (ds <= 0.0 && da <= 0.0)
      c.preferred = "aep";
    else
      c.preferred = "even";
  }
  return c;
}

}  // namespace heavytail::gof
