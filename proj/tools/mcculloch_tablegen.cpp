// Regenerates include/heavytail/mcculloch_tables.hpp.
//
// The quantile estimator maps the index statistics
//   nu_alpha = (q95 - q05) / (q75 - q25)
//   nu_beta  = (q95 + q05 - 2 q50) / (q95 - q05)
// through tabulated inverse functions to (alpha, beta), then reads the scale
// and location corrections from forward tables. This tool computes all four
// tables at double precision from the library's own S0 quantile function on
// the canonical grid axes: the inverse tables on the nu grid, the forward
// tables on the (alpha, beta) grid. Nodes in the corner where no skew can
// reproduce the requested nu_beta (alpha near 2) carry linearly extrapolated
// pseudo-values so that bilinear interpolation behaves; the estimator clamps
// final estimates to the admissible box.

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "heavytail/parallel.hpp"
#include "heavytail/stable.hpp"

using heavytail::stable::StableParams;

namespace {

struct QuantSet {
  double q05, q25, q50, q75, q95;
  double nu_alpha() const { return (q95 - q05) / (q75 - q25); }
  double nu_beta() const { return (q95 + q05 - 2.0 * q50) / (q95 - q05); }
};

QuantSet quantiles_at(double alpha, double beta) {
  const StableParams p(alpha, beta, 1.0, 0.0);
  return {heavytail::stable::quantile(p, 0.05), heavytail::stable::quantile(p, 0.25),
          heavytail::stable::quantile(p, 0.50), heavytail::stable::quantile(p, 0.75),
          heavytail::stable::quantile(p, 0.95)};
}

// Dense forward-map cache with bilinear evaluation.
struct ForwardMap {
  std::vector<double> alphas, betas;
  std::vector<QuantSet> grid;  // row-major [alpha][beta]

  const QuantSet& at(std::size_t i, std::size_t j) const { return grid[i * betas.size() + j]; }

  double bilinear(double a, double b, double (QuantSet::*f)() const) const {
    a = std::clamp(a, alphas.front(), alphas.back());
    b = std::clamp(b, betas.front(), betas.back());
    std::size_t i = 0, j = 0;
    while (i + 2 < alphas.size() && alphas[i + 1] <= a) ++i;
    while (j + 2 < betas.size() && betas[j + 1] <= b) ++j;
    const double ta = (a - alphas[i]) / (alphas[i + 1] - alphas[i]);
    const double tb = (b - betas[j]) / (betas[j + 1] - betas[j]);
    const double v00 = (at(i, j).*f)(), v10 = (at(i + 1, j).*f)();
    const double v01 = (at(i, j + 1).*f)(), v11 = (at(i + 1, j + 1).*f)();
    return (1 - ta) * ((1 - tb) * v00 + tb * v01) + ta * ((1 - tb) * v10 + tb * v11);
  }

  double nu_a(double a, double b) const { return bilinear(a, b, &QuantSet::nu_alpha); }
  double nu_b(double a, double b) const { return bilinear(a, b, &QuantSet::nu_beta); }
};

// Solve beta in [0,1] with nu_beta(alpha, beta) = target; returns > 1
// (extrapolated) when the target is unreachable at this alpha.
double solve_beta(const ForwardMap& fm, double alpha, double target) {
  if (target <= 0.0) return 0.0;
  const double at_max = fm.nu_b(alpha, 1.0);
  if (at_max <= target) {
    const double at_near = fm.nu_b(alpha, 0.95);
    const double slope = (at_max - at_near) / 0.05;
    if (slope <= 1e-9) return 2.5;  // beta unidentified (alpha at the Gaussian boundary)
    return std::min(2.5, 1.0 + (target - at_max) / slope);
  }
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fm.nu_b(alpha, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Solve (alpha, beta) from (nu_alpha, nu_beta) via nested bisection on the
// forward cache.
std::pair<double, double> invert(const ForwardMap& fm, double nu_a_target, double nu_b_target) {
  auto g = [&](double alpha) {
    const double b = std::min(solve_beta(fm, alpha, nu_b_target), 1.0);
    return fm.nu_a(alpha, b) - nu_a_target;
  };
  double lo = 0.5, hi = 2.0;  // nu_alpha decreases in alpha
  if (g(hi) >= 0.0) return {2.0, solve_beta(fm, 2.0, nu_b_target)};
  if (g(lo) <= 0.0) return {0.5, solve_beta(fm, 0.5, nu_b_target)};
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);
  return {alpha, solve_beta(fm, alpha, nu_b_target)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : "include/heavytail/mcculloch_tables.hpp";

  // Dense forward cache.
  ForwardMap fm;
  for (double a = 0.5; a <= 2.0 + 1e-9; a += 0.025) fm.alphas.push_back(a);
  fm.alphas.back() = 2.0;
  for (double b = 0.0; b <= 1.0 + 1e-9; b += 0.05) fm.betas.push_back(b);
  fm.betas.back() = 1.0;
  fm.grid.resize(fm.alphas.size() * fm.betas.size());
  heavytail::par::parallel_for(fm.grid.size(), [&](std::size_t k) {
    const std::size_t i = k / fm.betas.size(), j = k % fm.betas.size();
    fm.grid[k] = quantiles_at(fm.alphas[i], fm.betas[j]);
  });
  std::fprintf(stderr, "forward map done (%zu nodes)\n", fm.grid.size());

  const std::array<double, 15> nu_alpha_axis = {2.439, 2.5, 2.6, 2.7, 2.8, 3.0, 3.2, 3.5,
                                                4.0,   5.0, 6.0, 8.0, 10.0, 15.0, 25.0};
  const std::array<double, 7> nu_beta_axis = {0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
  std::array<std::array<double, 7>, 15> alpha_tab{}, beta_tab{};
  for (std::size_t i = 0; i < nu_alpha_axis.size(); ++i)
    for (std::size_t j = 0; j < nu_beta_axis.size(); ++j) {
      const auto [a, b] = invert(fm, nu_alpha_axis[i], nu_beta_axis[j]);
      alpha_tab[i][j] = a;
      beta_tab[i][j] = b;
    }
  std::fprintf(stderr, "inverse tables done\n");

  // Forward correction tables on the published (alpha, beta) axes, exact
  // quantile evaluations (not the interpolated cache).
  std::array<double, 16> alpha_axis{};
  for (int i = 0; i < 16; ++i) alpha_axis[i] = 0.5 + 0.1 * i;
  alpha_axis[15] = 2.0;
  const std::array<double, 5> beta_axis = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::array<std::array<double, 5>, 16> scale_tab{}, loc_tab{};
  std::vector<std::pair<int, int>> nodes;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 5; ++j) nodes.emplace_back(i, j);
  std::vector<QuantSet> qsets(nodes.size());
  heavytail::par::parallel_for(nodes.size(), [&](std::size_t k) {
    qsets[k] = quantiles_at(alpha_axis[nodes[k].first], beta_axis[nodes[k].second]);
  });
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto [i, j] = nodes[k];
    scale_tab[i][j] = qsets[k].q75 - qsets[k].q25;  // IQR of the standardized law
    loc_tab[i][j] = -qsets[k].q50;                  // (delta0 - median) / gamma
  }
  std::fprintf(stderr, "forward tables done\n");

  std::FILE* out = std::fopen(out_path.c_str(), "w");
  if (!out) {
    std::fprintf(stderr, "cannot open %s\n", out_path.c_str());
    return 1;
  }
  std::fprintf(out,
               "#pragma once\n\n"
               "// Lookup tables for quantile-based S0 stable estimation, computed at\n"
               "// double precision on the canonical grid axes by tools/mcculloch_tablegen.\n"
               "// Do not edit by hand; regenerate with that tool.\n\n"
               "#include <array>\n\n"
               "namespace heavytail::estimation::tables {\n\n");

  auto emit_axis = [&](const char* name, const double* v, std::size_t n) {
    std::fprintf(out, "inline constexpr std::array<double, %zu> %s = {", n, name);
    for (std::size_t i = 0; i < n; ++i) std::fprintf(out, "%s%.17g", i ? ", " : "", v[i]);
    std::fprintf(out, "};\n\n");
  };
  auto emit_table = [&](const char* name, const double* v, std::size_t rows, std::size_t cols) {
    std::fprintf(out, "inline constexpr std::array<std::array<double, %zu>, %zu> %s = {{\n", cols,
                 rows, name);
    for (std::size_t i = 0; i < rows; ++i) {
      std::fprintf(out, "    {{");
      for (std::size_t j = 0; j < cols; ++j)
        std::fprintf(out, "%s%.9g", j ? ", " : "", v[i * cols + j]);
      std::fprintf(out, "}},\n");
    }
    std::fprintf(out, "}};\n\n");
  };

  emit_axis("nu_alpha_axis", nu_alpha_axis.data(), nu_alpha_axis.size());
  emit_axis("nu_beta_axis", nu_beta_axis.data(), nu_beta_axis.size());
  emit_table("alpha_table", &alpha_tab[0][0], 15, 7);
  emit_table("beta_table", &beta_tab[0][0], 15, 7);
  emit_axis("alpha_axis", alpha_axis.data(), alpha_axis.size());
  emit_axis("beta_axis", beta_axis.data(), beta_axis.size());
  emit_table("scale_table", &scale_tab[0][0], 16, 5);
  emit_table("location_table", &loc_tab[0][0], 16, 5);
  std::fprintf(out, "}  // namespace heavytail::estimation::tables\n");
  std::fclose(out);
  std::fprintf(stderr, "wrote %s\n", out_path.c_str());
  return 0;
}
