#include "icprobe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icprobe/error.hpp"
#include "icprobe/hashing.hpp"

namespace icprobe::stats {

namespace {

void CheckPair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ValidationError("correlation inputs differ in length (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  if (x.size() < 3) throw ValidationError("correlation needs at least 3 pairs");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(x.begin(), x.end(), finite) || !std::all_of(y.begin(), y.end(), finite))
    throw ValidationError("correlation inputs must be finite");
}

std::vector<double> Centered(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x -= mean;
  return out;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  const auto cx = Centered(x);
  const auto cy = Centered(y);
  const double sxx = Dot(cx, cx);
  const double syy = Dot(cy, cy);
  if (sxx <= 0.0 || syy <= 0.0) throw NumericalError("correlation undefined: zero variance");
  return std::clamp(Dot(cx, cy) / std::sqrt(sxx * syy), -1.0, 1.0);
}

double SpearmanRho(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y);
  return Pearson(AverageRanks(x), AverageRanks(y));
}

double PermutationPValue(std::span<const double> x, std::span<const double> y,
                         std::size_t n_perm, std::uint64_t seed) {
  CheckPair(x, y);
  const auto rx = Centered(AverageRanks(x));
  const auto ry = Centered(AverageRanks(y));
  const double denom = std::sqrt(Dot(rx, rx) * Dot(ry, ry));
  if (denom <= 0.0) throw NumericalError("correlation undefined: zero variance");
  const double observed = std::abs(Dot(rx, ry) / denom);
  // Guards against rounding in the re-summed dot product of an identical ordering.
  constexpr double kTolerance = 1e-12;

  std::size_t extreme = 0;
  std::vector<double> shuffled(ry.size());
  for (std::size_t i = 0; i < n_perm; ++i) {
    std::copy(ry.begin(), ry.end(), shuffled.begin());
    SplitMix64 rng(DeriveSeed(seed, i));
    FisherYatesShuffle(std::span<double>(shuffled), rng);
    if (std::abs(Dot(rx, shuffled) / denom) >= observed - kTolerance) ++extreme;
  }
  return static_cast<double>(1 + extreme) / static_cast<double>(n_perm + 1);
}

CorrelationResult Correlate(std::span<const double> x, std::span<const double> y,
                            std::size_t n_perm, std::uint64_t seed) {
  CorrelationResult r;
  r.rho = SpearmanRho(x, y);
  r.p_value = PermutationPValue(x, y, n_perm, seed);
  r.n = x.size();
  r.significant = r.p_value < kSignificanceLevel;
  return r;
}

double MicroF1(std::span<const biasmetrics::Polarity> predicted,
               std::span<const biasmetrics::Polarity> gold) {
  if (predicted.size() != gold.size())
    throw ValidationError("micro F1: prediction and gold lengths differ (" +
                          std::to_string(predicted.size()) + " vs " +
                          std::to_string(gold.size()) + ")");
  if (gold.empty()) throw ValidationError("micro F1: no items");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == biasmetrics::Polarity::kZero)
      throw ValidationError("micro F1: gold labels must be S or O");
    correct += predicted[i] == gold[i];
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

}  // namespace icprobe::stats
