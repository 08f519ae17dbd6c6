#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "icprobe/biasmetrics.hpp"

namespace icprobe::stats {

inline constexpr std::size_t kDefaultPermutations = 10000;
inline constexpr double kSignificanceLevel = 0.001;

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

// Throws NumericalError if either input has zero variance.
double Pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average ranks. Requires |x| = |y| >= 3 and finite
/// entries (ValidationError); zero rank variance throws NumericalError.
double SpearmanRho(std::span<const double> x, std::span<const double> y);

/// Two-sided permutation test for Spearman's rho.
///
/// Permutation i shuffles y with Fisher-Yates driven by
/// SplitMix64(DeriveSeed(seed, i)), so the result does not depend on how
/// permutations are scheduled. p = (1 + #{|rho*| >= |rho|}) / (n_perm + 1).
double PermutationPValue(std::span<const double> x, std::span<const double> y,
                         std::size_t n_perm = kDefaultPermutations, std::uint64_t seed = 0);

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool significant = false;  // p < 0.001
};

CorrelationResult Correlate(std::span<const double> x, std::span<const double> y,
                            std::size_t n_perm = kDefaultPermutations, std::uint64_t seed = 0);

/// Micro-averaged F1 over polarity labels. Each item has exactly one
/// predicted and one gold label, so this equals accuracy; a Zero
/// prediction never matches (gold labels are S or O only).
double MicroF1(std::span<const biasmetrics::Polarity> predicted,
               std::span<const biasmetrics::Polarity> gold);

}  // namespace icprobe::stats
