#pragma once

// Probing verb representations for IC bias: decontextualized verb vectors,
// PCA reduction, a least-squares regression probe and a Fisher LDA probe,
// evaluated over repeated random train/test splits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "icprobe/lexicon.hpp"
#include "icprobe/scorer.hpp"

namespace icprobe::repprobe {

struct VerbEmbedding {
  std::string verb_id;
  std::vector<double> vector;

  std::size_t dim() const { return vector.size(); }
  bool operator==(const VerbEmbedding&) const = default;
};

struct ProbeConfig {
  double pca_fraction = 0.05;
  std::size_t n_repeats = 100;
  double split_fraction = 0.5;
  double lda_ridge = 1e-6;
  std::uint64_t seed = 0;

  void Validate() const;  // ValidationError on out-of-range fields
};

/// Element-wise mean over the 200 name variants of the hidden state at the
/// verb's first subtoken, for sentences like "John praised Mary".
VerbEmbedding DecontextualizedEmbedding(scorer::Backend& backend, const lexicon::VerbEntry& verb,
                                        const lexicon::NamePool& pool);

// max(1, round-half-even(fraction * d))
std::size_t PcaComponents(std::size_t dim, double fraction);

struct Pca {
  Eigen::RowVectorXd mean;  // 1 x d
  Eigen::MatrixXd basis;    // k x d, orthonormal rows
  bool clamped = false;     // k was reduced to min(n - 1, d)

  std::size_t components() const { return static_cast<std::size_t>(basis.rows()); }
  Eigen::MatrixXd Transform(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd Reconstruct(const Eigen::MatrixXd& z) const;
};

/// Column-centred PCA from the thin SVD. Basis rows are the top right
/// singular vectors by singular value, each signed so that its largest
/// magnitude entry is positive. Requires at least 2 rows.
Pca PcaFit(const Eigen::MatrixXd& x, double fraction);
Pca PcaFitComponents(const Eigen::MatrixXd& x, std::size_t k);

struct LinearModel {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  bool regularized = false;  // design was rank deficient

  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const;
};

// Least squares with an intercept via column-pivoting QR; a rank-deficient
// design falls back to a ridge solve (or minimum norm when ridge == 0).
LinearModel OlsFit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge);

enum class LdaClass { kPositive, kNegative, kZero };
LdaClass ClassOf(double bias);

struct LdaModel {
  Eigen::VectorXd direction;  // unit norm

  Eigen::VectorXd Project(const Eigen::MatrixXd& x) const { return x * direction; }
};

/// Fisher direction: top generalized eigenvector of S_b w = l (S_w + r I) w,
/// where r = ridge * trace(S_w) / d keeps the fit scale invariant. Only
/// classes that occur contribute. When `align_to` is given the sign is
/// chosen so that Spearman(projection, align_to) >= 0 on the fitting rows.
/// Fewer than two classes or a singular S_w + r I throws.
LdaModel LdaFit(const Eigen::MatrixXd& x, std::span<const LdaClass> classes, double ridge,
                std::span<const double> align_to = {});

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle; the first floor(fraction * n) indices train.
Split RandomSplit(std::size_t n, double fraction, std::uint64_t seed);

struct RepeatResult {
  double lr_rho = 0.0;
  double lda_rho = 0.0;
  std::size_t resamples = 0;
  std::size_t components = 0;
  bool lr_regularized = false;
};

// Fit PCA, OLS and LDA on the training rows only and correlate on the test rows.
RepeatResult ProbeSplit(const Eigen::MatrixXd& x, std::span<const double> bias, const Split& split,
                        const ProbeConfig& config);

struct ProbeReport {
  double lr_mean_rho = 0.0;
  double lda_mean_rho = 0.0;
  std::vector<RepeatResult> per_repeat;
  std::size_t total_resamples = 0;
};

inline constexpr std::size_t kMaxResamples = 10;

ProbeReport RunProbe(std::span<const VerbEmbedding> embeddings, std::span<const double> human_bias,
                     const ProbeConfig& config);

Eigen::MatrixXd ToMatrix(std::span<const VerbEmbedding> embeddings);

}  // namespace icprobe::repprobe
