#include "icprobe/repprobe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/SVD>

#include "icprobe/error.hpp"
#include "icprobe/hashing.hpp"
#include "icprobe/stats.hpp"
#include "icprobe/stimgen.hpp"

namespace icprobe::repprobe {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void ProbeConfig::Validate() const {
  if (!(pca_fraction > 0.0 && pca_fraction <= 1.0))
    throw ValidationError("pca_fraction must lie in (0, 1]");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw ValidationError("split_fraction must lie in (0, 1)");
  if (n_repeats < 1) throw ValidationError("n_repeats must be >= 1");
  if (!(lda_ridge >= 0.0) || !std::isfinite(lda_ridge))
    throw ValidationError("lda_ridge must be a finite non-negative number");
}

VerbEmbedding DecontextualizedEmbedding(scorer::Backend& backend, const lexicon::VerbEntry& verb,
                                        const lexicon::NamePool& pool) {
  const std::size_t word_index = lexicon::VerbWordIndex(verb);
  const auto pairs = stimgen::EnumerateNamePairs(pool);
  VerbEmbedding out{verb.id, {}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    scorer::EmbedRequest req{verb.id, i, lexicon::RenderFrame(verb, pairs[i].subject, pairs[i].object),
                             word_index};
    const auto v = backend.Embed(req);
    if (v.empty()) throw ProtocolError(verb.id + ": empty embedding");
    if (i == 0) {
      out.vector.assign(v.size(), 0.0);
    } else if (v.size() != out.vector.size()) {
      throw ValidationError(verb.id + ": embedding dimension mismatch across variants (" +
                            std::to_string(v.size()) + " vs " +
                            std::to_string(out.vector.size()) + ")");
    }
    for (std::size_t j = 0; j < v.size(); ++j) out.vector[j] += v[j];
  }
  for (double& x : out.vector) x /= static_cast<double>(pairs.size());
  return out;
}

std::size_t PcaComponents(std::size_t dim, double fraction) {
  const double k = std::nearbyint(fraction * static_cast<double>(dim));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

MatrixXd Pca::Transform(const MatrixXd& x) const {
  return (x.rowwise() - mean) * basis.transpose();
}

MatrixXd Pca::Reconstruct(const MatrixXd& z) const {
  return (z * basis).rowwise() + mean;
}

Pca PcaFitComponents(const MatrixXd& x, std::size_t k) {
  if (x.rows() < 2) throw ValidationError("PCA needs at least 2 rows");
  if (k == 0) throw ValidationError("PCA needs at least one component");
  Pca pca;
  pca.mean = x.colwise().mean();
  const MatrixXd centered = x.rowwise() - pca.mean;
  const std::size_t limit =
      std::min(static_cast<std::size_t>(x.rows() - 1), static_cast<std::size_t>(x.cols()));
  if (k > limit) {
    k = limit;
    pca.clamped = true;
  }
  Eigen::BDCSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  pca.basis = svd.matrixV().leftCols(static_cast<Eigen::Index>(k)).transpose();
  for (Eigen::Index r = 0; r < pca.basis.rows(); ++r) {
    Eigen::Index arg = 0;
    pca.basis.row(r).cwiseAbs().maxCoeff(&arg);
    if (pca.basis(r, arg) < 0.0) pca.basis.row(r) *= -1.0;
  }
  return pca;
}

Pca PcaFit(const MatrixXd& x, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("PCA fraction must lie in (0, 1]");
  return PcaFitComponents(x, PcaComponents(static_cast<std::size_t>(x.cols()), fraction));
}

VectorXd LinearModel::Predict(const MatrixXd& x) const {
  return (x * coefficients).array() + intercept;
}

LinearModel OlsFit(const MatrixXd& x, const VectorXd& y, double ridge) {
  if (x.rows() != y.size()) throw ValidationError("OLS: row count does not match targets");
  if (x.rows() == 0) throw ValidationError("OLS: no rows");
  MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;

  LinearModel model;
  VectorXd beta;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
  if (qr.rank() == design.cols()) {
    beta = qr.solve(y);
  } else if (ridge > 0.0) {
    MatrixXd gram = design.transpose() * design;
    gram.diagonal().tail(x.cols()).array() += ridge;  // intercept is not penalized
    beta = gram.ldlt().solve(design.transpose() * y);
    model.regularized = true;
  } else {
    beta = design.completeOrthogonalDecomposition().solve(y);
    model.regularized = true;
  }
  model.intercept = beta(0);
  model.coefficients = beta.tail(x.cols());
  return model;
}

LdaClass ClassOf(double bias) {
  if (bias > 0.0) return LdaClass::kPositive;
  if (bias < 0.0) return LdaClass::kNegative;
  return LdaClass::kZero;
}

LdaModel LdaFit(const MatrixXd& x, std::span<const LdaClass> classes, double ridge,
                std::span<const double> align_to) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (static_cast<std::size_t>(n) != classes.size())
    throw ValidationError("LDA: row count does not match labels");
  if (!align_to.empty() && align_to.size() != classes.size())
    throw ValidationError("LDA: alignment target length does not match rows");

  const Eigen::RowVectorXd overall = x.colwise().mean();
  MatrixXd within = MatrixXd::Zero(d, d);
  MatrixXd between = MatrixXd::Zero(d, d);
  std::size_t present = 0;
  for (LdaClass c : {LdaClass::kPositive, LdaClass::kNegative, LdaClass::kZero}) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (classes[static_cast<std::size_t>(i)] == c) rows.push_back(i);
    }
    if (rows.empty()) continue;
    ++present;
    MatrixXd members = x(rows, Eigen::all);
    const Eigen::RowVectorXd mu = members.colwise().mean();
    const MatrixXd centered = members.rowwise() - mu;
    within.noalias() += centered.transpose() * centered;
    const Eigen::RowVectorXd shift = mu - overall;
    between.noalias() += static_cast<double>(rows.size()) * shift.transpose() * shift;
  }
  if (present < 2) throw ValidationError("LDA needs at least two non-empty classes");

  const double scale = within.trace() / static_cast<double>(d);
  MatrixXd regularized = within;
  regularized.diagonal().array() += ridge * scale;

  Eigen::SelfAdjointEigenSolver<MatrixXd> check(regularized, Eigen::EigenvaluesOnly);
  const double max_ev = check.eigenvalues().maxCoeff();
  if (!(max_ev > 0.0) || check.eigenvalues().minCoeff() <= 1e-12 * max_ev)
    throw NumericalError("LDA: within-class scatter is singular; increase lda_ridge");

  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(between, regularized);
  if (ges.info() != Eigen::Success) throw NumericalError("LDA: eigen decomposition failed");
  VectorXd w = ges.eigenvectors().col(d - 1);
  w.normalize();
  Eigen::Index arg = 0;
  w.cwiseAbs().maxCoeff(&arg);
  if (w(arg) < 0.0) w = -w;

  LdaModel model{w};
  if (!align_to.empty()) {
    const VectorXd proj = model.Project(x);
    try {
      if (stats::SpearmanRho(std::span<const double>(proj.data(), proj.size()), align_to) < 0.0)
        model.direction = -model.direction;
    } catch (const NumericalError&) {
      // constant projection or target: no preferred sign
    }
  }
  return model;
}

Split RandomSplit(std::size_t n, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  SplitMix64 rng(seed);
  FisherYatesShuffle(std::span<std::size_t>(idx), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return s;
}

namespace {

std::vector<double> Gather(std::span<const double> v, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

std::vector<Eigen::Index> AsIndex(const std::vector<std::size_t>& idx) {
  return {idx.begin(), idx.end()};
}

bool Degenerate(std::span<const double> bias, const Split& split) {
  if (split.train.size() < 2 || split.test.size() < 3) return true;
  std::set<LdaClass> train_classes;
  for (auto i : split.train) train_classes.insert(ClassOf(bias[i]));
  if (train_classes.size() < 2) return true;
  const auto test = Gather(bias, split.test);
  return std::all_of(test.begin(), test.end(), [&](double b) { return b == test.front(); });
}

}  // namespace

RepeatResult ProbeSplit(const MatrixXd& x, std::span<const double> bias, const Split& split,
                        const ProbeConfig& config) {
  const MatrixXd train = x(AsIndex(split.train), Eigen::all);
  const MatrixXd test = x(AsIndex(split.test), Eigen::all);
  const auto y_train = Gather(bias, split.train);
  const auto y_test = Gather(bias, split.test);

  const Pca pca = PcaFit(train, config.pca_fraction);
  const MatrixXd z_train = pca.Transform(train);
  const MatrixXd z_test = pca.Transform(test);

  RepeatResult r;
  r.components = pca.components();

  const LinearModel lr = OlsFit(
      z_train, Eigen::Map<const VectorXd>(y_train.data(), static_cast<Eigen::Index>(y_train.size())),
      config.lda_ridge);
  r.lr_regularized = lr.regularized;
  const VectorXd lr_pred = lr.Predict(z_test);
  r.lr_rho = stats::SpearmanRho(std::span<const double>(lr_pred.data(), lr_pred.size()), y_test);

  std::vector<LdaClass> classes;
  for (double b : y_train) classes.push_back(ClassOf(b));
  const LdaModel lda = LdaFit(z_train, classes, config.lda_ridge, y_train);
  const VectorXd lda_proj = lda.Project(z_test);
  r.lda_rho =
      stats::SpearmanRho(std::span<const double>(lda_proj.data(), lda_proj.size()), y_test);
  return r;
}

MatrixXd ToMatrix(std::span<const VerbEmbedding> embeddings) {
  if (embeddings.empty()) return MatrixXd();
  const std::size_t d = embeddings.front().dim();
  MatrixXd x(static_cast<Eigen::Index>(embeddings.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (embeddings[i].dim() != d)
      throw ValidationError("embedding for '" + embeddings[i].verb_id + "' has dimension " +
                            std::to_string(embeddings[i].dim()) + ", expected " +
                            std::to_string(d));
    for (std::size_t j = 0; j < d; ++j) {
      const double v = embeddings[i].vector[j];
      if (!std::isfinite(v))
        throw ValidationError("embedding for '" + embeddings[i].verb_id + "' is not finite");
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return x;
}

ProbeReport RunProbe(std::span<const VerbEmbedding> embeddings, std::span<const double> human_bias,
                     const ProbeConfig& config) {
  config.Validate();
  if (embeddings.size() != human_bias.size())
    throw ValidationError("probe: embeddings and human bias differ in length");
  if (embeddings.size() < 6) throw ValidationError("probe needs at least 6 verbs");
  for (double b : human_bias) {
    if (!std::isfinite(b)) throw ValidationError("probe: human bias must be finite");
  }
  const MatrixXd x = ToMatrix(embeddings);

  ProbeReport report;
  report.per_repeat.reserve(config.n_repeats);
  for (std::size_t rep = 0; rep < config.n_repeats; ++rep) {
    const std::uint64_t repeat_seed = DeriveSeed(config.seed, rep);
    std::size_t resamples = 0;
    for (;;) {
      const Split split = RandomSplit(x.rows(), config.split_fraction,
                                      DeriveSeed(repeat_seed, resamples));
      if (!Degenerate(human_bias, split)) {
        try {
          RepeatResult r = ProbeSplit(x, human_bias, split, config);
          r.resamples = resamples;
          report.per_repeat.push_back(r);
          break;
        } catch (const NumericalError&) {
          // constant predictions on this split; draw another
        }
      }
      if (++resamples > kMaxResamples)
        throw NumericalError("probe: repeat " + std::to_string(rep) + " still degenerate after " +
                             std::to_string(kMaxResamples) + " resamples");
    }
    report.total_resamples += resamples;
  }
  for (const auto& r : report.per_repeat) {
    report.lr_mean_rho += r.lr_rho;
    report.lda_mean_rho += r.lda_rho;
  }
  report.lr_mean_rho /= static_cast<double>(report.per_repeat.size());
  report.lda_mean_rho /= static_cast<double>(report.per_repeat.size());
  return report;
}

}  // namespace icprobe::repprobe
