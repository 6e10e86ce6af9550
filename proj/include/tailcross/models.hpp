#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "tailcross/cte.hpp"
#include "tailcross/errors.hpp"
#include "tailcross/estimators.hpp"
#include "tailcross/rng.hpp"

namespace tailcross {

// ---------------------------------------------------------------------------
// Windowed time-series datasets
// ---------------------------------------------------------------------------

struct Dataset {
  Eigen::MatrixXd inputs;   // one row per example
  Eigen::VectorXd targets;

  std::size_t size() const { return static_cast<std::size_t>(targets.size()); }

  Dataset rows(const std::vector<std::size_t>& idx) const {
    Dataset out;
    out.inputs.resize(static_cast<Eigen::Index>(idx.size()), inputs.cols());
    out.targets.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.inputs.row(static_cast<Eigen::Index>(i)) =
          inputs.row(static_cast<Eigen::Index>(idx[i]));
      out.targets(static_cast<Eigen::Index>(i)) =
          targets(static_cast<Eigen::Index>(idx[i]));
    }
    return out;
  }
};

/// Sliding windows: inputs are `width` consecutive values, the target is the
/// value that follows.
inline Dataset window(const std::vector<double>& series,
                      std::size_t width = 2) {
  if (width < 1) throw domain_error("window: width must be >= 1");
  if (series.size() <= width)
    throw insufficient_samples_error("window: series shorter than width + 1");
  const std::size_t rows = series.size() - width;
  Dataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(width));
  ds.targets.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c)
      ds.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          series[r + c];
    ds.targets(static_cast<Eigen::Index>(r)) = series[r + width];
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Input standardization (statistics from the training subset only)
// ---------------------------------------------------------------------------

struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;  // 1 substituted for zero-variance columns

  static Standardizer fit(const Eigen::MatrixXd& X) {
    Standardizer s;
    s.mean = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - s.mean;
    s.scale = (centered.array().square().colwise().mean()).sqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j)
      if (s.scale(j) <= 0.0) s.scale(j) = 1.0;
    return s;
  }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const {
    return (X.rowwise() - mean).array().rowwise() / scale.array();
  }
};

// ---------------------------------------------------------------------------
// Exact Gaussian-process regression, squared-exponential kernel
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::MatrixXd se_kernel(const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B,
                                 double length_scale) {
  const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * A * B.transpose();
  d2.colwise() += a2;
  d2.rowwise() += b2.transpose();
  return (-d2.array() / (2.0 * length_scale * length_scale)).exp();
}

inline Eigen::MatrixXd poly_kernel(const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& B, double offset,
                                   unsigned degree) {
  return ((A * B.transpose()).array() + offset)
      .pow(static_cast<double>(degree));
}

/// Cholesky solve with escalating regularization: starts at `jitter0` and
/// multiplies by 10 until the factorization succeeds or the value passes
/// 1e-2.
inline Eigen::VectorXd jittered_solve(const Eigen::MatrixXd& K,
                                      const Eigen::VectorXd& y,
                                      double jitter0 = 1e-6) {
  for (double jitter = jitter0; jitter <= 1e-2 * (1.0 + 1e-12);
       jitter *= 10.0) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) return llt.solve(y);
  }
  throw ill_conditioned_error("kernel matrix not positive definite");
}

}  // namespace detail

struct GpModel {
  double length_scale = 1.0;
  Standardizer standardizer;
  Eigen::MatrixXd train_inputs;  // standardized
  Eigen::VectorXd weights;       // (K + jitter I)^{-1} y

  Eigen::VectorXd predict(const Eigen::MatrixXd& inputs) const {
    const Eigen::MatrixXd Xs = standardizer.transform(inputs);
    return detail::se_kernel(Xs, train_inputs, length_scale) * weights;
  }
};

inline GpModel gp_fit(const Dataset& train, double length_scale,
                      double noise_variance = 1e-6) {
  if (!(length_scale > 0.0))
    throw domain_error("gp_fit: length scale must be positive");
  if (!(noise_variance >= 1e-10))
    throw domain_error("gp_fit: noise variance must be >= 1e-10");
  if (train.size() < 1)
    throw insufficient_samples_error("gp_fit: need at least 1 example");
  GpModel m;
  m.length_scale = length_scale;
  m.standardizer = Standardizer::fit(train.inputs);
  m.train_inputs = m.standardizer.transform(train.inputs);
  m.weights = detail::jittered_solve(
      detail::se_kernel(m.train_inputs, m.train_inputs, length_scale),
      train.targets, noise_variance);
  return m;
}

// ---------------------------------------------------------------------------
// Kernel ridge regression, polynomial kernel (x . x' + offset)^degree
// ---------------------------------------------------------------------------

struct KrrModel {
  unsigned degree = 1;
  double offset = 1.0;
  Standardizer standardizer;
  Eigen::MatrixXd train_inputs;
  Eigen::VectorXd weights;

  Eigen::VectorXd predict(const Eigen::MatrixXd& inputs) const {
    const Eigen::MatrixXd Xs = standardizer.transform(inputs);
    return detail::poly_kernel(Xs, train_inputs, offset, degree) * weights;
  }
};

inline KrrModel krr_fit(const Dataset& train, unsigned degree,
                        double offset = 1.0, double ridge = 1e-6) {
  if (degree < 1) throw domain_error("krr_fit: degree must be >= 1");
  if (!(ridge > 0.0)) throw domain_error("krr_fit: ridge must be positive");
  if (train.size() < 1)
    throw insufficient_samples_error("krr_fit: need at least 1 example");
  KrrModel m;
  m.degree = degree;
  m.offset = offset;
  m.standardizer = Standardizer::fit(train.inputs);
  m.train_inputs = m.standardizer.transform(train.inputs);
  Eigen::MatrixXd K =
      detail::poly_kernel(m.train_inputs, m.train_inputs, offset, degree);
  K.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw ill_conditioned_error("krr_fit: kernel matrix not positive definite");
  m.weights = llt.solve(train.targets);
  return m;
}

// ---------------------------------------------------------------------------
// Monte Carlo cross-validation and the prediction-tail harness
// ---------------------------------------------------------------------------

/// Fits a predictor on a dataset; returns a callable mapping an input matrix
/// to a prediction vector.
using Trainer = std::function<std::function<Eigen::VectorXd(
    const Eigen::MatrixXd&)>(const Dataset&)>;

inline double mse(const Eigen::VectorXd& predictions,
                  const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size() || predictions.size() == 0)
    throw domain_error("mse: size mismatch or empty");
  return (predictions - targets).squaredNorm() /
         static_cast<double>(targets.size());
}

/// One random train/validation split: the first `train_size` entries of a
/// seeded permutation train, the rest validate.
inline double mc_cv_mse_once(const Dataset& data, const Trainer& trainer,
                             std::size_t train_size, RngStream& rng) {
  if (train_size < 2 || train_size >= data.size())
    throw domain_error("mc_cv: train size must lie in [2, n)");
  std::vector<std::size_t> perm(data.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);
  std::vector<std::size_t> train_idx(perm.begin(),
                                     perm.begin() +
                                         static_cast<std::ptrdiff_t>(train_size));
  std::vector<std::size_t> valid_idx(
      perm.begin() + static_cast<std::ptrdiff_t>(train_size), perm.end());
  const Dataset train = data.rows(train_idx);
  const Dataset valid = data.rows(valid_idx);
  auto predictor = trainer(train);
  return mse(predictor(valid.inputs), valid.targets);
}

inline double mc_cv_mse(const Dataset& data, const Trainer& trainer,
                        std::size_t train_size, std::size_t repeats,
                        RngStream& rng) {
  if (repeats < 1) throw domain_error("mc_cv: repeats must be >= 1");
  double total = 0.0;
  for (std::size_t r = 0; r < repeats; ++r) {
    RngStream sub = rng.fork(r);
    total += mc_cv_mse_once(data, trainer, train_size, sub);
  }
  return total / static_cast<double>(repeats);
}

struct HarnessConfig {
  std::size_t train_size = 340;
  std::size_t draws = 100;       // training-set draws (conditionals)
  EstimatorConfig estimator{EstimatorKind::dedh, {}, 5};
};

struct HarnessResult {
  CteResult cte;          // max over per-draw split-averaged estimates
  SplitResult pooled;     // split-averaged estimate on the pooled |preds|
  double mean_mse = 0.0;  // validation MSE averaged over draws
};

/// Prediction-tail harness: repeatedly refits the model on random training
/// subsets, predicts the whole dataset, and estimates the tail shape of the
/// absolute predictions per draw (reduced by max) and pooled across draws.
inline HarnessResult prediction_tail_harness(const Dataset& data,
                                             const Trainer& trainer,
                                             const HarnessConfig& config,
                                             RngStream& rng) {
  if (config.draws < 1)
    throw domain_error("prediction_tail_harness: draws must be >= 1");
  if (config.train_size < 2 || config.train_size >= data.size())
    throw domain_error("prediction_tail_harness: train size must lie in [2, n)");
  std::vector<ConditionalSamples> per_draw;
  double total_mse = 0.0;
  for (std::size_t d = 0; d < config.draws; ++d) {
    RngStream sub = rng.fork(d);
    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    sub.shuffle(perm);
    std::vector<std::size_t> train_idx(
        perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(config.train_size));
    std::vector<std::size_t> valid_idx(
        perm.begin() + static_cast<std::ptrdiff_t>(config.train_size),
        perm.end());
    const Dataset train = data.rows(train_idx);
    const Dataset valid = data.rows(valid_idx);
    auto predictor = trainer(train);
    total_mse += mse(predictor(valid.inputs), valid.targets);
    const Eigen::VectorXd preds = predictor(data.inputs);
    ConditionalSamples cond;
    cond.id = d;
    cond.samples.resize(static_cast<std::size_t>(preds.size()));
    for (Eigen::Index i = 0; i < preds.size(); ++i)
      cond.samples[static_cast<std::size_t>(i)] = std::abs(preds(i));
    per_draw.push_back(std::move(cond));
  }
  HarnessResult out;
  RngStream split_rng = rng.fork(0xC7E);
  out.cte = cte(per_draw, config.estimator.splits, config.estimator, split_rng);
  RngStream pooled_rng = rng.fork(0xB00);
  out.pooled = pooled_pot(per_draw, config.estimator, pooled_rng);
  out.mean_mse = total_mse / static_cast<double>(config.draws);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic series for experiments
// ---------------------------------------------------------------------------

/// Stationary AR(1): x_{t+1} = phi x_t + eps, eps ~ N(0, 1).
inline std::vector<double> ar1_series(std::size_t n, double phi,
                                      RngStream& rng) {
  if (!(std::abs(phi) < 1.0))
    throw domain_error("ar1_series: |phi| must be < 1");
  std::vector<double> out;
  out.reserve(n);
  double x = rng.normal() / std::sqrt(1.0 - phi * phi);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(x);
    x = phi * x + rng.normal();
  }
  return out;
}

inline std::vector<double> sine_noise_series(std::size_t n, double period,
                                             double noise, RngStream& rng) {
  if (!(period > 0.0)) throw domain_error("sine_noise_series: bad period");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(std::sin(2.0 * M_PI * static_cast<double>(i) / period) +
                  noise * rng.normal());
  return out;
}

}  // namespace tailcross
