// SPDX-License-Identifier: Apache-2.0

#include "cvcap/montecarlo.hpp"

#include <cmath>
#include <unordered_map>

#include "cvcap/rng.hpp"

namespace cvcap {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double logdet_pd(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput(std::string(what) + ": matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// Factor F with F F' = m for PSD m, tolerating singular input (point-mass
// displacement distributions have a zero block).
Matrix psd_factor(const Matrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const double scale = std::max(std::abs(es.eigenvalues()(0)),
                                std::abs(es.eigenvalues()(m.rows() - 1)));
  Vector root(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev < -1e-10 * std::max(scale, 1.0)) {
      throw InvalidInput(std::string(what) + ": matrix is not positive semidefinite");
    }
    root(i) = std::sqrt(std::max(ev, 0.0));
  }
  return es.eigenvectors() * root.asDiagonal();
}

// Covariance of the rows of a sample block, normalized by n - 1.
Matrix sample_covariance(const Eigen::Ref<const Matrix>& rows) {
  const Eigen::Index n = rows.rows();
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Matrix centered = rows.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

double mi_plugin_block(const Eigen::Ref<const Matrix>& inputs,
                       const Eigen::Ref<const Matrix>& outputs) {
  const Matrix sigma_out = sample_covariance(outputs);
  const Matrix sigma_noise = sample_covariance(outputs - inputs);
  return 0.5 * (logdet_pd(sigma_out, "plug-in estimator") -
                logdet_pd(sigma_noise, "plug-in estimator"));
}

struct BinningGrid {
  Vector lo;
  Vector width;  // per-axis bin width
  int bins;

  std::uint64_t cell(const Eigen::Ref<const Eigen::RowVectorXd>& z) const {
    std::uint64_t id = 0;
    for (Eigen::Index a = 0; a < z.size(); ++a) {
      int b = static_cast<int>(std::floor((z(a) - lo(a)) / width(a)));
      b = std::min(std::max(b, 0), bins - 1);  // clip outliers to edge bins
      id = id * static_cast<std::uint64_t>(bins) + static_cast<std::uint64_t>(b);
    }
    return id;
  }
};

// Box of mean +/- 5 standard deviations per axis over the given outputs.
BinningGrid make_grid(const Matrix& outputs, int bins) {
  const Eigen::Index dim = outputs.cols();
  const Eigen::RowVectorXd mean = outputs.colwise().mean();
  BinningGrid grid;
  grid.lo = Vector(dim);
  grid.width = Vector(dim);
  grid.bins = bins;
  for (Eigen::Index a = 0; a < dim; ++a) {
    const double var =
        (outputs.col(a).array() - mean(a)).square().sum() /
        static_cast<double>(outputs.rows() - 1);
    const double half = 5.0 * std::sqrt(std::max(var, 1e-300));
    grid.lo(a) = mean(a) - half;
    grid.width(a) = 2.0 * half / bins;
  }
  return grid;
}

double mi_binned_block(const std::vector<int>& indices,
                       const Eigen::Ref<const Matrix>& outputs,
                       Eigen::Index first, Eigen::Index count,
                       const BinningGrid& grid, int num_states) {
  std::unordered_map<std::uint64_t, std::vector<double>> joint;
  std::vector<double> p_state(num_states, 0.0);
  const double w = 1.0 / static_cast<double>(count);
  for (Eigen::Index i = first; i < first + count; ++i) {
    const std::uint64_t c = grid.cell(outputs.row(i));
    auto& row = joint[c];
    if (row.empty()) row.assign(num_states, 0.0);
    row[static_cast<std::size_t>(indices[i])] += w;
    p_state[static_cast<std::size_t>(indices[i])] += w;
  }
  double mi = 0.0;
  for (const auto& [cell, row] : joint) {
    double p_cell = 0.0;
    for (double p : row) p_cell += p;
    for (int k = 0; k < num_states; ++k) {
      const double p = row[static_cast<std::size_t>(k)];
      if (p > 0.0) mi += p * std::log(p / (p_cell * p_state[static_cast<std::size_t>(k)]));
    }
  }
  return mi;
}

MiEstimate block_stderr(double full_estimate,
                        const std::vector<double>& block_estimates) {
  const int b = static_cast<int>(block_estimates.size());
  double mean = 0.0;
  for (double v : block_estimates) mean += v;
  mean /= b;
  double var = 0.0;
  for (double v : block_estimates) var += (v - mean) * (v - mean);
  var /= (b - 1);
  return MiEstimate{full_estimate, std::sqrt(var / b), b};
}

void check_samples(const ChannelSamples& samples) {
  if (samples.inputs.rows() != samples.outputs.rows() ||
      samples.inputs.cols() != samples.outputs.cols()) {
    throw InvalidInput("channel samples: input/output shapes differ");
  }
  if (samples.inputs.rows() == 0) {
    throw InvalidInput("channel samples are empty");
  }
}

}  // namespace

GaussianCoherentEnsemble::GaussianCoherentEnsemble(
    CovarianceMatrix coherent_covariance, Matrix mean_covariance)
    : coherent_(std::move(coherent_covariance)),
      mean_covariance_(std::move(mean_covariance)) {
  if (mean_covariance_.rows() != coherent_.dim() ||
      mean_covariance_.cols() != coherent_.dim()) {
    throw InvalidInput("ensemble mean covariance has wrong dimensions");
  }
  if ((mean_covariance_ - mean_covariance_.transpose()).norm() >
      tol::kSymmetry * std::max(mean_covariance_.norm(), 1.0)) {
    throw InvalidInput("ensemble mean covariance must be symmetric");
  }
  mean_covariance_ = 0.5 * (mean_covariance_ + mean_covariance_.transpose());
  psd_factor(mean_covariance_, "ensemble mean covariance");  // PSD check
  SymplecticSpace space(coherent_.modes());
  if (!symplectic_spectrum(coherent_, space).pure) {
    throw InvalidInput("ensemble coherent covariance must be pure");
  }
}

DiscreteEnsemble::DiscreteEnsemble(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw InvalidInput("discrete ensemble has no entries");
  }
  double total = 0.0;
  for (const Entry& e : entries_) {
    if (!(e.weight > 0.0)) {
      throw InvalidInput("discrete ensemble weights must be positive");
    }
    if (e.state.dim() != entries_.front().state.dim()) {
      throw InvalidInput("discrete ensemble states have mixed dimensions");
    }
    total += e.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("discrete ensemble weights must sum to one");
  }
}

ChannelSamples simulate_ensemble(const GaussianCoherentEnsemble& ensemble,
                                 const GaussianMeasurement& m,
                                 const SymplecticSpace& space, std::size_t n,
                                 std::uint64_t seed) {
  if (n == 0) {
    throw InvalidInput("sample count must be positive");
  }
  if (ensemble.dim() != space.dim() || m.dim() != space.dim()) {
    throw InvalidInput("simulate: dimension mismatch");
  }
  const CanonicalMeasurement canon = canonicalize_measurement(m, space);
  const int dim = space.dim();

  const Matrix mean_factor = psd_factor(ensemble.mean_covariance(), "simulate");
  const Matrix noise = ensemble.coherent_covariance().matrix() +
                       canon.canonical.beta().matrix();
  Eigen::LLT<Matrix> llt(noise);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("simulate: conditional outcome covariance is not PD");
  }
  const Matrix noise_factor = llt.matrixL();

  NormalStream input_stream(seed, 0);
  NormalStream noise_stream(seed, 1);

  ChannelSamples out;
  out.seed = seed;
  out.inputs = Matrix(static_cast<Eigen::Index>(n), dim);
  out.outputs = Matrix(static_cast<Eigen::Index>(n), dim);
  Vector draw(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t base = static_cast<std::uint64_t>(i) * dim;
    for (int c = 0; c < dim; ++c) draw(c) = input_stream.normal(base + c);
    const Vector z = mean_factor * draw;
    for (int c = 0; c < dim; ++c) draw(c) = noise_stream.normal(base + c);
    out.inputs.row(i) = z.transpose();
    out.outputs.row(i) = (z + noise_factor * draw).transpose();
  }
  return out;
}

ChannelSamples simulate_ensemble(const DiscreteEnsemble& ensemble,
                                 const GaussianMeasurement& m,
                                 const SymplecticSpace& space, std::size_t n,
                                 std::uint64_t seed) {
  if (n == 0) {
    throw InvalidInput("sample count must be positive");
  }
  if (ensemble.dim() != space.dim() || m.dim() != space.dim()) {
    throw InvalidInput("simulate: dimension mismatch");
  }
  const CanonicalMeasurement canon = canonicalize_measurement(m, space);
  const int dim = space.dim();
  const int num_states = static_cast<int>(ensemble.entries().size());

  std::vector<Matrix> noise_factors;
  noise_factors.reserve(num_states);
  for (const auto& entry : ensemble.entries()) {
    const Matrix noise =
        entry.state.covariance().matrix() + canon.canonical.beta().matrix();
    Eigen::LLT<Matrix> llt(noise);
    if (llt.info() != Eigen::Success) {
      throw InvalidInput("simulate: conditional outcome covariance is not PD");
    }
    noise_factors.push_back(llt.matrixL());
  }

  NormalStream noise_stream(seed, 1);
  NormalStream index_stream(seed, 2);

  ChannelSamples out;
  out.seed = seed;
  out.inputs = Matrix(static_cast<Eigen::Index>(n), dim);
  out.outputs = Matrix(static_cast<Eigen::Index>(n), dim);
  out.input_indices.resize(n);
  Vector draw(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = index_stream.uniform(i);
    double acc = 0.0;
    int idx = num_states - 1;
    for (int k = 0; k < num_states; ++k) {
      acc += ensemble.entries()[static_cast<std::size_t>(k)].weight;
      if (u < acc) {
        idx = k;
        break;
      }
    }
    const auto& entry = ensemble.entries()[static_cast<std::size_t>(idx)];
    const std::uint64_t base = static_cast<std::uint64_t>(i) * dim;
    for (int c = 0; c < dim; ++c) draw(c) = noise_stream.normal(base + c);
    out.input_indices[i] = idx;
    out.inputs.row(i) = entry.state.mean().transpose();
    out.outputs.row(i) =
        (entry.state.mean() +
         noise_factors[static_cast<std::size_t>(idx)] * draw)
            .transpose();
  }
  return out;
}

double mi_plugin(const ChannelSamples& samples) {
  check_samples(samples);
  const Eigen::Index n = samples.inputs.rows();
  if (n < samples.inputs.cols() + 2) {
    throw InvalidInput("plug-in estimator needs at least 2s + 2 samples");
  }
  return mi_plugin_block(samples.inputs, samples.outputs);
}

MiEstimate mi_plugin_with_stderr(const ChannelSamples& samples, int blocks) {
  check_samples(samples);
  const Eigen::Index n = samples.inputs.rows();
  if (blocks < 2 || n / blocks < samples.inputs.cols() + 2) {
    throw InvalidInput("too few samples for block standard errors");
  }
  const double full = mi_plugin(samples);
  std::vector<double> block_vals;
  block_vals.reserve(static_cast<std::size_t>(blocks));
  const Eigen::Index per = n / blocks;
  for (int b = 0; b < blocks; ++b) {
    block_vals.push_back(mi_plugin_block(
        samples.inputs.middleRows(b * per, per),
        samples.outputs.middleRows(b * per, per)));
  }
  return block_stderr(full, block_vals);
}

double mi_binned(const ChannelSamples& samples, int bins_per_axis) {
  check_samples(samples);
  if (samples.input_indices.size() !=
      static_cast<std::size_t>(samples.inputs.rows())) {
    throw InvalidInput("binned estimator needs discrete-ensemble samples");
  }
  if (bins_per_axis < 2) {
    throw InvalidInput("need at least two bins per axis");
  }
  int num_states = 0;
  for (int idx : samples.input_indices) num_states = std::max(num_states, idx + 1);
  if (num_states < 2) return 0.0;  // single-state ensemble carries nothing
  const BinningGrid grid = make_grid(samples.outputs, bins_per_axis);
  return mi_binned_block(samples.input_indices, samples.outputs, 0,
                         samples.outputs.rows(), grid, num_states);
}

MiEstimate mi_binned_with_stderr(const ChannelSamples& samples,
                                 int bins_per_axis, int blocks) {
  check_samples(samples);
  if (samples.input_indices.size() !=
      static_cast<std::size_t>(samples.inputs.rows())) {
    throw InvalidInput("binned estimator needs discrete-ensemble samples");
  }
  const Eigen::Index n = samples.outputs.rows();
  if (blocks < 2 || n / blocks < 2) {
    throw InvalidInput("too few samples for block standard errors");
  }
  const double full = mi_binned(samples, bins_per_axis);
  int num_states = 0;
  for (int idx : samples.input_indices) num_states = std::max(num_states, idx + 1);
  if (num_states < 2) return MiEstimate{0.0, 0.0, blocks};
  const BinningGrid grid = make_grid(samples.outputs, bins_per_axis);
  std::vector<double> block_vals;
  block_vals.reserve(static_cast<std::size_t>(blocks));
  const Eigen::Index per = n / blocks;
  for (int b = 0; b < blocks; ++b) {
    block_vals.push_back(mi_binned_block(samples.input_indices, samples.outputs,
                                         b * per, per, grid, num_states));
  }
  return block_stderr(full, block_vals);
}

EntropyDecomposition entropy_decomposition_check(const Matrix& sigma,
                                                 const Matrix& hc_matrix,
                                                 double theta) {
  if (sigma.rows() != sigma.cols() || hc_matrix.rows() != hc_matrix.cols() ||
      sigma.rows() != hc_matrix.rows() || sigma.rows() == 0) {
    throw InvalidInput("entropy decomposition: dimension mismatch");
  }
  if (!(theta > 0.0)) {
    throw InvalidInput("entropy decomposition: theta must be positive");
  }
  const double d = static_cast<double>(sigma.rows());

  const double lhs = gaussian_differential_entropy(sigma);

  // Gibbs density for the quadratic form is the centered Gaussian with
  // covariance (theta * hc)^{-1}; each term below is a closed-form
  // Gaussian integral.
  const double logdet_sigma = logdet_pd(sigma, "entropy decomposition");
  const double logdet_theta_hc =
      logdet_pd(theta * hc_matrix, "entropy decomposition");
  const double trace_term = theta * (hc_matrix * sigma).trace();

  const double kl =
      0.5 * (trace_term - d - logdet_theta_hc - logdet_sigma);
  const double quad_expectation = 0.5 * trace_term;
  const double log_m = 0.5 * d * kLogTwoPi - 0.5 * logdet_theta_hc;

  const double rhs = -kl + quad_expectation + log_m;
  return EntropyDecomposition{lhs, rhs, std::abs(lhs - rhs)};
}

}  // namespace cvcap
