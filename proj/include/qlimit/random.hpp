#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

namespace qlimit {

// Private generator of one replica. Wraps std::mt19937_64, whose output
// sequence is fixed by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : engine_(key), key_(key) {}

  double uniform() { return uniform_(engine_); }  // [0, 1)
  double normal() { return normal_(engine_); }
  std::uint64_t bits() { return engine_(); }
  std::uint64_t key() const { return key_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t key_;
};

// Stream derivation. The key of stream (label, index) is
//
//   k0 = mix(master_seed)
//   k1 = mix(k0 ^ fnv1a64(label))
//   k  = mix(k1 ^ index)
//
// with mix(z) the SplitMix64 step (add 0x9e3779b97f4a7c15, then the
// 30/27/31 xor-shift-multiply finalizer). The key seeds Rng directly, so a
// replica's draws depend only on (master_seed, label, index).
struct SeedPolicy {
  std::uint64_t master_seed = 0;

  std::uint64_t stream_key(std::string_view label, std::uint64_t index) const;
  Rng derive(std::string_view label, std::uint64_t index) const { return Rng(stream_key(label, index)); }
};

std::uint64_t splitmix64(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view s);

using Vector = std::vector<double>;

struct GaussianLaw {
  Vector mean;
  Eigen::MatrixXd cov;
};
struct UniformBoxLaw {
  Vector lo;
  Vector hi;
};
// offset + scale * (independent +-1 signs per component)
struct RademacherLaw {
  Vector scale;
  Vector offset;
};
struct DiscreteLaw {
  std::vector<Vector> atoms;
  Vector probs;
};

using DistributionSpec = std::variant<GaussianLaw, UniformBoxLaw, RademacherLaw, DiscreteLaw>;

// Throws ErrorCode::invalid_argument on violated invariants (PSD covariance,
// simplex weights, lo < hi, consistent dimensions).
void validate(const DistributionSpec& spec);
int dimension(const DistributionSpec& spec);

struct MeanCov {
  Vector mean;
  Eigen::MatrixXd cov;
};
MeanCov mean_cov(const DistributionSpec& spec);

// Symmetric square root of a PSD matrix via eigendecomposition. Eigenvalues
// down to -1e-12 are clipped to zero; anything more negative, or asymmetry
// beyond 1e-12, throws.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov);

// Draws from a validated spec; precomputes what it can (matrix root, CDF).
class Sampler {
 public:
  explicit Sampler(DistributionSpec spec);

  Vector draw(Rng& rng) const;
  // Adds one draw into `acc` without allocating.
  void accumulate(Rng& rng, Vector& acc) const;
  int dim() const { return dim_; }
  const DistributionSpec& spec() const { return spec_; }

 private:
  DistributionSpec spec_;
  int dim_;
  Eigen::MatrixXd root_;
  Vector cdf_;
};

std::vector<Vector> sample_iid(const DistributionSpec& spec, std::size_t n, Rng& rng);
Vector sample_gaussian(const Vector& mean, const Eigen::MatrixXd& cov, Rng& rng);

// w(t_i) for sorted nonnegative times; w(0) = 0 with Gaussian increments of
// variance t_i - t_{i-1}.
std::vector<double> wiener_path(const std::vector<double>& times, Rng& rng);

// Row n of the triangular array xi_{n,k} = base_k / sqrt(n), k = 1..n.
// The base law must be one-dimensional with mean 0 and variance 1.
class TriangularArray {
 public:
  TriangularArray(DistributionSpec base, std::size_t n);

  std::size_t n() const { return n_; }
  std::vector<double> row(Rng& rng) const;

 private:
  Sampler base_;
  std::size_t n_;
};

}  // namespace qlimit
