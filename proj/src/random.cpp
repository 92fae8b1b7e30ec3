#include "qlimit/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlimit/error.hpp"

namespace qlimit {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::invalid_argument, what); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SeedPolicy::stream_key(std::string_view label, std::uint64_t index) const {
  const std::uint64_t k0 = splitmix64(master_seed);
  const std::uint64_t k1 = splitmix64(k0 ^ fnv1a64(label));
  return splitmix64(k1 ^ index);
}

int dimension(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& law) -> int {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) return static_cast<int>(law.mean.size());
        else if constexpr (std::is_same_v<T, UniformBoxLaw>) return static_cast<int>(law.lo.size());
        else if constexpr (std::is_same_v<T, RademacherLaw>) return static_cast<int>(law.scale.size());
        else return law.atoms.empty() ? 0 : static_cast<int>(law.atoms.front().size());
      },
      spec);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) invalid("covariance must be square");
  for (Eigen::Index i = 0; i < cov.rows(); ++i)
    for (Eigen::Index j = 0; j < cov.cols(); ++j) {
      if (!std::isfinite(cov(i, j))) invalid("covariance entries must be finite");
      if (std::abs(cov(i, j) - cov(j, i)) > 1e-12) invalid("covariance must be symmetric");
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::VectorXd values = eig.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < -1e-12) {
      std::ostringstream os;
      os << "covariance is indefinite (eigenvalue " << values(i) << ")";
      invalid(os.str());
    }
    values(i) = std::sqrt(std::max(0.0, values(i)));
  }
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

void validate(const DistributionSpec& spec) {
  const int d = dimension(spec);
  if (d < 1) invalid("distribution must have dimension at least 1");
  auto finite = [](const Vector& v, const char* what) {
    for (double x : v)
      if (!std::isfinite(x)) invalid(std::string(what) + " must be finite");
  };
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          finite(law.mean, "gaussian mean");
          if (law.cov.rows() != d || law.cov.cols() != d) invalid("gaussian covariance must be d x d");
          psd_sqrt(law.cov);
        } else if constexpr (std::is_same_v<T, UniformBoxLaw>) {
          if (law.hi.size() != law.lo.size()) invalid("uniform box bounds differ in dimension");
          finite(law.lo, "uniform box lo");
          finite(law.hi, "uniform box hi");
          for (std::size_t i = 0; i < law.lo.size(); ++i)
            if (!(law.lo[i] < law.hi[i])) invalid("uniform box needs lo < hi componentwise");
        } else if constexpr (std::is_same_v<T, RademacherLaw>) {
          if (law.offset.size() != law.scale.size()) invalid("rademacher scale and offset differ in dimension");
          finite(law.scale, "rademacher scale");
          finite(law.offset, "rademacher offset");
        } else {
          if (law.atoms.size() != law.probs.size()) invalid("discrete law needs one probability per atom");
          double total = 0.0;
          for (std::size_t i = 0; i < law.atoms.size(); ++i) {
            if (law.atoms[i].size() != static_cast<std::size_t>(d)) invalid("discrete atoms differ in dimension");
            finite(law.atoms[i], "discrete atom");
            if (!(law.probs[i] >= 0.0)) invalid("discrete probabilities must be nonnegative");
            total += law.probs[i];
          }
          if (std::abs(total - 1.0) > 1e-12) invalid("discrete probabilities must sum to 1");
        }
      },
      spec);
}

MeanCov mean_cov(const DistributionSpec& spec) {
  const auto d = static_cast<Eigen::Index>(dimension(spec));
  MeanCov out{Vector(static_cast<std::size_t>(d), 0.0), Eigen::MatrixXd::Zero(d, d)};
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          out.mean = law.mean;
          out.cov = law.cov;
        } else if constexpr (std::is_same_v<T, UniformBoxLaw>) {
          for (Eigen::Index i = 0; i < d; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double w = law.hi[k] - law.lo[k];
            out.mean[k] = 0.5 * (law.lo[k] + law.hi[k]);
            out.cov(i, i) = w * w / 12.0;
          }
        } else if constexpr (std::is_same_v<T, RademacherLaw>) {
          for (Eigen::Index i = 0; i < d; ++i) {
            const auto k = static_cast<std::size_t>(i);
            out.mean[k] = law.offset[k];
            out.cov(i, i) = law.scale[k] * law.scale[k];
          }
        } else {
          for (std::size_t a = 0; a < law.atoms.size(); ++a)
            for (std::size_t k = 0; k < out.mean.size(); ++k) out.mean[k] += law.probs[a] * law.atoms[a][k];
          for (std::size_t a = 0; a < law.atoms.size(); ++a)
            for (Eigen::Index i = 0; i < d; ++i)
              for (Eigen::Index j = 0; j < d; ++j) {
                const auto ki = static_cast<std::size_t>(i);
                const auto kj = static_cast<std::size_t>(j);
                out.cov(i, j) +=
                    law.probs[a] * (law.atoms[a][ki] - out.mean[ki]) * (law.atoms[a][kj] - out.mean[kj]);
              }
        }
      },
      spec);
  return out;
}

Sampler::Sampler(DistributionSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  dim_ = dimension(spec_);
  if (const auto* g = std::get_if<GaussianLaw>(&spec_)) root_ = psd_sqrt(g->cov);
  if (const auto* f = std::get_if<DiscreteLaw>(&spec_)) {
    double acc = 0.0;
    for (double p : f->probs) cdf_.push_back(acc += p);
  }
}

void Sampler::accumulate(Rng& rng, Vector& acc) const {
  const auto d = static_cast<std::size_t>(dim_);
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          Eigen::VectorXd z(dim_);
          for (int i = 0; i < dim_; ++i) z(i) = rng.normal();
          const Eigen::VectorXd x = root_ * z;
          for (std::size_t i = 0; i < d; ++i) acc[i] += law.mean[i] + x(static_cast<Eigen::Index>(i));
        } else if constexpr (std::is_same_v<T, UniformBoxLaw>) {
          for (std::size_t i = 0; i < d; ++i) acc[i] += law.lo[i] + (law.hi[i] - law.lo[i]) * rng.uniform();
        } else if constexpr (std::is_same_v<T, RademacherLaw>) {
          for (std::size_t i = 0; i < d; ++i)
            acc[i] += law.offset[i] + ((rng.bits() >> 63) ? law.scale[i] : -law.scale[i]);
        } else {
          const double r = rng.uniform();
          auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
          std::size_t a = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
          for (std::size_t i = 0; i < d; ++i) acc[i] += law.atoms[a][i];
        }
      },
      spec_);
}

Vector Sampler::draw(Rng& rng) const {
  Vector out(static_cast<std::size_t>(dim_), 0.0);
  accumulate(rng, out);
  return out;
}

std::vector<Vector> sample_iid(const DistributionSpec& spec, std::size_t n, Rng& rng) {
  Sampler sampler(spec);
  std::vector<Vector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.draw(rng));
  return out;
}

Vector sample_gaussian(const Vector& mean, const Eigen::MatrixXd& cov, Rng& rng) {
  if (cov.rows() != static_cast<Eigen::Index>(mean.size()))
    invalid("gaussian mean and covariance differ in dimension");
  const Eigen::MatrixXd root = psd_sqrt(cov);
  Eigen::VectorXd z(static_cast<Eigen::Index>(mean.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const Eigen::VectorXd x = root * z;
  Vector out(mean);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += x(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<double> wiener_path(const std::vector<double>& times, Rng& rng) {
  std::vector<double> out;
  out.reserve(times.size());
  double previous = 0.0;
  double value = 0.0;
  for (double t : times) {
    if (!(t >= previous) || !std::isfinite(t)) invalid("wiener_path times must be sorted and nonnegative");
    if (t > previous) value += std::sqrt(t - previous) * rng.normal();
    previous = t;
    out.push_back(value);
  }
  return out;
}

TriangularArray::TriangularArray(DistributionSpec base, std::size_t n) : base_(std::move(base)), n_(n) {
  if (n == 0) invalid("triangular array row length must be positive");
  if (base_.dim() != 1) invalid("triangular array base law must be one-dimensional");
  const auto mc = mean_cov(base_.spec());
  if (std::abs(mc.mean[0]) > 1e-12) invalid("triangular array base law must have mean 0");
  if (std::abs(mc.cov(0, 0) - 1.0) > 1e-12) invalid("triangular array base law must have variance 1");
}

std::vector<double> TriangularArray::row(Rng& rng) const {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  std::vector<double> out(n_);
  Vector one(1);
  for (auto& x : out) {
    one[0] = 0.0;
    base_.accumulate(rng, one);
    x = one[0] * scale;
  }
  return out;
}

}  // namespace qlimit
