#include "qlimit/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "qlimit/error.hpp"

namespace qlimit {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_axis(const GridSpec& grid, int axis) {
  if (axis < 0 || axis >= grid.dim) {
    std::ostringstream os;
    os << "axis " << axis << " out of range for a " << grid.dim << "-dimensional grid";
    throw Error(ErrorCode::invalid_argument, os.str());
  }
}

void check_compatible(const WaveFunction& u, const WaveFunction& v) {
  if (!(u.grid() == v.grid())) throw Error(ErrorCode::grid_mismatch, "wavefunctions live on different grids");
  if (u.domain() != v.domain())
    throw Error(ErrorCode::domain_mismatch, "wavefunctions live in different domains");
}

// Planner calls are not thread-safe in FFTW; execution on new arrays is.
// Plans are in-place and FFTW_UNALIGNED so any std::vector buffer can be used
// and the same codelets run regardless of buffer alignment.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, std::size_t points, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, points, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> extents(static_cast<std::size_t>(dim), static_cast<int>(points));
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= points;
    auto* buffer = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(dim, extents.data(), buffer, buffer, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buffer);
    if (plan == nullptr) throw Error(ErrorCode::internal, "FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

// Parity of the sum of per-axis indices for each flat index.
std::vector<unsigned char> index_parity(const GridSpec& grid) {
  std::vector<unsigned char> parity(grid.size());
  for (std::size_t flat = 0; flat < parity.size(); ++flat) {
    std::size_t rest = flat;
    std::size_t sum = 0;
    for (int a = 0; a < grid.dim; ++a) {
      sum += rest % grid.points;
      rest /= grid.points;
    }
    parity[flat] = static_cast<unsigned char>(sum & 1U);
  }
  return parity;
}

void execute(const GridSpec& grid, std::vector<cplx>& data, int sign) {
  fftw_plan plan = PlanCache::instance().get(grid.dim, grid.points, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

GridSpec GridSpec::make(int dim, double half_width, std::size_t points) {
  if (dim < 1) throw Error(ErrorCode::invalid_argument, "grid dimension must be positive");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw Error(ErrorCode::invalid_argument, "grid half_width must be a positive finite number");
  if (points < 4 || !is_power_of_two(points))
    throw Error(ErrorCode::invalid_argument, "grid points must be a power of two and at least 4");
  return GridSpec{dim, half_width, points};
}

double GridSpec::frequency_spacing() const { return kPi / half_width; }

double GridSpec::nyquist() const { return kPi / spacing(); }

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= points;
  return total;
}

GridSpec GridSpec::dual() const {
  return GridSpec{dim, kPi * static_cast<double>(points) / (2.0 * half_width), points};
}

const char* to_string(Domain d) { return d == Domain::position ? "position" : "frequency"; }

WaveFunction::WaveFunction(GridSpec grid, std::vector<cplx> samples, Domain domain)
    : grid_(grid), samples_(std::move(samples)), domain_(domain) {
  if (samples_.size() != grid_.size()) {
    std::ostringstream os;
    os << "expected " << grid_.size() << " samples, got " << samples_.size();
    throw Error(ErrorCode::invalid_argument, os.str());
  }
}

WaveFunction WaveFunction::retagged(const GridSpec& grid, Domain domain) const {
  return WaveFunction(grid, samples_, domain);
}

double WaveFunction::cell_volume() const {
  double step = domain_ == Domain::position ? grid_.spacing() : grid_.frequency_spacing();
  return std::pow(step, grid_.dim);
}

std::vector<double> uniform_axis(double half_width, std::size_t points) {
  if (points < 2 || points % 2 != 0)
    throw Error(ErrorCode::invalid_argument, "axis needs an even number of points");
  std::vector<double> axis(points);
  double h = 2.0 * half_width / static_cast<double>(points);
  for (std::size_t k = 0; k < points; ++k) axis[k] = -half_width + static_cast<double>(k) * h;
  return axis;
}

std::vector<double> position_axis(const GridSpec& grid, int axis) {
  check_axis(grid, axis);
  return uniform_axis(grid.half_width, grid.points);
}

std::vector<double> frequency_axis(const GridSpec& grid, int axis) {
  check_axis(grid, axis);
  std::vector<double> out(grid.points);
  const auto half = static_cast<double>(grid.points / 2);
  for (std::size_t k = 0; k < grid.points; ++k)
    out[k] = (static_cast<double>(k) - half) * kPi / grid.half_width;
  return out;
}

std::size_t locate(const GridSpec& grid, Domain domain, std::span<const double> point) {
  if (point.size() != static_cast<std::size_t>(grid.dim)) {
    std::ostringstream os;
    os << "point has " << point.size() << " coordinates, grid has dimension " << grid.dim;
    throw Error(ErrorCode::invalid_argument, os.str());
  }
  const double step = domain == Domain::position ? grid.spacing() : grid.frequency_spacing();
  const double origin = domain == Domain::position ? -grid.half_width
                                                   : -static_cast<double>(grid.points / 2) * step;
  std::size_t flat = 0;
  for (int a = 0; a < grid.dim; ++a) {
    const double c = point[static_cast<std::size_t>(a)];
    const double k = std::round((c - origin) / step);
    const double node = origin + k * step;
    if (!std::isfinite(c) || k < 0 || k >= static_cast<double>(grid.points) ||
        std::abs(node - c) > 1e-12 * std::max(1.0, std::abs(c))) {
      std::ostringstream os;
      os.precision(17);
      os << "coordinate " << c << " on axis " << a << " is not a node of the " << to_string(domain)
         << " grid";
      throw Error(ErrorCode::off_grid, os.str());
    }
    flat = flat * grid.points + static_cast<std::size_t>(k);
  }
  return flat;
}

std::vector<double> coordinates(const GridSpec& grid, Domain domain, std::size_t flat) {
  if (flat >= grid.size()) throw Error(ErrorCode::invalid_argument, "flat index out of range");
  const double step = domain == Domain::position ? grid.spacing() : grid.frequency_spacing();
  const double origin = domain == Domain::position ? -grid.half_width
                                                   : -static_cast<double>(grid.points / 2) * step;
  std::vector<double> out(static_cast<std::size_t>(grid.dim));
  for (int a = grid.dim - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = origin + static_cast<double>(flat % grid.points) * step;
    flat /= grid.points;
  }
  return out;
}

cplx inner(const WaveFunction& u, const WaveFunction& v) {
  check_compatible(u, v);
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc * u.cell_volume();
}

double norm(const WaveFunction& u) {
  double acc = 0.0;
  for (const auto& z : u.samples()) acc += std::norm(z);
  return std::sqrt(acc * u.cell_volume());
}

WaveFunction normalize(const WaveFunction& u) {
  const double n = norm(u);
  if (!(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorCode::invalid_argument, "cannot normalize a zero or non-finite vector");
  std::vector<cplx> out(u.samples().begin(), u.samples().end());
  for (auto& z : out) z /= n;
  return WaveFunction(u.grid(), std::move(out), u.domain());
}

double sup_distance(const WaveFunction& u, const WaveFunction& v) {
  check_compatible(u, v);
  double best = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) best = std::max(best, std::abs(u[i] - v[i]));
  return best;
}

double distance(const WaveFunction& u, const WaveFunction& v) {
  check_compatible(u, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::norm(u[i] - v[i]);
  return std::sqrt(acc * u.cell_volume());
}

// With x_j = -L + j h and alpha_k = (k - N/2) pi / L per axis,
//   exp(-i alpha_k x_j) = (-1)^(k - N/2) (-1)^j exp(-2 pi i k j / N),
// so the continuum transform is a plain DFT sandwiched between sign flips.
WaveFunction fourier(const WaveFunction& u) {
  if (u.domain() != Domain::position)
    throw Error(ErrorCode::domain_mismatch, "fourier expects a position-domain wavefunction");
  const GridSpec& grid = u.grid();
  const auto parity = index_parity(grid);
  const bool shift_odd = ((grid.points / 2) * static_cast<std::size_t>(grid.dim)) % 2 == 1;
  const double scale = std::pow(grid.spacing() / std::sqrt(2.0 * kPi), grid.dim);

  std::vector<cplx> data(u.samples().begin(), u.samples().end());
  for (std::size_t i = 0; i < data.size(); ++i)
    if (parity[i]) data[i] = -data[i];
  execute(grid, data, FFTW_FORWARD);
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] *= (static_cast<bool>(parity[i]) != shift_odd) ? -scale : scale;
  return WaveFunction(grid, std::move(data), Domain::frequency);
}

WaveFunction inverse_fourier(const WaveFunction& v) {
  if (v.domain() != Domain::frequency)
    throw Error(ErrorCode::domain_mismatch, "inverse_fourier expects a frequency-domain wavefunction");
  const GridSpec& grid = v.grid();
  const auto parity = index_parity(grid);
  const bool shift_odd = ((grid.points / 2) * static_cast<std::size_t>(grid.dim)) % 2 == 1;
  const double scale = std::pow(grid.frequency_spacing() / std::sqrt(2.0 * kPi), grid.dim);

  std::vector<cplx> data(v.samples().begin(), v.samples().end());
  for (std::size_t i = 0; i < data.size(); ++i)
    if (static_cast<bool>(parity[i]) != shift_odd) data[i] = -data[i];
  execute(grid, data, FFTW_BACKWARD);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= parity[i] ? -scale : scale;
  return WaveFunction(grid, std::move(data), Domain::position);
}

WaveFunction gaussian_packet(const GridSpec& grid, std::span<const double> center, double width,
                             std::span<const double> momentum) {
  const auto d = static_cast<std::size_t>(grid.dim);
  if (center.size() != d) throw Error(ErrorCode::invalid_argument, "packet center has wrong dimension");
  if (!momentum.empty() && momentum.size() != d)
    throw Error(ErrorCode::invalid_argument, "packet momentum has wrong dimension");
  if (!(width > 0.0)) throw Error(ErrorCode::invalid_argument, "packet width must be positive");

  const double amplitude = std::pow(kPi * width * width, -0.25 * grid.dim);
  std::vector<cplx> samples(grid.size());
  for (std::size_t flat = 0; flat < samples.size(); ++flat) {
    const auto x = coordinates(grid, Domain::position, flat);
    double r2 = 0.0;
    double phase = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      r2 += (x[a] - center[a]) * (x[a] - center[a]);
      if (!momentum.empty()) phase += momentum[a] * x[a];
    }
    samples[flat] = amplitude * std::exp(-r2 / (2.0 * width * width)) * std::polar(1.0, phase);
  }
  return WaveFunction(grid, std::move(samples), Domain::position);
}

PacketMoments packet_moments(const WaveFunction& u) {
  const GridSpec& grid = u.grid();
  const auto d = static_cast<std::size_t>(grid.dim);
  std::vector<double> first(d, 0.0), second(d, 0.0);
  double mass = 0.0;
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    const double w = std::norm(u[flat]);
    if (w == 0.0) continue;
    const auto x = coordinates(grid, u.domain(), flat);
    mass += w;
    for (std::size_t a = 0; a < d; ++a) {
      first[a] += w * x[a];
      second[a] += w * x[a] * x[a];
    }
  }
  PacketMoments m{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  if (mass == 0.0) return m;
  for (std::size_t a = 0; a < d; ++a) {
    m.center[a] = first[a] / mass;
    m.spread[a] = std::sqrt(std::max(0.0, second[a] / mass - m.center[a] * m.center[a]));
  }
  return m;
}

}  // namespace qlimit
