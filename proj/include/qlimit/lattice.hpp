#pragma once

// Periodic grid on [-L, L)^d and a unitary discrete Fourier transform that
// approximates the continuum transform
//
//     (F u)(alpha) = (2 pi)^{-d/2} \int u(x) exp(-i (alpha, x)) dx.
//
// Layout: samples are stored row-major, axis 0 slowest. Position sample j on
// an axis sits at x_j = -L + j h (h = 2L/N). Frequency sample k sits at
// alpha_k = (k - N/2) pi / L, i.e. frequencies are stored in ascending order
// from -N/2 to N/2 - 1 (already "fft-shifted").

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qlimit {

using cplx = std::complex<double>;

struct GridSpec {
  int dim = 1;
  double half_width = 1.0;  // L
  std::size_t points = 4;   // N per axis

  // Validates N >= 4, N a power of two, L > 0, dim >= 1.
  static GridSpec make(int dim, double half_width, std::size_t points);

  double spacing() const { return 2.0 * half_width / static_cast<double>(points); }
  double frequency_spacing() const;
  double nyquist() const;
  // N^d
  std::size_t size() const;
  // Grid whose ascending frequency axis coincides with this grid's position
  // axis: L* = pi N / (2 L).
  GridSpec dual() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class Domain { position, frequency };

const char* to_string(Domain d);

// Grid samples plus the domain they live in. Immutable once constructed.
class WaveFunction {
 public:
  WaveFunction(GridSpec grid, std::vector<cplx> samples, Domain domain = Domain::position);

  const GridSpec& grid() const { return grid_; }
  Domain domain() const { return domain_; }
  std::span<const cplx> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }

  // Same samples, reinterpreted in another grid/domain. Sizes must agree.
  WaveFunction retagged(const GridSpec& grid, Domain domain) const;

  // Measure of one cell: h^d in position, (pi/L)^d in frequency.
  double cell_volume() const;

  friend bool operator==(const WaveFunction&, const WaveFunction&) = default;

 private:
  GridSpec grid_;
  std::vector<cplx> samples_;
  Domain domain_;
};

// -L + k * 2L/N for k = 0..N-1. Exposed separately from GridSpec because it
// accepts any even N >= 2.
std::vector<double> uniform_axis(double half_width, std::size_t points);

std::vector<double> position_axis(const GridSpec& grid, int axis);
std::vector<double> frequency_axis(const GridSpec& grid, int axis);

// Flat index of the grid node at `point` (one coordinate per axis), or throws
// ErrorCode::off_grid when some coordinate is further than 1e-12 (relative to
// max(1, |coordinate|)) from a node.
std::size_t locate(const GridSpec& grid, Domain domain, std::span<const double> point);

// Coordinates of the node with flat index `flat`.
std::vector<double> coordinates(const GridSpec& grid, Domain domain, std::size_t flat);

cplx inner(const WaveFunction& u, const WaveFunction& v);
double norm(const WaveFunction& u);
WaveFunction normalize(const WaveFunction& u);
// max_i |u_i - v_i|
double sup_distance(const WaveFunction& u, const WaveFunction& v);
// norm(u - v)
double distance(const WaveFunction& u, const WaveFunction& v);

WaveFunction fourier(const WaveFunction& u);
WaveFunction inverse_fourier(const WaveFunction& v);

// Normalized packet (pi w^2)^{-d/4} exp(-|x-c|^2 / (2 w^2)) exp(i (p, x)).
WaveFunction gaussian_packet(const GridSpec& grid, std::span<const double> center,
                             double width, std::span<const double> momentum = {});

// Mean and rms width per axis of |u|^2 (interpreted in u's own domain).
struct PacketMoments {
  std::vector<double> center;
  std::vector<double> spread;
};
PacketMoments packet_moments(const WaveFunction& u);

}  // namespace qlimit
