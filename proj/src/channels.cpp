#include "qlimit/channels.hpp"

#include <cmath>

#include "qlimit/error.hpp"

namespace qlimit {

namespace {

void check_parameter(const GridSpec& grid, std::span<const double> a) {
  if (a.size() != static_cast<std::size_t>(grid.dim))
    throw Error(ErrorCode::invalid_argument, "channel parameter has wrong dimension");
  for (double c : a)
    if (!std::isfinite(c)) throw Error(ErrorCode::invalid_argument, "channel parameter is not finite");
}

// Multiplies samples by exp(i (a, t)) where t runs over `axis` on every
// coordinate. Phases are built per axis and combined, so each node's phase is
// a sum of d one-dimensional terms.
std::vector<cplx> modulate(std::span<const cplx> samples, const GridSpec& grid,
                           const std::vector<double>& axis, std::span<const double> a) {
  const auto d = static_cast<std::size_t>(grid.dim);
  const std::size_t n = grid.points;
  std::vector<std::vector<cplx>> factors(d, std::vector<cplx>(n));
  for (std::size_t ax = 0; ax < d; ++ax)
    for (std::size_t k = 0; k < n; ++k) factors[ax][k] = std::polar(1.0, a[ax] * axis[k]);

  std::vector<cplx> out(samples.begin(), samples.end());
  if (d == 1) {
    for (std::size_t k = 0; k < n; ++k) out[k] *= factors[0][k];
    return out;
  }
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rest = flat;
    cplx f{1.0, 0.0};
    for (std::size_t ax = d; ax-- > 0;) {
      f *= factors[ax][rest % n];
      rest /= n;
    }
    out[flat] *= f;
  }
  return out;
}

WaveFunction shift_spectrum(const WaveFunction& spectrum, std::span<const double> a) {
  const auto& grid = spectrum.grid();
  return WaveFunction(grid, modulate(spectrum.samples(), grid, frequency_axis(grid, 0), a),
                      Domain::frequency);
}

}  // namespace

const char* to_string(Channel c) { return c == Channel::shift ? "shift" : "impulse"; }

WaveFunction shift(const WaveFunction& u, std::span<const double> a) {
  if (u.domain() != Domain::position)
    throw Error(ErrorCode::domain_mismatch, "shift expects a position-domain wavefunction");
  check_parameter(u.grid(), a);
  return inverse_fourier(shift_spectrum(fourier(u), a));
}

WaveFunction impulse(const WaveFunction& u, std::span<const double> a) {
  if (u.domain() != Domain::position)
    throw Error(ErrorCode::domain_mismatch, "impulse expects a position-domain wavefunction");
  check_parameter(u.grid(), a);
  const auto& grid = u.grid();
  return WaveFunction(grid, modulate(u.samples(), grid, position_axis(grid, 0), a), Domain::position);
}

double conjugation_residual(const WaveFunction& u, std::span<const double> a) {
  if (u.domain() != Domain::position)
    throw Error(ErrorCode::domain_mismatch, "conjugation_residual expects a position-domain wavefunction");
  const GridSpec dual = u.grid().dual();
  const WaveFunction as_frequency = u.retagged(dual, Domain::frequency);
  const WaveFunction conjugated = fourier(shift(inverse_fourier(as_frequency), a));
  const WaveFunction direct = impulse(u, a).retagged(dual, Domain::frequency);
  return distance(direct, conjugated);
}

WaveFunction compose(Channel channel, const WaveFunction& u, std::span<const std::vector<double>> steps,
                     CompositionPath path) {
  const auto d = static_cast<std::size_t>(u.grid().dim);
  auto apply = [channel](const WaveFunction& v, std::span<const double> a) {
    return channel == Channel::shift ? shift(v, a) : impulse(v, a);
  };
  if (path == CompositionPath::sequential) {
    WaveFunction current = u;
    for (const auto& a : steps) current = apply(current, a);
    return current;
  }
  std::vector<double> total(d, 0.0);
  for (const auto& a : steps) {
    check_parameter(u.grid(), a);
    for (std::size_t i = 0; i < d; ++i) total[i] += a[i];
  }
  return steps.empty() ? u : apply(u, total);
}

ChannelOrbit::ChannelOrbit(Channel channel, WaveFunction initial)
    : channel_(channel), initial_(std::move(initial)), spectrum_(fourier(initial_)) {}

WaveFunction ChannelOrbit::state(std::span<const double> a) const {
  check_parameter(initial_.grid(), a);
  if (channel_ == Channel::impulse) return impulse(initial_, a);
  return inverse_fourier(shift_spectrum(spectrum_, a));
}

WaveFunction ChannelOrbit::spectrum(std::span<const double> a) const {
  check_parameter(initial_.grid(), a);
  if (channel_ == Channel::shift) return shift_spectrum(spectrum_, a);
  return fourier(impulse(initial_, a));
}

}  // namespace qlimit
