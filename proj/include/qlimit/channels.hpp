#pragma once

// Shift channel (S_a u)(x) = u(x + a), applied spectrally as
// F^{-1}[exp(i (a, alpha)) F u], and impulse channel (R_a u)(x) =
// exp(i (a, x)) u(x). Both are exact unitaries on the grid and form
// commutative one-parameter groups, so a composition collapses to a single
// application with the summed parameter.

#include <span>
#include <vector>

#include "qlimit/lattice.hpp"

namespace qlimit {

enum class Channel { shift, impulse };

const char* to_string(Channel c);

WaveFunction shift(const WaveFunction& u, std::span<const double> a);
WaveFunction impulse(const WaveFunction& u, std::span<const double> a);

// norm(R_a u - F S_a F^{-1} u), where u's samples are read as a frequency
// function on the dual grid (whose frequency axis is u's position axis).
double conjugation_residual(const WaveFunction& u, std::span<const double> a);

enum class CompositionPath { sequential, collapsed };

// Applies the channel for every parameter in `steps` (each of length d).
WaveFunction compose(Channel channel, const WaveFunction& u,
                     std::span<const std::vector<double>> steps,
                     CompositionPath path = CompositionPath::collapsed);

inline WaveFunction compose_shifts(const WaveFunction& u, std::span<const std::vector<double>> steps,
                                   CompositionPath path = CompositionPath::collapsed) {
  return compose(Channel::shift, u, steps, path);
}

// Orbit of a fixed state under one channel family. Caches F u so a shift
// costs one inverse transform and its spectrum costs no transform at all.
class ChannelOrbit {
 public:
  ChannelOrbit(Channel channel, WaveFunction initial);

  Channel channel() const { return channel_; }
  const WaveFunction& initial() const { return initial_; }
  const WaveFunction& initial_spectrum() const { return spectrum_; }

  // Position samples of C_a u.
  WaveFunction state(std::span<const double> a) const;
  // Frequency samples of F C_a u.
  WaveFunction spectrum(std::span<const double> a) const;

 private:
  Channel channel_;
  WaveFunction initial_;
  WaveFunction spectrum_;
};

}  // namespace qlimit
