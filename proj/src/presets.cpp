#include "qlimit/presets.hpp"

namespace qlimit {

// Grids: L = 16, N = 1024 (h = 1/32) by default. The frequency-kernel probe
// at alpha = +-1 needs L = 5 pi, whose frequency spacing 0.2 puts +-1 on the
// grid.
// Distributional presets use the uniform law on [-sqrt 3, sqrt 3] (mean 0,
// variance 1): a lattice law such as Rademacher makes scaled sums discrete,
// and KS against a continuous reference then measures the lattice step.
const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"slln_kernel_rademacher",
       "Almost-sure kernel convergence at (0,0) under shifts by prefix means of +-1 + 0.3",
       R"js({
  "format_version": 1,
  "name": "slln_kernel_rademacher",
  "theorem": "slln_kernel",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "rademacher", "scale": [1.0], "offset": [0.3]},
  "n_schedule": [100, 1000, 10000],
  "replicas": 50,
  "probes": [
    {"label": "kernel(0,0)", "kind": "kernel", "domain": "position", "x": [0.0], "y": [0.0]},
    {"label": "kernel(0,1)", "kind": "kernel", "domain": "position", "x": [0.0], "y": [1.0]}
  ],
  "tolerances": {"level": 0.01, "decay_factor": 5.0, "max_final_error": 0.02}
})js"},
      {"clt_kernel_uniform",
       "Gaussian-damped mean and distribution of the frequency kernel at (1,-1), n = 400",
       R"js({
  "format_version": 1,
  "name": "clt_kernel_uniform",
  "theorem": "clt_kernel",
  "grid": {"dim": 1, "half_width": 15.707963267948966, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "uniform_box", "lo": [-1.7320508075688772], "hi": [1.7320508075688772]},
  "n_schedule": [400],
  "replicas": 20000,
  "probes": [
    {"label": "fourier_kernel(1,-1)", "kind": "kernel", "domain": "frequency", "x": [1.0], "y": [-1.0]},
    {"label": "fourier_kernel(1,1)", "kind": "kernel", "domain": "frequency", "x": [1.0], "y": [1.0]}
  ],
  "tolerances": {"level": 0.01}
})js"},
      {"slln_wot_rademacher",
       "Almost-sure convergence of tr(rho A) for the indicator of [0, inf) and the projector onto u",
       R"js({
  "format_version": 1,
  "name": "slln_wot_rademacher",
  "theorem": "slln_wot",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "rademacher", "scale": [1.0], "offset": [0.3]},
  "n_schedule": [100, 1000, 10000],
  "replicas": 50,
  "probes": [
    {"label": "indicator[0,inf)", "kind": "operator",
     "operator": {"kind": "halfspace_indicator", "axis": 0, "threshold": 0.0}},
    {"label": "projector(u)", "kind": "operator", "operator": {"kind": "projector", "state": {"kind": "initial"}}},
    {"label": "identity", "kind": "operator", "operator": {"kind": "identity"}}
  ],
  "tolerances": {"level": 0.01, "decay_factor": 5.0, "max_final_error": 0.02}
})js"},
      {"clt_wot_uniform",
       "Distribution and mean of tr(rho A) after n = 400 scaled shifts vs Gaussian-shift references",
       R"js({
  "format_version": 1,
  "name": "clt_wot_uniform",
  "theorem": "clt_wot",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "uniform_box", "lo": [-1.7320508075688772], "hi": [1.7320508075688772]},
  "n_schedule": [400],
  "replicas": 5000,
  "probes": [
    {"label": "projector(u)", "kind": "operator", "operator": {"kind": "projector", "state": {"kind": "initial"}}},
    {"label": "indicator[0,inf)", "kind": "operator",
     "operator": {"kind": "halfspace_indicator", "axis": 0, "threshold": 0.0}}
  ],
  "tolerances": {"level": 0.01}
})js"},
      {"l1_wot_rademacher",
       "L1 convergence of tr(rho A) for the indicator of [0, inf), 2000 replicas per n",
       R"js({
  "format_version": 1,
  "name": "l1_wot_rademacher",
  "theorem": "l1_wot",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "rademacher", "scale": [1.0], "offset": [0.3]},
  "n_schedule": [100, 1000, 10000],
  "replicas": 2000,
  "probes": [
    {"label": "indicator[0,inf)", "kind": "operator",
     "operator": {"kind": "halfspace_indicator", "axis": 0, "threshold": 0.0}}
  ],
  "tolerances": {"level": 0.01, "decay_factor": 5.0}
})js"},
      {"random_walk_uniform",
       "Marginals of the polygonal line of tr(rho A) vs Wiener-shift references, n = 2000 steps",
       R"js({
  "format_version": 1,
  "name": "random_walk_uniform",
  "theorem": "random_walk",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "uniform_box", "lo": [-1.7320508075688772], "hi": [1.7320508075688772]},
  "n_schedule": [2000],
  "replicas": 2000,
  "times": [0.0, 0.25, 0.5, 1.0],
  "probes": [
    {"label": "projector(u)", "kind": "operator", "operator": {"kind": "projector", "state": {"kind": "initial"}}}
  ],
  "tolerances": {"level": 0.01}
})js"},
      {"impulse_slln_rademacher",
       "Almost-sure convergence under impulses; the multiplication probe is flagged vacuous",
       R"js({
  "format_version": 1,
  "name": "impulse_slln_rademacher",
  "theorem": "impulse_slln",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "rademacher", "scale": [1.0], "offset": [0.3]},
  "n_schedule": [100, 1000, 10000],
  "replicas": 50,
  "probes": [
    {"label": "kernel(0,1)", "kind": "kernel", "domain": "position", "x": [0.0], "y": [1.0]},
    {"label": "projector(u)", "kind": "operator", "operator": {"kind": "projector", "state": {"kind": "initial"}}},
    {"label": "indicator[0,inf)", "kind": "operator",
     "operator": {"kind": "halfspace_indicator", "axis": 0, "threshold": 0.0}}
  ],
  "tolerances": {"level": 0.01, "decay_factor": 5.0, "max_final_error": 0.02}
})js"},
      {"impulse_clt_uniform",
       "Distribution and Gaussian-damped mean of the position kernel at (1,-1) under impulses",
       R"js({
  "format_version": 1,
  "name": "impulse_clt_uniform",
  "theorem": "impulse_clt",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "uniform_box", "lo": [-1.7320508075688772], "hi": [1.7320508075688772]},
  "n_schedule": [400],
  "replicas": 5000,
  "probes": [
    {"label": "kernel(1,-1)", "kind": "kernel", "domain": "position", "x": [1.0], "y": [-1.0]},
    {"label": "projector(u)", "kind": "operator", "operator": {"kind": "projector", "state": {"kind": "initial"}}}
  ],
  "tolerances": {"level": 0.01}
})js"},
      {"impulse_l1_rademacher",
       "L1 convergence of tr(rho A) under impulses for the projector onto u",
       R"js({
  "format_version": 1,
  "name": "impulse_l1_rademacher",
  "theorem": "impulse_l1",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "rademacher", "scale": [1.0], "offset": [0.3]},
  "n_schedule": [100, 1000, 10000],
  "replicas": 2000,
  "probes": [
    {"label": "projector(u)", "kind": "operator", "operator": {"kind": "projector", "state": {"kind": "initial"}}}
  ],
  "tolerances": {"level": 0.01, "decay_factor": 5.0}
})js"},
      {"impulse_walk_uniform",
       "Polygonal-line marginals under impulses vs Wiener-impulse references",
       R"js({
  "format_version": 1,
  "name": "impulse_walk_uniform",
  "theorem": "impulse_walk",
  "grid": {"dim": 1, "half_width": 16.0, "points": 1024},
  "initial_state": {"kind": "gaussian", "center": [0.0], "width": 1.0},
  "distribution": {"kind": "uniform_box", "lo": [-1.7320508075688772], "hi": [1.7320508075688772]},
  "n_schedule": [2000],
  "replicas": 2000,
  "times": [0.25, 0.5, 1.0],
  "probes": [
    {"label": "projector(u)", "kind": "operator", "operator": {"kind": "projector", "state": {"kind": "initial"}}}
  ],
  "tolerances": {"level": 0.01}
})js"},
  };
  return all;
}

}  // namespace qlimit
