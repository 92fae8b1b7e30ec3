#pragma once

// Pure states rho[u] = |u><u| and bounded test operators. Density operators
// are never materialised as matrices: kernels are evaluated pointwise and
// trace functionals as <u|A|u>.
//
// Kernel convention: rho[u](x, y) = u(x) conj(u(y)), so that
// (rho v)(x) = \int rho(x, y) v(y) dy.

#include <Eigen/Dense>

#include <complex>
#include <variant>
#include <vector>

#include "qlimit/lattice.hpp"

namespace qlimit {

class PureDensity {
 public:
  // Requires |norm(u) - 1| < 1e-10 and a position-domain u.
  explicit PureDensity(WaveFunction u);

  const WaveFunction& state() const { return u_; }

 private:
  WaveFunction u_;
};

struct KernelPoint {
  Domain domain = Domain::position;
  std::vector<double> x;
  std::vector<double> y;
};

// u(x) conj(u(y)); p must be a position-domain point.
cplx kernel_at(const PureDensity& rho, const KernelPoint& p);
// (F u)(alpha) conj((F u)(beta)); p must be a frequency-domain point.
cplx fourier_kernel_at(const PureDensity& rho, const KernelPoint& p);

struct Multiplication {
  std::vector<cplx> values;  // one per position node
};

// |v><w|
struct RankOne {
  WaveFunction v;
  WaveFunction w;
};

// sum_ij M_ij |b_i><b_j| over an orthonormal family b.
struct FiniteMatrix {
  std::vector<WaveFunction> basis;
  Eigen::MatrixXcd matrix;
};

class BoundedOperator {
 public:
  using Variant = std::variant<Multiplication, RankOne, FiniteMatrix>;

  // Validates the variant against `grid` and computes the operator norm bound:
  // sup|m| for multiplications, |v||w| for rank one, spectral norm of M for
  // finite matrices (basis must be orthonormal within 1e-10).
  BoundedOperator(const GridSpec& grid, Variant op);

  static BoundedOperator identity(const GridSpec& grid);
  static BoundedOperator projector(const WaveFunction& v);

  const GridSpec& grid() const { return grid_; }
  const Variant& variant() const { return op_; }
  double operator_norm_bound() const { return norm_bound_; }
  bool is_multiplication() const { return std::holds_alternative<Multiplication>(op_); }

 private:
  GridSpec grid_;
  Variant op_;
  double norm_bound_ = 0.0;
};

WaveFunction apply_operator(const BoundedOperator& a, const WaveFunction& u);

// tr(rho[u] A) = <u|A|u>
cplx trace_functional(const PureDensity& rho, const BoundedOperator& a);
// Same quantity for an arbitrary (not necessarily normalized) state.
cplx expectation(const WaveFunction& u, const BoundedOperator& a);

// 2 sqrt(1 - |<u,v>|^2), the trace norm of rho[u] - rho[v], evaluated as
// 2 ||v - <u,v> u|| after rescaling both to unit norm. Both inputs must be
// normalized within 1e-10.
double trace_distance_pure(const WaveFunction& u, const WaveFunction& v);

}  // namespace qlimit
