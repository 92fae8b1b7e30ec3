#include <doctest.h>

#include "oracles.hpp"
#include "qlimit/channels.hpp"
#include "qlimit/density.hpp"
#include "qlimit/error.hpp"

using namespace qlimit;
using oracle::pi;

namespace {

GridSpec g1() { return GridSpec::make(1, 16.0, 1024); }

WaveFunction unit_packet(const GridSpec& g, double c = 0.0) {
  std::vector<double> cc{c};
  return gaussian_packet(g, cc, 1.0);
}

KernelPoint kp(Domain d, double x, double y) { return {d, {x}, {y}}; }

Multiplication indicator(const GridSpec& g) {
  auto xs = position_axis(g, 0);
  Multiplication m;
  for (double x : xs) m.values.push_back(x > 0 ? 1.0 : x == 0 ? 0.5 : 0.0);
  return m;
}

}  // namespace

TEST_CASE("pure density requires a normalized position state") {
  auto g = g1();
  CHECK_THROWS_AS(PureDensity(WaveFunction(g, std::vector<cplx>(g.size(), 1.0))), Error);
  CHECK_THROWS_AS(PureDensity(fourier(unit_packet(g))), Error);
  CHECK_NOTHROW(PureDensity(unit_packet(g)));
}

TEST_CASE("kernel values of gaussian packets") {
  auto g = g1();
  PureDensity rho(unit_packet(g));
  CHECK(kernel_at(rho, kp(Domain::position, 0, 0)).real() == doctest::Approx(1 / std::sqrt(pi)).epsilon(1e-12));
  CHECK(kernel_at(rho, kp(Domain::position, 0, 0)).real() == doctest::Approx(0.5641895).epsilon(1e-7));

  std::vector<double> one{1.0};
  PureDensity shifted(shift(unit_packet(g), one));
  auto v = kernel_at(shifted, kp(Domain::position, 0, 0));
  CHECK(v.real() == doctest::Approx(std::exp(-1.0) / std::sqrt(pi)).epsilon(1e-9));
  CHECK(v.real() == doctest::Approx(0.2075537).epsilon(1e-7));
  CHECK(std::abs(v.imag()) < 1e-12);

  auto diag = kernel_at(rho, kp(Domain::position, 0.75, 0.75));
  CHECK(diag.real() >= 0);
  CHECK(diag.imag() == 0.0);

  CHECK_THROWS_AS(kernel_at(rho, kp(Domain::position, 0.01, 0)), Error);
  CHECK_THROWS_AS(kernel_at(rho, kp(Domain::frequency, 0, 0)), Error);
}

TEST_CASE("kernel hermiticity") {
  std::mt19937_64 gen(1);
  auto g = g1();
  PureDensity rho(oracle::random_packet_state(g, gen));
  auto xs = position_axis(g, 0);
  for (std::size_t i = 300; i < 700; i += 37)
    for (std::size_t j = 310; j < 720; j += 41) {
      auto a = kernel_at(rho, kp(Domain::position, xs[i], xs[j]));
      auto b = kernel_at(rho, kp(Domain::position, xs[j], xs[i]));
      CHECK(std::abs(a - std::conj(b)) == 0.0);
    }
}

TEST_CASE("fourier kernel and the shift phase identity") {
  std::mt19937_64 gen(2);
  auto g = g1();
  auto u = oracle::random_packet_state(g, gen);
  PureDensity rho(u);
  auto al = frequency_axis(g, 0);

  auto d = fourier_kernel_at(rho, kp(Domain::frequency, al[520], al[520]));
  CHECK(d.real() >= 0);
  CHECK(d.imag() == 0.0);

  std::vector<double> zero{0.0};
  PureDensity same(shift(u, zero));
  CHECK(std::abs(fourier_kernel_at(same, kp(Domain::frequency, al[500], al[530])) -
                 fourier_kernel_at(rho, kp(Domain::frequency, al[500], al[530]))) < 1e-14);

  // F rho[v] F^{-1} has kernel (Fv)(alpha) conj((Fv)(beta)) with Fv from direct quadrature
  std::vector<cplx> us(u.samples().begin(), u.samples().end());
  std::uniform_real_distribution<double> shift_law(-3, 3);
  double worst = 0, worst_conj = 0;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a{shift_law(gen)};
    PureDensity moved(shift(u, a));
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) {
        std::size_t ia = 448 + 8 * i, ib = 452 + 8 * j;
        auto lhs = fourier_kernel_at(moved, kp(Domain::frequency, al[ia], al[ib]));
        auto base = fourier_kernel_at(rho, kp(Domain::frequency, al[ia], al[ib]));
        worst = std::max(worst, std::abs(lhs - std::polar(1.0, a[0] * (al[ia] - al[ib])) * base));
        if (rep == 0) {
          cplx fa = oracle::continuum_ft_1d(us, 16.0, al[ia]), fb = oracle::continuum_ft_1d(us, 16.0, al[ib]);
          worst_conj = std::max(worst_conj, std::abs(base - fa * std::conj(fb)));
        }
      }
  }
  CHECK(worst < 1e-9);
  CHECK(worst_conj < 1e-12);
}

TEST_CASE("apply operator") {
  std::mt19937_64 gen(3);
  auto g = g1();
  auto u = oracle::random_packet_state(g, gen);
  auto id = BoundedOperator::identity(g);
  CHECK(oracle::sup_diff(apply_operator(id, u).samples(), u.samples()) == 0.0);
  CHECK(oracle::sup_diff(apply_operator(BoundedOperator::projector(u), u).samples(), u.samples()) < 1e-12);

  // w orthogonal to u: rank one |v><w| kills u
  auto v = oracle::random_packet_state(g, gen);
  auto w0 = oracle::random_packet_state(g, gen);
  auto c = inner(u, w0);
  std::vector<cplx> ws(w0.samples().begin(), w0.samples().end());
  for (std::size_t i = 0; i < ws.size(); ++i) ws[i] -= c * u[i];
  BoundedOperator r(g, RankOne{v, WaveFunction(g, ws)});
  CHECK(norm(apply_operator(r, u)) < 1e-12);
}

TEST_CASE("operator norm bounds") {
  std::mt19937_64 gen(4);
  auto g = g1();
  Multiplication m;
  for (std::size_t i = 0; i < g.size(); ++i) m.values.push_back(cplx(0.0, i == 17 ? -2.5 : 1.0));
  CHECK(BoundedOperator(g, m).operator_norm_bound() == doctest::Approx(2.5));

  auto v = oracle::random_packet_state(g, gen);
  CHECK(BoundedOperator::projector(v).operator_norm_bound() == doctest::Approx(1.0));

  // two orthonormal packets far apart; M = [[0, 3], [1, 0]] has spectral norm 3
  std::vector<double> l{-5.0}, r{5.0};
  FiniteMatrix fm{{gaussian_packet(g, l, 1.0), gaussian_packet(g, r, 1.0)}, Eigen::MatrixXcd(2, 2)};
  fm.matrix << 0, 3, 1, 0;
  BoundedOperator op(g, fm);
  CHECK(op.operator_norm_bound() == doctest::Approx(3.0).epsilon(1e-9));

  FiniteMatrix bad{{unit_packet(g), unit_packet(g, 0.5)}, Eigen::MatrixXcd::Identity(2, 2)};
  CHECK_THROWS_AS(BoundedOperator(g, bad), Error);
}

TEST_CASE("trace functional") {
  auto g = g1();
  auto u = unit_packet(g);
  PureDensity rho(u);
  CHECK(std::abs(trace_functional(rho, BoundedOperator::identity(g)) - 1.0) < 1e-10);
  CHECK(std::abs(trace_functional(rho, BoundedOperator::projector(u)) - 1.0) < 1e-10);
  BoundedOperator ind(g, indicator(g));
  CHECK(std::abs(trace_functional(rho, ind).real() - 0.5) < 1e-3);

  // shifted by 0.5: mass of |u(x + 0.5)|^2 on [0, inf), from quadrature
  std::vector<double> half{0.5};
  PureDensity moved(shift(u, half));
  double quad = oracle::simpson([](double x) { return std::pow(oracle::gauss(x, -0.5), 2); }, 0, 40, 40000);
  // trapezoid error on [0, inf): h^2/12 |f'(0)|, f = |u(x + 0.5)|^2
  const double h = g.spacing();
  const double fprime = 2 * 0.5 * std::pow(oracle::gauss(0, -0.5), 2);
  CHECK(std::abs(trace_functional(moved, ind).real() - quad) < 1.01 * h * h / 12 * fprime);
}

TEST_CASE("trace distance between pure states") {
  std::mt19937_64 gen(5);
  auto g = g1();
  auto u = oracle::random_packet_state(g, gen);
  CHECK(trace_distance_pure(u, u) < 1e-12);
  std::vector<cplx> ph(u.samples().begin(), u.samples().end());
  for (auto& s : ph) s *= std::polar(1.0, 0.9);
  CHECK(trace_distance_pure(u, WaveFunction(g, ph)) < 1e-12);

  std::vector<double> l{-6.0}, r{6.0};
  CHECK(trace_distance_pure(gaussian_packet(g, l, 0.5), gaussian_packet(g, r, 0.5)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(trace_distance_pure(u, WaveFunction(g, std::vector<cplx>(g.size(), 1.0))), Error);
}

TEST_CASE("trace norm bound on random pairs") {
  std::mt19937_64 gen(6);
  auto g = GridSpec::make(1, 4.0, 64);
  int violations = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    auto u = normalize(WaveFunction(g, oracle::random_samples(64, gen)));
    auto v = normalize(WaveFunction(g, oracle::random_samples(64, gen)));
    if (rep % 2) {
      // nearby pairs exercise the small-distance regime
      std::vector<cplx> w(u.samples().begin(), u.samples().end());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += 1e-3 * v[i];
      v = normalize(WaveFunction(g, w));
    }
    if (trace_distance_pure(u, v) > 2 * distance(u, v) + 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("WOT continuity bound") {
  std::mt19937_64 gen(7);
  auto g = g1();
  auto u = unit_packet(g);
  std::uniform_real_distribution<double> s(-3, 3);
  std::vector<BoundedOperator> ops{BoundedOperator(g, indicator(g)), BoundedOperator::projector(u),
                                   BoundedOperator(g, RankOne{u, unit_packet(g, 1.0)})};
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x{s(gen)}, y{s(gen)};
    auto sx = shift(u, x), sy = shift(u, y);
    const auto& a = ops[rep % ops.size()];
    double lhs = std::abs(trace_functional(PureDensity(sx), a) - trace_functional(PureDensity(sy), a));
    CHECK(lhs <= a.operator_norm_bound() * trace_distance_pure(sx, sy) + 1e-12);
  }
}
