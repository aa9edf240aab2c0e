#include "fwlab/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fwlab;

namespace {

Field from_function(const Grid& g, const std::function<double(double)>& f) {
  Field out(g);
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = f(g.node(j));
  return out;
}

double max_abs_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid geometry and wavenumber convention") {
  const Grid g(20.0, 1024);
  CHECK(g.dx() * 1024 == doctest::Approx(40.0).epsilon(1e-15));
  CHECK(g.node(0) == -20.0);
  CHECK(g.wavenumber(1) == doctest::Approx(std::numbers::pi / 20.0));
  CHECK(g.wavenumber(1023) == doctest::Approx(-std::numbers::pi / 20.0));
  CHECK(g.is_nyquist(512));
  CHECK(g.mode_index(512) == -512);
  CHECK_THROWS_AS(Grid(20.0, 1000), DomainError);
  CHECK_THROWS_AS(Grid(20.0, 8), DomainError);
  CHECK_THROWS_AS(Grid(-1.0, 64), DomainError);
}

TEST_CASE("constant and single harmonic transforms") {
  const Grid g(5.0, 64);
  const auto c = forward(from_function(g, [](double) { return 1.0; }));
  CHECK(std::abs(c[0]) == doctest::Approx(64.0));
  for (std::size_t k = 1; k < 64; ++k) CHECK(std::abs(c[k]) < 1e-12);

  const double L = g.half_width();
  const auto h = forward(from_function(g, [&](double x) { return std::cos(std::numbers::pi * x / L); }));
  for (std::size_t k = 0; k < 64; ++k) {
    if (k == 1 || k == 63)
      CHECK(std::abs(h[k]) == doctest::Approx(32.0));
    else
      CHECK(std::abs(h[k]) < 1e-12);
  }
}

TEST_CASE("round trip of random smooth fields") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const Grid g(10.0, 256);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(8);
    for (auto& v : a) v = amp(rng);
    const Field f = from_function(g, [&](double x) {
      double s = 0.0;
      for (std::size_t m = 0; m < a.size(); ++m) s += a[m] * std::sin((m + 1) * std::numbers::pi * x / 10.0 + m);
      return s;
    });
    const Field back = inverse(forward(f));
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      num += (back[j] - f[j]) * (back[j] - f[j]);
      den += f[j] * f[j];
    }
    CHECK(std::sqrt(num / den) < 1e-12);
  }
}

TEST_CASE("multipliers") {
  const Grid g(4.0, 128);
  const double L = g.half_width();
  const Field s = from_function(g, [&](double x) { return std::sin(std::numbers::pi * x / L); });
  const auto c = forward(s);
  const Field zero = inverse(apply_multiplier(c, [](double) { return cplx{0.0, 0.0}; }));
  CHECK(linf_norm(zero) == 0.0);
  const Field same = inverse(apply_multiplier(c, [](double) { return cplx{1.0, 0.0}; }));
  CHECK(max_abs_diff(same, s) < 1e-14);
  const Field ds = inverse(apply_multiplier(c, [](double xi) { return cplx{0.0, xi}; }));
  const Field expect = from_function(g, [&](double x) { return std::numbers::pi / L * std::cos(std::numbers::pi * x / L); });
  CHECK(max_abs_diff(ds, expect) < 1e-12);
  CHECK(forward(ds).conjugate_symmetry_defect() < 1e-14);
  CHECK_THROWS_AS(apply_multiplier(c, [](double xi) { return cplx{1.0 / (xi - xi), 0.0}; }), NonFiniteValue);
}

TEST_CASE("spectral derivative of harmonics is exact") {
  const Grid g(3.0, 64);
  for (int m = 1; m < 20; ++m) {
    const double w = m * std::numbers::pi / 3.0;
    const Field f = from_function(g, [&](double x) { return std::cos(w * x); });
    const Field d2 = derivative(f, 2);
    const Field expect = from_function(g, [&](double x) { return -w * w * std::cos(w * x); });
    CHECK(max_abs_diff(derivative(f), from_function(g, [&](double x) { return -w * std::sin(w * x); })) < 1e-12 * w);
    CHECK(max_abs_diff(d2, expect) < 1e-12 * w * w);
  }
  CHECK_THROWS_AS(derivative(Field(g), 0), DomainError);
}

TEST_CASE("fw multiplier values and shape") {
  const auto k1 = KernelParams::make(0.5, 1.0);
  CHECK(fw_multiplier(k1, 0.0) == 0.0);
  CHECK(fw_multiplier(k1, 1.0) == doctest::Approx(0.5));
  const auto k2 = KernelParams::make(0.5, 1.5);
  CHECK(fw_multiplier(k2, 1.5) == doctest::Approx(0.5));
  for (const auto k : {k1, k2, KernelParams::make(2.0, 0.25)}) {
    for (double xi = -50.0; xi <= 50.0; xi += 0.01) {
      CHECK(fw_multiplier(k, -xi) == -fw_multiplier(k, xi));
      CHECK(std::abs(fw_multiplier(k, xi)) <= k.B * (1.0 + 1e-15));
    }
    CHECK(fw_multiplier(k, k.b) == doctest::Approx(k.B));
    CHECK(fw_multiplier(k, -k.b) == doctest::Approx(-k.B));
  }
  CHECK_THROWS_AS(KernelParams::make(0.0, 1.0), DomainError);
  CHECK(KernelParams::burgers_limit().is_burgers_limit());
}

TEST_CASE("kernel convolution matches direct quadrature") {
  const Grid g(20.0, 2048);
  const double L = g.half_width();
  for (const double lambda : {0.5, 1.0, 4.0}) {
    const Field f = from_function(g, [&](double x) { return std::exp(-lambda * x * x); });
    auto fx = [&](double y) { return -2.0 * lambda * y * std::exp(-lambda * y * y); };
    const double R = 7.0 / std::sqrt(lambda);
    for (const auto& [B, b] : {std::pair{0.5, 1.5}, std::pair{1.0, 1.0}, std::pair{2.0, 0.25}}) {
      const Field conv = kernel_convolve(f, KernelParams::make(B, b));
      const int images = static_cast<int>(std::ceil(45.0 / (2.0 * L * b))) + 1;
      double err = 0.0;
      for (std::size_t j = 0; j < g.size(); j += 16) {
        const double ref = oracle::periodic_kernel_integral(B, b, fx, R, L, g.node(j), images);
        err = std::max(err, std::abs(conv[j] - ref));
      }
      INFO("lambda=" << lambda << " B=" << B << " b=" << b);
      CHECK(err <= 1e-8);
    }
  }
}

TEST_CASE("kernel convolution equals the line integral when the kernel decays within the box") {
  const Grid g(20.0, 2048);
  const Field f = from_function(g, [](double x) { return std::exp(-x * x); });
  auto fx = [](double y) { return -2.0 * y * std::exp(-y * y); };
  for (const auto& [B, b] : {std::pair{0.5, 1.5}, std::pair{1.0, 1.0}}) {
    const Field conv = kernel_convolve(f, KernelParams::make(B, b));
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); j += 32)
      err = std::max(err, std::abs(conv[j] - oracle::kernel_integral(B, b, fx, 7.0, g.node(j))));
    CHECK(err <= 1e-8);
  }
}

TEST_CASE("kernel convolution parity, zero and tail guard") {
  const Grid g(20.0, 512);
  const auto k = KernelParams::make(0.5, 1.5);
  CHECK(linf_norm(kernel_convolve(Field(g), k)) == 0.0);
  const Field odd = from_function(g, [](double x) { return -x * std::exp(-x * x); });
  const Field c = kernel_convolve(odd, k);
  for (std::size_t j = 1; j < g.size() / 2; ++j) CHECK(std::abs(c[j] - c[g.size() - j]) < 1e-13);
  const Field wide = from_function(g, [](double x) { return std::exp(-x * x / 200.0); });
  CHECK_THROWS_AS(kernel_convolve(wide, k), TailViolation);
}

TEST_CASE("norms against closed forms and quadrature") {
  const Grid g(20.0, 1024);
  const Norms z = norms(Field(g), 2.0);
  CHECK(z.l2 == 0.0);
  CHECK(z.linf == 0.0);
  CHECK(z.h_s == 0.0);
  CHECK(z.w_s1 == 0.0);

  const double pi = std::numbers::pi;
  const Field gauss = from_function(g, [](double x) { return std::exp(-x * x); });
  CHECK(l2_norm(gauss) == doctest::Approx(std::pow(2.0, -0.25) * std::pow(pi, 0.25)).epsilon(1e-6));
  const Field odd = from_function(g, [](double x) { return -x * std::exp(-x * x); });
  CHECK(l2_norm(odd) == doctest::Approx(std::pow(2.0, -1.25) * std::pow(pi, 0.25)).epsilon(1e-6));
  CHECK(sobolev_norm(gauss, 0.0) == doctest::Approx(l2_norm(gauss)).epsilon(1e-12));
  CHECK(linf_norm(gauss) == 1.0);

  // |f|_{H^1}^2 = |f|_2^2 + |f'|_2^2
  const double h1 = oracle::romberg([](double x) { return (1.0 + 4.0 * x * x) * std::exp(-2.0 * x * x); }, -10.0, 10.0);
  CHECK(sobolev_norm(gauss, 1.0) == doctest::Approx(std::sqrt(h1)).epsilon(1e-10));
  // W^{0,1} is the L1 norm.
  CHECK(norms(gauss, 0.0).w_s1 == doctest::Approx(std::sqrt(pi)).epsilon(1e-10));
  CHECK(lr_norm(gauss, 4.0) == doctest::Approx(std::pow(std::sqrt(pi / 4.0), 0.25)).epsilon(1e-10));
  CHECK(lr_norm(gauss, std::numeric_limits<double>::infinity()) == 1.0);
}

TEST_CASE("poisoned fields are refused") {
  const Grid g(1.0, 16);
  Field f(g);
  f[3] = std::nan("");
  CHECK_FALSE(f.is_finite());
  CHECK_THROWS_AS(forward(f), NonFiniteValue);
  CHECK_THROWS_AS(Field(Grid(1.0, 16), std::vector<double>(8)), GridMismatch);
  CHECK_THROWS_AS(inverse(SpectralCoeffs(Grid(1.0, 32), std::vector<cplx>(16))), GridMismatch);
}

TEST_CASE("interpolation and refinement") {
  const Grid g(10.0, 256);
  const Field f = from_function(g, [](double x) { return std::exp(-x * x) * std::cos(2.0 * x); });
  const auto c = forward(f);
  for (std::size_t j = 0; j < g.size(); j += 7) CHECK(evaluate(c, g.node(j)) == doctest::Approx(f[j]).epsilon(1e-12));
  for (double x = -3.0; x < 3.0; x += 0.137)
    CHECK(std::abs(evaluate(c, x) - std::exp(-x * x) * std::cos(2.0 * x)) < 1e-12);
  const Field fine = refine(f, 4);
  CHECK(fine.size() == 1024);
  for (std::size_t j = 0; j < fine.size(); ++j) {
    const double x = fine.grid().node(j);
    CHECK(std::abs(fine[j] - std::exp(-x * x) * std::cos(2.0 * x)) < 1e-12);
  }
  CHECK(max_abs_diff(refine(f, 1), f) == 0.0);
}

}  // TEST_SUITE
