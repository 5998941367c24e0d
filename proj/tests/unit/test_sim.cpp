/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "helpers.hpp"
#include "rfpipe/error.hpp"
#include "rfpipe/parallel.hpp"
#include "rfpipe/sim.hpp"
#include "rfpipe/summation.hpp"

using namespace rfpipe;
using std::numbers::pi;

namespace {

sim::ScattererCloud random_cloud(std::size_t n, std::uint64_t seed, double half_w = 4e-3,
                                 double z0 = 5e-3, double z1 = 15e-3) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(-half_w, half_w), uz(z0, z1);
  std::normal_distribution<double> ua(0.0, 1.0);
  sim::ScattererCloud c;
  for (std::size_t s = 0; s < n; ++s) {
    c.x.push_back(ux(gen));
    c.z.push_back(uz(gen));
    c.amp.push_back(ua(gen));
  }
  return c;
}

const ProbeGeometry kProbe16(16, 0.3e-3);
const sim::PulseModel kPulse;
const sim::FsaSettings kFsa;
const sim::TimeSpan kSpan{0.0, 560};  // 26.9 us covers 2 * 20 mm paths

double rel_l2(std::span<const double> a, std::span<const double> b) {
  long double num = 0, den = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (long double)(a[k] - b[k]);
    den += a[k] * (long double)a[k];
  }
  return static_cast<double>(std::sqrt(num / den));
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

// |X(f)| of the pulse sampled at 1 GHz, by direct summation.
double pulse_dtft(double f) {
  const double dt = 1e-9;
  std::complex<double> acc = 0;
  for (int k = -2000; k <= 2000; ++k) {
    const double t = k * dt;
    acc += sim::pulse_eval(kPulse, t) * std::polar(1.0, -2 * pi * f * t);
  }
  return std::abs(acc) * dt;
}

}  // namespace

TEST_SUITE("pulse") {
  TEST_CASE("peak and sign") {
    CHECK(sim::pulse_eval(kPulse, 0.0) == 1.0);
    const double t = 1.0 / (2.0 * kPulse.f0());
    const double expect = -std::exp(-t * t / (2 * kPulse.sigma_t() * kPulse.sigma_t()));
    CHECK(sim::pulse_eval(kPulse, t) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(sim::pulse_eval(kPulse, t) < 0);
  }
  TEST_CASE("sigma relations") {
    const double sf = 0.6 * 5.208e6 / (2 * std::sqrt(2 * std::log(2.0)));
    CHECK(kPulse.sigma_f() == doctest::Approx(sf).epsilon(1e-14));
    CHECK(kPulse.sigma_t() == doctest::Approx(1 / (2 * pi * sf)).epsilon(1e-14));
  }
  TEST_CASE("amplitude spectrum -6 dB full width is 0.6 f0") {
    const double peak = pulse_dtft(kPulse.f0());
    auto edge = [&](double lo, double hi) {
      // Bisection on |X(f)| = peak / 2 with lo inside the passband.
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pulse_dtft(mid) > 0.5 * peak ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    const double f_hi = edge(kPulse.f0(), 3 * kPulse.f0());
    const double f_lo = edge(kPulse.f0(), 0.0);
    const double width = f_hi - f_lo;
    CHECK(width == doctest::Approx(0.6 * kPulse.f0()).epsilon(0.02));
  }
}

TEST_SUITE("phantom sampling") {
  TEST_CASE("density zero gives an empty cloud") {
    Phantom p = default_phantom(false);
    p.scatterer_density = 0;
    CHECK(sim::sample_phantom(p).size() == 0);
  }
  TEST_CASE("count matches the binomial expectation") {
    const Phantom p = default_phantom(false, 17);
    const auto cloud = sim::sample_phantom(p);
    const double n = 18000;
    const double keep = 1 - 2 * pi * 9 / 1800;
    const double sd = std::sqrt(n * keep * (1 - keep));
    CHECK(std::abs(static_cast<double>(cloud.size()) - n * keep) <= 4 * sd);
  }
  TEST_CASE("cysts are empty and positions lie in the extent") {
    const Phantom p = default_phantom(false, 2);
    const auto c = sim::sample_phantom(p);
    for (std::size_t s = 0; s < c.size(); ++s) {
      REQUIRE(std::abs(c.x[s]) <= 0.0225);
      REQUIRE(c.z[s] >= 0.0);
      REQUIRE(c.z[s] <= 0.040);
      for (const Cyst& cy : p.cysts) REQUIRE(std::hypot(c.x[s] - cy.x_m, c.z[s] - cy.z_m) >= cy.r_m);
    }
  }
  TEST_CASE("amplitude distribution") {
    Phantom p = default_phantom(false, 8);
    p.amp_sigma = 2.5;
    const auto c = sim::sample_phantom(p);
    CHECK(std::abs(compensated_mean(c.amp)) < 0.05);
    CHECK(population_std(c.amp) == doctest::Approx(2.5).epsilon(0.02));
  }
  TEST_CASE("point target appended once with the configured gain") {
    const Phantom with = default_phantom(true, 4);
    const Phantom without = default_phantom(false, 4);
    const auto a = sim::sample_phantom(without);
    const auto b = sim::sample_phantom(with);
    REQUIRE(b.size() == a.size() + 1);
    CHECK(std::equal(a.amp.begin(), a.amp.end(), b.amp.begin()));
    CHECK(std::equal(a.x.begin(), a.x.end(), b.x.begin()));
    CHECK(b.x.back() == 0.0);
    CHECK(b.z.back() == 0.027);
    CHECK(b.amp.back() == doctest::Approx(100.0 * rms(a.amp)).epsilon(1e-12));
  }
  TEST_CASE("same seed is bitwise identical, different seed differs") {
    const auto a = sim::sample_phantom(default_phantom(true, 5));
    const auto b = sim::sample_phantom(default_phantom(true, 5));
    CHECK(a.x == b.x);
    CHECK(a.amp == b.amp);
    CHECK(sim::sample_phantom(default_phantom(true, 6)).x != a.x);
  }
}

TEST_SUITE("fsa") {
  TEST_CASE("empty cloud gives an all-zero tensor") {
    const RFFrame f = sim::simulate_fsa({}, kProbe16, kPulse, kFsa, kSpan);
    CHECK(f.kind() == FrameKind::FsaTensor);
    CHECK(f.dims() == Dims{560, 16, 16});
    CHECK(std::all_of(f.samples().begin(), f.samples().end(), [](double v) { return v == 0.0; }));
  }
  TEST_CASE("single scatterer peak time matches the closed form") {
    sim::ScattererCloud c;
    c.x = {0.0};
    c.z = {20e-3};
    c.amp = {1.0};
    const RFFrame f = sim::simulate_fsa(c, kProbe16, kPulse, kFsa, kSpan);
    const auto& ex = kProbe16.positions();
    for (std::uint32_t i = 0; i < 16; ++i) {
      for (std::uint32_t j = 0; j < 16; ++j) {
        const auto col = f.column(j, i);
        const auto k = std::max_element(col.begin(), col.end()) - col.begin();
        const double t = (std::hypot(ex[i], 20e-3) + std::hypot(ex[j], 20e-3)) / 1540.0;
        CHECK(std::abs(static_cast<double>(k) - t * kFsa.fs) <= 1.0);
      }
    }
  }
  TEST_CASE("reciprocity, linearity and superposition to 1e-12") {
    const auto a = random_cloud(100, 1);
    const auto b = random_cloud(100, 2);
    const RFFrame fa = sim::simulate_fsa(a, kProbe16, kPulse, kFsa, kSpan);
    const RFFrame fb = sim::simulate_fsa(b, kProbe16, kPulse, kFsa, kSpan);
    double peak = 0;
    for (double v : fa.samples()) peak = std::max(peak, std::abs(v));
    double worst = 0;
    for (std::uint32_t i = 0; i < 16; ++i) {
      for (std::uint32_t j = 0; j < 16; ++j) {
        for (std::uint32_t k = 0; k < kSpan.n_samples; ++k) {
          worst = std::max(worst, std::abs(fa.at(k, j, i) - fa.at(k, i, j)));
        }
      }
    }
    CHECK(worst <= 1e-12 * peak);

    const RFFrame fs = sim::simulate_fsa(a.scaled(-3.5), kProbe16, kPulse, kFsa, kSpan);
    std::vector<double> expect(fa.samples().begin(), fa.samples().end());
    for (double& v : expect) v *= -3.5;
    CHECK(testutil::max_rel_diff(expect, fs.samples()) <= 1e-12);

    const RFFrame fu = sim::simulate_fsa(a.merged(b), kProbe16, kPulse, kFsa, kSpan);
    std::vector<double> sum(fa.size());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = fa.samples()[k] + fb.samples()[k];
    CHECK(testutil::max_rel_diff(sum, fu.samples()) <= 1e-12);
  }
  TEST_CASE("thread count does not change the tensor") {
    const auto a = random_cloud(100, 3);
    set_num_threads(1);
    const RFFrame f1 = sim::simulate_fsa(a, kProbe16, kPulse, kFsa, kSpan);
    set_num_threads(8);
    const RFFrame f8 = sim::simulate_fsa(a, kProbe16, kPulse, kFsa, kSpan);
    set_num_threads(0);
    CHECK(f1 == f8);
  }
  TEST_CASE("parallel kernel agrees with the direct reference") {
    const auto a = random_cloud(60, 4);
    const RFFrame p = sim::simulate_fsa(a, kProbe16, kPulse, kFsa, kSpan);
    const RFFrame r = sim::simulate_fsa_reference(a, kProbe16, kPulse, kFsa, kSpan);
    CHECK(testutil::max_rel_diff(r.samples(), p.samples()) <= 1e-10);
  }
  TEST_CASE("errors") {
    const auto a = random_cloud(5, 5);
    CHECK(code_of([&] { sim::simulate_fsa(a, kProbe16, kPulse, {15e6, 1540}, kSpan); }) == ErrorCode::Aliasing);
    CHECK(code_of([&] { sim::simulate_fsa(a, kProbe16, kPulse, kFsa, {0.0, 0}); }) == ErrorCode::EmptySpan);
    CHECK(code_of([&] { sim::simulate_fsa(a, kProbe16, kPulse, kFsa, {0.0, 100}); }) == ErrorCode::SpanTooShort);
  }
  TEST_CASE("auto span covers the phantom") {
    const Phantom p = default_phantom(false);
    const ProbeGeometry probe = ProbeGeometry::linear64();
    const auto span = sim::auto_span(p, probe, kPulse, kFsa.fs, kFsa.c);
    const double far = std::hypot(0.0225 + probe.aperture_half_width(), 0.040);
    CHECK(span.t0 == 0.0);
    CHECK(static_cast<double>(span.n_samples - 1) / kFsa.fs >= 2 * far / kFsa.c);
  }
}

TEST_SUITE("aberration") {
  TEST_CASE("zero rms gives zero delays") {
    const auto a = sim::gen_aberration(64, 0.0, 6.0, 1);
    CHECK(a.delays_s.size() == 64);
    CHECK(std::all_of(a.delays_s.begin(), a.delays_s.end(), [](double d) { return d == 0.0; }));
  }
  TEST_CASE("rms is exact, mean is removed") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto a = sim::gen_aberration(64, 50.0, 6.0, seed);
      CHECK(rms(a.delays_s) == doctest::Approx(50e-9).epsilon(1e-3));
      CHECK(std::abs(compensated_mean(a.delays_s)) < 1e-20);
    }
  }
  TEST_CASE("seeded determinism and decorrelation across seeds") {
    CHECK(sim::gen_aberration(64, 50, 6, 3).delays_s == sim::gen_aberration(64, 50, 6, 3).delays_s);
    double sum_abs = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const auto a = sim::gen_aberration(64, 50, 6, 2 * k);
      const auto b = sim::gen_aberration(64, 50, 6, 2 * k + 1);
      const double num = std::inner_product(a.delays_s.begin(), a.delays_s.end(), b.delays_s.begin(), 0.0);
      const double rho = num / (64 * rms(a.delays_s) * rms(b.delays_s));
      sum_abs += std::abs(rho);
    }
    CHECK(sum_abs / 100 < 0.5);
  }
  TEST_CASE("neighbouring elements are correlated") {
    double acc = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto a = sim::gen_aberration(64, 50, 6, seed);
      double c1 = 0;
      for (std::size_t e = 0; e + 1 < 64; ++e) c1 += a.delays_s[e] * a.delays_s[e + 1];
      acc += c1 / (63 * 50e-9 * 50e-9);
    }
    CHECK(acc / 20 > 0.8);
  }
  TEST_CASE("argument errors") {
    CHECK_THROWS_AS(sim::gen_aberration(64, -1, 6, 0), Error);
    CHECK_THROWS_AS(sim::gen_aberration(64, 50, 0, 0), Error);
  }
}

TEST_SUITE("plane-wave synthesis") {
  const auto cloud = random_cloud(40, 9);

  TEST_CASE("zero delays reduce exactly to the transmit sum") {
    const RFFrame fsa = sim::simulate_fsa(cloud, kProbe16, kPulse, kFsa, kSpan);
    const RFFrame pw = sim::synth_planewave(fsa, {}, {});
    CHECK(pw.kind() == FrameKind::ChannelData);
    CHECK(pw.dims() == Dims{560, 16, 1});
    for (std::uint32_t j = 0; j < 16; ++j) {
      for (std::uint32_t k = 0; k < kSpan.n_samples; ++k) {
        double s = 0;
        for (std::uint32_t i = 0; i < 16; ++i) s += fsa.at(k, j, i);
        REQUIRE(pw.at(k, j) == s);
      }
    }
  }
  TEST_CASE("constant screen is a 2 tau time shift") {
    const ProbeGeometry probe = kProbe16;
    sim::ScattererCloud one;
    one.x = {1e-3};
    one.z = {12e-3};
    one.amp = {1.0};
    const RFFrame fsa = sim::simulate_fsa(one, probe, kPulse, kFsa, kSpan);
    for (double tau : {1.0 / kFsa.fs, 0.37 / kFsa.fs, 31e-9}) {
      AberrationProfile ab;
      ab.delays_s.assign(16, tau);
      const RFFrame shifted = sim::synth_planewave(fsa, {}, ab);
      // Oracle: the analytic tensor sampled on a grid delayed by 2 tau.
      const RFFrame fsa_late = sim::simulate_fsa(one, probe, kPulse, kFsa, {-2 * tau, kSpan.n_samples});
      const RFFrame oracle = sim::synth_planewave(fsa_late, {}, {});
      // Linear interpolation error bound: h^2/8 max|f''| per term, f'' <= (2 pi f_hi)^2.
      const double h = 1.0 / kFsa.fs;
      const double f_hi = kPulse.f0() + 3 * kPulse.sigma_f();
      const double bound = 16 * h * h / 8 * std::pow(2 * pi * f_hi, 2);
      double worst = 0;
      for (std::size_t k = 0; k < oracle.size(); ++k) {
        worst = std::max(worst, std::abs(shifted.samples()[k] - oracle.samples()[k]));
      }
      CHECK(worst <= bound);
      if (tau == 1.0 / kFsa.fs) {
        // Integer-sample shift (2 samples) is exact up to rounding.
        CHECK(worst <= 1e-12);
      }
    }
  }
  TEST_CASE("50 ns aberration changes the channel data by more than 1%") {
    const RFFrame fsa = sim::simulate_fsa(cloud, kProbe16, kPulse, kFsa, kSpan);
    const RFFrame clean = sim::synth_planewave(fsa, {}, {});
    const RFFrame ab = sim::synth_planewave(fsa, {}, sim::gen_aberration(16, 50, 6, 1));
    CHECK(rel_l2(clean.samples(), ab.samples()) > 0.01);
  }
  TEST_CASE("transmit-only and receive-only screens") {
    const RFFrame fsa = sim::simulate_fsa(cloud, kProbe16, kPulse, kFsa, kSpan);
    const auto prof = sim::gen_aberration(16, 50, 6, 2);
    const RFFrame both = sim::synth_planewave(fsa, {}, prof);
    const RFFrame none = sim::synth_planewave(fsa, {}, prof, {false, false});
    const RFFrame tx = sim::synth_planewave(fsa, {}, prof, {true, false});
    CHECK(none == sim::synth_planewave(fsa, {}, {}));
    CHECK_FALSE(tx == both);
    CHECK_FALSE(tx == none);
  }
  TEST_CASE("parallel and reference synthesis agree") {
    const RFFrame fsa = sim::simulate_fsa(cloud, kProbe16, kPulse, kFsa, kSpan);
    const auto prof = sim::gen_aberration(16, 50, 6, 3);
    const RFFrame p = sim::synth_planewave(fsa, {0.1}, prof);
    const RFFrame r = sim::synth_planewave_reference(fsa, {0.1}, prof);
    CHECK(testutil::max_rel_diff(r.samples(), p.samples()) <= 1e-12);
  }
  TEST_CASE("steered plane-wave delays") {
    const auto d0 = sim::PlaneWaveTx{0.0}.delays(kProbe16, 1540);
    CHECK(std::all_of(d0.begin(), d0.end(), [](double d) { return d == 0.0; }));
    const double th = 0.2;
    const auto d = sim::PlaneWaveTx{th}.delays(kProbe16, 1540);
    CHECK(d.front() == 0.0);
    CHECK(d.back() == doctest::Approx(15 * 0.3e-3 * std::sin(th) / 1540).epsilon(1e-12));
  }
  TEST_CASE("dimension mismatch") {
    const RFFrame fsa = sim::simulate_fsa(cloud, kProbe16, kPulse, kFsa, kSpan);
    CHECK(code_of([&] { sim::synth_planewave(fsa, {}, sim::gen_aberration(12, 50, 6, 0)); }) ==
          ErrorCode::DimensionMismatch);
    const RFFrame pw = sim::synth_planewave(fsa, {}, {});
    CHECK(code_of([&] { sim::synth_planewave(pw, {}, {}); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_SUITE("downsample") {
  TEST_CASE("factor 1 is the identity") {
    const RFFrame f = testutil::random_frame({64, 2, 1}, 1);
    CHECK(sim::downsample(f, 1) == f);
  }
  TEST_CASE("104.16 MHz by 5 gives a 20.832 MHz header and preserves a 5.208 MHz tone") {
    Acquisition acq;
    acq.fs = 104.16e6;
    acq.pitch = 0.3e-3;
    const std::uint32_t n = 2000;
    std::vector<double> v(n);
    for (std::uint32_t k = 0; k < n; ++k) v[k] = std::sin(2 * pi * 5.208e6 * k / acq.fs + 0.3);
    const RFFrame f(FrameKind::ChannelData, {n, 1, 1}, acq, v);
    const RFFrame g = sim::downsample(f, 5);
    CHECK(g.acq().fs == doctest::Approx(20.832e6).epsilon(1e-15));
    CHECK(g.dims().n0 == 400);
    double worst = 0;
    for (std::uint32_t k = 40; k < 360; ++k) {
      const double expect = std::sin(2 * pi * 5.208e6 * (5.0 * k) / acq.fs + 0.3);
      worst = std::max(worst, std::abs(g.at(k) - expect));
    }
    CHECK(worst <= 0.01);
  }
  TEST_CASE("decimating below the pulse band is an aliasing error") {
    Acquisition acq;
    acq.fs = 104.16e6;
    const RFFrame f(FrameKind::ChannelData, {100, 1, 1}, acq, std::vector<double>(100, 0.0));
    CHECK(code_of([&] { sim::downsample(f, 7); }) == ErrorCode::Aliasing);
    CHECK(code_of([&] { sim::downsample(f, 0); }) == ErrorCode::InvalidArgument);
  }
}
