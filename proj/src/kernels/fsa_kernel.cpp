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

#include <cmath>
#include <numbers>
#include <vector>

#include "rfpipe/kernels.hpp"

namespace rfpipe::kernels {

SampleWindow pulse_window(double tau, double half_width, double t0, double fs, std::int64_t n) {
  const double lo = std::ceil((tau - half_width - t0) * fs);
  const double hi = std::floor((tau + half_width - t0) * fs);
  SampleWindow w;
  if (hi < 0.0 || lo > static_cast<double>(n - 1)) return w;
  w.first = lo < 0.0 ? 0 : static_cast<std::int64_t>(lo);
  w.last = hi > static_cast<double>(n - 1) ? n - 1 : static_cast<std::int64_t>(hi);
  return w;
}

namespace {

std::vector<double> one_way_delays(const FsaProblem& p) {
  const std::size_t ns = p.amp.size();
  const std::size_t ne = p.ex.size();
  std::vector<double> tau(ne * ns);
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t s = 0; s < ns; ++s) {
      tau[e * ns + s] = std::hypot(p.sx[s] - p.ex[e], p.sz[s]) / p.c;
    }
  }
  return tau;
}

}  // namespace

void fsa_reference(const FsaProblem& p, std::span<double> out) {
  const std::size_t ns = p.amp.size();
  const std::size_t ne = p.ex.size();
  const auto tau = one_way_delays(p);
  const double omega = 2.0 * std::numbers::pi * p.f0;
  const double inv_2var = 1.0 / (2.0 * p.sigma_t * p.sigma_t);
  std::fill(out.begin(), out.end(), 0.0);

  for (std::size_t i = 0; i < ne; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      double* col = out.data() + p.n_t * (j + ne * i);
      for (std::size_t s = 0; s < ns; ++s) {
        const double t_arr = tau[i * ns + s] + tau[j * ns + s];
        const auto w = pulse_window(t_arr, p.half_width, p.t0, p.fs, p.n_t);
        for (std::int64_t k = w.first; k <= w.last; ++k) {
          const double u = p.t0 + static_cast<double>(k) / p.fs - t_arr;
          col[k] += p.amp[s] * std::exp(-u * u * inv_2var) * std::cos(omega * u);
        }
      }
    }
  }
}

// The parallel kernel avoids per-sample transcendentals: the carrier phase
// factors into per-sample and per-(element, scatterer) phasors, and along the
// window the Gaussian is advanced by the ratio recurrence
//   g(u + dt) = g(u) r,  r(u + dt) = r(u) exp(-dt^2 / sigma^2).
// Pairs (i, j) with i <= j are computed once and mirrored into (j, i).
void fsa_parallel(const FsaProblem& p, std::span<double> out) {
  const std::size_t ns = p.amp.size();
  const std::size_t ne = p.ex.size();
  const std::size_t nt = p.n_t;
  const double omega = 2.0 * std::numbers::pi * p.f0;
  const double dt = 1.0 / p.fs;
  const double inv_2var = 1.0 / (2.0 * p.sigma_t * p.sigma_t);
  const double q = std::exp(-dt * dt / (p.sigma_t * p.sigma_t));
  const double rot_re = std::cos(omega * dt);
  const double rot_im = std::sin(omega * dt);

  std::vector<double> tau(ne * ns), ph_re(ne * ns), ph_im(ne * ns);
  std::vector<double> carrier_re(nt), carrier_im(nt);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::size_t idx = 0; idx < ne * ns; ++idx) {
      const std::size_t e = idx / ns;
      const std::size_t s = idx % ns;
      tau[idx] = std::hypot(p.sx[s] - p.ex[e], p.sz[s]) / p.c;
      // exp(-i omega tau)
      ph_re[idx] = std::cos(omega * tau[idx]);
      ph_im[idx] = -std::sin(omega * tau[idx]);
    }
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = p.t0 + static_cast<double>(k) / p.fs;
      carrier_re[k] = std::cos(omega * t);
      carrier_im[k] = std::sin(omega * t);
    }
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(ne * (ne + 1) / 2);
  for (std::uint32_t i = 0; i < ne; ++i) {
    for (std::uint32_t j = i; j < ne; ++j) pairs.emplace_back(i, j);
  }

#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const auto [i, j] = pairs[pi];
    double* col = out.data() + nt * (j + ne * i);
    std::fill(col, col + nt, 0.0);
    const double* tau_i = tau.data() + i * ns;
    const double* tau_j = tau.data() + j * ns;
    const double* pi_re = ph_re.data() + i * ns;
    const double* pi_im = ph_im.data() + i * ns;
    const double* pj_re = ph_re.data() + j * ns;
    const double* pj_im = ph_im.data() + j * ns;

    for (std::size_t s = 0; s < ns; ++s) {
      const double t_arr = tau_i[s] + tau_j[s];
      const auto w = pulse_window(t_arr, p.half_width, p.t0, p.fs, nt);
      if (w.last < w.first) continue;

      const double u0 = p.t0 + static_cast<double>(w.first) / p.fs - t_arr;
      double g = std::exp(-u0 * u0 * inv_2var);
      double r = std::exp(-(2.0 * u0 * dt + dt * dt) * inv_2var);

      // phasor = carrier(t_first) * exp(-i omega tau_i) * exp(-i omega tau_j)
      const double a_re = pi_re[s] * pj_re[s] - pi_im[s] * pj_im[s];
      const double a_im = pi_re[s] * pj_im[s] + pi_im[s] * pj_re[s];
      const double c_re = carrier_re[w.first];
      const double c_im = carrier_im[w.first];
      double z_re = c_re * a_re - c_im * a_im;
      double z_im = c_re * a_im + c_im * a_re;

      const double amp = p.amp[s];
      for (std::int64_t k = w.first; k <= w.last; ++k) {
        col[k] += amp * g * z_re;
        g *= r;
        r *= q;
        const double n_re = z_re * rot_re - z_im * rot_im;
        z_im = z_re * rot_im + z_im * rot_re;
        z_re = n_re;
      }
    }

    if (i != j) {
      double* mirror = out.data() + nt * (i + ne * j);
      std::copy(col, col + nt, mirror);
    }
  }
}

}  // namespace rfpipe::kernels
