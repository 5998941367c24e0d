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

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rfpipe::spectral {

/// Analytic signal of a real sequence: FFT, zero negative frequencies,
/// double positive ones, keep DC and Nyquist, inverse FFT.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

/// Forward DFT magnitude |X_k| for k = 0..n/2.
std::vector<double> amplitude_spectrum(std::span<const double> x);

/// Zero-phase FFT low-pass: unit gain below (1 - taper) * cutoff, raised
/// cosine down to zero at cutoff. cutoff is a fraction of fs.
std::vector<double> lowpass(std::span<const double> x, double cutoff_over_fs, double taper);

}  // namespace rfpipe::spectral
