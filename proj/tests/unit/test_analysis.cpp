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

#include <cmath>
#include <numeric>
#include <string>

#include <json.hpp>

#include "helpers.hpp"
#include "rfpipe/analysis.hpp"
#include "rfpipe/error.hpp"

using namespace rfpipe;
using namespace rfpipe::analysis;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

bf::BModeImage flat_image(std::uint32_t n, double dx, double level) {
  bf::BModeImage b;
  b.n_z = b.n_x = n;
  b.dx = b.dz = dx;
  b.x_start = -0.5 * (n - 1) * dx;
  b.z_start = 0.0;
  b.db.assign(static_cast<std::size_t>(n) * n, level);
  return b;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("column extraction") {
    // 4 x 3, n0 fastest: column c holds 10 c + k.
    std::vector<double> v;
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 4; ++k) v.push_back(10 * c + k);
    }
    const RFFrame f = testutil::make_frame({4, 3, 1}, v);
    CHECK(extract_column(f, 1) == std::vector<double>{10, 11, 12, 13});
    CHECK(code_of([&] { extract_column(f, 3); }) == ErrorCode::IndexOutOfRange);
    const RFFrame wide = testutil::make_frame({2, 128, 1}, std::vector<double>(256, 0.0));
    CHECK(middle_column(wide) == 64);
    CHECK(middle_column(f) == 1);
  }

  TEST_CASE("histogram counts") {
    const std::vector<double> v = {0, 0, 1, 1};
    const Histogram h = histogram(v, 2);
    CHECK(h.counts == std::vector<std::uint64_t>{2, 2});
    CHECK(h.edges == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(h.total == 4);
    const auto r = testutil::random_vector(10007, 3);
    for (std::uint32_t bins : {1u, 7u, 201u}) {
      const Histogram g = histogram(r, bins);
      CHECK(std::accumulate(g.counts.begin(), g.counts.end(), std::uint64_t{0}) == r.size());
    }
    const Histogram clipped = histogram(v, 4, std::make_pair(0.25, 0.75));
    CHECK(clipped.counts == std::vector<std::uint64_t>{2, 0, 0, 2});
    CHECK(code_of([&] { histogram(v, 0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { histogram(v, 3, std::make_pair(1.0, 1.0)); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("symmetric histogram and binned moments") {
    const std::vector<double> v = {-1.0, 1.0, 0.0, 0.0};
    const Histogram h = symmetric_histogram(v, 3);
    CHECK(h.edges.front() == -1.0);
    CHECK(h.edges.back() == 1.0);
    CHECK(h.counts == std::vector<std::uint64_t>{1, 2, 1});
    // Bin centers -2/3, 0, 2/3.
    CHECK(h.binned_mean() == doctest::Approx(0.0));
    CHECK(h.binned_std() == doctest::Approx(std::sqrt(2.0 * 4.0 / 9.0 / 4.0)));
    CHECK(h.mass_within(-0.2, 0.2) == doctest::Approx(0.5));
    const auto r = testutil::random_vector(200000, 4);
    CHECK(symmetric_histogram(r).binned_std() == doctest::Approx(testutil::naive_std(r)).epsilon(0.01));
  }

  TEST_CASE("amplitude ratio and overlap error") {
    const auto b = testutil::random_vector(500, 5);
    std::vector<double> a2(b.size()), zero(b.size(), 0.0);
    for (std::size_t k = 0; k < b.size(); ++k) a2[k] = 2 * b[k];
    const auto all = all_indices(b.size());
    CHECK(amplitude_ratio(a2, b, all) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(amplitude_ratio(b, b, all) == 1.0);
    CHECK(overlap_error(b, b, all) == 0.0);
    CHECK(overlap_error(b, zero, all) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(overlap_error(a2, b, all) == doctest::Approx(0.5).epsilon(1e-14));

    const std::vector<std::size_t> none;
    CHECK(code_of([&] { amplitude_ratio(a2, b, none); }) == ErrorCode::Region);
    const std::vector<std::size_t> far = {b.size()};
    CHECK(code_of([&] { overlap_error(a2, b, far); }) == ErrorCode::Region);
    const std::vector<double> shorter(10, 1.0);
    CHECK(code_of([&] { overlap_error(shorter, b, all); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { overlap_error(zero, b, all); }) == ErrorCode::ZeroDenominator);
    CHECK(code_of([&] { amplitude_ratio(b, zero, all); }) == ErrorCode::ZeroDenominator);
  }

  TEST_CASE("masked frame comparison pools the selected samples") {
    std::vector<double> va(30), vb(30);
    for (std::size_t k = 0; k < 30; ++k) {
      va[k] = k < 10 ? 100.0 : 3.0;  // column 0 differs, columns 1 and 2 = 3
      vb[k] = k < 10 ? -7.0 : 1.0;
    }
    const RFFrame a = testutil::make_frame({10, 3, 1}, va);
    const RFFrame b = testutil::make_frame({10, 3, 1}, vb);
    RegionMask m;
    m.columns = {1, 2};
    CHECK(amplitude_ratio(a, b, m) == doctest::Approx(3.0));
    m.columns = {0};
    m.exclude = {{0, 10}};
    CHECK(code_of([&] { amplitude_ratio(a, b, m); }) == ErrorCode::Region);
    m.columns = {3};
    m.exclude.clear();
    CHECK(code_of([&] { amplitude_ratio(a, b, m); }) == ErrorCode::Region);
  }

  TEST_CASE("region mask indices and json") {
    RegionMask m;
    CHECK(m.axial_indices(4) == std::vector<std::size_t>{0, 1, 2, 3});
    m.include = {{2, 8}};
    m.exclude = {{4, 6}};
    CHECK(m.axial_indices(10) == std::vector<std::size_t>{2, 3, 6, 7});
    m.columns = {5};
    const RegionMask back = parse_mask(to_json(m).dump());
    CHECK(back.columns == m.columns);
    CHECK(back.axial_indices(10) == m.axial_indices(10));
    const RegionMask p = parse_mask(R"({"columns": [1, 2], "exclude": [[0, 3]]})");
    CHECK(p.columns == std::vector<std::uint32_t>{1, 2});
    CHECK(p.axial_indices(5) == std::vector<std::size_t>{3, 4});
    CHECK(code_of([] { parse_mask("{"); }) == ErrorCode::Schema);
    CHECK(code_of([] { parse_mask(R"({"columns": [-1]})"); }) == ErrorCode::Schema);
    CHECK(code_of([] { parse_mask(R"({"columns": [0], "exclude": [[1]]})"); }) == ErrorCode::Schema);
    CHECK(code_of([] { parse_mask(R"({"columns": [0], "bogus": 1})"); }) == ErrorCode::Schema);
  }

  TEST_CASE("spike exclusion mask arithmetic") {
    Acquisition acq;
    acq.fs = 10.0;
    acq.t0 = 1.0;
    const RFFrame f(FrameKind::Image, {100, 5, 1}, acq, std::vector<double>(500, 0.0));
    // Arrival at t = 3 (sample 20), +-0.5 s -> samples 15..25.
    RegionMask m = spike_exclusion_mask(f, 2, 3.0, 0.5);
    CHECK(m.columns == std::vector<std::uint32_t>{2});
    REQUIRE(m.exclude.size() == 1);
    CHECK(m.exclude[0].begin == 15);
    CHECK(m.exclude[0].end == 26);
    m = spike_exclusion_mask(f, 0, 1.0, 0.5);
    CHECK(m.exclude[0].begin == 0);
    CHECK(m.exclude[0].end == 6);
    m = spike_exclusion_mask(f, 0, 100.0, 0.5);
    CHECK(m.exclude.empty());
    CHECK(code_of([&] { spike_exclusion_mask(f, 5, 3.0, 0.5); }) == ErrorCode::IndexOutOfRange);
  }

  TEST_CASE("contrast") {
    bf::BModeImage b = flat_image(41, 1e-4, -12.0);
    const PixelRegion cyst = disk_region(b, 0.0, 2e-3, 0.5e-3);
    const PixelRegion bg = annulus_region(b, 0.0, 2e-3, 0.7e-3, 1.2e-3);
    REQUIRE_FALSE(cyst.pixels.empty());
    CHECK(contrast(b, cyst, bg) == 0.0);
    for (auto& v : b.db) v = 0.0;
    for (std::size_t k : cyst.pixels) b.db[k] = -20.0;
    CHECK(contrast(b, cyst, bg) == -20.0);
    CHECK(cyst_contrast(b, 0.0, 2e-3, 0.625e-3) == -20.0);
    CHECK(code_of([&] { contrast(b, cyst, cyst); }) == ErrorCode::Region);
    CHECK(code_of([&] { contrast(b, {}, bg); }) == ErrorCode::Region);
    CHECK(code_of([&] { contrast(b, PixelRegion{{b.db.size()}}, bg); }) == ErrorCode::Region);
  }

  TEST_CASE("disk and annulus membership") {
    const bf::BModeImage b = flat_image(21, 1.0, 0.0);
    // Grid x in [-10, 10], z in [0, 20].
    const PixelRegion d = disk_region(b, 0.0, 10.0, 1.0);
    CHECK(d.pixels.size() == 5);
    const PixelRegion a = annulus_region(b, 0.0, 10.0, 1.0, std::sqrt(2.0));
    CHECK(a.pixels.size() == 4);
  }

  TEST_CASE("csv and json writers") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-2.0) == "-2");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    const std::vector<double> v = {0.5, -1.0};
    CHECK(trace_csv(v, 0.0, 4.0) == "sample_index,time_s,value\n0,0,0.5\n1,0.25,-1\n");
    const Histogram h = histogram(std::vector<double>{0, 0, 1, 1}, 2);
    CHECK(histogram_csv(h) == "bin_left,bin_right,count\n0,0.5,2\n0.5,1,2\n");
    const auto j = nlohmann::json::parse(metrics_json({{"a", 1.5}, {"b", -2.0}}));
    REQUIRE(j.is_array());
    CHECK(j[0]["name"] == "a");
    CHECK(j[0]["value"] == 1.5);
    CHECK(j[1]["name"] == "b");
    testutil::TempDir dir("csv");
    write_text(dir.path() / "t.csv", "x\n");
    CHECK(read_text_file((dir.path() / "t.csv").string()) == "x\n");
    CHECK(code_of([&] { write_text(dir.path() / "missing" / "t.csv", "x"); }) == ErrorCode::Io);
  }
}
