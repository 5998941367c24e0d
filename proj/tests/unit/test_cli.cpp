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

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "rfpipe/cli.hpp"
#include "rfpipe/config.hpp"
#include "rfpipe/usrf.hpp"

#include <sys/wait.h>

using namespace rfpipe;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void put(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

/// Small fixture: tiny phantom and 8-element probe so each command runs fast.
struct Workspace {
  testutil::TempDir dir{"cli"};
  fs::path phantom = dir.path() / "phantom.json";
  fs::path probe = dir.path() / "probe.json";

  Workspace() {
    Phantom p;
    p.width_m = 6e-3;
    p.depth_m = 10e-3;
    p.scatterer_density = 2.0;
    p.point_target = PointTarget{0.0, 7e-3, 40.0};
    p.seed = 11;
    put(phantom, to_json(p).dump());
    put(probe, to_json(ProbeGeometry(8, 0.3e-3)).dump());
  }
  std::string at(const std::string& name) const { return (dir.path() / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("simulate-fsa") != std::string::npos);
    CHECK(run({"normalize", "--help"}).code == 0);
    CHECK(run({"normalize", "--bogus"}).code == cli::kUsageError);
    CHECK(run({"frobnicate"}).code == cli::kUsageError);
    CHECK(run({"normalize", "--method", "nope", "--in", "a", "--out", "b"}).code == cli::kUsageError);
    CHECK(run({"simulate-fsa"}).code == cli::kUsageError);
  }

  TEST_CASE("normalize of an all-zero frame is E_ALL_ZERO") {
    testutil::TempDir dir("cliz");
    const fs::path in = dir.path() / "zero.usrf";
    usrf::write_frame(testutil::make_frame({16, 2, 1}, std::vector<double>(32, 0.0)), in);
    const auto r = run({"normalize", "--method", "robust", "--in", in.string(), "--out",
                        (dir.path() / "o.usrf").string()});
    CHECK(r.code == cli::kDomainError);
    CHECK(r.err.rfind("E_ALL_ZERO:", 0) == 0);
    CHECK_FALSE(fs::exists(dir.path() / "o.usrf"));
  }

  TEST_CASE("missing input is E_IO") {
    const auto r = run({"normalize", "--method", "max-abs", "--in", "/nonexistent/x.usrf", "--out", "y"});
    CHECK(r.code == cli::kDomainError);
    CHECK(r.err.rfind("E_IO:", 0) == 0);
  }

  TEST_CASE("end-to-end pipeline through the subcommands") {
    Workspace w;
    REQUIRE(run({"simulate-fsa", "--phantom", w.phantom.string(), "--probe", w.probe.string(), "--fs",
                 "20832000", "--out", w.at("fsa.usrf")})
                .code == 0);
    const RFFrame fsa = usrf::read_frame(w.at("fsa.usrf"));
    CHECK(fsa.kind() == FrameKind::FsaTensor);
    CHECK(fsa.dims().n1 == 8);
    CHECK(fsa.dims().n2 == 8);

    REQUIRE(run({"gen-aberration", "--n-elements", "8", "--rms-ns", "30", "--seed", "4", "--out",
                 w.at("ab.json")})
                .code == 0);
    const auto ab = parse_aberration_profile(slurp(w.at("ab.json")));
    CHECK(ab.delays_s.size() == 8);

    REQUIRE(run({"synth-pw", "--fsa", w.at("fsa.usrf"), "--aberration", w.at("ab.json"), "--out",
                 w.at("pw.usrf")})
                .code == 0);
    REQUIRE(run({"synth-pw", "--fsa", w.at("fsa.usrf"), "--out", w.at("pw0.usrf")}).code == 0);
    CHECK(slurp(w.at("pw.usrf")) != slurp(w.at("pw0.usrf")));

    auto r = run({"beamform", "--in", w.at("pw0.usrf"), "--half-width", "2e-3", "--z-start", "2e-3",
                  "--z-end", "9e-3", "--dx", "0.2e-3", "--out", w.at("img.usrf"), "--bmode",
                  w.at("img.pgm")});
    REQUIRE(r.code == 0);
    const RFFrame img = usrf::read_frame(w.at("img.usrf"));
    CHECK(img.kind() == FrameKind::Image);
    CHECK(img.dims().n1 == 21);
    CHECK(slurp(w.at("img.pgm")).rfind("P5\n21 ", 0) == 0);

    REQUIRE(run({"normalize", "--method", "robust", "--in", w.at("img.usrf"), "--out", w.at("r.usrf")})
                .code == 0);
    REQUIRE(run({"analyze", "column", "--in", w.at("img.usrf"), "--normalize", "max-abs", "--out",
                 w.at("col.csv")})
                .code == 0);
    const std::string col = slurp(w.at("col.csv"));
    CHECK(col.rfind("sample_index,time_s,value\n", 0) == 0);
    CHECK(std::count(col.begin(), col.end(), '\n') == static_cast<long>(img.dims().n0) + 1);

    REQUIRE(run({"analyze", "histogram", "--in", w.at("r.usrf"), "--bins", "11", "--out", w.at("h.csv")})
                .code == 0);
    const std::string h = slurp(w.at("h.csv"));
    CHECK(std::count(h.begin(), h.end(), '\n') == 12);

    put(w.at("mask.json"), R"({"columns": [10], "exclude": [[100, 140]]})");
    r = run({"analyze", "compare", "--a", w.at("img.usrf"), "--b", w.at("img.usrf"), "--mask",
             w.at("mask.json"), "--normalize", "max-abs", "--metrics", w.at("m.json")});
    REQUIRE(r.code == 0);
    const auto m = nlohmann::json::parse(slurp(w.at("m.json")));
    REQUIRE(m.is_array());
    std::vector<std::string> names;
    for (const auto& e : m) {
      names.push_back(e.at("name").get<std::string>());
      CHECK(e.at("value").is_number());
    }
    CHECK(names == std::vector<std::string>{"amplitude_ratio", "overlap_error"});
    CHECK(m[0]["value"] == 1.0);
    CHECK(m[1]["value"] == 0.0);

    r = run({"analyze", "contrast", "--in", w.at("img.usrf"), "--cyst-x", "0", "--cyst-z", "5e-3",
             "--cyst-r", "1e-3", "--metrics", w.at("c.json")});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(slurp(w.at("c.json")))[0]["name"] == "contrast_db");

    REQUIRE(run({"downsample", "--in", w.at("pw0.usrf"), "--factor", "1", "--out", w.at("d.usrf")}).code == 0);
    CHECK(slurp(w.at("d.usrf")) == slurp(w.at("pw0.usrf")));
    r = run({"downsample", "--in", w.at("pw0.usrf"), "--factor", "3", "--out", w.at("d3.usrf")});
    CHECK(r.code == cli::kDomainError);
    CHECK(r.err.rfind("E_ALIASING:", 0) == 0);

    REQUIRE(run({"stats", "--in", w.at("pw0.usrf"), w.at("pw.usrf"), "--out", w.at("s.json")}).code == 0);
    REQUIRE(run({"normalize", "--method", "standardize", "--stats", w.at("s.json"), "--in", w.at("pw.usrf"),
                 "--out", w.at("st.usrf")})
                .code == 0);
    CHECK(run({"normalize", "--method", "standardize", "--in", w.at("pw.usrf"), "--out", w.at("x.usrf")})
              .code != 0);
  }

  TEST_CASE("thread count does not change outputs") {
    Workspace w;
    for (const char* t : {"1", "3"}) {
      REQUIRE(run({"--threads", t, "simulate-fsa", "--phantom", w.phantom.string(), "--probe",
                   w.probe.string(), "--out", w.at(std::string("f") + t + ".usrf")})
                  .code == 0);
    }
    CHECK(slurp(w.at("f1.usrf")) == slurp(w.at("f3.usrf")));
  }

  TEST_CASE("dataset generate and verify") {
    Workspace w;
    const std::string out = w.at("ds");
    auto r = run({"dataset", "generate", "--phantom", w.phantom.string(), "--probe", w.probe.string(),
                  "--n-versions", "3", "--epochs", "4", "--seed", "2", "--out", out});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    r = run({"dataset", "verify", "--dir", out});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("ok:", 0) == 0);
    {
      std::ofstream f(fs::path(out) / "frames" / "ref_clean.usrf", std::ios::app | std::ios::binary);
      f << 'x';
    }
    r = run({"dataset", "verify", "--dir", out});
    CHECK(r.code == cli::kDomainError);
    CHECK(r.err.rfind("E_MANIFEST:", 0) == 0);
  }

  TEST_CASE("installed binary reports exit codes") {
    const std::string bin = RFPIPE_CLI_PATH;
    auto status = [](const std::string& cmd) {
      const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
      return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    CHECK(status(bin + " --help") == 0);
    CHECK(status(bin + " stats --in /nonexistent.usrf --out /tmp/x.json") == 1);
    CHECK(status(bin + " stats --wat") == 2);
  }
}
