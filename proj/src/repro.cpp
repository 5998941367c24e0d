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

#include "rfpipe/repro.hpp"

#include <cmath>

#include "rfpipe/error.hpp"
#include "rfpipe/normalize.hpp"
#include "rfpipe/summation.hpp"

namespace rfpipe::repro {

namespace fs = std::filesystem;

Setup pinned_setup() {
  Setup s;
  s.grid = bf::make_grid(13.5e-3, 2e-3, 38e-3, 0.15e-3, s.fsa.fs, s.fsa.c);
  return s;
}

Setup imaging_setup() {
  Setup s = pinned_setup();
  s.probe = ProbeGeometry(128, 0.15e-3);
  return s;
}

double spike_half_width(const sim::PulseModel& pulse) { return 3.0 * 2.0 * pulse.support(); }

PairFsa simulate_pair_fsa(const Setup& setup) {
  Phantom no_target = setup.phantom;
  no_target.point_target.reset();
  const auto span = sim::auto_span(setup.phantom, setup.probe, setup.pulse, setup.fsa.fs, setup.fsa.c);
  return {sim::simulate_fsa(sim::sample_phantom(no_target), setup.probe, setup.pulse, setup.fsa, span),
          sim::simulate_fsa(sim::sample_phantom(setup.phantom), setup.probe, setup.pulse, setup.fsa,
                            span)};
}

RFFrame image_from_fsa(const Setup& setup, const RFFrame& fsa, const AberrationProfile& ab) {
  const RFFrame pw = sim::synth_planewave(fsa, sim::PlaneWaveTx{}, ab);
  return bf::das(pw, setup.probe, setup.grid);
}

Pair make_pair(const Setup& setup, const PairFsa& fsa) {
  if (!setup.phantom.point_target) {
    throw Error(ErrorCode::InvalidArgument, "repro setup needs a point target");
  }
  Pair p{image_from_fsa(setup, fsa.a), image_from_fsa(setup, fsa.b), 0, 0.0, {}};
  p.column = analysis::middle_column(p.b);
  // Two-way arrival at the (centered) middle column, which passes through x = 0.
  const PointTarget& tgt = *setup.phantom.point_target;
  const double x_col = setup.grid.x_at(p.column);
  p.t_target = 2.0 * std::hypot(tgt.x_m - x_col, tgt.z_m) / setup.fsa.c;
  p.mask = analysis::spike_exclusion_mask(p.b, p.column, p.t_target, spike_half_width(setup.pulse));
  return p;
}

bf::BModeImage bmode(const Setup& setup, const RFFrame& image) {
  return bf::log_compress(bf::envelope(image), setup.dynamic_range_db);
}

Figure parse_figure(const std::string& name) {
  if (name == "fig2") return Figure::Fig2;
  if (name == "fig3") return Figure::Fig3;
  if (name == "fig4") return Figure::Fig4;
  throw Error(ErrorCode::InvalidArgument, "unknown figure '" + name + "'");
}

namespace {

struct Writer {
  fs::path dir;
  FigureOutput out;

  void text(const std::string& name, const std::string& body) {
    analysis::write_text(dir / name, body);
    out.files.push_back(dir / name);
  }
  void trace(const std::string& name, const RFFrame& frame, std::uint32_t col) {
    const auto v = analysis::extract_column(frame, col);
    text(name, analysis::trace_csv(v, frame.acq().t0, frame.acq().fs));
  }
  void pgm(const std::string& name, const bf::BModeImage& b) {
    bf::export_pgm(b, dir / name);
    out.files.push_back(dir / name);
  }
  void metrics(const std::string& name) { text(name, analysis::metrics_json(out.metrics)); }
};

}  // namespace

FigureOutput write_figure(Figure fig, const Setup& setup, const Pair& pair, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string());

  Writer w{out_dir, {}};
  const RFFrame ma = norm::max_abs(pair.a);
  const RFFrame mb = norm::max_abs(pair.b);

  switch (fig) {
    case Figure::Fig2: {
      w.pgm("fig2_bmode_no_target.pgm", bmode(setup, pair.a));
      w.pgm("fig2_bmode_with_target.pgm", bmode(setup, pair.b));
      w.trace("fig2_trace_no_target.csv", ma, pair.column);
      w.trace("fig2_trace_with_target.csv", mb, pair.column);
      w.out.metrics = {{"amplitude_ratio_max_abs", analysis::amplitude_ratio(ma, mb, pair.mask)},
                       {"column", static_cast<double>(pair.column)},
                       {"target_arrival_s", pair.t_target}};
      w.metrics("fig2_metrics.json");
      break;
    }
    case Figure::Fig3: {
      const RFFrame ra = norm::robust(pair.a);
      const RFFrame rb = norm::robust(pair.b);
      w.trace("fig3a_max_abs_no_target.csv", ma, pair.column);
      w.trace("fig3a_max_abs_with_target.csv", mb, pair.column);
      w.trace("fig3b_robust_no_target.csv", ra, pair.column);
      w.trace("fig3b_robust_with_target.csv", rb, pair.column);
      w.text("fig3_mask.json", analysis::to_json(pair.mask).dump(2) + "\n");
      w.out.metrics = {{"overlap_error_max_abs", analysis::overlap_error(ma, mb, pair.mask)},
                       {"overlap_error_robust", analysis::overlap_error(ra, rb, pair.mask)},
                       {"amplitude_ratio_robust", analysis::amplitude_ratio(ra, rb, pair.mask)}};
      w.metrics("fig3_metrics.json");
      break;
    }
    case Figure::Fig4: {
      const RFFrame rb = norm::robust(pair.b);
      const auto hm = analysis::symmetric_histogram(mb.samples(), setup.histogram_bins);
      const auto hr = analysis::symmetric_histogram(rb.samples(), setup.histogram_bins);
      w.text("fig4a_hist_max_abs_with_target.csv", analysis::histogram_csv(hm));
      w.text("fig4b_hist_robust_with_target.csv", analysis::histogram_csv(hr));
      w.out.metrics = {{"max_abs_mass_within_0.2", hm.mass_within(-0.2, 0.2)},
                       {"max_abs_binned_std", hm.binned_std()},
                       {"robust_binned_std", hr.binned_std()},
                       {"robust_sample_std", population_std(rb.samples())}};
      w.metrics("fig4_metrics.json");
      break;
    }
  }
  return w.out;
}

FigureOutput run(Figure fig, const fs::path& out_dir) {
  const Setup setup = pinned_setup();
  const PairFsa fsa = simulate_pair_fsa(setup);
  return write_figure(fig, setup, make_pair(setup, fsa), out_dir);
}

}  // namespace rfpipe::repro
