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

#include "rfpipe/cli.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "rfpipe/analysis.hpp"
#include "rfpipe/beamform.hpp"
#include "rfpipe/config.hpp"
#include "rfpipe/dataset.hpp"
#include "rfpipe/error.hpp"
#include "rfpipe/normalize.hpp"
#include "rfpipe/parallel.hpp"
#include "rfpipe/repro.hpp"
#include "rfpipe/sim.hpp"
#include "rfpipe/usrf.hpp"

namespace rfpipe::cli {

namespace {

namespace fs = std::filesystem;
using analysis::Metric;

ProbeGeometry resolve_probe(const std::string& spec) {
  if (spec == "default") return ProbeGeometry::linear128();
  if (spec == "desk") return ProbeGeometry::linear64();
  return parse_probe(read_text_file(spec));
}

Phantom resolve_phantom(const std::string& path, bool default_target) {
  if (path.empty()) return default_phantom(default_target);
  return parse_phantom(read_text_file(path));
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

RFFrame apply_norm(const std::string& name, const RFFrame& f) {
  if (name == "none") return f;
  return norm::apply(norm::parse_method(name), f);
}

const std::vector<std::string> kNormChoices = {"none", "max-abs", "robust", "minmax01", "minmax11"};

// Subcommand bodies run after a successful parse; option storage lives here.
struct Context {
  std::ostream& out;
  std::function<void()> action;
};

void add_simulate_fsa(CLI::App& app, Context& ctx) {
  struct Opts {
    std::string phantom, probe = "default", out;
    double fs = 20.832e6, f0 = 5.208e6, frac_bw = 0.6, c = 1540.0;
    std::optional<std::uint64_t> seed;
    std::optional<double> t0;
    std::optional<std::uint32_t> n_samples;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("simulate-fsa", "Full synthetic aperture RF tensor of a phantom");
  sub->add_option("--phantom", o->phantom, "Phantom JSON (default phantom when omitted)");
  sub->add_option("--probe", o->probe, "default (128 el), desk (64 el) or a probe JSON")->capture_default_str();
  sub->add_option("--fs", o->fs, "Sampling rate [Hz]")->capture_default_str();
  sub->add_option("--f0", o->f0, "Center frequency [Hz]")->capture_default_str();
  sub->add_option("--frac-bw", o->frac_bw, "-6 dB fractional bandwidth")->capture_default_str();
  sub->add_option("--c", o->c, "Speed of sound [m/s]")->capture_default_str();
  sub->add_option("--seed", o->seed, "Overrides the phantom seed");
  sub->add_option("--t0", o->t0, "Record start [s] (automatic span when omitted)");
  sub->add_option("--n-samples", o->n_samples, "Record length (automatic span when omitted)");
  sub->add_option("--out", o->out, "Output USRF file")->required();
  sub->callback([o, &ctx] {
    ctx.action = [o, &ctx] {
      Phantom ph = resolve_phantom(o->phantom, false);
      if (o->seed) ph.seed = *o->seed;
      const ProbeGeometry probe = resolve_probe(o->probe);
      const sim::PulseModel pulse(o->f0, o->frac_bw);
      sim::TimeSpan span = sim::auto_span(ph, probe, pulse, o->fs, o->c);
      if (o->t0) span.t0 = *o->t0;
      if (o->n_samples) span.n_samples = *o->n_samples;
      const RFFrame fsa =
          sim::simulate_fsa(sim::sample_phantom(ph), probe, pulse, {o->fs, o->c}, span);
      usrf::write_frame(fsa, o->out);
      ctx.out << "wrote " << o->out << " (" << fsa.dims().n0 << " x " << fsa.dims().n1 << " x "
              << fsa.dims().n2 << ")\n";
    };
  });
}

void add_gen_aberration(CLI::App& app, Context& ctx) {
  struct Opts {
    std::string probe = "default", out;
    std::optional<std::uint32_t> n_elements;
    double rms_ns = 50.0, corr_len = 6.0;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("gen-aberration", "Random near-field phase screen");
  sub->add_option("--probe", o->probe, "Probe providing the element count")->capture_default_str();
  sub->add_option("--n-elements", o->n_elements, "Element count (overrides --probe)");
  sub->add_option("--rms-ns", o->rms_ns, "RMS delay [ns]")->capture_default_str();
  sub->add_option("--corr-len", o->corr_len, "Correlation length [elements]")->capture_default_str();
  sub->add_option("--seed", o->seed, "Random seed")->capture_default_str();
  sub->add_option("--out", o->out, "Output aberration JSON")->required();
  sub->callback([o, &ctx] {
    ctx.action = [o, &ctx] {
      const std::uint32_t n = o->n_elements ? *o->n_elements : resolve_probe(o->probe).n_elements();
      const auto ab = sim::gen_aberration(n, o->rms_ns, o->corr_len, o->seed);
      analysis::write_text(o->out, to_json(ab).dump(2) + "\n");
      ctx.out << "wrote " << o->out << " (" << n << " elements)\n";
    };
  });
}

void add_synth_pw(CLI::App& app, Context& ctx) {
  struct Opts {
    std::string fsa, aberration, out;
    double angle_deg = 0.0;
    bool no_tx = false, no_rx = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("synth-pw", "Plane-wave channel data from an FSA tensor");
  sub->add_option("--fsa", o->fsa, "Input FSA USRF")->required();
  sub->add_option("--aberration", o->aberration, "Aberration JSON (none when omitted)");
  sub->add_option("--angle-deg", o->angle_deg, "Steering angle [deg]")->capture_default_str();
  sub->add_flag("--no-transmit-aberration", o->no_tx, "Apply the screen on receive only");
  sub->add_flag("--no-receive-aberration", o->no_rx, "Apply the screen on transmit only");
  sub->add_option("--out", o->out, "Output USRF file")->required();
  sub->callback([o, &ctx] {
    ctx.action = [o, &ctx] {
      const RFFrame fsa = usrf::read_frame(o->fsa);
      AberrationProfile ab;
      if (!o->aberration.empty()) ab = parse_aberration_profile(read_text_file(o->aberration));
      const RFFrame pw = sim::synth_planewave(fsa, {deg_to_rad(o->angle_deg)}, ab,
                                              {!o->no_tx, !o->no_rx});
      usrf::write_frame(pw, o->out);
      ctx.out << "wrote " << o->out << " (" << pw.dims().n0 << " x " << pw.dims().n1 << ")\n";
    };
  });
}

void add_downsample(CLI::App& app, Context& ctx) {
  struct Opts {
    std::string in, out;
    std::uint32_t factor = 2;
    double frac_bw = 0.6;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("downsample", "Low-pass and decimate along the axial dimension");
  sub->add_option("--in", o->in, "Input USRF")->required();
  sub->add_option("--factor", o->factor, "Decimation factor")->capture_default_str();
  sub->add_option("--frac-bw", o->frac_bw, "Signal fractional bandwidth (aliasing check)")->capture_default_str();
  sub->add_option("--out", o->out, "Output USRF")->required();
  sub->callback([o, &ctx] {
    ctx.action = [o, &ctx] {
      const RFFrame f = sim::downsample(usrf::read_frame(o->in), o->factor, o->frac_bw);
      usrf::write_frame(f, o->out);
      ctx.out << "wrote " << o->out << " (fs " << f.acq().fs << " Hz)\n";
    };
  });
}

void add_normalize(CLI::App& app, Context& ctx) {
  struct Opts {
    std::string method, in, out, stats;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("normalize", "Per-frame or dataset normalization");
  sub->add_option("--method", o->method, "max-abs, robust, minmax01, minmax11 or standardize")
      ->required()
      ->check(CLI::IsMember({"max-abs", "robust", "minmax01", "minmax11", "standardize"}));
  sub->add_option("--stats", o->stats, "Dataset stats JSON (standardize only)");
  sub->add_option("--in", o->in, "Input USRF")->required();
  sub->add_option("--out", o->out, "Output USRF")->required();
  sub->callback([o, &ctx] {
    ctx.action = [o, &ctx] {
      norm::NormMethod m;
      if (o->method == "standardize") {
        if (o->stats.empty()) throw Error(ErrorCode::InvalidArgument, "standardize needs --stats");
        m = norm::DatasetStandardize{norm::parse_stats(read_text_file(o->stats))};
      } else {
        m = norm::parse_method(o->method);
      }
      usrf::write_frame(norm::apply(m, usrf::read_frame(o->in)), o->out);
      ctx.out << "wrote " << o->out << "\n";
    };
  });
}

void add_stats(CLI::App& app, Context& ctx) {
  struct Opts {
    std::vector<std::string> in;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("stats", "Pooled mean and std over a set of frames");
  sub->add_option("--in", o->in, "Input USRF files")->required()->expected(1, -1);
  sub->add_option("--out", o->out, "Output stats JSON")->required();
  sub->callback([o, &ctx] {
    ctx.action = [o, &ctx] {
      std::vector<RFFrame> frames;
      for (const auto& p : o->in) frames.push_back(usrf::read_frame(p));
      const auto s = norm::dataset_stats(frames);
      analysis::write_text(o->out, norm::to_json(s).dump(2) + "\n");
      ctx.out << "wrote " << o->out << "\n";
    };
  });
}

void add_beamform(CLI::App& app, Context& ctx) {
  struct Opts {
    std::string in, probe, out, bmode;
    double half_width = 13.5e-3, z_start = 2e-3, z_end = 38e-3, dx = 0.15e-3;
    double f_number = 1.0, angle_deg = 0.0, dynamic_range = 50.0;
    std::string apod = "hann";
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("beamform", "Plane-wave delay-and-sum");
  sub->add_option("--in", o->in, "Channel data USRF")->required();
  sub->add_option("--probe", o->probe, "default, desk or probe JSON (from the frame header when omitted)");
  sub->add_option("--half-width", o->half_width, "Lateral half-width [m]")->capture_default_str();
  sub->add_option("--z-start", o->z_start, "First depth [m]")->capture_default_str();
  sub->add_option("--z-end", o->z_end, "Last depth [m]")->capture_default_str();
  sub->add_option("--dx", o->dx, "Lateral pixel pitch [m]")->capture_default_str();
  sub->add_option("--f-number", o->f_number, "Receive f-number")->capture_default_str();
  sub->add_option("--apod", o->apod, "Receive apodization")
      ->check(CLI::IsMember({"hann", "rect"}))
      ->capture_default_str();
  sub->add_option("--angle-deg", o->angle_deg, "Plane-wave angle [deg]")->capture_default_str();
  sub->add_option("--out", o->out, "Output beamformed RF USRF")->required();
  sub->add_option("--bmode", o->bmode, "Also write a log-compressed PGM");
  sub->add_option("--dynamic-range", o->dynamic_range, "B-mode dynamic range [dB]")->capture_default_str();
  sub->callback([o, &ctx] {
    ctx.action = [o, &ctx] {
      const RFFrame ch = usrf::read_frame(o->in);
      const ProbeGeometry probe = o->probe.empty() ? ProbeGeometry(ch.dims().n1, ch.acq().pitch)
                                                   : resolve_probe(o->probe);
      bf::DasParams p = bf::make_grid(o->half_width, o->z_start, o->z_end, o->dx, ch.acq().fs,
                                      ch.acq().c);
      p.f_number = o->f_number;
      p.apod = o->apod == "rect" ? bf::Apodization::Rect : bf::Apodization::Hann;
      p.angle_rad = deg_to_rad(o->angle_deg);
      const RFFrame img = bf::das(ch, probe, p);
      usrf::write_frame(img, o->out);
      if (!o->bmode.empty()) {
        bf::export_pgm(bf::log_compress(bf::envelope(img), o->dynamic_range), o->bmode);
      }
      ctx.out << "wrote " << o->out << " (" << p.n_z << " x " << p.n_x << ")\n";
    };
  });
}

void add_analyze(CLI::App& app, Context& ctx) {
  auto* an = app.add_subcommand("analyze", "Traces, histograms and comparison metrics");
  an->require_subcommand(1);

  {
    struct Opts {
      std::string in, out, normalize = "none";
      std::optional<std::uint32_t> col;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = an->add_subcommand("column", "Axial trace CSV of one column");
    sub->add_option("--in", o->in, "Input USRF")->required();
    sub->add_option("--col", o->col, "Column index (middle column when omitted)");
    sub->add_option("--normalize", o->normalize, "Normalization applied to the frame first")
        ->check(CLI::IsMember(kNormChoices))
        ->capture_default_str();
    sub->add_option("--out", o->out, "Output CSV")->required();
    sub->callback([o, &ctx] {
      ctx.action = [o, &ctx] {
        const RFFrame f = apply_norm(o->normalize, usrf::read_frame(o->in));
        const std::uint32_t col = o->col ? *o->col : analysis::middle_column(f);
        analysis::write_text(o->out, analysis::trace_csv(analysis::extract_column(f, col),
                                                         f.acq().t0, f.acq().fs));
        ctx.out << "wrote " << o->out << " (column " << col << ")\n";
      };
    });
  }
  {
    struct Opts {
      std::string in, out, normalize = "none";
      std::uint32_t bins = 201;
      std::vector<double> range;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = an->add_subcommand("histogram", "Sample histogram CSV");
    sub->add_option("--in", o->in, "Input USRF")->required();
    sub->add_option("--bins", o->bins, "Bin count")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--range", o->range, "LO HI (symmetric [-max|v|, max|v|] when omitted)")->expected(2);
    sub->add_option("--normalize", o->normalize, "Normalization applied to the frame first")
        ->check(CLI::IsMember(kNormChoices))
        ->capture_default_str();
    sub->add_option("--out", o->out, "Output CSV")->required();
    sub->callback([o, &ctx] {
      ctx.action = [o, &ctx] {
        const RFFrame f = apply_norm(o->normalize, usrf::read_frame(o->in));
        const auto h = o->range.empty()
                           ? analysis::symmetric_histogram(f.samples(), o->bins)
                           : analysis::histogram(f.samples(), o->bins,
                                                 std::make_pair(o->range[0], o->range[1]));
        analysis::write_text(o->out, analysis::histogram_csv(h));
        ctx.out << "wrote " << o->out << " (" << h.total << " samples)\n";
      };
    });
  }
  {
    struct Opts {
      std::string a, b, mask, metrics, normalize = "none";
    };
    auto o = std::make_shared<Opts>();
    auto* sub = an->add_subcommand("compare", "Amplitude ratio and overlap error over a mask");
    sub->add_option("--a", o->a, "First USRF")->required();
    sub->add_option("--b", o->b, "Second USRF")->required();
    sub->add_option("--mask", o->mask, "Region mask JSON")->required();
    sub->add_option("--normalize", o->normalize, "Normalization applied to both frames first")
        ->check(CLI::IsMember(kNormChoices))
        ->capture_default_str();
    sub->add_option("--metrics", o->metrics, "Output metrics JSON")->required();
    sub->callback([o, &ctx] {
      ctx.action = [o, &ctx] {
        const RFFrame a = apply_norm(o->normalize, usrf::read_frame(o->a));
        const RFFrame b = apply_norm(o->normalize, usrf::read_frame(o->b));
        const auto mask = analysis::parse_mask(read_text_file(o->mask));
        const std::vector<Metric> m = {{"amplitude_ratio", analysis::amplitude_ratio(a, b, mask)},
                                       {"overlap_error", analysis::overlap_error(a, b, mask)}};
        analysis::write_text(o->metrics, analysis::metrics_json(m));
        ctx.out << "amplitude_ratio " << analysis::format_number(m[0].value) << "\n"
                << "overlap_error " << analysis::format_number(m[1].value) << "\n";
      };
    });
  }
  {
    struct Opts {
      std::string in, metrics;
      double cx = 0, cz = 0, r = 0, dynamic_range = 50.0;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = an->add_subcommand("contrast", "Cyst contrast of a beamformed RF image");
    sub->add_option("--in", o->in, "Beamformed RF image USRF")->required();
    sub->add_option("--cyst-x", o->cx, "Cyst center x [m]")->required();
    sub->add_option("--cyst-z", o->cz, "Cyst center z [m]")->required();
    sub->add_option("--cyst-r", o->r, "Cyst radius [m]")->required()->check(CLI::PositiveNumber);
    sub->add_option("--dynamic-range", o->dynamic_range, "B-mode dynamic range [dB]")->capture_default_str();
    sub->add_option("--metrics", o->metrics, "Output metrics JSON")->required();
    sub->callback([o, &ctx] {
      ctx.action = [o, &ctx] {
        const RFFrame img = usrf::read_frame(o->in);
        const auto b = bf::log_compress(bf::envelope(img), o->dynamic_range);
        const double c = analysis::cyst_contrast(b, o->cx, o->cz, o->r);
        analysis::write_text(o->metrics, analysis::metrics_json({{"contrast_db", c}}));
        ctx.out << "contrast_db " << analysis::format_number(c) << "\n";
      };
    });
  }
}

void add_dataset(CLI::App& app, Context& ctx) {
  auto* ds = app.add_subcommand("dataset", "Training corpus generation");
  ds->require_subcommand(1);
  {
    struct Opts {
      std::string phantom, probe = "desk", out;
      std::uint32_t n_versions = 20, epochs = 100;
      double rms_ns = 50.0, corr_len = 6.0, fs = 20.832e6, f0 = 5.208e6, frac_bw = 0.6, c = 1540.0;
      std::uint64_t seed = 0;
      bool no_tx = false, no_rx = false;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = ds->add_subcommand("generate", "Aberrated versions, test pair, split and pairing");
    sub->add_option("--phantom", o->phantom, "Phantom JSON with a point target (default phantom when omitted)");
    sub->add_option("--probe", o->probe, "default, desk or probe JSON")->capture_default_str();
    sub->add_option("--n-versions", o->n_versions, "Aberrated versions")->capture_default_str();
    sub->add_option("--rms-ns", o->rms_ns, "Aberration RMS [ns]")->capture_default_str();
    sub->add_option("--corr-len", o->corr_len, "Aberration correlation length [elements]")->capture_default_str();
    sub->add_option("--epochs", o->epochs, "Pairing epochs")->capture_default_str();
    sub->add_option("--fs", o->fs, "Sampling rate [Hz]")->capture_default_str();
    sub->add_option("--f0", o->f0, "Center frequency [Hz]")->capture_default_str();
    sub->add_option("--frac-bw", o->frac_bw, "-6 dB fractional bandwidth")->capture_default_str();
    sub->add_option("--c", o->c, "Speed of sound [m/s]")->capture_default_str();
    sub->add_option("--seed", o->seed, "Dataset seed")->capture_default_str();
    sub->add_flag("--no-transmit-aberration", o->no_tx, "Apply screens on receive only");
    sub->add_flag("--no-receive-aberration", o->no_rx, "Apply screens on transmit only");
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->callback([o, &ctx] {
      ctx.action = [o, &ctx] {
        dataset::GenerateConfig cfg;
        cfg.phantom = resolve_phantom(o->phantom, true);
        cfg.probe = resolve_probe(o->probe);
        cfg.pulse = sim::PulseModel(o->f0, o->frac_bw);
        cfg.fsa = {o->fs, o->c};
        cfg.n_versions = o->n_versions;
        cfg.rms_ns = o->rms_ns;
        cfg.corr_len_elements = o->corr_len;
        cfg.synth = {!o->no_tx, !o->no_rx};
        cfg.n_epochs = o->epochs;
        cfg.seed = o->seed;
        const auto m = dataset::generate(cfg, o->out);
        ctx.out << "wrote " << m.frames.size() << " frames and manifest.json to " << o->out
                << " (held out " << m.held_out << ")\n";
      };
    });
  }
  {
    auto dir = std::make_shared<std::string>();
    auto* sub = ds->add_subcommand("verify", "Check split, pairing and checksums of a dataset");
    sub->add_option("--dir", *dir, "Dataset directory")->required();
    sub->callback([dir, &ctx] {
      ctx.action = [dir, &ctx] {
        const auto m = dataset::load_manifest(fs::path(*dir) / "manifest.json");
        dataset::verify(m, *dir);
        ctx.out << "ok: " << m.frames.size() << " frames verified\n";
      };
    });
  }
}

void add_repro(CLI::App& app, Context& ctx) {
  struct Opts {
    std::string figure, out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("repro", "Figure reproductions with pinned seeds");
  sub->add_option("figure", o->figure, "fig2, fig3 or fig4")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  sub->add_option("--out", o->out, "Output directory")->required();
  sub->callback([o, &ctx] {
    ctx.action = [o, &ctx] {
      const auto r = repro::run(repro::parse_figure(o->figure), o->out);
      for (const auto& f : r.files) ctx.out << "wrote " << f.string() << "\n";
      for (const auto& m : r.metrics) ctx.out << m.name << " " << analysis::format_number(m.value) << "\n";
    };
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aberrated plane-wave RF simulation, normalization and analysis", "rfpipe"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (RFPIPE_THREADS when omitted)")
      ->check(CLI::NonNegativeNumber);

  Context ctx{out, {}};
  add_simulate_fsa(app, ctx);
  add_gen_aberration(app, ctx);
  add_synth_pw(app, ctx);
  add_downsample(app, ctx);
  add_normalize(app, ctx);
  add_stats(app, ctx);
  add_beamform(app, ctx);
  add_analyze(app, ctx);
  add_dataset(app, ctx);
  add_repro(app, ctx);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  const int previous = num_threads();
  try {
    if (threads > 0) {
      set_num_threads(threads);
    } else {
      apply_thread_env();
    }
    if (ctx.action) ctx.action();
    set_num_threads(previous);
    return kOk;
  } catch (const Error& e) {
    set_num_threads(previous);
    err << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kDomainError;
  } catch (const std::filesystem::filesystem_error& e) {
    set_num_threads(previous);
    err << error_code_name(ErrorCode::Io) << ": " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    set_num_threads(previous);
    err << "E_INTERNAL: " << e.what() << "\n";
    return kDomainError;
  }
}

}  // namespace rfpipe::cli
