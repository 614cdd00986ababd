// homtk: photon-statistics toolkit for two-emitter Hong-Ou-Mandel
// experiments. Subcommands: model-g2, simulate, correlate, fit, spectrum,
// visibility. Exit codes: 0 success, 2 usage/config error, 3 numerical
// non-convergence.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "homtk/config.hpp"
#include "homtk/csv.hpp"
#include "homtk/errors.hpp"
#include "homtk/fitkit.hpp"
#include "homtk/mcsim.hpp"
#include "homtk/photophys.hpp"
#include "homtk/spectra.hpp"
#include "homtk/svg.hpp"
#include "homtk/units.hpp"

namespace {

using namespace homtk;

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("HOMTK_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end != '\0') throw domain_error("HOMTK_SEED must be an integer");
  return v;
}

struct ModelG2Args {
  std::string config_path, out_path, svg_path;
  double chi = -1.0;  // <0 means "use config"
  bool jitter = true;
};

int cmd_model_g2(const ModelG2Args& args) {
  auto cfg = config::load_config(args.config_path);
  auto exp = cfg.experiment;
  if (args.chi >= 0.0) exp.chi = args.chi;
  exp.validate();

  auto curve = photophys::model_curve(exp, cfg.model.half_window_ps,
                                      cfg.model.step_ps);
  if (args.jitter)
    curve = photophys::convolve_with_jitter(curve, exp.detector_sigma_ps);
  csvio::write_curve(args.out_path, curve);
  if (!args.svg_path.empty())
    svg::write_plot(args.svg_path, {{curve.tau_ps, curve.g2}}, "tau (ps)",
                    "g2");
  return 0;
}

struct SimulateArgs {
  std::string config_path, out_clicks, out_hist;
  std::optional<std::uint64_t> seed;
  std::optional<int> chunks;
};

int cmd_simulate(const SimulateArgs& args) {
  auto cfg = config::load_config(args.config_path);
  auto sim = cfg.sim_config();
  if (args.seed) sim.rng_seed = *args.seed;
  if (args.chunks) sim.chunk_count = *args.chunks;
  if (auto s = env_seed()) sim.rng_seed = *s;
  sim.validate();

  auto [d1, d2] = mcsim::run_simulation(sim);
  // quantize to the file resolution so the written streams and the emitted
  // histogram describe exactly the same data
  for (auto* s : {&d1, &d2})
    for (auto& t : s->times_ps) t = static_cast<double>(std::llround(t));

  const std::string clicks_path =
      !args.out_clicks.empty()
          ? args.out_clicks
          : cfg.output.clicks_path.value_or("");
  const std::string hist_path =
      !args.out_hist.empty() ? args.out_hist
                             : cfg.output.histogram_path.value_or("");
  if (clicks_path.empty() && hist_path.empty())
    throw domain_error("no outputs requested: set --out-clicks/--out-hist or "
                       "the config output section");

  if (!clicks_path.empty()) csvio::write_clicks(clicks_path, d1, d2);
  if (!hist_path.empty()) {
    auto hist = mcsim::correlate(d1, d2, cfg.histogram.bin_width_ps,
                                 cfg.histogram.window_ps);
    std::int64_t total = 0;
    for (auto c : hist.counts) total += c;
    if (total > 0) hist = mcsim::normalize(hist, cfg.histogram.norm_min_ps);
    csvio::write_histogram(hist_path, hist);
  }
  return 0;
}

struct CorrelateArgs {
  std::string clicks_path, out_path;
  double bin_width_ps = 256.0, window_ps = 100000.0, norm_min_ps = 50000.0;
};

int cmd_correlate(const CorrelateArgs& args) {
  const auto [d1, d2] = csvio::read_clicks(args.clicks_path);
  auto hist = mcsim::correlate(d1, d2, args.bin_width_ps, args.window_ps);
  std::int64_t total = 0;
  for (auto c : hist.counts) total += c;
  if (total > 0) hist = mcsim::normalize(hist, args.norm_min_ps);
  csvio::write_histogram(args.out_path, hist);
  return 0;
}

int finish_fit(const fitkit::FitResult& res, const std::string& out_path) {
  if (!out_path.empty()) csvio::write_fit_result(out_path, res);
  std::printf("%s\n", csvio::fit_result_json(res).c_str());
  if (res.degenerate)
    std::fprintf(stderr, "warning: fit is degenerate (parameters not "
                         "independently resolved)\n");
  if (!res.converged) {
    std::fprintf(stderr, "error: fit did not converge\n");
    return 3;
  }
  return 0;
}

struct FitCbArgs {
  std::string par_path, perp_path, out_path, config_path;
  double tau0_ns = 1.73, tau_c_ns = 1.18, delta_mhz = 52.1,
         detector_sigma_ps = 150.0, fit_window_ps = 20000.0;
};

int cmd_fit_cb(const FitCbArgs& args) {
  photophys::HomExperiment fixed;
  if (!args.config_path.empty()) {
    fixed = config::load_config(args.config_path).experiment;
  } else {
    fixed.emitter_a.lifetime_ns = fixed.emitter_b.lifetime_ns = args.tau0_ns;
    fixed.tau_c_override_ns = args.tau_c_ns;
    fixed.detuning_delta_mhz = args.delta_mhz;
    fixed.detector_sigma_ps = args.detector_sigma_ps;
    // linewidths only feed tau_c, which is overridden here
    fixed.emitter_a.fwhm_mhz = fixed.emitter_b.fwhm_mhz =
        photophys::transform_limited_linewidth_mhz(args.tau0_ns);
  }
  fixed.validate();
  const auto par = csvio::read_histogram(args.par_path);
  const auto perp = csvio::read_histogram(args.perp_path);
  const auto res =
      fitkit::fit_cb_joint(par, perp, fixed, args.fit_window_ps);
  return finish_fit(res, args.out_path);
}

struct SpectrumArgs {
  std::string config_path, out_path, lines_path, svg_path;
  bool etalon = false;
  double temperature_k = 0.0;  // 0 means "use config"
};

int cmd_spectrum(const SpectrumArgs& args) {
  auto cfg = config::load_config(args.config_path);
  auto sp = cfg.spectrum;
  if (args.temperature_k > 0.0) sp.levels.temperature_k = args.temperature_k;
  auto spectrum = spectra::zpl_spectrum(sp.levels, sp.line_fwhm_ghz, sp.grid);
  if (args.etalon) spectrum = spectra::filter_spectrum(spectrum, sp.etalon);
  csvio::write_spectrum(args.out_path, spectrum);
  if (!args.lines_path.empty())
    csvio::write_lines_json(args.lines_path, spectrum);
  if (!args.svg_path.empty())
    svg::write_plot(args.svg_path, {{spectrum.freq_ghz, spectrum.intensity}},
                    "frequency offset from C (GHz)", "intensity");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photon statistics toolkit for two-emitter HOM experiments"};
  app.require_subcommand(1);

  ModelG2Args model_args;
  auto* model = app.add_subcommand(
      "model-g2", "write the analytic g2(tau) curve as tau_ps,g2 CSV");
  model->add_option("--config", model_args.config_path, "run config JSON")
      ->required();
  model->add_option("--chi", model_args.chi,
                    "override the experiment's chi (0..1)");
  model->add_flag("--jitter,!--no-jitter", model_args.jitter,
                  "convolve with the detector response (default on)");
  model->add_option("--out", model_args.out_path, "output CSV")->required();
  model->add_option("--svg", model_args.svg_path, "optional SVG plot");

  SimulateArgs sim_args;
  std::uint64_t sim_seed = 0;
  int sim_chunks = 0;
  auto* sim = app.add_subcommand(
      "simulate", "Monte Carlo click streams and coincidence histogram");
  sim->add_option("--config", sim_args.config_path, "run config JSON")
      ->required();
  auto* seed_opt = sim->add_option("--seed", sim_seed, "override RNG seed");
  auto* chunk_opt = sim->add_option("--chunks", sim_chunks,
                                    "override chunk count");
  sim->add_option("--out-clicks", sim_args.out_clicks, "click stream CSV");
  sim->add_option("--out-hist", sim_args.out_hist, "histogram CSV");

  CorrelateArgs corr_args;
  auto* corr = app.add_subcommand(
      "correlate", "histogram cross-channel coincidences of a click file");
  corr->add_option("--clicks", corr_args.clicks_path, "click stream CSV")
      ->required();
  corr->add_option("--bin-ps", corr_args.bin_width_ps, "bin width (ps)");
  corr->add_option("--window-ps", corr_args.window_ps, "max |tau| (ps)");
  corr->add_option("--norm-min-ps", corr_args.norm_min_ps,
                   "normalization region start (ps)");
  corr->add_option("--out", corr_args.out_path, "output CSV")->required();

  auto* fit = app.add_subcommand("fit", "nonlinear least-squares recipes");
  fit->require_subcommand(1);
  std::string fit_data, fit_out;
  auto* ple = fit->add_subcommand("ple", "two-Lorentzian doublet + offset");
  ple->add_option("data", fit_data, "CSV freq_mhz,counts")->required();
  ple->add_option("--out", fit_out, "output JSON");
  auto* inhomo =
      fit->add_subcommand("inhomo", "inhomogeneous Gaussian distribution");
  inhomo->add_option("data", fit_data, "CSV freq_mhz,counts")->required();
  inhomo->add_option("--out", fit_out, "output JSON");
  auto* lifetime = fit->add_subcommand("lifetime", "exponential decay");
  lifetime->add_option("data", fit_data, "CSV t_ns,counts")->required();
  lifetime->add_option("--out", fit_out, "output JSON");

  FitCbArgs cb_args;
  auto* cb = fit->add_subcommand(
      "cb", "shared background fraction for paired HOM histograms");
  cb->add_option("par", cb_args.par_path, "chi=1 histogram CSV")->required();
  cb->add_option("perp", cb_args.perp_path, "chi=0 histogram CSV")->required();
  cb->add_option("--config", cb_args.config_path,
                 "take fixed parameters from a run config");
  cb->add_option("--tau0-ns", cb_args.tau0_ns, "excited-state lifetime");
  cb->add_option("--tau-c-ns", cb_args.tau_c_ns, "coherence time");
  cb->add_option("--delta-mhz", cb_args.delta_mhz, "emitter detuning");
  cb->add_option("--detector-sigma-ps", cb_args.detector_sigma_ps,
                 "per-detector jitter");
  cb->add_option("--fit-window-ps", cb_args.fit_window_ps, "fit |tau| range");
  cb->add_option("--out", cb_args.out_path, "output JSON");

  SpectrumArgs spec_args;
  auto* spec = app.add_subcommand(
      "spectrum", "four-line ZPL emission spectrum, optionally filtered");
  spec->add_option("--config", spec_args.config_path, "run config JSON")
      ->required();
  spec->add_flag("--etalon", spec_args.etalon, "apply the etalon filter");
  spec->add_option("--temperature-k", spec_args.temperature_k,
                   "override temperature");
  spec->add_option("--out", spec_args.out_path, "output CSV")->required();
  spec->add_option("--lines-out", spec_args.lines_path, "line list JSON");
  spec->add_option("--svg", spec_args.svg_path, "optional SVG plot");

  double vis_par = 0.0, vis_perp = 0.0;
  auto* vis = app.add_subcommand(
      "visibility", "print eta = g2_perp / (g2_par + g2_perp)");
  vis->add_option("g2_par", vis_par, "g2_parallel(0)")->required();
  vis->add_option("g2_perp", vis_perp, "g2_perp(0)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (model->parsed()) return cmd_model_g2(model_args);
    if (sim->parsed()) {
      if (!seed_opt->empty()) sim_args.seed = sim_seed;
      if (!chunk_opt->empty()) sim_args.chunks = sim_chunks;
      return cmd_simulate(sim_args);
    }
    if (corr->parsed()) return cmd_correlate(corr_args);
    if (fit->parsed()) {
      if (ple->parsed()) {
        const auto d = csvio::read_xy(fit_data);
        return finish_fit(fitkit::fit_ple_doublet(d.x, d.y), fit_out);
      }
      if (inhomo->parsed()) {
        const auto d = csvio::read_xy(fit_data);
        return finish_fit(fitkit::fit_inhomogeneous(d.x, d.y), fit_out);
      }
      if (lifetime->parsed()) {
        const auto d = csvio::read_xy(fit_data);
        return finish_fit(fitkit::fit_lifetime(d.x, d.y), fit_out);
      }
      if (cb->parsed()) return cmd_fit_cb(cb_args);
    }
    if (spec->parsed()) return cmd_spectrum(spec_args);
    if (vis->parsed()) {
      std::printf("%.4f\n", photophys::hom_visibility(vis_par, vis_perp));
      return 0;
    }
  } catch (const domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const precision_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
