#include "homtk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "homtk/errors.hpp"

namespace homtk::config {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object())
    throw domain_error(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw domain_error(where + ": unknown key '" + item.key() + "'");
  }
}

double get_number(const json& obj, const std::string& where,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw domain_error(where + "." + key + ": expected a number");
  return obj[key].get<double>();
}

photophys::EmitterParams parse_emitter(const json& j, const std::string& where) {
  require_keys(j, where,
               {"lifetime_ns", "frequency_offset_mhz", "fwhm_mhz",
                "emission_rate_hz", "shelving"});
  photophys::EmitterParams e;
  e.lifetime_ns = get_number(j, where, "lifetime_ns", e.lifetime_ns);
  e.frequency_offset_mhz =
      get_number(j, where, "frequency_offset_mhz", e.frequency_offset_mhz);
  e.fwhm_mhz = get_number(j, where, "fwhm_mhz", e.fwhm_mhz);
  e.emission_rate_hz =
      get_number(j, where, "emission_rate_hz", e.emission_rate_hz);
  if (j.contains("shelving")) {
    const auto& s = j["shelving"];
    require_keys(s, where + ".shelving", {"p_shelf", "tau_shelf_ns"});
    photophys::Shelving shelf;
    shelf.p_shelf = get_number(s, where + ".shelving", "p_shelf", 0.0);
    shelf.tau_shelf_ns =
        get_number(s, where + ".shelving", "tau_shelf_ns", 0.0);
    e.shelving = shelf;
  }
  e.validate();
  return e;
}

}  // namespace

mcsim::SimConfig RunConfig::sim_config() const {
  mcsim::SimConfig cfg;
  cfg.experiment = experiment;
  cfg.excitation_rate_hz = excitation_rate_hz;
  cfg.duration_ps = duration_ps;
  cfg.rng_seed = rng_seed;
  cfg.chunk_count = chunk_count;
  return cfg;
}

RunConfig parse_config(const std::string& json_text,
                       const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw domain_error(origin + ": " + e.what());
  }

  require_keys(root, origin,
               {"emitters", "experiment", "simulation", "histogram", "model",
                "spectrum", "output"});

  RunConfig cfg;

  if (root.contains("emitters")) {
    const auto& em = root["emitters"];
    if (!em.is_array() || em.size() != 2)
      throw domain_error(origin + ".emitters: expected an array of exactly "
                         "2 emitters");
    cfg.experiment.emitter_a = parse_emitter(em[0], origin + ".emitters[0]");
    cfg.experiment.emitter_b = parse_emitter(em[1], origin + ".emitters[1]");
  }

  if (root.contains("experiment")) {
    const auto& ex = root["experiment"];
    const std::string where = origin + ".experiment";
    require_keys(ex, where,
                 {"chi", "c_background", "detector_sigma_ps",
                  "detuning_delta_mhz", "tau_c_override_ns"});
    cfg.experiment.chi = get_number(ex, where, "chi", cfg.experiment.chi);
    cfg.experiment.c_background =
        get_number(ex, where, "c_background", cfg.experiment.c_background);
    cfg.experiment.detector_sigma_ps = get_number(
        ex, where, "detector_sigma_ps", cfg.experiment.detector_sigma_ps);
    if (ex.contains("detuning_delta_mhz"))
      cfg.experiment.detuning_delta_mhz =
          get_number(ex, where, "detuning_delta_mhz", 0.0);
    if (ex.contains("tau_c_override_ns"))
      cfg.experiment.tau_c_override_ns =
          get_number(ex, where, "tau_c_override_ns", 0.0);
  }
  cfg.experiment.validate();

  if (root.contains("simulation")) {
    const auto& sim = root["simulation"];
    const std::string where = origin + ".simulation";
    require_keys(sim, where,
                 {"excitation_rate_hz", "duration_ps", "rng_seed",
                  "chunk_count"});
    cfg.excitation_rate_hz =
        get_number(sim, where, "excitation_rate_hz", cfg.excitation_rate_hz);
    cfg.duration_ps = get_number(sim, where, "duration_ps", cfg.duration_ps);
    cfg.rng_seed = static_cast<std::uint64_t>(
        get_number(sim, where, "rng_seed", static_cast<double>(cfg.rng_seed)));
    cfg.chunk_count = static_cast<int>(
        get_number(sim, where, "chunk_count", cfg.chunk_count));
    cfg.sim_config().validate();
  }

  if (root.contains("histogram")) {
    const auto& h = root["histogram"];
    const std::string where = origin + ".histogram";
    require_keys(h, where, {"bin_width_ps", "window_ps", "norm_min_ps"});
    cfg.histogram.bin_width_ps =
        get_number(h, where, "bin_width_ps", cfg.histogram.bin_width_ps);
    cfg.histogram.window_ps =
        get_number(h, where, "window_ps", cfg.histogram.window_ps);
    cfg.histogram.norm_min_ps =
        get_number(h, where, "norm_min_ps", cfg.histogram.norm_min_ps);
    if (!(cfg.histogram.bin_width_ps > 0.0) ||
        !(cfg.histogram.window_ps > 0.0))
      throw domain_error(where + ": bin width and window must be > 0");
  }

  if (root.contains("model")) {
    const auto& m = root["model"];
    const std::string where = origin + ".model";
    require_keys(m, where, {"grid_step_ps", "half_window_ps"});
    cfg.model.step_ps = get_number(m, where, "grid_step_ps", cfg.model.step_ps);
    cfg.model.half_window_ps =
        get_number(m, where, "half_window_ps", cfg.model.half_window_ps);
  }

  if (root.contains("spectrum")) {
    const auto& sp = root["spectrum"];
    const std::string where = origin + ".spectrum";
    require_keys(sp, where,
                 {"zpl_c_thz", "lambda_so_ground_ghz", "lambda_so_excited_ghz",
                  "temperature_k", "line_fwhm_ghz", "grid", "etalon"});
    auto& ls = cfg.spectrum.levels;
    ls.zpl_c_thz = get_number(sp, where, "zpl_c_thz", ls.zpl_c_thz);
    ls.lambda_so_ground_ghz =
        get_number(sp, where, "lambda_so_ground_ghz", ls.lambda_so_ground_ghz);
    ls.lambda_so_excited_ghz = get_number(sp, where, "lambda_so_excited_ghz",
                                          ls.lambda_so_excited_ghz);
    ls.temperature_k = get_number(sp, where, "temperature_k", ls.temperature_k);
    ls.validate();
    cfg.spectrum.line_fwhm_ghz =
        get_number(sp, where, "line_fwhm_ghz", cfg.spectrum.line_fwhm_ghz);
    if (sp.contains("grid")) {
      const auto& g = sp["grid"];
      require_keys(g, where + ".grid", {"min_ghz", "max_ghz", "step_ghz"});
      cfg.spectrum.grid.min_ghz =
          get_number(g, where + ".grid", "min_ghz", cfg.spectrum.grid.min_ghz);
      cfg.spectrum.grid.max_ghz =
          get_number(g, where + ".grid", "max_ghz", cfg.spectrum.grid.max_ghz);
      cfg.spectrum.grid.step_ghz = get_number(g, where + ".grid", "step_ghz",
                                              cfg.spectrum.grid.step_ghz);
    }
    if (sp.contains("etalon")) {
      const auto& et = sp["etalon"];
      require_keys(et, where + ".etalon",
                   {"fsr_ghz", "bandwidth_ghz", "peak_offset_ghz", "stages"});
      cfg.spectrum.etalon.fsr_ghz = get_number(et, where + ".etalon", "fsr_ghz",
                                               cfg.spectrum.etalon.fsr_ghz);
      cfg.spectrum.etalon.bandwidth_fwhm_ghz =
          get_number(et, where + ".etalon", "bandwidth_ghz",
                     cfg.spectrum.etalon.bandwidth_fwhm_ghz);
      cfg.spectrum.etalon.peak_offset_ghz =
          get_number(et, where + ".etalon", "peak_offset_ghz",
                     cfg.spectrum.etalon.peak_offset_ghz);
      cfg.spectrum.etalon.stages = static_cast<int>(get_number(
          et, where + ".etalon", "stages", cfg.spectrum.etalon.stages));
    }
  }

  if (root.contains("output")) {
    const auto& o = root["output"];
    const std::string where = origin + ".output";
    require_keys(o, where,
                 {"clicks_path", "histogram_path", "curve_path",
                  "spectrum_path", "fit_path"});
    const auto get_path = [&](const char* key) -> std::optional<std::string> {
      if (!o.contains(key)) return std::nullopt;
      if (!o[key].is_string())
        throw domain_error(where + "." + key + ": expected a string");
      return o[key].get<std::string>();
    };
    cfg.output.clicks_path = get_path("clicks_path");
    cfg.output.histogram_path = get_path("histogram_path");
    cfg.output.curve_path = get_path("curve_path");
    cfg.output.spectrum_path = get_path("spectrum_path");
    cfg.output.fit_path = get_path("fit_path");
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace homtk::config
