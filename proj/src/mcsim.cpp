#include "homtk/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>

#include "homtk/errors.hpp"
#include "homtk/rng.hpp"
#include "homtk/units.hpp"

namespace homtk::mcsim {

using photophys::EmitterParams;
using photophys::HomExperiment;

void SimConfig::validate() const {
  experiment.validate();
  if (!(excitation_rate_hz >= 0.0))
    throw domain_error("excitation rate must be >= 0");
  const double tau_max_ns = std::max(experiment.emitter_a.lifetime_ns,
                                     experiment.emitter_b.lifetime_ns);
  // the analytic g2_1 carries no pump structure; stay in the regime where
  // that is a valid description instead of approximating outside it
  if (excitation_rate_hz > 0.1 / (tau_max_ns * 1e-9))
    throw domain_error("excitation rate above the low-excitation regime "
                       "(must be <= 0.1/tau0)");
  if (!(duration_ps >= 0.0)) throw domain_error("duration must be >= 0");
  if (chunk_count < 1) throw domain_error("chunk_count must be >= 1");
}

EmitterStream simulate_emitter_stream(const EmitterParams& emitter,
                                      double excitation_rate_hz,
                                      double duration_ps, std::uint64_t seed) {
  emitter.validate();
  if (!(excitation_rate_hz >= 0.0))
    throw domain_error("excitation rate must be >= 0");
  if (excitation_rate_hz > 0.1 / (emitter.lifetime_ns * 1e-9))
    throw domain_error("excitation rate above the low-excitation regime");
  if (!(duration_ps >= 0.0)) throw domain_error("duration must be >= 0");

  EmitterStream out;
  out.duration_ps = duration_ps;
  out.seed = seed;
  if (excitation_rate_hz == 0.0 || duration_ps == 0.0) return out;

  const double mean_wait_ps = 1e12 / excitation_rate_hz;
  const double tau0_ps = ps_from_ns(emitter.lifetime_ns);
  const double tau_shelf_ps =
      emitter.shelving ? ps_from_ns(emitter.shelving->tau_shelf_ns) : 0.0;
  const double p_shelf = emitter.shelving ? emitter.shelving->p_shelf : 0.0;

  rng::Sampler rnd(seed);
  double t = 0.0;
  while (true) {
    const double start = t + rnd.exponential(mean_wait_ps);
    const double detect = start + rnd.exponential(tau0_ps);
    if (detect > duration_ps) break;
    out.photons.push_back({start, detect});
    t = detect;
    if (p_shelf > 0.0 && rnd.bernoulli(p_shelf))
      t += rnd.exponential(tau_shelf_ps);
  }
  return out;
}

namespace {

struct RoutedPhoton {
  double time_ps;
  double start_ps;
  double psi;  // relative diffusive phase at the detection time
  int port;    // 0 or 1
};

}  // namespace

std::pair<ClickStream, ClickStream> mix_at_beamsplitter(
    const EmitterStream& a, const EmitterStream& b, const HomExperiment& exp,
    std::uint64_t seed) {
  exp.validate();
  if (a.duration_ps != b.duration_ps)
    throw domain_error("input streams cover different durations");

  const double tau0_ns = exp.tau0_ns();
  const double tau_c_ns = exp.tau_c_ns();
  // total pair dephasing rate: 1/tau_c = 1/tau0 + (gamma*_a + gamma*_b)
  const double gamma_sum_per_ps =
      std::max(0.0, 1.0 / tau_c_ns - 1.0 / tau0_ns) * 1e-3;
  const double window_ps = 10.0 * ps_from_ns(std::max(tau0_ns, tau_c_ns));
  const double delta_mhz = exp.delta_mhz();
  // interference contrast for unequal lifetimes; 1 when they match
  const double decay_diff_per_ps =
      (1.0 / exp.emitter_a.lifetime_ns - 1.0 / exp.emitter_b.lifetime_ns) *
      1e-3;

  ClickStream d1, d2;
  d1.channel = 1;
  d2.channel = 2;
  d1.duration_ps = d2.duration_ps = a.duration_ps;
  d1.seed = d2.seed = seed;

  rng::Sampler rnd(seed);
  // recent routed photons per source, newest at the back
  std::deque<RoutedPhoton> recent[2];
  double psi = 0.0;
  double last_time_ps = 0.0;

  std::size_t ia = 0, ib = 0;
  while (ia < a.photons.size() || ib < b.photons.size()) {
    int which;  // 0 = emitter a, 1 = emitter b
    if (ia == a.photons.size()) which = 1;
    else if (ib == b.photons.size()) which = 0;
    else which = a.photons[ia].time_ps <= b.photons[ib].time_ps ? 0 : 1;
    const Photon ph = which == 0 ? a.photons[ia++] : b.photons[ib++];

    // advance the relative-phase Wiener process to this detection time
    const double dt = ph.time_ps - last_time_ps;
    psi += rnd.normal(std::sqrt(2.0 * gamma_sum_per_ps * std::max(dt, 0.0)));
    last_time_ps = ph.time_ps;

    // strongest coherent partner = newest opposite-source photon whose
    // wavetrain overlaps this one at both detection times
    auto& others = recent[1 - which];
    while (!others.empty() &&
           ph.time_ps - others.front().time_ps > window_ps)
      others.pop_front();
    const RoutedPhoton* partner = nullptr;
    for (auto it = others.rbegin(); it != others.rend(); ++it) {
      if (it->time_ps >= ph.start_ps) {
        partner = &*it;
        break;
      }
    }

    int port;
    if (partner && exp.chi > 0.0) {
      const double dt_pair = ph.time_ps - partner->time_ps;
      const double theta =
          detuning_phase_rad(delta_mhz, dt_pair) + (psi - partner->psi);
      const double contrast =
          1.0 / std::cosh(0.5 * dt_pair * decay_diff_per_ps);
      const double rho = exp.chi * contrast * std::cos(theta);
      // joint port statistics: P(same port) = (1 + rho)/2
      const bool same = rnd.uniform() < 0.5 * (1.0 + rho);
      port = same ? partner->port : 1 - partner->port;
    } else {
      port = rnd.uniform() < 0.5 ? 0 : 1;
    }

    auto& mine = recent[which];
    mine.push_back({ph.time_ps, ph.start_ps, psi, port});
    while (!mine.empty() && ph.time_ps - mine.front().time_ps > window_ps)
      mine.pop_front();

    (port == 0 ? d1 : d2).times_ps.push_back(ph.time_ps);
  }

  d1.signal_count = d1.times_ps.size();
  d2.signal_count = d2.times_ps.size();
  return {std::move(d1), std::move(d2)};
}

ClickStream add_background(ClickStream s, double background_fraction,
                           std::uint64_t seed) {
  if (!(background_fraction >= 0.0 && background_fraction < 1.0))
    throw domain_error("background fraction must be in [0,1)");
  if (background_fraction == 0.0 || s.duration_ps <= 0.0 || s.times_ps.empty())
    return s;

  const double r_signal_per_ps =
      static_cast<double>(s.times_ps.size()) / s.duration_ps;
  const double r_bg_per_ps =
      background_fraction / (1.0 - background_fraction) * r_signal_per_ps;

  rng::Sampler rnd(seed);
  std::vector<double> bg;
  for (double t = rnd.exponential(1.0 / r_bg_per_ps); t <= s.duration_ps;
       t += rnd.exponential(1.0 / r_bg_per_ps))
    bg.push_back(t);

  std::vector<double> merged;
  merged.reserve(s.times_ps.size() + bg.size());
  std::merge(s.times_ps.begin(), s.times_ps.end(), bg.begin(), bg.end(),
             std::back_inserter(merged));
  s.times_ps = std::move(merged);
  s.background_count += bg.size();
  return s;
}

ClickStream apply_detector(ClickStream s, double sigma_ps,
                           std::uint64_t seed) {
  if (!(sigma_ps >= 0.0)) throw domain_error("detector sigma must be >= 0");
  if (sigma_ps == 0.0 || s.times_ps.empty()) return s;
  rng::Sampler rnd(seed);
  std::vector<double> jittered;
  jittered.reserve(s.times_ps.size());
  const double t_max = s.duration_ps > 0.0 ? s.duration_ps : 1e300;
  for (double t : s.times_ps) {
    const double tj = t + rnd.normal(sigma_ps);
    // clicks jittered outside [0, duration] are clamped out
    if (tj >= 0.0 && tj <= t_max) jittered.push_back(tj);
  }
  std::sort(jittered.begin(), jittered.end());
  s.times_ps = std::move(jittered);
  return s;
}

CorrelationHistogram correlate(const ClickStream& s1, const ClickStream& s2,
                               double bin_width_ps, double window_ps) {
  if (!(bin_width_ps > 0.0)) throw domain_error("bin width must be > 0");
  if (!(window_ps > 0.0)) throw domain_error("window must be > 0");

  // outermost bins must lie fully inside the pair window or they would be
  // clipped to half occupancy
  const auto half_bins = static_cast<long>(
      std::floor((window_ps - 0.5 * bin_width_ps) / bin_width_ps));
  if (half_bins < 0) throw domain_error("window narrower than one bin");
  CorrelationHistogram h;
  h.bin_width_ps = bin_width_ps;
  h.centers_ps.reserve(2 * half_bins + 1);
  for (long k = -half_bins; k <= half_bins; ++k)
    h.centers_ps.push_back(static_cast<double>(k) * bin_width_ps);
  h.counts.assign(h.centers_ps.size(), 0);

  const auto& t1 = s1.times_ps;
  const auto& t2 = s2.times_ps;
  std::size_t lo = 0;
  for (const double t : t1) {
    while (lo < t2.size() && t2[lo] < t - window_ps) ++lo;
    for (std::size_t j = lo; j < t2.size() && t2[j] <= t + window_ps; ++j) {
      const auto k = std::llround((t2[j] - t) / bin_width_ps);
      if (k >= -half_bins && k <= half_bins) ++h.counts[k + half_bins];
    }
  }
  return h;
}

CorrelationHistogram normalize(CorrelationHistogram h, double norm_min_ps,
                               double norm_max_ps) {
  if (norm_max_ps <= 0.0) norm_max_ps = h.window_ps();
  if (!(norm_min_ps >= 0.0 && norm_min_ps < norm_max_ps))
    throw domain_error("bad normalization region");

  double sum = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < h.centers_ps.size(); ++i) {
    const double c = std::abs(h.centers_ps[i]);
    if (c >= norm_min_ps && c <= norm_max_ps) {
      sum += static_cast<double>(h.counts[i]);
      ++n;
    }
  }
  if (n < 10)
    throw domain_error("normalization region holds fewer than 10 bins");
  if (!(sum > 0.0))
    throw domain_error("normalization region has zero counts");

  h.normalization = sum / static_cast<double>(n);
  h.norm_min_ps = norm_min_ps;
  h.norm_max_ps = norm_max_ps;
  h.g2.resize(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    h.g2[i] = static_cast<double>(h.counts[i]) / h.normalization;
  return h;
}

void merge_counts(CorrelationHistogram& into,
                  const CorrelationHistogram& from) {
  if (into.counts.empty()) {
    into = from;
    return;
  }
  if (into.bin_width_ps != from.bin_width_ps ||
      into.counts.size() != from.counts.size())
    throw domain_error("histogram layouts differ, cannot merge");
  for (std::size_t i = 0; i < into.counts.size(); ++i)
    into.counts[i] += from.counts[i];
  into.g2.clear();
  into.normalization = 0.0;
}

namespace {

std::pair<ClickStream, ClickStream> run_chunk(const SimConfig& cfg,
                                              double chunk_duration_ps,
                                              std::uint64_t chunk) {
  const auto& exp = cfg.experiment;
  const auto seed = cfg.rng_seed;
  auto ea = simulate_emitter_stream(exp.emitter_a, cfg.excitation_rate_hz,
                                    chunk_duration_ps,
                                    rng::derive_seed(seed, 1, chunk));
  auto eb = simulate_emitter_stream(exp.emitter_b, cfg.excitation_rate_hz,
                                    chunk_duration_ps,
                                    rng::derive_seed(seed, 2, chunk));
  auto [d1, d2] =
      mix_at_beamsplitter(ea, eb, exp, rng::derive_seed(seed, 3, chunk));

  // the experiment's c_B is the model parameter; inject the physical
  // per-channel fraction that reproduces it (see docs/formats.md)
  const double f = physical_background_fraction(exp.c_background);
  d1 = add_background(std::move(d1), f, rng::derive_seed(seed, 4, chunk));
  d2 = add_background(std::move(d2), f, rng::derive_seed(seed, 5, chunk));
  d1 = apply_detector(std::move(d1), exp.detector_sigma_ps,
                      rng::derive_seed(seed, 6, chunk));
  d2 = apply_detector(std::move(d2), exp.detector_sigma_ps,
                      rng::derive_seed(seed, 7, chunk));
  return {std::move(d1), std::move(d2)};
}

}  // namespace

std::pair<ClickStream, ClickStream> run_simulation(const SimConfig& cfg) {
  cfg.validate();
  ClickStream out1, out2;
  out1.channel = 1;
  out2.channel = 2;
  out1.duration_ps = out2.duration_ps = cfg.duration_ps;
  out1.seed = out2.seed = cfg.rng_seed;
  if (cfg.duration_ps == 0.0) return {out1, out2};

  const double chunk_duration = cfg.duration_ps / cfg.chunk_count;
  std::vector<std::future<std::pair<ClickStream, ClickStream>>> jobs;
  jobs.reserve(cfg.chunk_count);
  for (int c = 0; c < cfg.chunk_count; ++c)
    jobs.push_back(std::async(std::launch::async, run_chunk, std::cref(cfg),
                              chunk_duration, static_cast<std::uint64_t>(c)));

  for (int c = 0; c < cfg.chunk_count; ++c) {
    auto [d1, d2] = jobs[c].get();
    const double offset = chunk_duration * c;
    const auto append = [offset](ClickStream& dst, const ClickStream& src) {
      for (double t : src.times_ps) dst.times_ps.push_back(t + offset);
      dst.signal_count += src.signal_count;
      dst.background_count += src.background_count;
    };
    append(out1, d1);
    append(out2, d2);
  }
  // detector jitter can push clicks across chunk boundaries
  std::sort(out1.times_ps.begin(), out1.times_ps.end());
  std::sort(out2.times_ps.begin(), out2.times_ps.end());
  return {out1, out2};
}

}  // namespace homtk::mcsim
