#include "homtk/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "homtk/errors.hpp"

namespace homtk::csvio {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw domain_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open for reading: " + path);
  return in;
}

double parse_number(const std::string& field, const std::string& path,
                    long row) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw domain_error(path + ": row " + std::to_string(row) +
                       ": not a number: '" + field + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

// "# key=value" header comment
bool parse_header_comment(const std::string& line, std::string& key,
                          std::string& value) {
  if (line.empty() || line[0] != '#') return false;
  auto eq = line.find('=');
  if (eq == std::string::npos) return false;
  key = line.substr(1, eq - 1);
  while (!key.empty() && key.front() == ' ') key.erase(key.begin());
  value = line.substr(eq + 1);
  return true;
}

}  // namespace

void write_curve(const std::string& path,
                 const photophys::CorrelationCurve& curve) {
  auto out = open_out(path);
  out << "tau_ps,g2\n";
  for (std::size_t i = 0; i < curve.tau_ps.size(); ++i)
    out << fmt(curve.tau_ps[i]) << ',' << fmt(curve.g2[i]) << '\n';
}

photophys::CorrelationCurve read_curve(const std::string& path) {
  auto in = open_in(path);
  photophys::CorrelationCurve c;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#' || line.rfind("tau_ps", 0) == 0)
      continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2)
      throw domain_error(path + ": row " + std::to_string(row) +
                         ": expected 2 columns");
    c.tau_ps.push_back(parse_number(fields[0], path, row));
    c.g2.push_back(parse_number(fields[1], path, row));
  }
  return c;
}

void write_spectrum(const std::string& path, const spectra::Spectrum& spec) {
  auto out = open_out(path);
  out << "freq_ghz,intensity\n";
  for (std::size_t i = 0; i < spec.freq_ghz.size(); ++i)
    out << fmt(spec.freq_ghz[i]) << ',' << fmt(spec.intensity[i]) << '\n';
}

void write_lines_json(const std::string& path, const spectra::Spectrum& spec) {
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& l : spec.lines) {
    lines.push_back({{"label", std::string(1, l.label)},
                     {"center_ghz", l.center_ghz},
                     {"fwhm_ghz", l.fwhm_ghz},
                     {"amplitude", l.amplitude}});
  }
  auto out = open_out(path);
  out << lines.dump(2) << '\n';
}

void write_clicks(const std::string& path, const mcsim::ClickStream& d1,
                  const mcsim::ClickStream& d2) {
  auto out = open_out(path);
  out << "# duration_ps=" << fmt(d1.duration_ps) << '\n';
  out << "# seed=" << d1.seed << '\n';
  out << "channel,time_ps\n";
  std::size_t i = 0, j = 0;
  while (i < d1.times_ps.size() || j < d2.times_ps.size()) {
    const bool take1 =
        j == d2.times_ps.size() ||
        (i < d1.times_ps.size() && d1.times_ps[i] <= d2.times_ps[j]);
    if (take1)
      out << "1," << std::llround(d1.times_ps[i++]) << '\n';
    else
      out << "2," << std::llround(d2.times_ps[j++]) << '\n';
  }
}

std::pair<mcsim::ClickStream, mcsim::ClickStream> read_clicks(
    const std::string& path) {
  auto in = open_in(path);
  mcsim::ClickStream d1, d2;
  d1.channel = 1;
  d2.channel = 2;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string key, value;
    if (parse_header_comment(line, key, value)) {
      if (key == "duration_ps")
        d1.duration_ps = d2.duration_ps = parse_number(value, path, row);
      else if (key == "seed")
        d1.seed = d2.seed = std::strtoull(value.c_str(), nullptr, 10);
      continue;
    }
    if (line.empty() || line.rfind("channel", 0) == 0) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2)
      throw domain_error(path + ": row " + std::to_string(row) +
                         ": expected 2 columns (channel,time_ps)");
    const double ch = parse_number(fields[0], path, row);
    const double t = parse_number(fields[1], path, row);
    if (ch == 1)
      d1.times_ps.push_back(t);
    else if (ch == 2)
      d2.times_ps.push_back(t);
    else
      throw domain_error(path + ": row " + std::to_string(row) +
                         ": channel must be 1 or 2");
  }
  d1.signal_count = d1.times_ps.size();
  d2.signal_count = d2.times_ps.size();
  return {std::move(d1), std::move(d2)};
}

void write_histogram(const std::string& path,
                     const mcsim::CorrelationHistogram& h) {
  auto out = open_out(path);
  out << "# bin_width_ps=" << fmt(h.bin_width_ps) << '\n';
  out << "# normalization=" << fmt(h.normalization) << '\n';
  out << "# norm_min_ps=" << fmt(h.norm_min_ps) << '\n';
  out << "# norm_max_ps=" << fmt(h.norm_max_ps) << '\n';
  out << "tau_ps,counts,g2\n";
  for (std::size_t i = 0; i < h.centers_ps.size(); ++i) {
    out << fmt(h.centers_ps[i]) << ',' << h.counts[i] << ','
        << fmt(h.g2.empty() ? 0.0 : h.g2[i]) << '\n';
  }
}

mcsim::CorrelationHistogram read_histogram(const std::string& path) {
  auto in = open_in(path);
  mcsim::CorrelationHistogram h;
  std::string line;
  long row = 0;
  bool any_g2 = false;
  while (std::getline(in, line)) {
    ++row;
    std::string key, value;
    if (parse_header_comment(line, key, value)) {
      if (key == "bin_width_ps") h.bin_width_ps = parse_number(value, path, row);
      else if (key == "normalization")
        h.normalization = parse_number(value, path, row);
      else if (key == "norm_min_ps") h.norm_min_ps = parse_number(value, path, row);
      else if (key == "norm_max_ps") h.norm_max_ps = parse_number(value, path, row);
      continue;
    }
    if (line.empty() || line.rfind("tau_ps", 0) == 0) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3)
      throw domain_error(path + ": row " + std::to_string(row) +
                         ": expected 3 columns (tau_ps,counts,g2)");
    h.centers_ps.push_back(parse_number(fields[0], path, row));
    h.counts.push_back(
        static_cast<std::int64_t>(parse_number(fields[1], path, row)));
    const double g2 = parse_number(fields[2], path, row);
    h.g2.push_back(g2);
    if (g2 != 0.0) any_g2 = true;
  }
  if (!any_g2 && h.normalization == 0.0) h.g2.clear();
  return h;
}

XyData read_xy(const std::string& path) {
  auto in = open_in(path);
  XyData d;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    if (row == 1 && !fields.empty()) {
      // tolerate a header row of column names
      char* end = nullptr;
      std::strtod(fields[0].c_str(), &end);
      if (end == fields[0].c_str()) continue;
    }
    if (fields.size() != 2 && fields.size() != 3)
      throw domain_error(path + ": row " + std::to_string(row) +
                         ": expected 2 or 3 columns");
    d.x.push_back(parse_number(fields[0], path, row));
    d.y.push_back(parse_number(fields[1], path, row));
    if (fields.size() == 3)
      d.sigma.push_back(parse_number(fields[2], path, row));
  }
  if (!d.sigma.empty() && d.sigma.size() != d.x.size())
    throw domain_error(path + ": sigma column present only on some rows");
  return d;
}

std::string fit_result_json(const fitkit::FitResult& r) {
  nlohmann::json estimates, uncertainties;
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    estimates[r.names[i]] = r.estimates[i];
    uncertainties[r.names[i]] = r.uncertainties[i];
  }
  nlohmann::json j{{"model", r.model_name},
                   {"estimates", estimates},
                   {"uncertainties", uncertainties},
                   {"reduced_chi2", r.reduced_chi2},
                   {"converged", r.converged},
                   {"iterations", r.iterations}};
  return j.dump(2);
}

void write_fit_result(const std::string& path,
                      const fitkit::FitResult& result) {
  auto out = open_out(path);
  out << fit_result_json(result) << '\n';
}

}  // namespace homtk::csvio
