#include "vanet/report.hpp"

#include "vanet/format.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace vanet {

using nlohmann::json;

void write_metrics_csv(std::ostream& out, const std::vector<SecondResult>& results) {
  out << "second,n_vehicles,avg_delay_s,load_variance,avg_sinr,path_stability\n";
  for (const auto& r : results) {
    const auto& m = r.metrics;
    out << r.second_index << ',' << r.n_vehicles << ',' << format_double(m.avg_delay_s) << ','
        << format_double(m.load_variance) << ',' << format_double(m.avg_sinr) << ','
        << format_double(m.path_stability) << '\n';
  }
}

void write_pareto_csv(std::ostream& out, const Population& front) {
  out << "f1,f2,f3,f4,violation\n";
  for (const auto& ind : front) {
    const auto& o = ind.objectives;
    out << format_double(o.f1) << ',' << format_double(o.f2) << ',' << format_double(o.f3) << ','
        << format_double(o.f4) << ',' << format_double(o.violation) << '\n';
  }
}

RunAggregate aggregate(const std::vector<SecondResult>& results, double gamma, std::uint64_t seed, double w_c) {
  RunAggregate a;
  a.gamma = gamma;
  a.seed = seed;
  a.seconds = results.size();
  if (results.empty()) return a;
  std::size_t later = 0;
  for (const auto& r : results) {
    a.mean_avg_delay_s += r.metrics.avg_delay_s;
    a.mean_load_variance += r.metrics.load_variance;
    a.mean_avg_sinr += r.metrics.avg_sinr;
    a.mean_front_size += static_cast<double>(r.pareto_front.size());
    a.feasible_seconds += r.representative().objectives.feasible() ? 1.0 : 0.0;
    if (r.second_index >= 2) {
      a.mean_path_stability += r.metrics.path_stability;
      ++later;
    }
  }
  const double n = static_cast<double>(results.size());
  a.mean_avg_delay_s /= n;
  a.mean_load_variance /= n;
  a.mean_avg_sinr /= n;
  a.mean_front_size /= n;
  a.feasible_seconds /= n;
  if (later > 0) a.mean_path_stability /= static_cast<double>(later);
  a.weighted_instability = w_c * a.mean_path_stability;
  return a;
}

json summary_json(const std::vector<RunAggregate>& runs) {
  json out;
  out["runs"] = json::array();
  for (const auto& a : runs)
    out["runs"].push_back({{"gamma", a.gamma},
                           {"seed", a.seed},
                           {"seconds", a.seconds},
                           {"mean_avg_delay_s", a.mean_avg_delay_s},
                           {"mean_load_variance", a.mean_load_variance},
                           {"mean_avg_sinr", a.mean_avg_sinr},
                           {"mean_path_stability", a.mean_path_stability},
                           {"mean_front_size", a.mean_front_size},
                           {"feasible_seconds", a.feasible_seconds},
                           {"weighted_instability", a.weighted_instability}});
  out["schema"] = {{"avg_sinr", "linear ratio"}, {"path_stability", "raw f4, lower is more stable"}};
  return out;
}

namespace {

std::string num(double v, const char* fmt = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Blue (early) to red (late).
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + 200 * t));
  const int g = static_cast<int>(std::lround(90 + 60 * (1.0 - std::abs(2.0 * t - 1.0))));
  const int b = static_cast<int>(std::lround(220 - 190 * t));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

// Maps data to pixels; switches to log10 when the data are positive and span more than three decades.
struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  static Axis fit(const std::vector<double>& values) {
    Axis a;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!std::isfinite(lo)) return a;
    if (lo > 0.0 && hi / lo > 1e3) {
      a.log = true;
      lo = std::log10(lo);
      hi = std::log10(hi);
    }
    if (hi <= lo) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= pad;
      hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
  }

  double frac(double v) const {
    const double x = log ? std::log10(std::max(v, 1e-300)) : v;
    return (x - lo) / (hi - lo);
  }

  std::string label(double f) const {
    const double x = lo + f * (hi - lo);
    return num(log ? std::pow(10.0, x) : x, "%.3g");
  }
};

struct Panel {
  double x0, y0, w, h;
  Axis ax, ay;
  double px(double v) const { return x0 + ax.frac(v) * w; }
  double py(double v) const { return y0 + h - ay.frac(v) * h; }
};

void frame(std::ostringstream& s, const Panel& p, const std::string& xl, const std::string& yl) {
  s << "<rect x=\"" << num(p.x0) << "\" y=\"" << num(p.y0) << "\" width=\"" << num(p.w) << "\" height=\"" << num(p.h)
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double f : {0.0, 0.5, 1.0}) {
    s << "<text x=\"" << num(p.x0 + f * p.w) << "\" y=\"" << num(p.y0 + p.h + 14)
      << "\" font-size=\"10\" text-anchor=\"middle\">" << p.ax.label(f) << "</text>\n";
    s << "<text x=\"" << num(p.x0 - 4) << "\" y=\"" << num(p.y0 + p.h - f * p.h + 3)
      << "\" font-size=\"10\" text-anchor=\"end\">" << p.ay.label(f) << "</text>\n";
  }
  s << "<text x=\"" << num(p.x0 + p.w / 2) << "\" y=\"" << num(p.y0 + p.h + 30)
    << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(xl) << (p.ax.log ? " (log)" : "") << "</text>\n";
  s << "<text x=\"" << num(p.x0 - 46) << "\" y=\"" << num(p.y0 + p.h / 2) << "\" font-size=\"12\" text-anchor=\"middle\""
    << " transform=\"rotate(-90 " << num(p.x0 - 46) << ' ' << num(p.y0 + p.h / 2) << ")\">" << escape(yl)
    << (p.ay.log ? " (log)" : "") << "</text>\n";
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w, "%.0f") + "\" height=\"" + num(h, "%.0f") +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string front_svg(const std::vector<SecondResult>& results) {
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  const char* names[] = {"f1 delay (s)", "f2 load variance", "f3 mean 1/SINR"};
  std::array<std::vector<double>, 3> cols;
  for (const auto& r : results)
    for (const auto& ind : r.pareto_front)
      for (int m = 0; m < 3; ++m) cols[m].push_back(ind.objectives[m]);
  std::array<Axis, 3> axes{Axis::fit(cols[0]), Axis::fit(cols[1]), Axis::fit(cols[2])};

  const double pw = 260, ph = 220, left = 70, top = 30, gap = 90;
  std::ostringstream s;
  s << header(left + 3 * pw + 2 * gap + 40, top + ph + 70);
  s << "<text x=\"" << num(left) << "\" y=\"18\" font-size=\"13\">Front 0 per second, blue = first, red = last</text>\n";
  const double span = results.size() > 1 ? static_cast<double>(results.size() - 1) : 1.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    Panel p{left + static_cast<double>(k) * (pw + gap), top, pw, ph, axes[a], axes[b]};
    frame(s, p, names[a], names[b]);
    for (std::size_t t = 0; t < results.size(); ++t) {
      const std::string color = ramp(static_cast<double>(t) / span);
      for (const auto& ind : results[t].pareto_front) {
        const double x = ind.objectives[a], y = ind.objectives[b];
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        s << "<circle cx=\"" << num(p.px(x)) << "\" cy=\"" << num(p.py(y)) << "\" r=\"2.5\" fill=\"" << color
          << "\" fill-opacity=\"0.75\"/>\n";
      }
    }
  }
  s << "</svg>\n";
  return s.str();
}

std::string metrics_svg(const std::vector<Series>& series) {
  const char* names[] = {"avg delay (s)", "load variance", "avg SINR (linear)", "path instability f4"};
  auto metric = [](const SecondMetrics& m, int k) {
    switch (k) {
      case 0: return m.avg_delay_s;
      case 1: return m.load_variance;
      case 2: return m.avg_sinr;
      default: return m.path_stability;
    }
  };
  const double pw = 360, ph = 200, left = 80, top = 40, gapx = 110, gapy = 70;
  std::ostringstream s;
  s << header(left + 2 * pw + gapx + 40, top + 2 * ph + gapy + 60);
  for (std::size_t i = 0; i < series.size(); ++i)
    s << "<text x=\"" << num(left + static_cast<double>(i) * 110) << "\" y=\"20\" font-size=\"12\" fill=\""
      << palette[i % 8] << "\">" << escape(series[i].label) << "</text>\n";

  std::vector<double> seconds;
  for (const auto& se : series)
    for (const auto& r : *se.results) seconds.push_back(r.second_index);
  const Axis ax = Axis::fit(seconds);

  for (int k = 0; k < 4; ++k) {
    std::vector<double> vals;
    for (const auto& se : series)
      for (const auto& r : *se.results) vals.push_back(metric(r.metrics, k));
    Panel p{left + (k % 2) * (pw + gapx), top + (k / 2) * (ph + gapy), pw, ph, ax, Axis::fit(vals)};
    p.ax.log = false;
    frame(s, p, "second", names[k]);
    for (std::size_t i = 0; i < series.size(); ++i) {
      s << "<polyline fill=\"none\" stroke=\"" << palette[i % 8] << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& r : *series[i].results) {
        const double v = metric(r.metrics, k);
        if (p.ay.log && !(v > 0.0)) continue;
        s << num(p.px(r.second_index)) << ',' << num(p.py(v)) << ' ';
      }
      s << "\"/>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_run(const std::filesystem::path& dir, const std::vector<SecondResult>& results) {
  std::filesystem::create_directories(dir);
  {
    std::ostringstream m;
    write_metrics_csv(m, results);
    write_text(dir / "metrics.csv", m.str());
  }
  for (const auto& r : results) {
    std::ostringstream p;
    write_pareto_csv(p, r.pareto_front);
    write_text(dir / ("pareto_t" + std::to_string(r.second_index) + ".csv"), p.str());
  }
  write_text(dir / "fronts.svg", front_svg(results));
  write_text(dir / "metrics.svg", metrics_svg({Series{"run", &results}}));
}

void write_oracle_csv(std::ostream& out, const OracleFront& front) {
  out << "f1,f2,f3,f4,violation,genome\n";
  for (std::size_t i = 0; i < front.points.size(); ++i) {
    const auto& o = front.points[i];
    std::string g = json(front.genomes[i]).dump();
    std::string quoted = "\"";
    for (char c : g) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    quoted += '"';
    out << format_double(o.f1) << ',' << format_double(o.f2) << ',' << format_double(o.f3) << ','
        << format_double(o.f4) << ',' << format_double(o.violation) << ',' << quoted << '\n';
  }
}

json comparison_json(const OracleFront& oracle, const std::vector<OracleComparison>& runs,
                     const std::vector<std::uint64_t>& seeds) {
  json out;
  out["oracle_evaluations"] = oracle.evaluations;
  out["oracle_points"] = oracle.points.size();
  std::size_t feasible = 0;
  for (const auto& p : oracle.points) feasible += p.feasible() ? 1 : 0;
  out["oracle_feasible_points"] = feasible;
  out["runs"] = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& c = runs[i];
    out["runs"].push_back({{"seed", i < seeds.size() ? seeds[i] : 0},
                           {"ga_points", c.ga_points},
                           {"dominated_by_oracle", c.dominated},
                           {"ga_hypervolume", c.ga_hypervolume},
                           {"oracle_hypervolume", c.oracle_hypervolume},
                           {"hypervolume_ratio", c.ratio},
                           {"reference", c.reference}});
  }
  return out;
}

}  // namespace vanet
