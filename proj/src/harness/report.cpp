#include "adasgd/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace adasgd::harness {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string to_csv(const ExperimentResult& result) {
  std::vector<std::size_t> order(result.batches.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return result.batches[a].batch < result.batches[b].batch; });
  std::ostringstream out;
  out << kCsvHeader << '\n';
  const std::string env(to_string(result.config.env));
  for (auto idx : order) {
    const auto& br = result.batches[idx];
    for (std::size_t i = 0; i < br.curve.sample_counts.size(); ++i) {
      out << result.config.id << ',' << env << ',' << br.batch << ',' << br.curve.sample_counts[i] << ','
          << format_number(br.curve.mean_gap[i]) << ',' << format_number(br.curve.stderr_[i]) << ','
          << br.contributing[i] << ',' << br.diverged[i] << '\n';
    }
  }
  return out.str();
}

std::string render_svg(const std::vector<SvgSeries>& series, const std::vector<oracles::RateFit>& fits,
                       double reference_slope, const std::string& title) {
  if (series.empty()) throw std::invalid_argument("nothing to plot");

  struct Point {
    double lx;
    double ly;
    std::uint64_t samples;
    double gap;
  };
  std::vector<std::vector<Point>> points(series.size());
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    if (s.samples.size() != s.gaps.size()) throw std::invalid_argument("series columns differ in length");
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      if (s.samples[i] == 0 || !(s.gaps[i] > 0.0) || !std::isfinite(s.gaps[i])) continue;
      const Point p{std::log10(static_cast<double>(s.samples[i])), std::log10(s.gaps[i]), s.samples[i], s.gaps[i]};
      points[k].push_back(p);
      xmin = std::min(xmin, p.lx);
      xmax = std::max(xmax, p.lx);
      ymin = std::min(ymin, p.ly);
      ymax = std::max(ymax, p.ly);
    }
  }
  if (!std::isfinite(ymin)) throw std::invalid_argument("degenerate axis: no positive gap to plot");
  xmin = std::floor(xmin);
  xmax = std::max(std::ceil(xmax), xmin + 1.0);
  ymin = std::floor(ymin);
  ymax = std::max(std::ceil(ymax), ymin + 1.0);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double lx) { return kLeft + (lx - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<defs><clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\"/></clipPath></defs>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out << "<text x=\"" << px(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(title) << "</text>\n";
  }

  out << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph << "\"/>\n";
  for (double d = xmin; d <= xmax + 1e-9; d += 1.0) {
    out << "<line x1=\"" << px(sx(d)) << "\" y1=\"" << px(kTop + ph) << "\" x2=\"" << px(sx(d)) << "\" y2=\""
        << px(kTop + ph + 5) << "\"/>\n";
  }
  for (double d = ymin; d <= ymax + 1e-9; d += 1.0) {
    out << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(sy(d)) << "\" x2=\"" << px(kLeft) << "\" y2=\""
        << px(sy(d)) << "\"/>\n";
  }
  out << "</g>\n<g class=\"ticks\" fill=\"black\">\n";
  for (double d = xmin; d <= xmax + 1e-9; d += 1.0) {
    out << "<text x=\"" << px(sx(d)) << "\" y=\"" << px(kTop + ph + 20) << "\" text-anchor=\"middle\">1e"
        << static_cast<int>(d) << "</text>\n";
  }
  for (double d = ymin; d <= ymax + 1e-9; d += 1.0) {
    out << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(sy(d) + 4) << "\" text-anchor=\"end\">1e"
        << static_cast<int>(d) << "</text>\n";
  }
  out << "<text x=\"" << px(kLeft + pw / 2) << "\" y=\"" << px(kHeight - 15)
      << "\" text-anchor=\"middle\">samples</text>\n"
      << "<text x=\"18\" y=\"" << px(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << px(kTop + ph / 2) << ")\">loss gap</text>\n</g>\n";

  out << "<g clip-path=\"url(#plot)\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (points[k].empty()) continue;
    std::string coords;
    std::string samples;
    std::string gaps;
    for (const auto& p : points[k]) {
      if (!coords.empty()) {
        coords += ' ';
        samples += ' ';
        gaps += ' ';
      }
      coords += px(sx(p.lx)) + "," + px(sy(p.ly));
      samples += std::to_string(p.samples);
      gaps += format_number(p.gap);
    }
    out << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << kPalette[k % std::size(kPalette)]
        << "\" stroke-width=\"1.5\" data-series=\"" << escape(series[k].label) << "\" data-samples=\"" << samples
        << "\" data-gaps=\"" << gaps << "\" points=\"" << coords << "\"/>\n";
  }
  // Reference line through the midpoint of the first plotted series.
  const auto first = std::find_if(points.begin(), points.end(), [](const auto& p) { return !p.empty(); });
  const Point& mid = (*first)[first->size() / 2];
  const double y0 = mid.ly + reference_slope * (xmin - mid.lx);
  const double y1 = mid.ly + reference_slope * (xmax - mid.lx);
  out << "<line class=\"reference\" stroke=\"black\" stroke-width=\"1.2\" stroke-dasharray=\"2,4\" data-slope=\""
      << format_number(reference_slope) << "\" x1=\"" << px(sx(xmin)) << "\" y1=\"" << px(sy(y0)) << "\" x2=\""
      << px(sx(xmax)) << "\" y2=\"" << px(sy(y1)) << "\"/>\n</g>\n";

  out << "<g class=\"legend\">\n";
  double ly = kTop + 10;
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::string label = series[k].label;
    if (k < fits.size()) {
      char buf[48];
      std::snprintf(buf, sizeof buf, " (slope %.2f)", fits[k].slope);
      label += buf;
    }
    out << "<line x1=\"" << px(kLeft + pw + 12) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(kLeft + pw + 32)
        << "\" y2=\"" << px(ly) << "\" stroke=\"" << kPalette[k % std::size(kPalette)] << "\" stroke-width=\"2\"/>\n"
        << "<text class=\"legend-entry\" x=\"" << px(kLeft + pw + 38) << "\" y=\"" << px(ly + 4) << "\">"
        << escape(label) << "</text>\n";
    ly += 20;
  }
  out << "<line x1=\"" << px(kLeft + pw + 12) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(kLeft + pw + 32)
      << "\" y2=\"" << px(ly) << "\" stroke=\"black\" stroke-dasharray=\"2,4\"/>\n"
      << "<text x=\"" << px(kLeft + pw + 38) << "\" y=\"" << px(ly + 4) << "\">t^" << format_number(reference_slope)
      << "</text>\n</g>\n</svg>\n";
  return out.str();
}

std::string render_svg(const ExperimentResult& result) {
  std::vector<SvgSeries> series;
  std::vector<oracles::RateFit> fits;
  bool all_fit = true;
  for (const auto& br : result.batches) {
    series.push_back({"B = " + std::to_string(br.batch), br.curve.sample_counts, br.curve.mean_gap});
    if (br.fit) {
      fits.push_back(*br.fit);
    } else {
      all_fit = false;
    }
  }
  if (!all_fit) fits.clear();
  return render_svg(series, fits, result.config.reference_slope, result.config.id);
}

WrittenFiles write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  WrittenFiles files{dir / (result.config.id + ".csv"), dir / (result.config.id + ".svg")};
  {
    std::ofstream csv(files.csv, std::ios::binary);
    csv << to_csv(result);
  }
  {
    std::ofstream svg(files.svg, std::ios::binary);
    svg << render_svg(result);
  }
  return files;
}

std::string fit_summary(const ExperimentResult& result) {
  std::ostringstream out;
  for (const auto& br : result.batches) {
    char buf[200];
    if (br.fit) {
      std::snprintf(buf, sizeof buf, "%s B=%llu slope=%.3f r2=%.3f window=[%g, %g] final_gap=%.4g",
                    result.config.id.c_str(), static_cast<unsigned long long>(br.batch), br.fit->slope,
                    br.fit->r_squared, br.fit->t_min, br.fit->t_max, br.curve.mean_gap.back());
    } else {
      std::snprintf(buf, sizeof buf, "%s B=%llu no fit: %s", result.config.id.c_str(),
                    static_cast<unsigned long long>(br.batch), br.fit_error.c_str());
    }
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace adasgd::harness
