#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace degenid::app {

namespace {

constexpr double kLogClamp = 1e-30;
constexpr int kWidth = 860, kHeight = 520;
constexpr int kLeft = 76, kRight = 700, kTop = 48, kBottom = 456;

const char* kPalette[] = {"#1f6fb2", "#d2542c", "#2e8540", "#8054a0",
                          "#b0a030", "#40a0a8", "#b04070", "#606060"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape_text(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '&')
      out += "&amp;";
    else if (ch == '<')
      out += "&lt;";
    else if (ch == '>')
      out += "&gt;";
    else
      out += ch;
  }
  return out;
}

// round the range out to a tidy step so tick labels stay short
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
  const double frac = span / 4.0 / step;
  if (frac >= 5.0)
    step *= 5.0;
  else if (frac >= 2.0)
    step *= 2.0;
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step)
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  int d0 = static_cast<int>(std::ceil(lo - 1e-9));
  int d1 = static_cast<int>(std::floor(hi + 1e-9));
  int stride = std::max(1, (d1 - d0) / 6 + ((d1 - d0) % 6 ? 1 : 0));
  for (int d = d0; d <= d1; d += stride) ticks.push_back(d);
  return ticks;
}

}  // namespace

LinePlot::LinePlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void LinePlot::add_series(std::string label, std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("svg: series x/y size mismatch");
  if (x.empty()) throw std::invalid_argument("svg: empty series");
  series_.push_back({std::move(label), std::move(x), std::move(y), false});
}

void LinePlot::add_hline(std::string label, double y) {
  series_.push_back({std::move(label), {}, {y}, true});
}

std::string LinePlot::to_string() const {
  if (series_.empty()) throw std::logic_error("svg: no series to plot");

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  auto y_value = [this](double v) {
    return log_y_ ? std::log10(std::max(v, kLogClamp)) : v;
  };
  for (const auto& s : series_) {
    for (double v : s.x) {
      x_lo = std::min(x_lo, v);
      x_hi = std::max(x_hi, v);
    }
    for (double v : s.y) {
      const double t = y_value(v);
      y_lo = std::min(y_lo, t);
      y_hi = std::max(y_hi, t);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;  // reference lines only
  if (x_hi - x_lo < 1e-12) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi - y_lo < 1e-12) y_lo -= 0.5, y_hi += 0.5;
  const double x_pad = 0.03 * (x_hi - x_lo), y_pad = 0.06 * (y_hi - y_lo);
  x_lo -= x_pad, x_hi += x_pad, y_lo -= y_pad, y_hi += y_pad;

  auto px = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * (kRight - kLeft); };
  auto py = [&](double v) { return kBottom - (v - y_lo) / (y_hi - y_lo) * (kBottom - kTop); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " + std::to_string(kWidth) +
         " " + std::to_string(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + std::to_string((kLeft + kRight) / 2) +
         "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">" +
         escape_text(title_) + "</text>\n";

  // axes
  out += "<rect x=\"" + std::to_string(kLeft) + "\" y=\"" + std::to_string(kTop) + "\" width=\"" +
         std::to_string(kRight - kLeft) + "\" height=\"" + std::to_string(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#303030\"/>\n";

  for (double t : linear_ticks(x_lo, x_hi)) {
    const std::string x = num(px(t));
    out += "<line x1=\"" + x + "\" y1=\"" + std::to_string(kBottom) + "\" x2=\"" + x + "\" y2=\"" +
           std::to_string(kBottom + 5) + "\" stroke=\"#303030\"/>\n";
    out += "<text x=\"" + x + "\" y=\"" + std::to_string(kBottom + 20) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
           tick_label(t) + "</text>\n";
  }
  const auto y_ticks = log_y_ ? log_ticks(y_lo, y_hi) : linear_ticks(y_lo, y_hi);
  for (double t : y_ticks) {
    const std::string y = num(py(t));
    out += "<line x1=\"" + std::to_string(kLeft - 5) + "\" y1=\"" + y + "\" x2=\"" +
           std::to_string(kLeft) + "\" y2=\"" + y + "\" stroke=\"#303030\"/>\n";
    char lbl[32];
    if (log_y_)
      std::snprintf(lbl, sizeof lbl, "1e%d", static_cast<int>(t));
    else
      std::snprintf(lbl, sizeof lbl, "%.4g", t);
    out += "<text x=\"" + std::to_string(kLeft - 9) + "\" y=\"" + num(py(t) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" + lbl +
           "</text>\n";
  }

  out += "<text x=\"" + std::to_string((kLeft + kRight) / 2) + "\" y=\"" +
         std::to_string(kHeight - 12) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
         escape_text(x_label_) + "</text>\n";
  out += "<text x=\"20\" y=\"" + std::to_string((kTop + kBottom) / 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         std::to_string((kTop + kBottom) / 2) + ")\">" + escape_text(y_label_) + "</text>\n";

  int color = 0, legend_y = kTop + 14;
  for (const auto& s : series_) {
    const char* stroke = kPalette[color % (sizeof kPalette / sizeof *kPalette)];
    ++color;
    if (s.reference) {
      const std::string y = num(py(y_value(s.y[0])));
      out += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + y + "\" x2=\"" +
             std::to_string(kRight) + "\" y2=\"" + y + "\" stroke=\"" + stroke +
             "\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n";
    } else {
      out += "<polyline fill=\"none\" stroke=\"";
      out += stroke;
      out += "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) out += ' ';
        out += num(px(s.x[i])) + "," + num(py(y_value(s.y[i])));
      }
      out += "\"/>\n";
    }
    if (!s.label.empty()) {
      out += "<line x1=\"" + std::to_string(kRight + 12) + "\" y1=\"" + std::to_string(legend_y) +
             "\" x2=\"" + std::to_string(kRight + 34) + "\" y2=\"" + std::to_string(legend_y) +
             "\" stroke=\"" + stroke + "\"" + (s.reference ? " stroke-dasharray=\"6 4\"" : "") +
             " stroke-width=\"1.5\"/>\n";
      out += "<text x=\"" + std::to_string(kRight + 40) + "\" y=\"" + std::to_string(legend_y + 4) +
             "\" font-family=\"sans-serif\" font-size=\"12\">" + escape_text(s.label) +
             "</text>\n";
      legend_y += 18;
    }
  }

  out += "</svg>\n";
  return out;
}

void LinePlot::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("svg: cannot write " + path);
  out << to_string();
}

}  // namespace degenid::app
