#pragma once

#include <string>
#include <vector>

namespace degenid::app {

// Minimal hand-emitted SVG line plot: axes, ticks, legend, fixed-precision
// coordinates so repeated runs produce identical bytes. No dependencies.
class LinePlot {
 public:
  LinePlot(std::string title, std::string x_label, std::string y_label);

  // log-scale y axis; values are clamped at 1e-30 before taking log10
  void set_log_y(bool log_y) { log_y_ = log_y; }

  void add_series(std::string label, std::vector<double> x, std::vector<double> y);
  // horizontal reference line (e.g. a true parameter value)
  void add_hline(std::string label, double y);

  std::string to_string() const;
  void save(const std::string& path) const;

 private:
  struct Series {
    std::string label;
    std::vector<double> x, y;
    bool reference = false;
  };

  std::string title_, x_label_, y_label_;
  bool log_y_ = false;
  std::vector<Series> series_;
};

}  // namespace degenid::app
