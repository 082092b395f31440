#include "csv.hpp"

#include <fstream>
#include <stdexcept>

#include "config.hpp"

namespace degenid::app {

namespace {

std::string escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    out += ch;
    if (ch == '"') out += '"';
  }
  out += '"';
  return out;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("csv: header must not be empty");
}

void CsvTable::begin_row() { rows_.emplace_back(); }

void CsvTable::add(const std::string& cell) {
  if (rows_.empty()) throw std::logic_error("csv: add before begin_row");
  if (rows_.back().size() >= header_.size()) throw std::logic_error("csv: row wider than header");
  rows_.back().push_back(cell);
}

void CsvTable::add(double value) { add(format_double(value)); }
void CsvTable::add(int value) { add(std::to_string(value)); }

std::string CsvTable::to_string() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += escape(row[i]);
    }
    out += "\r\n";
  };
  emit(header_);
  for (const auto& row : rows_) {
    if (row.size() != header_.size()) throw std::logic_error("csv: row narrower than header");
    emit(row);
  }
  return out;
}

void CsvTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  out << to_string();
}

}  // namespace degenid::app
