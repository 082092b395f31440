#pragma once

#include <string>
#include <vector>

namespace degenid::app {

// RFC 4180 table writer. Rows are built cell by cell; doubles are printed
// with format_double so identical runs serialize byte for byte.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void begin_row();
  void add(const std::string& cell);
  void add(double value);
  void add(int value);

  std::size_t rows() const { return rows_.size(); }
  std::string to_string() const;  // CRLF line endings, fields quoted as needed
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace degenid::app
