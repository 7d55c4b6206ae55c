#ifndef SPMRP_CSV_HPP
#define SPMRP_CSV_HPP

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace spmrp {

// Minimal strict CSV: comma-delimited, one header row, optional double
// quotes around fields. Trailing CR is stripped so CRLF files parse.
class CsvTable {
 public:
  static CsvTable read(std::istream& in);
  static CsvTable read_file(const std::string& path);
  static CsvTable read_string(const std::string& text);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  bool has_column(const std::string& name) const;
  // Throws InputError naming the missing column.
  int column(const std::string& name) const;

  const std::string& cell(std::size_t row, int col) const { return rows_[row][col]; }
  const std::string& cell(std::size_t row, const std::string& name) const {
    return rows_[row][column(name)];
  }

  long long_cell(std::size_t row, const std::string& name) const;
  double double_cell(std::size_t row, const std::string& name) const;

 private:
  std::vector<std::string> header_;
  std::map<std::string, int> index_;
  std::vector<std::vector<std::string>> rows_;
};

std::string trim(const std::string& s);
// Lowercase, trimmed, internal whitespace collapsed to single spaces.
std::string normalize_label(const std::string& s);

}  // namespace spmrp

#endif
