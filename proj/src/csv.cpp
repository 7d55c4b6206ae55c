#include "spmrp/csv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spmrp/errors.hpp"

namespace spmrp {

namespace {

std::vector<std::string> split_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t p = 0; p < line.size(); ++p) {
    const char c = line[p];
    if (quoted) {
      if (c == '"') {
        if (p + 1 < line.size() && line[p + 1] == '"') {
          field += '"';
          ++p;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw InputError("csv: unterminated quote on line " + std::to_string(lineno));
  out.push_back(field);
  return out;
}

}  // namespace

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string normalize_label(const std::string& s) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

CsvTable CsvTable::read(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      t.header_ = split_line(line, lineno);
      for (std::size_t i = 0; i < t.header_.size(); ++i) {
        t.header_[i] = trim(t.header_[i]);
        t.index_[t.header_[i]] = static_cast<int>(i);
      }
      continue;
    }
    if (trim(line).empty()) continue;
    auto fields = split_line(line, lineno);
    if (fields.size() != t.header_.size())
      throw InputError("csv: line " + std::to_string(lineno) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(t.header_.size()));
    for (auto& f : fields) f = trim(f);
    t.rows_.push_back(std::move(fields));
  }
  if (t.header_.empty()) throw InputError("csv: missing header row");
  return t;
}

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open file: " + path);
  return read(in);
}

CsvTable CsvTable::read_string(const std::string& text) {
  std::istringstream in(text);
  return read(in);
}

bool CsvTable::has_column(const std::string& name) const { return index_.count(name) > 0; }

int CsvTable::column(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("csv: missing column '" + name + "'");
  return it->second;
}

long CsvTable::long_cell(std::size_t row, const std::string& name) const {
  const std::string& s = cell(row, name);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw InputError("csv: row " + std::to_string(row + 2) + " column '" + name +
                     "': not an integer: '" + s + "'");
  return v;
}

double CsvTable::double_cell(std::size_t row, const std::string& name) const {
  const std::string& s = cell(row, name);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw InputError("csv: row " + std::to_string(row + 2) + " column '" + name +
                     "': not a number: '" + s + "'");
  return v;
}

}  // namespace spmrp
