// Minimal CSV reading/writing used by scenario ingestion and report output.
#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace distmarket::core {

// Load errors carry the offending file, row, and rule so scenario problems
// are reportable without a debugger.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& file, int row, const std::string& message)
      : std::runtime_error(file + (row > 0 ? ":" + std::to_string(row) : "") +
                           ": " + message),
        file_(file),
        row_(row) {}
  const std::string& file() const { return file_; }
  int row() const { return row_; }

 private:
  std::string file_;
  int row_;
};

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  int require_col(const std::string& name) const {
    int c = col(name);
    if (c < 0) throw LoadError(path, 1, "missing mandatory column '" + name + "'");
    return c;
  }

  const std::string& cell(size_t row, int c) const { return rows[row][static_cast<size_t>(c)]; }

  double num(size_t row, int c) const {
    const std::string& s = rows[row][static_cast<size_t>(c)];
    try {
      size_t used = 0;
      double v = std::stod(s, &used);
      while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw LoadError(path, static_cast<int>(row) + 2,
                      "malformed number '" + s + "'");
    }
  }

  long integer(size_t row, int c) const {
    double v = num(row, c);
    long r = static_cast<long>(v);
    if (static_cast<double>(r) != v)
      throw LoadError(path, static_cast<int>(row) + 2,
                      "expected integer, got '" + rows[row][static_cast<size_t>(c)] + "'");
    return r;
  }

  bool flag(size_t row, int c) const {
    const std::string& s = rows[row][static_cast<size_t>(c)];
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw LoadError(path, static_cast<int>(row) + 2,
                    "expected boolean 0/1, got '" + s + "'");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
  }
  return out;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "missing file");
  CsvTable t;
  t.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw LoadError(path, lineno,
                      "malformed row: expected " + std::to_string(t.header.size()) +
                          " fields, got " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw LoadError(path, 0, "missing header row");
  return t;
}

// Fixed double formatting so repeated runs emit byte-identical files.
inline std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  const std::string& path() const { return path_; }

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace distmarket::core
