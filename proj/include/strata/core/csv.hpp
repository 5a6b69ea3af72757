#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "strata/core/error.hpp"

namespace strata::csv {

/// Splits one CSV record. Handles quoted fields with "" escapes; fields may
/// not span multiple lines.
inline std::vector<std::string> split_record(const std::string& line, char delimiter,
                                             std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      in_quotes = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) {
    raise(ErrCode::ParseError, "unterminated quote on line " + std::to_string(line_no));
  }
  fields.push_back(std::move(field));
  return fields;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

/// Reads a whole CSV file with a mandatory header row.
inline Table read_file(const std::string& path, char delimiter = ',') {
  std::ifstream in(path);
  if (!in) raise(ErrCode::IoError, "cannot open '" + path + "'");
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && line_no > 1) continue;
    auto fields = split_record(line, delimiter, line_no);
    if (line_no == 1) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) {
        raise(ErrCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(table.header.size()) + " fields, got " +
                                       std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) raise(ErrCode::EmptyDataset, "'" + path + "' has no header row");
  return table;
}

inline std::string quote_if_needed(const std::string& field, char delimiter) {
  if (field.find(delimiter) == std::string::npos && field.find('"') == std::string::npos &&
      field.find('\n') == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class Writer {
public:
  explicit Writer(const std::string& path, char delimiter = ',')
      : out_(path, std::ios::binary), delimiter_(delimiter) {
    if (!out_) raise(ErrCode::IoError, "cannot write '" + path + "'");
  }

  void write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << delimiter_;
      out_ << quote_if_needed(fields[i], delimiter_);
    }
    out_ << '\n';
  }

private:
  std::ofstream out_;
  char delimiter_;
};

}  // namespace strata::csv
