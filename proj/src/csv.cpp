#include "svol/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace svol {

namespace {

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t row, const std::string& col) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    std::ostringstream os;
    os << "row " << row << ", column '" << col << "': not a number: '" << s << "'";
    throw Error(Errc::ParseError, os.str());
  }
  return v;
}

// Date keys preserve ordering: ISO-8601 dates map to yyyymmdd, integer
// indices map to themselves. The first data row fixes which form is in use.
long long parse_date_key(const std::string& s, std::size_t row, bool& is_iso,
                         bool first) {
  const bool looks_iso = s.size() == 10 && s[4] == '-' && s[7] == '-';
  if (first) is_iso = looks_iso;
  if (looks_iso != is_iso) {
    std::ostringstream os;
    os << "row " << row << ": inconsistent date format '" << s << "'";
    throw Error(Errc::ParseError, os.str());
  }
  if (is_iso) {
    const auto digit = [&](std::size_t i) {
      if (std::isdigit(static_cast<unsigned char>(s[i])) == 0) {
        std::ostringstream os;
        os << "row " << row << ": bad ISO-8601 date '" << s << "'";
        throw Error(Errc::ParseError, os.str());
      }
      return s[i] - '0';
    };
    const int y = digit(0) * 1000 + digit(1) * 100 + digit(2) * 10 + digit(3);
    const int m = digit(5) * 10 + digit(6);
    const int d = digit(8) * 10 + digit(9);
    if (m < 1 || m > 12 || d < 1 || d > 31) {
      std::ostringstream os;
      os << "row " << row << ": impossible calendar date '" << s << "'";
      throw Error(Errc::ParseError, os.str());
    }
    return static_cast<long long>(y) * 10000 + m * 100 + d;
  }
  long long v = 0;
  const char* first_c = s.data();
  const char* last_c = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first_c, last_c, v);
  if (ec != std::errc{} || ptr != last_c) {
    std::ostringstream os;
    os << "row " << row << ": expected a date or integer index, got '" << s << "'";
    throw Error(Errc::ParseError, os.str());
  }
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::ParseError, "cannot open " + file.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_row(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw Error(Errc::EmptyInput, file.string() + " is empty");
  return table;
}

void write_csv(const std::filesystem::path& file, const CsvTable& table) {
  std::ofstream out(file);
  if (!out) throw Error(Errc::ParseError, "cannot write " + file.string());
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

std::string format_double(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

SeriesPair ingest(const std::filesystem::path& file, IngestMode mode) {
  const CsvTable table = read_csv(file);

  std::vector<std::string> names;
  names.reserve(table.header.size());
  for (const auto& h : table.header) names.push_back(lower(h));

  const auto find_col = [&](std::initializer_list<const char*> candidates) {
    for (const char* c : candidates) {
      const auto it = std::find(names.begin(), names.end(), c);
      if (it != names.end()) return static_cast<std::ptrdiff_t>(it - names.begin());
    }
    return static_cast<std::ptrdiff_t>(-1);
  };

  const std::ptrdiff_t date_col = find_col({"date", "t"});
  const std::ptrdiff_t value_col = mode == IngestMode::Prices
                                       ? find_col({"price"})
                                       : find_col({"return", "r"});
  if (date_col < 0 || value_col < 0) {
    throw Error(Errc::ParseError,
                mode == IngestMode::Prices
                    ? "header must provide 'date' (or 't') and 'price' columns"
                    : "header must provide 'date' (or 't') and 'return' (or 'r') columns");
  }

  if (table.rows.empty()) throw Error(Errc::EmptyInput, "no data rows");
  if (mode == IngestMode::Prices && table.rows.size() < 2) {
    throw Error(Errc::EmptyInput, "prices mode needs at least 2 rows");
  }

  std::vector<double> values;
  values.reserve(table.rows.size());
  bool is_iso = false;
  long long prev_key = 0;
  const std::string value_name = table.header[static_cast<std::size_t>(value_col)];

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t row_no = i + 1;  // 1-based data row, header not counted
    if (row.size() != table.header.size()) {
      std::ostringstream os;
      os << "row " << row_no << ": expected " << table.header.size()
         << " fields, got " << row.size();
      throw Error(Errc::ParseError, os.str());
    }
    const long long key = parse_date_key(row[static_cast<std::size_t>(date_col)],
                                         row_no, is_iso, i == 0);
    if (i > 0 && key <= prev_key) {
      std::ostringstream os;
      os << "row " << row_no << ": dates must be strictly increasing";
      throw Error(Errc::NonMonotoneDates, os.str());
    }
    prev_key = key;

    const double v =
        parse_number(row[static_cast<std::size_t>(value_col)], row_no, value_name);
    if (mode == IngestMode::Prices) {
      if (!std::isfinite(v) || v <= 0.0) {
        std::ostringstream os;
        os << "row " << row_no << ": price must be finite and positive, got " << v;
        throw Error(Errc::NonPositivePrice, os.str());
      }
    } else if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "row " << row_no << ": non-finite return";
      throw Error(Errc::ParseError, os.str());
    }
    values.push_back(v);
  }

  SeriesPair out;
  if (mode == IngestMode::Prices) {
    out.returns.reserve(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) {
      out.returns.push_back(std::log(values[i] / values[i - 1]));
    }
  } else {
    out.returns = std::move(values);
  }
  return out;
}

void write_path_csv(const std::filesystem::path& file,
                    std::span<const SeriesPair> paths) {
  CsvTable table;
  const bool multi = paths.size() > 1;
  if (multi) table.header = {"path", "t", "r", "h"};
  else table.header = {"t", "r", "h"};

  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& sp = paths[p];
    for (std::size_t t = 0; t < sp.returns.size(); ++t) {
      std::vector<std::string> row;
      if (multi) row.push_back(std::to_string(p));
      row.push_back(std::to_string(t + 1));
      row.push_back(format_double(sp.returns[t]));
      row.push_back(sp.volatility ? format_double((*sp.volatility)[t]) : "");
      table.rows.push_back(std::move(row));
    }
  }
  write_csv(file, table);
}

}  // namespace svol
