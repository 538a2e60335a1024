#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "plap/csv.hpp"
#include "plap/integrator.hpp"

namespace plap {

namespace csv {

std::string real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("cannot parse " + what + " from '" + text + "'");
  }
  if (used != text.size()) throw std::runtime_error("cannot parse " + what + " from '" + text + "'");
  return value;
}

}  // namespace csv

namespace {
constexpr const char* kSeriesHeader = "t,mass,sup,flux_cum,absorbed_cum,dt";
}

void write_series_csv(std::ostream& out, const DecaySeries& series) {
  out << kSeriesHeader << '\n';
  for (const auto& r : series.records) {
    out << csv::real(r.t) << ',' << csv::real(r.mass) << ',' << csv::real(r.sup) << ','
        << csv::real(r.flux_cum) << ',' << csv::real(r.absorbed_cum) << ',' << csv::real(r.dt)
        << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const DecaySeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_series_csv(out, series);
}

DecaySeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("series CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSeriesHeader) {
    throw std::runtime_error("series CSV header must be '" + std::string(kSeriesHeader) + "', got '" +
                             line + "'");
  }
  DecaySeries series;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = csv::split(line);
    if (cells.size() != 6) {
      throw std::runtime_error("series CSV line " + std::to_string(line_no) + ": expected 6 columns");
    }
    const auto where = "line " + std::to_string(line_no);
    series.records.push_back({csv::parse_real(cells[0], "t at " + where),
                              csv::parse_real(cells[1], "mass at " + where),
                              csv::parse_real(cells[2], "sup at " + where),
                              csv::parse_real(cells[3], "flux_cum at " + where),
                              csv::parse_real(cells[4], "absorbed_cum at " + where),
                              csv::parse_real(cells[5], "dt at " + where)});
  }
  return series;
}

DecaySeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_series_csv(in);
}

}  // namespace plap
