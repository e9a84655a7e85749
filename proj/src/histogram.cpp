#include "cascades/histogram.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cascades {

void Histogram::add(double value, std::uint64_t count) {
  if (count == 0) return;
  counts_[value] += count;
}

void Histogram::merge(const Histogram& other) {
  for (const auto& [value, count] : other.counts_) counts_[value] += count;
}

std::uint64_t Histogram::total() const {
  std::uint64_t sum = 0;
  for (const auto& [value, count] : counts_) sum += count;
  return sum;
}

std::uint64_t Histogram::count(double value) const {
  auto it = counts_.find(value);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<Histogram::Row> Histogram::rows() const {
  std::vector<Row> out;
  out.reserve(counts_.size());
  const double n = static_cast<double>(total());
  std::uint64_t remaining = total();
  for (const auto& [value, count] : counts_) {
    out.push_back({value, count, static_cast<double>(remaining) / n});
    remaining -= count;
  }
  return out;
}

std::vector<double> Histogram::expand() const {
  std::vector<double> out;
  out.reserve(total());
  for (const auto& [value, count] : counts_) out.insert(out.end(), count, value);
  return out;
}

void Histogram::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "value,count,ccdf\n";
  for (const auto& row : rows())
    out << format_number(row.value) << ',' << row.count << ','
        << format_number(row.ccdf) << '\n';
}

Histogram Histogram::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Histogram h;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("value", 0) == 0) continue;
    std::istringstream fields(line);
    std::string value, count;
    if (!std::getline(fields, value, ',') || !std::getline(fields, count, ','))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected value,count[,ccdf]");
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      const long long c = std::stoll(count, &used);
      if (used != count.size() || c < 0) throw std::invalid_argument(count);
      h.add(v, static_cast<std::uint64_t>(c));
    } catch (const std::logic_error&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed row '" + line + "'");
    }
  }
  return h;
}

std::string format_number(double value) {
  char buf[40];
  if (std::isfinite(value) && value == std::floor(value) &&
      std::fabs(value) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", value);
  } else {
    for (int precision = 15; precision <= 17; ++precision) {
      std::snprintf(buf, sizeof buf, "%.*g", precision, value);
      if (std::strtod(buf, nullptr) == value) break;
    }
  }
  return buf;
}

}  // namespace cascades
