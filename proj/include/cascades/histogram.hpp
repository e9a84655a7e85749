#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cascades {

// Value -> occurrence count. Keys are doubles so integer-valued metrics and
// ratios (normalized community value) share one representation.
class Histogram {
 public:
  struct Row {
    double value;
    std::uint64_t count;
    double ccdf;  // fraction of observations with value >= this value
  };

  void add(double value, std::uint64_t count = 1);
  void merge(const Histogram& other);

  std::uint64_t total() const;
  bool empty() const { return counts_.empty(); }
  std::size_t distinct() const { return counts_.size(); }
  const std::map<double, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t count(double value) const;

  std::vector<Row> rows() const;

  // Every observation, ascending.
  std::vector<double> expand() const;

  void write_csv(const std::filesystem::path& path) const;
  static Histogram read_csv(const std::filesystem::path& path);

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::map<double, std::uint64_t> counts_;
};

// Integers print without a fractional part; everything else round-trips.
std::string format_number(double value);

}  // namespace cascades
