#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cascades/graph.hpp"
#include "cascades/histogram.hpp"
#include "json.hpp"

namespace cascades {

struct Activation {
  std::string user;
  std::int64_t time = 0;  // epoch seconds, or simulation step

  friend bool operator==(const Activation&, const Activation&) = default;
};

// The activations of one story. After validate() entries are ordered by time,
// equal times keep their input order, and each user appears once.
struct ActivationSequence {
  std::string story_id;
  std::vector<Activation> activations;
  // Set when the input marks a submitter explicitly.
  std::optional<std::string> submitter_override;

  // Explicit override if present, otherwise the first activation.
  const std::string& submitter() const;

  std::size_t size() const { return activations.size(); }
  bool empty() const { return activations.empty(); }

  friend bool operator==(const ActivationSequence&,
                         const ActivationSequence&) = default;
};

struct ValidationStats {
  std::size_t duplicates_dropped = 0;
  std::size_t tied_pairs = 0;  // adjacent entries sharing a timestamp
};

// Stable sort by time, then drop repeated users keeping the earliest entry.
// Idempotent.
ValidationStats validate(ActivationSequence& sequence);

// Stories keyed (and therefore ordered) by story id.
struct ActivationLog {
  std::map<std::string, ActivationSequence> stories;
  std::size_t events = 0;  // after validation
  std::size_t duplicates_dropped = 0;
  std::size_t tied_pairs = 0;
};

// CSV with header "story_id,user_id,timestamp" and an optional fourth
// "is_submitter" column (0/1). Throws std::runtime_error naming the line on
// malformed rows.
ActivationLog load_activation_log(const std::filesystem::path& path);
ActivationLog parse_activation_log(std::istream& in,
                                   std::string_view source = "<stream>");

void write_activation_log(const ActivationLog& log,
                          const std::filesystem::path& path);

ActivationLog make_log(std::vector<ActivationSequence> sequences);

struct ValidationReport {
  std::size_t stories = 0;
  std::size_t events = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t tied_pairs = 0;
  // Distinct users in the log that the follower graph does not know.
  std::size_t unknown_users = 0;
};

ValidationReport validation_report(const ActivationLog& log,
                                   const FollowerGraph* graph = nullptr);
void to_json(nlohmann::json& j, const ValidationReport& report);

// Activations per user -> number of users.
Histogram activity_distribution(const ActivationLog& log);

}  // namespace cascades
