#include "cascades/events.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace cascades {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail(std::string_view source, std::size_t line_no,
                       const std::string& what) {
  throw std::runtime_error(std::string(source) + ":" + std::to_string(line_no) +
                           ": " + what);
}

}  // namespace

const std::string& ActivationSequence::submitter() const {
  if (submitter_override) return *submitter_override;
  if (activations.empty())
    throw std::logic_error("story " + story_id + " has no activations");
  return activations.front().user;
}

ValidationStats validate(ActivationSequence& sequence) {
  ValidationStats stats;
  auto& acts = sequence.activations;
  std::stable_sort(acts.begin(), acts.end(),
                   [](const Activation& a, const Activation& b) {
                     return a.time < b.time;
                   });
  std::unordered_set<std::string> seen;
  seen.reserve(acts.size());
  std::vector<Activation> kept;
  kept.reserve(acts.size());
  for (auto& a : acts) {
    if (seen.insert(a.user).second) {
      kept.push_back(std::move(a));
    } else {
      ++stats.duplicates_dropped;
    }
  }
  acts = std::move(kept);
  for (std::size_t i = 1; i < acts.size(); ++i)
    if (acts[i].time == acts[i - 1].time) ++stats.tied_pairs;
  return stats;
}

ActivationLog make_log(std::vector<ActivationSequence> sequences) {
  ActivationLog log;
  for (auto& seq : sequences) {
    const auto stats = validate(seq);
    log.duplicates_dropped += stats.duplicates_dropped;
    log.tied_pairs += stats.tied_pairs;
    log.events += seq.size();
    auto id = seq.story_id;
    if (!log.stories.emplace(id, std::move(seq)).second)
      throw std::invalid_argument("duplicate story id " + id);
  }
  return log;
}

ActivationLog parse_activation_log(std::istream& in, std::string_view source) {
  std::map<std::string, ActivationSequence> grouped;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t columns = 3;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 3 || fields[0] != "story_id" || fields[1] != "user_id" ||
          fields[2] != "timestamp" ||
          (fields.size() == 4 && fields[3] != "is_submitter") || fields.size() > 4)
        fail(source, line_no,
             "expected header story_id,user_id,timestamp[,is_submitter]");
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns)
      fail(source, line_no,
           "expected " + std::to_string(columns) + " fields, got " +
               std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty())
      fail(source, line_no, "empty story or user id");

    std::int64_t time = 0;
    const auto ts = fields[2];
    auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), time);
    if (ec != std::errc() || ptr != ts.data() + ts.size() || time < 0)
      fail(source, line_no, "timestamp must be a non-negative integer");

    auto& seq = grouped[std::string(fields[0])];
    seq.story_id = fields[0];
    seq.activations.push_back({std::string(fields[1]), time});

    if (columns == 4) {
      if (fields[3] == "1") {
        if (seq.submitter_override && *seq.submitter_override != fields[1])
          fail(source, line_no, "second submitter for story " + seq.story_id);
        seq.submitter_override = std::string(fields[1]);
      } else if (fields[3] != "0" && !fields[3].empty()) {
        fail(source, line_no, "is_submitter must be 0 or 1");
      }
    }
  }
  std::vector<ActivationSequence> sequences;
  sequences.reserve(grouped.size());
  for (auto& [id, seq] : grouped) sequences.push_back(std::move(seq));
  return make_log(std::move(sequences));
}

ActivationLog load_activation_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open activation log " + path.string());
  return parse_activation_log(in, path.string());
}

void write_activation_log(const ActivationLog& log,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  bool with_submitter = false;
  for (const auto& [id, seq] : log.stories)
    with_submitter |= seq.submitter_override.has_value();
  out << "story_id,user_id,timestamp" << (with_submitter ? ",is_submitter" : "")
      << '\n';
  for (const auto& [id, seq] : log.stories) {
    for (const auto& a : seq.activations) {
      out << id << ',' << a.user << ',' << a.time;
      if (with_submitter)
        out << ',' << (seq.submitter_override == a.user ? 1 : 0);
      out << '\n';
    }
  }
}

ValidationReport validation_report(const ActivationLog& log,
                                   const FollowerGraph* graph) {
  ValidationReport report;
  report.stories = log.stories.size();
  report.events = log.events;
  report.duplicates_dropped = log.duplicates_dropped;
  report.tied_pairs = log.tied_pairs;
  if (graph) {
    std::unordered_set<std::string_view> unknown;
    for (const auto& [id, seq] : log.stories)
      for (const auto& a : seq.activations)
        if (!graph->find(a.user)) unknown.insert(a.user);
    report.unknown_users = unknown.size();
  }
  return report;
}

void to_json(nlohmann::json& j, const ValidationReport& report) {
  j = nlohmann::json{{"stories", report.stories},
                     {"events", report.events},
                     {"duplicates_dropped", report.duplicates_dropped},
                     {"tied_timestamps", report.tied_pairs},
                     {"unknown_users", report.unknown_users}};
}

Histogram activity_distribution(const ActivationLog& log) {
  std::unordered_map<std::string_view, std::uint64_t> per_user;
  for (const auto& [id, seq] : log.stories)
    for (const auto& a : seq.activations) ++per_user[a.user];
  Histogram h;
  for (const auto& [user, count] : per_user) h.add(static_cast<double>(count));
  return h;
}

}  // namespace cascades
