#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hawkes {

/// D sorted timestamp sequences on [0, horizon).
struct EventStream {
  std::vector<std::string> labels;
  double horizon = 0.0;
  std::vector<std::vector<double>> events;

  // provenance metadata
  std::optional<std::uint64_t> seed;
  std::string model_hash;
  std::size_t jittered = 0;  // timestamps nudged to restore strict ordering
  double origin = 0.0;       // absolute time of t = 0 for ingested data

  std::size_t dimension() const { return labels.size(); }
  std::size_t total_events() const;
  std::size_t component_index(const std::string& label) const;

  /// Throws Format unless every component is strictly increasing in [0, horizon).
  void validate() const;
};

/// Sorts the sequence and nudges ties forward by `jitter` so it becomes
/// strictly increasing. Returns the number of nudged timestamps.
std::size_t enforce_strict_order(std::vector<double>& times, double jitter = 1e-9);

enum class EventFormat { Tsv, Ndjson, Binary };

/// Picks the format from the file extension (.bin, .ndjson, anything else TSV).
EventFormat event_format_for(const std::filesystem::path& path);

void write_events_tsv(const EventStream& stream, std::ostream& out);
EventStream read_events_tsv(std::istream& in);

void write_events_ndjson(const EventStream& stream, std::ostream& out);
EventStream read_events_ndjson(std::istream& in);

void write_events_binary(const EventStream& stream, std::ostream& out);
EventStream read_events_binary(std::istream& in);

void write_events(const EventStream& stream, const std::filesystem::path& path);
EventStream read_events(const std::filesystem::path& path);

}  // namespace hawkes
