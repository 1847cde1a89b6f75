#include "hawkes/event_stream.hpp"

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>

namespace hawkes {

using nlohmann::json;

std::size_t EventStream::total_events() const {
  std::size_t n = 0;
  for (const auto& e : events) n += e.size();
  return n;
}

std::size_t EventStream::component_index(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  require(it != labels.end(), ErrorKind::Domain, "unknown component label '" + label + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

void EventStream::validate() const {
  require(events.size() == labels.size(), ErrorKind::Format, "event stream: one sequence per label expected");
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::Format, "event stream: horizon must be > 0");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& seq = events[i];
    for (std::size_t k = 0; k < seq.size(); ++k) {
      require(seq[k] >= 0.0 && seq[k] < horizon, ErrorKind::Format,
              "event stream: timestamp outside [0, T) in component " + labels[i]);
      if (k > 0) {
        require(seq[k] > seq[k - 1], ErrorKind::Format,
                "event stream: timestamps not strictly increasing in component " + labels[i]);
      }
    }
  }
}

std::size_t enforce_strict_order(std::vector<double>& times, double jitter) {
  std::sort(times.begin(), times.end());
  std::size_t nudged = 0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] <= times[k - 1]) {
      times[k] = std::max(times[k - 1] + jitter, std::nextafter(times[k - 1], HUGE_VAL));
      ++nudged;
    }
  }
  return nudged;
}

EventFormat event_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".bin") return EventFormat::Binary;
  if (ext == ".ndjson" || ext == ".jsonl") return EventFormat::Ndjson;
  return EventFormat::Tsv;
}

namespace {

// Visits all events in time order; ties resolved by component index.
template <class F>
void for_each_in_time_order(const EventStream& stream, F&& f) {
  using Item = std::pair<double, std::size_t>;
  auto cmp = [](const Item& a, const Item& b) {
    return a.first != b.first ? a.first > b.first : a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
  std::vector<std::size_t> cursor(stream.dimension(), 0);
  for (std::size_t i = 0; i < stream.dimension(); ++i) {
    if (!stream.events[i].empty()) heap.emplace(stream.events[i][0], i);
  }
  while (!heap.empty()) {
    auto [t, i] = heap.top();
    heap.pop();
    f(t, i);
    if (++cursor[i] < stream.events[i].size()) heap.emplace(stream.events[i][cursor[i]], i);
  }
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += sep;
    out += parts[k];
  }
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

// Builds the stream from unordered (label, time) records.
EventStream finish_stream(EventStream stream, std::vector<std::vector<double>> times, bool has_horizon,
                          double latest) {
  stream.events = std::move(times);
  for (auto& seq : stream.events) stream.jittered += enforce_strict_order(seq);
  if (!has_horizon) stream.horizon = latest + 1e-6;
  stream.validate();
  return stream;
}

}  // namespace

// ---------------------------------------------------------------------------
// TSV: header line of tab-separated key=value pairs, then `time<TAB>label`.

void write_events_tsv(const EventStream& stream, std::ostream& out) {
  out << "#hawkes-events\tv1\tD=" << stream.dimension() << "\tT=" << format_double(stream.horizon)
      << "\tlabels=" << join(stream.labels, ',') << "\tseed=" << (stream.seed ? std::to_string(*stream.seed) : "")
      << "\tmodel_hash=" << stream.model_hash << "\tjittered=" << stream.jittered
      << "\torigin=" << format_double(stream.origin) << '\n';
  for_each_in_time_order(stream, [&](double t, std::size_t i) {
    out << format_double(t) << '\t' << stream.labels[i] << '\n';
  });
}

EventStream read_events_tsv(std::istream& in) {
  EventStream stream;
  bool has_header = false;
  bool has_horizon = false;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> times;
  double latest = 0.0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line_number != 1 || line.rfind("#hawkes-events", 0) != 0) continue;
      has_header = true;
      std::size_t declared = 0;
      for (const auto& field : split(line, '\t')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "D") declared = std::stoul(value);
        else if (key == "T") {
          stream.horizon = parse_double(value);
          has_horizon = true;
        } else if (key == "labels") stream.labels = split(value, ',');
        else if (key == "seed" && !value.empty()) stream.seed = std::stoull(value);
        else if (key == "model_hash") stream.model_hash = value;
        else if (key == "jittered") stream.jittered = std::stoul(value);
        else if (key == "origin") stream.origin = parse_double(value);
      }
      require(declared == stream.labels.size(), ErrorKind::Format, "event file header: D does not match labels");
      for (std::size_t i = 0; i < stream.labels.size(); ++i) index[stream.labels[i]] = i;
      times.assign(stream.labels.size(), {});
      continue;
    }
    const auto tab = line.find('\t');
    require(tab != std::string::npos, ErrorKind::Format,
            "event file line " + std::to_string(line_number) + ": expected <time><TAB><label>");
    double t = 0.0;
    try {
      t = parse_double(std::string_view(line).substr(0, tab));
    } catch (const Error&) {
      fail(ErrorKind::Format, "event file line " + std::to_string(line_number) + ": bad timestamp");
    }
    const std::string label = line.substr(tab + 1);
    auto it = index.find(label);
    if (it == index.end()) {
      require(!has_header, ErrorKind::Format,
              "event file line " + std::to_string(line_number) + ": unknown label '" + label + "'");
      it = index.emplace(label, stream.labels.size()).first;
      stream.labels.push_back(label);
      times.emplace_back();
    }
    times[it->second].push_back(t);
    latest = std::max(latest, t);
  }
  return finish_stream(std::move(stream), std::move(times), has_horizon, latest);
}

// ---------------------------------------------------------------------------
// NDJSON: header object, then {"t": time, "c": label} per line.

void write_events_ndjson(const EventStream& stream, std::ostream& out) {
  json header = {{"format", "hawkes-events"}, {"version", 1},          {"labels", stream.labels},
                 {"horizon", stream.horizon}, {"jittered", stream.jittered}, {"model_hash", stream.model_hash},
                 {"origin", stream.origin}};
  header["seed"] = stream.seed ? json(*stream.seed) : json(nullptr);
  out << header.dump() << '\n';
  for_each_in_time_order(stream, [&](double t, std::size_t i) {
    out << json{{"t", t}, {"c", stream.labels[i]}}.dump() << '\n';
  });
}

EventStream read_events_ndjson(std::istream& in) {
  EventStream stream;
  bool has_horizon = false;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> times;
  double latest = 0.0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception&) {
      fail(ErrorKind::Format, "event file line " + std::to_string(line_number) + ": invalid JSON");
    }
    if (record.contains("format")) {
      stream.labels = record.at("labels").get<std::vector<std::string>>();
      stream.horizon = record.at("horizon").get<double>();
      has_horizon = true;
      stream.jittered = record.value("jittered", std::size_t{0});
      stream.model_hash = record.value("model_hash", std::string());
      stream.origin = record.value("origin", 0.0);
      if (record.contains("seed") && !record["seed"].is_null()) stream.seed = record["seed"].get<std::uint64_t>();
      for (std::size_t i = 0; i < stream.labels.size(); ++i) index[stream.labels[i]] = i;
      times.assign(stream.labels.size(), {});
      continue;
    }
    require(record.contains("t") && record.contains("c"), ErrorKind::Format,
            "event file line " + std::to_string(line_number) + ": expected fields t and c");
    const double t = record["t"].get<double>();
    const std::string label = record["c"].get<std::string>();
    auto it = index.find(label);
    if (it == index.end()) {
      require(!has_horizon, ErrorKind::Format,
              "event file line " + std::to_string(line_number) + ": unknown label '" + label + "'");
      it = index.emplace(label, stream.labels.size()).first;
      stream.labels.push_back(label);
      times.emplace_back();
    }
    times[it->second].push_back(t);
    latest = std::max(latest, t);
  }
  return finish_stream(std::move(stream), std::move(times), has_horizon, latest);
}

// ---------------------------------------------------------------------------
// Binary columnar layout (little-endian):
//   "HKEVBIN1" | u32 D | f64 T | f64 origin | u8 has_seed | u64 seed |
//   u64 jittered | u32 len, model_hash bytes |
//   D x { u32 len, label bytes | u64 n | n x f64 seconds }

static_assert(std::endian::native == std::endian::little, "binary event format assumes little-endian hosts");

namespace {

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  require(static_cast<bool>(in), ErrorKind::Format, "binary event file truncated");
  return value;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  require(n < (1u << 20), ErrorKind::Format, "binary event file: implausible string length");
  std::string s(n, '\0');
  in.read(s.data(), n);
  require(static_cast<bool>(in), ErrorKind::Format, "binary event file truncated");
  return s;
}

constexpr char kMagic[8] = {'H', 'K', 'E', 'V', 'B', 'I', 'N', '1'};

}  // namespace

void write_events_binary(const EventStream& stream, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(stream.dimension()));
  put<double>(out, stream.horizon);
  put<double>(out, stream.origin);
  put<std::uint8_t>(out, stream.seed ? 1 : 0);
  put<std::uint64_t>(out, stream.seed.value_or(0));
  put<std::uint64_t>(out, stream.jittered);
  put_string(out, stream.model_hash);
  for (std::size_t i = 0; i < stream.dimension(); ++i) {
    put_string(out, stream.labels[i]);
    put<std::uint64_t>(out, stream.events[i].size());
    out.write(reinterpret_cast<const char*>(stream.events[i].data()),
              static_cast<std::streamsize>(stream.events[i].size() * sizeof(double)));
  }
}

EventStream read_events_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorKind::Format,
          "not a binary event file (bad magic)");
  EventStream stream;
  const auto d = get<std::uint32_t>(in);
  stream.horizon = get<double>(in);
  stream.origin = get<double>(in);
  const auto has_seed = get<std::uint8_t>(in);
  const auto seed = get<std::uint64_t>(in);
  if (has_seed) stream.seed = seed;
  stream.jittered = get<std::uint64_t>(in);
  stream.model_hash = get_string(in);
  for (std::uint32_t i = 0; i < d; ++i) {
    stream.labels.push_back(get_string(in));
    const auto n = get<std::uint64_t>(in);
    std::vector<double> seq(n);
    in.read(reinterpret_cast<char*>(seq.data()), static_cast<std::streamsize>(n * sizeof(double)));
    require(static_cast<bool>(in), ErrorKind::Format, "binary event file truncated");
    stream.events.push_back(std::move(seq));
  }
  stream.validate();
  return stream;
}

// ---------------------------------------------------------------------------

void write_events(const EventStream& stream, const std::filesystem::path& path) {
  std::ostringstream out(std::ios::binary);
  switch (event_format_for(path)) {
    case EventFormat::Tsv: write_events_tsv(stream, out); break;
    case EventFormat::Ndjson: write_events_ndjson(stream, out); break;
    case EventFormat::Binary: write_events_binary(stream, out); break;
  }
  write_file_atomic(path, out.str());
}

EventStream read_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open event file '" + path.string() + "'");
  switch (event_format_for(path)) {
    case EventFormat::Tsv: return read_events_tsv(in);
    case EventFormat::Ndjson: return read_events_ndjson(in);
    case EventFormat::Binary: return read_events_binary(in);
  }
  fail(ErrorKind::Format, "unsupported event format");
}

}  // namespace hawkes
