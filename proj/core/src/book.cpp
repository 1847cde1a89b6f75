#include "hawkes/book.hpp"

#include "hawkes/analytics.hpp"
#include "hawkes/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hawkes {

namespace {

std::int64_t parse_int(const std::string& field, std::size_t line, const char* what) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  require(ec == std::errc() && ptr == end, ErrorKind::Format,
          "line " + std::to_string(line) + ": bad " + what + " '" + field + "'");
  return value;
}

}  // namespace

std::vector<BookUpdate> read_book_updates(std::istream& in) {
  std::vector<BookUpdate> updates;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    require(fields.size() == 4 || fields.size() == 5, ErrorKind::Format,
            "line " + std::to_string(line) + ": expected 4 or 5 tab-separated fields");
    BookUpdate u;
    u.line = line;
    u.timestamp_us = parse_int(fields[0], line, "timestamp");
    if (fields[1] == "ask" || fields[1] == "a") {
      u.side = Side::Ask;
    } else if (fields[1] == "bid" || fields[1] == "b") {
      u.side = Side::Bid;
    } else {
      fail(ErrorKind::Format, "line " + std::to_string(line) + ": side must be ask or bid");
    }
    u.price = parse_int(fields[2], line, "price");
    u.qty = parse_int(fields[3], line, "quantity");
    require(u.price > 0, ErrorKind::Format, "line " + std::to_string(line) + ": price must be positive");
    require(u.qty >= 0, ErrorKind::Format, "line " + std::to_string(line) + ": quantity must be >= 0");
    if (fields.size() == 5 && fields[4] != "-" && !fields[4].empty()) {
      if (fields[4] == "trade") {
        u.kind = UpdateKind::Trade;
      } else if (fields[4] == "insert") {
        u.kind = UpdateKind::Insert;
      } else if (fields[4] == "delete") {
        u.kind = UpdateKind::Delete;
      } else {
        fail(ErrorKind::Format, "line " + std::to_string(line) + ": unknown update kind '" + fields[4] + "'");
      }
    }
    require(updates.empty() || u.timestamp_us >= updates.back().timestamp_us, ErrorKind::Format,
            "line " + std::to_string(line) + ": timestamps must be non-decreasing");
    updates.push_back(u);
  }
  return updates;
}

std::vector<BookUpdate> load_book_updates(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  return read_book_updates(in);
}

std::size_t Classification::dropped_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : dropped) n += count;
  return n;
}

Classification classify_book_events(const std::vector<BookUpdate>& updates) {
  enum Component { Pa, Pb, Ta, Tb, La, Lb, Ca, Cb };
  Classification out;
  out.input = updates.size();
  out.stream.labels = book_labels();
  out.stream.events.assign(8, {});
  if (updates.empty()) {
    out.stream.horizon = 1e-6;
    return out;
  }
  const std::int64_t origin = updates.front().timestamp_us;
  struct Level {
    bool known = false;
    std::int64_t price = 0;
    std::int64_t qty = 0;
  };
  Level ask;
  Level bid;
  std::int64_t previous = origin;
  auto emit = [&](int component, std::int64_t ts) {
    out.stream.events[static_cast<std::size_t>(component)].push_back(static_cast<double>(ts - origin) * 1e-6);
    ++out.emitted;
  };
  for (const auto& u : updates) {
    require(u.timestamp_us >= previous, ErrorKind::Format,
            "line " + std::to_string(u.line) + ": timestamps must be non-decreasing");
    previous = u.timestamp_us;
    Level& own = u.side == Side::Ask ? ask : bid;
    const Level& other = u.side == Side::Ask ? bid : ask;
    if (!own.known) {
      own = {true, u.price, u.qty};
      ++out.dropped["initialization"];
      continue;
    }
    const Level before = own;
    own = {true, u.price, u.qty};
    if (!other.known) {
      ++out.dropped["one_sided_book"];
      continue;
    }
    // twice the mid, in ticks
    const std::int64_t mid_before = before.price + other.price;
    const std::int64_t mid_after = own.price + other.price;
    if (mid_after != mid_before) {
      emit(mid_after > mid_before ? Pa : Pb, u.timestamp_us);
      ++out.price_events;
      continue;
    }
    const bool at_ask = u.side == Side::Ask;
    if (u.kind) {
      switch (*u.kind) {
        case UpdateKind::Trade: emit(at_ask ? Ta : Tb, u.timestamp_us); break;
        case UpdateKind::Insert: emit(at_ask ? La : Lb, u.timestamp_us); break;
        case UpdateKind::Delete: emit(at_ask ? Ca : Cb, u.timestamp_us); break;
      }
      continue;
    }
    if (own.qty > before.qty) {
      emit(at_ask ? La : Lb, u.timestamp_us);
      ++out.inferred;
    } else if (own.qty < before.qty) {
      emit(at_ask ? Ca : Cb, u.timestamp_us);
      ++out.inferred;
    } else {
      ++out.dropped["no_change"];
    }
  }
  for (auto& seq : out.stream.events) out.stream.jittered += enforce_strict_order(seq);
  double last = 0.0;
  for (const auto& seq : out.stream.events) {
    if (!seq.empty()) last = std::max(last, seq.back());
  }
  out.stream.horizon = std::max(static_cast<double>(updates.back().timestamp_us - origin) * 1e-6, last) + 1e-6;
  out.stream.origin = static_cast<double>(origin) * 1e-6;
  return out;
}

}  // namespace hawkes
