#pragma once

#include "hawkes/event_stream.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hawkes {

enum class Side { Ask, Bid };
enum class UpdateKind { Trade, Insert, Delete };

/// Snapshot of one side's best level after an update.
struct BookUpdate {
  std::int64_t timestamp_us = 0;
  Side side = Side::Ask;
  std::int64_t price = 0;  // ticks
  std::int64_t qty = 0;    // contracts at the best level
  std::optional<UpdateKind> kind;
  std::size_t line = 0;    // source line, for diagnostics
};

/// Tab-separated records `timestamp_us  side  price  qty  kind` where side is
/// ask|bid and kind is trade|insert|delete or '-' when the feed lacks it.
/// Blank lines and lines starting with '#' are skipped.
std::vector<BookUpdate> read_book_updates(std::istream& in);
std::vector<BookUpdate> load_book_updates(const std::filesystem::path& path);

struct Classification {
  EventStream stream;  // components book_labels()
  std::size_t input = 0;
  std::size_t emitted = 0;
  std::size_t price_events = 0;
  std::size_t inferred = 0;                    // kind deduced from the quantity change
  std::map<std::string, std::size_t> dropped;  // reason -> count
  std::size_t dropped_total() const;
};

/// Maps level-I updates to the 8 event types. A mid move emits P_a (up) or
/// P_b (down) and nothing else; otherwise trades, inserts and deletes at the
/// best level emit T, L, C on the update's side. The first update of each
/// side only initialises the book.
Classification classify_book_events(const std::vector<BookUpdate>& updates);

}  // namespace hawkes
