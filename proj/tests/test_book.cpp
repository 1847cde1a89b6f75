#include "hawkes/analytics.hpp"
#include "hawkes/book.hpp"
#include "hawkes/error.hpp"

#include <doctest.h>

#include <sstream>

using namespace hawkes;

namespace {

std::vector<BookUpdate> parse(const std::string& text) {
  std::istringstream in(text);
  return read_book_updates(in);
}

std::size_t count(const Classification& c, const std::string& label) {
  const auto& labels = book_labels();
  const auto it = std::find(labels.begin(), labels.end(), label);
  return c.stream.events[static_cast<std::size_t>(it - labels.begin())].size();
}

void expect_format_error(const std::string& text, const std::string& fragment) {
  try {
    parse(text);
    FAIL("expected Format");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("parsing level-I records") {
  const auto u = parse(
      "# header\n"
      "1000\task\t101\t5\ttrade\n"
      "\n"
      "1000\tb\t100\t7\t-\r\n"
      "1200\tbid\t100\t9\n");
  REQUIRE(u.size() == 3);
  CHECK(u[0].side == Side::Ask);
  CHECK(u[0].kind == UpdateKind::Trade);
  CHECK(u[0].line == 2);
  CHECK(u[1].side == Side::Bid);
  CHECK_FALSE(u[1].kind.has_value());
  CHECK(u[2].qty == 9);
  CHECK(u[2].line == 5);
}

TEST_CASE("malformed records report their line") {
  expect_format_error("1\task\t10\t1\n2\tmid\t10\t1\n", "line 2");
  expect_format_error("1\task\t10\n", "line 1");
  expect_format_error("1\task\tx\t1\n", "price");
  expect_format_error("1\task\t10\t-1\n", "quantity");
  expect_format_error("1\task\t10\t1\tcancel\n", "kind");
  expect_format_error("5\task\t10\t1\n4\tbid\t9\t1\n", "non-decreasing");
  CHECK_THROWS_AS(load_book_updates("/nonexistent/book.tsv"), Error);
}

TEST_CASE("classification rules") {
  const auto c = classify_book_events(parse(
      "0\task\t101\t5\n"          // initialises ask
      "1\task\t101\t6\n"          // bid unknown: one-sided
      "2\tbid\t99\t4\n"           // initialises bid
      "3\tbid\t100\t1\tinsert\n"  // bid improves, mid moves up: P_a
      "4\task\t101\t4\ttrade\n"   // T_a
      "5\tbid\t100\t3\n"          // quantity up, no kind -> L_b
      "6\tbid\t100\t2\n"          // quantity down -> C_b
      "7\tbid\t100\t2\n"          // nothing changed
      "8\task\t100\t3\tdelete\n"  // ask moves down: P_b even though tagged delete
      "9\task\t100\t2\tdelete\n"  // C_a
      "10\tbid\t100\t2\ttrade\n"  // T_b
      ));
  CHECK(c.input == 11);
  CHECK(count(c, "P_a") == 1);
  CHECK(count(c, "P_b") == 1);
  CHECK(count(c, "T_a") == 1);
  CHECK(count(c, "T_b") == 1);
  CHECK(count(c, "L_a") == 0);
  CHECK(count(c, "L_b") == 1);
  CHECK(count(c, "C_a") == 1);
  CHECK(count(c, "C_b") == 1);
  CHECK(c.price_events == 2);
  CHECK(c.inferred == 2);
  CHECK(c.dropped.at("initialization") == 2);
  CHECK(c.dropped.at("one_sided_book") == 1);
  CHECK(c.dropped.at("no_change") == 1);
  CHECK(c.emitted + c.dropped_total() == c.input);
  // times relative to the first update, in seconds
  CHECK(c.stream.events[0].front() == doctest::Approx(3e-6));
  CHECK(c.stream.horizon > 10e-6);
  c.stream.validate();
}

TEST_CASE("simultaneous events are separated") {
  const auto c = classify_book_events(parse(
      "0\task\t101\t5\n"
      "0\tbid\t100\t5\n"
      "7\task\t101\t6\n"
      "7\task\t101\t7\n"
      "7\task\t101\t8\n"));
  REQUIRE(count(c, "L_a") == 3);
  const auto& la = c.stream.events[4];
  CHECK(la[0] < la[1]);
  CHECK(la[1] < la[2]);
  CHECK(c.stream.jittered == 2);
  c.stream.validate();
}

TEST_CASE("empty feed") {
  const auto c = classify_book_events({});
  CHECK(c.emitted == 0);
  CHECK(c.stream.events.size() == 8);
}
