#include "doctest.h"

#include <fstream>
#include <sstream>

#include "cdrkit/exporter.hpp"
#include "cdrkit/ingest.hpp"
#include "testutil.hpp"

using namespace cdrkit;

namespace {

ObservationWindow march_window() {
    return ObservationWindow::from_months(parse_utc("2012-03-01T00:00:00Z").value(), 3);
}

std::string cdr_text(const std::vector<std::string>& rows) {
    std::string s(kCdrHeader);
    s += '\n';
    for (const auto& r : rows) {
        s += r;
        s += '\n';
    }
    return s;
}

std::string topup_text(const std::vector<std::string>& rows) {
    std::string s(kTopUpHeader);
    s += '\n';
    for (const auto& r : rows) {
        s += r;
        s += '\n';
    }
    return s;
}

}  // namespace

TEST_CASE("cdr rows parse into records") {
    std::istringstream in(cdr_text({
        "2012-03-01T10:00:00Z,u1,u2,t5,CALL,60",
        "2012-04-02T11:30:00Z,u2,u3,t1,SMS,0",
    }));
    auto result = parse_cdr(in, march_window());
    REQUIRE(result.records.size() == 2);
    CHECK(result.report.total_rows == 2);
    CHECK(result.report.rejected == 0);
    CHECK(result.report.retained == 2);

    const auto& r = result.records[0];
    CHECK(r.timestamp == parse_utc("2012-03-01T10:00:00Z").value());
    CHECK(r.caller_id == "u1");
    CHECK(r.callee_id == "u2");
    CHECK(r.tower_id == "t5");
    CHECK(r.kind == CommKind::Call);
    CHECK(r.duration_s == 60);
    CHECK(result.records[1].kind == CommKind::Sms);
}

TEST_CASE("sms rows always carry duration 0") {
    std::istringstream in(cdr_text({"2012-03-01T10:00:00Z,u1,u2,t5,SMS,45"}));
    auto result = parse_cdr(in, march_window());
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].duration_s == 0);
    CHECK(result.report.rejected == 0);
}

TEST_CASE("bad cdr rows are rejected by reason and order is preserved") {
    std::vector<std::string> rows{
        "2012-03-01T10:00:00Z,u1,u2,t5,CALL,60",
        "2012-03-01T10:00:00Z,u1,u2,t5,CALL",          // bad-field-count
        "2012-03-41T10:00:00Z,u1,u2,t5,CALL,60",       // bad-timestamp
        "2012-02-28T10:00:00Z,u1,u2,t5,CALL,60",       // out-of-window (before)
        "2012-06-01T00:00:00Z,u1,u2,t5,CALL,60",       // out-of-window (at end)
        ",u2,t5,CALL,60",                              // bad-field-count (5 fields)
        "2012-03-01T10:00:00Z,,u2,t5,CALL,60",         // empty-id
        "2012-03-01T10:00:00Z,u1,u2,,CALL,60",         // empty-id (tower)
        "2012-03-01T10:00:00Z,u7,u7,t5,CALL,60",       // self-loop
        "2012-03-01T10:00:00Z,u1,u2,t5,VOICE,60",      // bad-kind
        "2012-03-01T10:00:00Z,u1,u2,t5,call,60",       // bad-kind (case-sensitive)
        "2012-03-01T10:00:00Z,u1,u2,t5,CALL,-1",       // bad-duration
        "2012-03-01T10:00:00Z,u1,u2,t5,CALL,6x",       // bad-duration
        "2012-05-31T23:59:59Z,u3,u4,t2,CALL,1",
    };
    // Keep the rejected share at half or below the majority cutoff.
    for (int i = 0; i < 10; ++i) rows.push_back("2012-04-01T10:00:00Z,f1,f2,t3,SMS,0");
    std::istringstream in(cdr_text(rows));
    auto result = parse_cdr(in, march_window());
    REQUIRE(result.records.size() == 12);
    CHECK(result.records[0].caller_id == "u1");
    CHECK(result.records[1].caller_id == "u3");
    CHECK(result.records[2].caller_id == "f1");

    const auto& by = result.report.by_reason;
    CHECK(by.at("bad-field-count") == 2);
    CHECK(by.at("bad-timestamp") == 1);
    CHECK(by.at("out-of-window") == 2);
    CHECK(by.at("empty-id") == 2);
    CHECK(by.at("self-loop") == 1);
    CHECK(by.at("bad-kind") == 2);
    CHECK(by.at("bad-duration") == 2);
    CHECK(result.report.total_rows == 24);
    CHECK(result.report.rejected == 12);
    CHECK(result.report.retained + result.report.rejected == result.report.total_rows);
}

TEST_CASE("topup rows parse and reject by reason") {
    std::vector<std::string> rows{
        "2012-03-01T10:00:00Z,u1,500",
        "2012-03-01T10:00:00Z,u1,0",      // non-positive amount
        "2012-03-01T10:00:00Z,u1,-5",     // non-positive amount
        "2012-03-01T10:00:00Z,u1,5.5",    // bad-amount
        "2012-03-01T10:00:00Z,,500",      // empty-id
        "2012-07-01T10:00:00Z,u1,500",    // out-of-window
        "not-a-time,u1,500",              // bad-timestamp
        "2012-03-01T10:00:00Z,u1",        // bad-field-count
        "2012-03-02T10:00:00Z,u2,750",
    };
    for (int i = 0; i < 5; ++i) rows.push_back("2012-04-01T10:00:00Z,u3,100");
    std::istringstream in(topup_text(rows));
    auto result = parse_topups(in, march_window());
    REQUIRE(result.records.size() == 7);
    CHECK(result.records[0].user_id == "u1");
    CHECK(result.records[0].amount_minor == 500);
    CHECK(result.records[1].amount_minor == 750);

    const auto& by = result.report.by_reason;
    CHECK(by.at("non-positive amount") == 2);
    CHECK(by.at("bad-amount") == 1);
    CHECK(by.at("empty-id") == 1);
    CHECK(by.at("out-of-window") == 1);
    CHECK(by.at("bad-timestamp") == 1);
    CHECK(by.at("bad-field-count") == 1);
    CHECK(result.report.total_rows == 14);
    CHECK(result.report.retained == 7);
}

TEST_CASE("majority-rejected input is fatal") {
    // 6 of 10 rows bad: independent count crosses the >50% line.
    std::vector<std::string> rows;
    for (int i = 0; i < 4; ++i) rows.push_back("2012-03-01T10:00:00Z,a,b,t1,CALL,1");
    for (int i = 0; i < 6; ++i) rows.push_back("garbage,a,b,t1,CALL,1");
    int bad = 0;
    for (const auto& r : rows) {
        if (r.rfind("garbage", 0) == 0) ++bad;
    }
    REQUIRE(bad * 2 > static_cast<int>(rows.size()));

    std::istringstream in(cdr_text(rows));
    CHECK_THROWS_AS(parse_cdr(in, march_window()), std::runtime_error);

    // Exactly half rejected is tolerated.
    std::istringstream half(cdr_text({
        "2012-03-01T10:00:00Z,a,b,t1,CALL,1",
        "garbage,a,b,t1,CALL,1",
    }));
    CHECK_NOTHROW(parse_cdr(half, march_window()));
}

TEST_CASE("wrong or missing header is fatal") {
    std::istringstream wrong("time,caller,callee\n2012-03-01T10:00:00Z,u1,u2,t5,CALL,60\n");
    CHECK_THROWS_AS(parse_cdr(wrong, march_window()), std::runtime_error);

    std::istringstream empty("");
    CHECK_THROWS_AS(parse_cdr(empty, march_window()), std::runtime_error);

    std::istringstream topup_wrong("timestamp,user,amount\n");
    CHECK_THROWS_AS(parse_topups(topup_wrong, march_window()), std::runtime_error);

    CHECK_THROWS_AS(parse_cdr(std::filesystem::path("/nonexistent/file.csv"), march_window()),
                    std::runtime_error);
}

TEST_CASE("crlf line endings parse identically") {
    std::string text(kCdrHeader);
    text += "\r\n2012-03-01T10:00:00Z,u1,u2,t5,CALL,60\r\n";
    std::istringstream in(text);
    auto result = parse_cdr(in, march_window());
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].duration_s == 60);
}

TEST_CASE("tower registry parses and validates strictly") {
    std::istringstream in("tower_id,lat,lon\nt1,5.32,-4.03\nt2,-89.5,179.25\n");
    auto towers = parse_towers(in);
    REQUIRE(towers.size() == 2);
    CHECK(towers[0].tower_id == "t1");
    CHECK(towers[0].lat == doctest::Approx(5.32));
    CHECK(towers[0].lon == doctest::Approx(-4.03));

    std::istringstream dup("tower_id,lat,lon\nt1,1,1\nt1,2,2\n");
    CHECK_THROWS_AS(parse_towers(dup), std::runtime_error);

    std::istringstream lat_range("tower_id,lat,lon\nt1,90.5,0\n");
    CHECK_THROWS_AS(parse_towers(lat_range), std::runtime_error);

    std::istringstream lon_range("tower_id,lat,lon\nt1,0,-180.01\n");
    CHECK_THROWS_AS(parse_towers(lon_range), std::runtime_error);

    std::istringstream malformed("tower_id,lat,lon\nt1,abc,0\n");
    CHECK_THROWS_AS(parse_towers(malformed), std::runtime_error);

    std::istringstream short_row("tower_id,lat,lon\nt1,0\n");
    CHECK_THROWS_AS(parse_towers(short_row), std::runtime_error);
}

TEST_CASE("write then parse returns the same records") {
    const auto dir = testutil::make_temp_dir("ingest-roundtrip");
    const auto window = march_window();

    std::vector<CdrRecord> cdr;
    rng::Engine eng(7);
    for (int i = 0; i < 500; ++i) {
        CdrRecord r;
        r.timestamp = window.start() +
                      static_cast<std::int64_t>(rng::bounded(
                          eng, static_cast<std::uint64_t>(window.end() - window.start())));
        r.caller_id = "u" + std::to_string(rng::bounded(eng, 50));
        r.callee_id = "u" + std::to_string(51 + rng::bounded(eng, 50));
        r.tower_id = "t" + std::to_string(rng::bounded(eng, 9));
        r.kind = rng::bounded(eng, 2) == 0 ? CommKind::Call : CommKind::Sms;
        r.duration_s = r.kind == CommKind::Call ? static_cast<std::int64_t>(rng::bounded(eng, 3600)) : 0;
        cdr.push_back(std::move(r));
    }
    write_cdr_csv(dir / "cdr.csv", cdr);
    auto parsed = parse_cdr(dir / "cdr.csv", window);
    CHECK(parsed.report.rejected == 0);
    CHECK(parsed.records == cdr);

    std::vector<TopUpRecord> topups;
    for (int i = 0; i < 300; ++i) {
        TopUpRecord t;
        t.timestamp = window.start() + static_cast<std::int64_t>(rng::bounded(eng, 86400 * 80));
        t.user_id = "u" + std::to_string(rng::bounded(eng, 50));
        t.amount_minor = 1 + static_cast<std::int64_t>(rng::bounded(eng, 100000));
        topups.push_back(std::move(t));
    }
    write_topup_csv(dir / "topup.csv", topups);
    auto tparsed = parse_topups(dir / "topup.csv", window);
    CHECK(tparsed.report.rejected == 0);
    CHECK(tparsed.records == topups);

    std::vector<TowerInfo> towers{{"t1", 5.25, -4.125}, {"t2", -33.5, 151.25}};
    write_towers_csv(dir / "towers.csv", towers);
    CHECK(parse_towers(dir / "towers.csv") == towers);

    std::filesystem::remove_all(dir);
}

TEST_CASE("parsing is deterministic") {
    const auto text = cdr_text({
        "2012-03-01T10:00:00Z,u1,u2,t5,CALL,60",
        "bad row",
        "2012-03-02T10:00:00Z,u2,u1,t5,SMS,0",
    });
    std::istringstream a(text), b(text);
    auto ra = parse_cdr(a, march_window());
    auto rb = parse_cdr(b, march_window());
    CHECK(ra.records == rb.records);
    CHECK(ra.report.by_reason == rb.report.by_reason);
    CHECK(ra.report.total_rows == rb.report.total_rows);
}

TEST_CASE("million-row file parses completely" * doctest::timeout(60)) {
    const auto window = march_window();
    std::string text(kCdrHeader);
    text += '\n';
    text.reserve(48u * 1000001u);
    for (int i = 0; i < 1000000; ++i) {
        text += "2012-03-01T10:00:00Z,a";
        text += std::to_string(i & 1023);
        text += ",b,t1,CALL,60\n";
    }
    std::istringstream in(std::move(text));
    auto result = parse_cdr(in, window);
    CHECK(result.records.size() == 1000000);
    CHECK(result.report.total_rows == 1000000);
    CHECK(result.report.rejected == 0);
}
