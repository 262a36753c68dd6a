#include "doctest.h"

#include <cmath>

#include "cdrkit/purchases.hpp"
#include "testutil.hpp"

using namespace cdrkit;

namespace {

TopUpRecord topup(const std::string& user, std::int64_t amount, std::int64_t t = 1000) {
    return TopUpRecord{t, user, amount};
}

}  // namespace

TEST_CASE("population std and cv match hand-computed values") {
    const std::vector<double> v{100.0, 200.0, 300.0};
    CHECK(std::abs(population_std(v) - 81.6497) <= 1e-4);
    CHECK(std::abs(population_cv(v) - 0.40825) <= 1e-5);
    CHECK(population_std(v) == doctest::Approx(std::sqrt(20000.0 / 3.0)).epsilon(1e-14));
    CHECK(population_cv(v) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));

    CHECK(population_cv({500.0, 500.0, 500.0}) == 0.0);
    CHECK(population_std({7.0}) == 0.0);
    CHECK(population_cv({1.0, 3.0}) == 0.5);
}

TEST_CASE("cv is scale invariant") {
    rng::Engine eng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 2 + rng::bounded(eng, 40);
        std::vector<double> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back(1.0 + rng::uniform01(eng) * 999.0);
        const double base = population_cv(v);
        for (const double c : {0.5, 3.0, 1000.0}) {
            auto scaled = v;
            for (auto& x : scaled) x *= c;
            CHECK(population_cv(scaled) == doctest::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("gini matches hand-computed examples") {
    CHECK(gini({1.0, 3.0}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(gini({1.0, 2.0, 3.0}) == doctest::Approx(8.0 / 36.0).epsilon(1e-12));
    CHECK(gini({2.0, 2.0, 2.0}) == 0.0);
    CHECK(gini({5.0}) == 0.0);
}

TEST_CASE("gini rejects empty and non-positive input") {
    CHECK_THROWS_AS(gini({}), std::invalid_argument);
    CHECK_THROWS_AS(gini({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(gini({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("sorted-form gini equals the pairwise oracle") {
    rng::Engine eng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 1 + rng::bounded(eng, 100);
        std::vector<double> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back(0.01 + rng::uniform01(eng) * 100.0);
        const double expected = testutil::gini_oracle(v);
        const double got = gini(v);
        const double pairwise = gini_pairwise(v);
        const double sorted = gini_sorted(v);
        CHECK(std::abs(got - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
        CHECK(std::abs(sorted - pairwise) <= 1e-12 * std::max(1.0, std::abs(expected)));
        CHECK(got >= 0.0);
        CHECK(got < 1.0);
    }
}

TEST_CASE("gini is zero only for constant samples") {
    CHECK(gini({4.0, 4.0, 4.0, 4.0}) == 0.0);
    CHECK(gini({4.0, 4.0, 4.0, 4.0001}) > 0.0);
}

TEST_CASE("cfa is a right-continuous step curve") {
    CfaCurve curve({0.1, 0.5, 0.9});
    CHECK(curve.fraction_at(0.62) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(curve.fraction_at(0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));  // inclusive at 0.5
    CHECK(curve.fraction_at(0.4999) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(curve.fraction_at(0.05) == 0.0);
    CHECK(curve.fraction_at(0.9) == 1.0);
    CHECK(curve.fraction_at(100.0) == 1.0);

    CfaCurve zeros({0.0, 0.0});
    CHECK(zeros.fraction_at(0.0) == 1.0);

    CHECK_THROWS_AS(CfaCurve({}), std::invalid_argument);
}

TEST_CASE("cfa is monotone from 0 to 1") {
    rng::Engine eng(5);
    std::vector<double> cvs;
    for (int i = 0; i < 200; ++i) cvs.push_back(rng::uniform01(eng) * 2.0);
    CfaCurve curve(cvs);
    double prev = 0.0;
    for (double x = -0.1; x <= 2.2; x += 0.01) {
        const double f = curve.fraction_at(x);
        CHECK(f >= prev);
        prev = f;
    }
    CHECK(prev == 1.0);
}

TEST_CASE("global pooled cv") {
    CHECK(global_cv({topup("a", 100), topup("b", 300)}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(global_cv({topup("a", 100), topup("b", 100)}) == 0.0);
    CHECK_THROWS_AS(global_cv({topup("a", 100)}), std::invalid_argument);
    CHECK_THROWS_AS(global_cv({}), std::invalid_argument);
}

TEST_CASE("user stats group by user with exact integer accumulation") {
    std::vector<TopUpRecord> topups{
        topup("u2", 100), topup("u1", 500), topup("u2", 200),
        topup("u2", 300), topup("u1", 500),
    };
    auto stats = user_stats(topups);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].user_id == "u1");
    CHECK(stats[0].n_purchases == 2);
    CHECK(stats[0].mean_amount == 500.0);
    CHECK(stats[0].std_amount == 0.0);
    REQUIRE(stats[0].cv.has_value());
    CHECK(*stats[0].cv == 0.0);

    CHECK(stats[1].user_id == "u2");
    CHECK(stats[1].n_purchases == 3);
    CHECK(stats[1].mean_amount == doctest::Approx(200.0).epsilon(1e-15));
    REQUIRE(stats[1].cv.has_value());
    CHECK(*stats[1].cv == doctest::Approx(0.40824829046386302).epsilon(1e-12));
}

TEST_CASE("single-purchase users have no cv") {
    auto stats = user_stats({topup("solo", 700)});
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].n_purchases == 1);
    CHECK(stats[0].mean_amount == 700.0);
    CHECK_FALSE(stats[0].cv.has_value());
}

TEST_CASE("user stats reject non-positive amounts") {
    CHECK_THROWS_AS(user_stats({TopUpRecord{0, "u", 0}}), std::invalid_argument);
}

TEST_CASE("home tower assignment counts caller-side events only") {
    std::vector<CdrRecord> records;
    auto ev = [](std::int64_t t, std::string caller, std::string callee, std::string tower) {
        return CdrRecord{t, std::move(caller), std::move(callee), std::move(tower), CommKind::Call, 10};
    };
    records.push_back(ev(100, "a", "b", "t2"));
    records.push_back(ev(200, "a", "b", "t1"));
    records.push_back(ev(300, "a", "b", "t1"));
    records.push_back(ev(400, "b", "a", "t9"));  // does not count toward a

    auto homes = home_tower_assignment(records);
    CHECK(homes.at("a") == "t1");
    CHECK(homes.at("b") == "t9");
    CHECK(homes.size() == 2);
}

TEST_CASE("home tower ties resolve by earliest first appearance then id") {
    auto ev = [](std::int64_t t, const char* tower) {
        return CdrRecord{t, "a", "b", tower, CommKind::Call, 10};
    };
    // t3 and t1 both appear twice; t3 appears first in time.
    std::vector<CdrRecord> records{ev(100, "t3"), ev(200, "t1"), ev(300, "t3"), ev(400, "t1")};
    CHECK(home_tower_assignment(records).at("a") == "t3");

    // Same first-seen instant as well: lexicographically smaller id wins.
    std::vector<CdrRecord> tied{ev(100, "t3"), ev(100, "t1"), ev(300, "t3"), ev(100, "t1")};
    // t1: count 2, first seen 100; t3: count 2, first seen 100.
    CHECK(home_tower_assignment(tied).at("a") == "t1");
}

TEST_CASE("region indicators aggregate per-user means by home tower") {
    std::vector<UserPurchaseStats> stats;
    auto user = [&](const char* id, double mean) {
        UserPurchaseStats s;
        s.user_id = id;
        s.n_purchases = 3;
        s.mean_amount = mean;
        s.std_amount = 0.0;
        s.cv = 0.0;
        stats.push_back(s);
    };
    user("a", 100.0);
    user("b", 100.0);
    user("c", 1.0);
    user("d", 3.0);
    user("e", 50.0);  // no home tower: ignored
    std::map<std::string, std::string> homes{
        {"a", "t1"}, {"b", "t1"}, {"c", "t2"}, {"d", "t2"}, {"x", "t3"},
    };

    auto indicators = region_indicators(stats, homes, 2);
    REQUIRE(indicators.size() == 2);
    CHECK(indicators[0].tower_id == "t1");
    CHECK(indicators[0].n_users == 2);
    CHECK(indicators[0].mean_of_means == 100.0);
    CHECK(indicators[0].cv_of_means == 0.0);
    CHECK(indicators[0].gini_of_means == 0.0);

    CHECK(indicators[1].tower_id == "t2");
    CHECK(indicators[1].mean_of_means == 2.0);
    CHECK(indicators[1].cv_of_means == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(indicators[1].gini_of_means == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("towers below the user floor are suppressed") {
    std::vector<UserPurchaseStats> stats;
    std::map<std::string, std::string> homes;
    for (int i = 0; i < 25; ++i) {
        UserPurchaseStats s;
        s.user_id = "u" + std::to_string(i);
        s.n_purchases = 1;
        s.mean_amount = 100.0 + i;
        stats.push_back(s);
        homes[s.user_id] = i < 20 ? "big" : "small";
    }
    auto indicators = region_indicators(stats, homes, 20);
    REQUIRE(indicators.size() == 1);
    CHECK(indicators[0].tower_id == "big");
    CHECK(indicators[0].n_users == 20);
}

TEST_CASE("region indicators do not depend on input order") {
    rng::Engine eng(99);
    std::vector<UserPurchaseStats> stats;
    std::map<std::string, std::string> homes;
    for (int i = 0; i < 60; ++i) {
        UserPurchaseStats s;
        s.user_id = "u" + std::to_string(100 + i);
        s.n_purchases = 2;
        s.mean_amount = 1.0 + rng::uniform01(eng) * 500.0;
        stats.push_back(s);
        homes[s.user_id] = "t" + std::to_string(i % 3);
    }
    auto base = region_indicators(stats, homes, 5);
    auto shuffled = stats;
    rng::shuffle(eng, shuffled);
    auto permuted = region_indicators(shuffled, homes, 5);
    REQUIRE(base.size() == permuted.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(base[i].tower_id == permuted[i].tower_id);
        CHECK(base[i].n_users == permuted[i].n_users);
        CHECK(base[i].mean_of_means == doctest::Approx(permuted[i].mean_of_means).epsilon(1e-12));
        CHECK(base[i].cv_of_means == doctest::Approx(permuted[i].cv_of_means).epsilon(1e-12));
        CHECK(base[i].gini_of_means == doctest::Approx(permuted[i].gini_of_means).epsilon(1e-12));
    }
}
