#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "arspi/errors.hpp"
#include "arspi/ingest.hpp"
#include "arspi/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace arspi;

namespace {

std::string make_csv(int start_year, int start_month, const std::vector<double>& precip) {
    std::ostringstream out;
    out << std::setprecision(17) << "year,month,precip\n";
    int y = start_year, m = start_month;
    for (const double p : precip) {
        out << y << ',' << m << ',' << p << '\n';
        if (++m > 12) {
            m = 1;
            ++y;
        }
    }
    return out.str();
}

std::vector<double> ar1_sim(double coeff, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    double prev = 0.0;
    for (std::size_t burn = 0; burn < 1000; ++burn) prev = coeff * prev + rng.draw_normal();
    for (auto& v : x) {
        prev = coeff * prev + rng.draw_normal();
        v = prev;
    }
    return x;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("parse_precip_csv builds an anchored series") {
    const auto s = parse_precip_csv("year,month,precip\n1893,1,0.70\n1893,2,0.00\n");
    CHECK(s.size() == 2);
    CHECK(s.start_year == 1893);
    CHECK(s.start_month == 1);
    CHECK(s.values[0] == doctest::Approx(0.70));
    CHECK(s.values[1] == 0.0);
    CHECK(s.calendar_at(1) == std::pair<int, int>(1893, 2));
}

TEST_CASE("calendar arithmetic crosses year boundaries") {
    const auto s = parse_precip_csv(make_csv(1999, 11, {1, 2, 3, 4}));
    CHECK(s.calendar_at(0) == std::pair<int, int>(1999, 11));
    CHECK(s.calendar_at(1) == std::pair<int, int>(1999, 12));
    CHECK(s.calendar_at(2) == std::pair<int, int>(2000, 1));
    CHECK(s.calendar_at(3) == std::pair<int, int>(2000, 2));
}

TEST_CASE("negative precipitation is reported with its row number") {
    const std::string text = "year,month,precip\n1893,1,0.7\n1893,2,0.1\n1893,3,-1.0\n";
    try {
        parse_precip_csv(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::NegativeValue);
        CHECK(e.row == 4);
    }
}

TEST_CASE("calendar gaps and duplicates are reported at the offending row") {
    try {
        parse_precip_csv("year,month,precip\n1893,1,0.7\n1893,3,0.1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::CalendarGap);
        CHECK(e.row == 3);
    }
    try {
        parse_precip_csv("year,month,precip\n1893,1,0.7\n1893,1,0.1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::CalendarGap);
        CHECK(e.row == 3);
    }
}

TEST_CASE("malformed rows, bad headers, and empty input") {
    CHECK_THROWS_AS(parse_precip_csv(""), ParseError);
    CHECK_THROWS_AS(parse_precip_csv("year,month,precip\n"), ParseError);
    CHECK_THROWS_AS(parse_precip_csv("y,m,p\n1893,1,0.7\n"), ParseError);
    CHECK_THROWS_AS(parse_precip_csv("year,month,precip\n1893,1\n"), ParseError);
    CHECK_THROWS_AS(parse_precip_csv("year,month,precip\n1893,one,0.7\n"), ParseError);
    CHECK_THROWS_AS(parse_precip_csv("year,month,precip\n1893,13,0.7\n"), ParseError);
    CHECK_THROWS_AS(parse_precip_csv("year,month,precip\n1893,1,nan\n"), ParseError);
    try {
        parse_precip_csv("year,month,precip\n1893,1,0.7\n1893,2,0.1,9\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::MalformedRow);
        CHECK(e.row == 3);
    }
}

TEST_CASE("windows CRLF line endings and trailing blank lines are tolerated") {
    const auto s = parse_precip_csv("year,month,precip\r\n1893,1,0.7\r\n1893,2,0.1\r\n\n");
    CHECK(s.size() == 2);
}

TEST_CASE("moving_total hand examples") {
    const auto s = parse_precip_csv(make_csv(1900, 1, {1, 2, 3, 4}));
    const auto mtr = moving_total(s, 3);
    REQUIRE(mtr.size() == 2);
    CHECK(mtr.values[0] == doctest::Approx(6.0));
    CHECK(mtr.values[1] == doctest::Approx(9.0));
    CHECK(mtr.origin_index == 2);
    CHECK(mtr.calendar_at(0) == std::pair<int, int>(1900, 3));
    CHECK_FALSE(mtr.dry_mask[0]);
    CHECK(mtr.encoded_values[0] == doctest::Approx(6.0));

    const auto zeros = moving_total(parse_precip_csv(make_csv(1900, 1, {0, 0, 0})), 3);
    REQUIRE(zeros.size() == 1);
    CHECK(zeros.values[0] == 0.0);
    CHECK(zeros.dry_mask[0]);
    CHECK(zeros.encoded_values[0] == 1.0);

    const auto ident = moving_total(parse_precip_csv(make_csv(1900, 1, {0.5, 0, 2})), 1);
    REQUIRE(ident.size() == 3);
    CHECK(ident.values[1] == 0.0);
    CHECK(ident.dry_mask[1]);
    CHECK(ident.encoded_values[1] == 1.0);
    CHECK(ident.values[2] == doctest::Approx(2.0));
}

TEST_CASE("moving_total window validation") {
    const auto s = parse_precip_csv(make_csv(1900, 1, {1, 2, 3}));
    CHECK_THROWS_AS(moving_total(s, 0), DomainError);
    CHECK_THROWS_AS(moving_total(s, 4), WindowTooLong);
    CHECK(moving_total(s, 3).size() == 1);
}

TEST_CASE("moving_total matches brute force and counts dry runs, lengths up to 50") {
    Rng rng(2024);
    for (std::size_t n = 4; n <= 50; n += 3) {
        std::vector<double> raw(n);
        for (auto& v : raw) v = rng.draw_bernoulli(0.35) ? 0.0 : rng.draw_gamma(2.0, 1.0);
        const auto s = parse_precip_csv(make_csv(1900, 1, raw));
        for (std::size_t window : {std::size_t{1}, std::size_t{3}, n}) {
            const auto mtr = moving_total(s, static_cast<long>(window));
            REQUIRE(mtr.size() == n - window + 1);
            std::size_t dry_runs = 0;
            for (std::size_t i = 0; i + window <= n; ++i) {
                double total = 0.0;
                bool all_zero = true;
                for (std::size_t j = i; j < i + window; ++j) {
                    total += raw[j];
                    if (raw[j] != 0.0) all_zero = false;
                }
                CHECK(mtr.values[i] == doctest::Approx(total).epsilon(1e-12));
                CHECK(mtr.dry_mask[i] == all_zero);
                if (all_zero) ++dry_runs;
            }
            std::size_t dry_count = 0;
            for (const bool d : mtr.dry_mask)
                if (d) ++dry_count;
            CHECK(dry_count == dry_runs);
        }
    }
}

TEST_CASE("moving_total is linear in the precipitation scale") {
    Rng rng(5);
    std::vector<double> raw(60);
    for (auto& v : raw) v = rng.draw_bernoulli(0.3) ? 0.0 : rng.draw_gamma(1.5, 2.0);
    const double c = 3.7;
    std::vector<double> scaled(raw);
    for (auto& v : scaled) v *= c;
    const auto a = moving_total(parse_precip_csv(make_csv(1900, 1, raw)), 6);
    const auto b = moving_total(parse_precip_csv(make_csv(1900, 1, scaled)), 6);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.dry_mask[i] == b.dry_mask[i]);
        if (!a.dry_mask[i]) CHECK(b.values[i] == doctest::Approx(c * a.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("MtrSeries::from_encoded round-trips from_raw") {
    const std::vector<double> raw = {0.0, 2.5, 0.0, 1.0, 4.0};
    const auto a = MtrSeries::from_raw(1, 0, 1950, 6, raw);
    const auto b = MtrSeries::from_encoded(1, 0, 1950, 6, a.encoded_values, a.dry_mask);
    CHECK(a.values == b.values);
    CHECK(a.encoded_values == b.encoded_values);
    CHECK(a.dry_mask == b.dry_mask);
    CHECK(a.dry_fraction() == doctest::Approx(0.4));
    // Inconsistent encodings are rejected.
    CHECK_THROWS_AS(MtrSeries::from_encoded(1, 0, 1950, 6, {2.0}, {true}), DomainError);
    CHECK_THROWS_AS(MtrSeries::from_encoded(1, 0, 1950, 6, {0.0}, {false}), DomainError);
}

TEST_CASE("acf basics: lag 0, bounds, band, degenerate input") {
    const std::vector<double> constant(20, 3.0);
    CHECK_THROWS_AS(acf(constant, 5), DegenerateSeries);
    CHECK_THROWS_AS(acf(std::vector<double>{1.0}, 0), DegenerateSeries);

    const auto x = ar1_sim(0.5, 500, 11);
    const auto r = acf(x, 20);
    REQUIRE(r.coefficients.size() == 21);
    CHECK(r.coefficients[0] == 1.0);
    CHECK(r.confidence_band == doctest::Approx(1.96 / std::sqrt(500.0)));
    for (const double c : r.coefficients) CHECK(std::abs(c) <= 1.0 + 1e-12);
    CHECK_THROWS_AS(acf(x, 500), DomainError);
}

TEST_CASE("acf of an AR(1) simulation recovers the lag-1 coefficient") {
    const auto x = ar1_sim(0.9, 10000, 42);
    const auto r = acf(x, 10);
    CHECK(std::abs(r.coefficients[1] - 0.9) <= 0.03);
    // Geometric decay pattern: lag 2 near 0.81.
    CHECK(std::abs(r.coefficients[2] - 0.81) <= 0.05);
}

TEST_CASE("pacf of an AR(1) cuts off after lag 1") {
    const auto x = ar1_sim(0.9, 10000, 43);
    const auto p = pacf(x, 20);
    const auto r = acf(x, 20);
    CHECK(std::abs(p.coefficients[1] - 0.9) <= 0.03);
    CHECK(p.coefficients[1] == doctest::Approx(r.coefficients[1]).epsilon(1e-12));
    int within = 0;
    for (std::size_t lag = 2; lag <= 20; ++lag)
        if (std::abs(p.coefficients[lag]) <= p.confidence_band) ++within;
    CHECK(within >= 16);  // >= 80% of lags 2..20
}

TEST_CASE("pacf of white noise stays inside the band") {
    Rng rng(4242);
    std::vector<double> x(10000);
    for (auto& v : x) v = rng.draw_normal();
    const auto p = pacf(x, 20);
    int within = 0;
    for (std::size_t lag = 1; lag <= 20; ++lag)
        if (std::abs(p.coefficients[lag]) <= p.confidence_band) ++within;
    CHECK(within >= 18);  // >= 90% of lags
}

TEST_CASE("acf and pacf are invariant under time reversal") {
    const auto x = ar1_sim(0.7, 800, 9);
    std::vector<double> rev(x.rbegin(), x.rend());
    const auto a1 = acf(x, 15), a2 = acf(rev, 15);
    const auto p1 = pacf(x, 15), p2 = pacf(rev, 15);
    for (std::size_t lag = 0; lag <= 15; ++lag) {
        CHECK(a1.coefficients[lag] == doctest::Approx(a2.coefficients[lag]).epsilon(1e-12));
        CHECK(p1.coefficients[lag] == doctest::Approx(p2.coefficients[lag]).epsilon(1e-12));
    }
}

}  // TEST_SUITE
