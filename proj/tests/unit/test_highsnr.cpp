#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isirate/error.hpp"
#include "isirate/highsnr.hpp"
#include "oracles.hpp"

using namespace isirate;

namespace {

const ChannelResponse kChannelB = ChannelResponse({0.408, 0.817, 0.408}).normalized();

ChannelResponse two_tap(double q)
{
    return ChannelResponse({std::sqrt(1 - q * q), q});
}

ErrorCode code_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::DomainError;
}

} // namespace

TEST_SUITE("highsnr") {

TEST_CASE("error alphabets")
{
    CHECK(delta_min_sq(kChannelB, make_bpsk()).error_alphabet == std::vector<double>{-1, 0, 1});
    const auto t = delta_min_sq(kChannelB, make_trinary(0.2)).error_alphabet;
    REQUIRE(t.size() == 5);
    for (int k = 0; k < 5; ++k)
        CHECK(t[k] == doctest::Approx(k - 2.0).epsilon(1e-12));
}

TEST_CASE("memoryless channel")
{
    const ChannelResponse flat({1.0});
    const auto s = delta_min_sq(flat, make_bpsk());
    CHECK(s.delta_min_sq == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.certified_global);
    const auto g = exponent_gap(flat, make_bpsk());
    CHECK(g.g_zf_dfe == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(g.strict);
}

TEST_CASE("Channel B against exhaustive enumeration")
{
    const auto s = delta_min_sq(kChannelB, make_bpsk());
    CHECK(s.certified_global);
    CHECK(s.delta_min_sq == doctest::Approx(oracle::exhaustive_dmin(kChannelB.taps(), {-1, 0, 1}, 6)).epsilon(1e-12));
    CHECK(s.delta_min_sq == doctest::Approx(0.6672117727).epsilon(1e-9));
    // Ties resolve to the lexicographically smallest sequence.
    CHECK(s.witness == std::vector<double>{-1, 1});
    CHECK(event_distance(kChannelB, s.witness) == doctest::Approx(s.delta_min_sq).epsilon(1e-14));
    const auto g = exponent_gap(kChannelB, make_bpsk());
    CHECK(g.strict);
    CHECK(g.g_zf_dfe < g.delta_min_sq);
}

TEST_CASE("random channels against exhaustive enumeration")
{
    std::mt19937_64 gen(77);
    SearchOptions opt;
    opt.throw_if_inconclusive = false;
    int certified = 0;
    for (int t = 0; t < 20; ++t) {
        const auto h = oracle::random_taps(gen, 4, true);
        const ChannelResponse ch(h);
        const auto x = t % 2 ? make_bpsk() : make_trinary(0.2);
        const auto s = delta_min_sq(ch, x, opt);
        const std::size_t len = x.size() == 2 ? 6 : 5;
        const double brute = oracle::exhaustive_dmin(h, s.error_alphabet, len);
        CHECK(s.delta_min_sq <= brute + 1e-12);
        CHECK(s.delta_min_sq <= 1.0 + 1e-12);
        REQUIRE_FALSE(s.witness.empty());
        CHECK(s.witness.front() != 0.0);
        CHECK(s.witness.back() != 0.0);
        CHECK(event_distance(ch, s.witness) == doctest::Approx(s.delta_min_sq).epsilon(1e-12));
        if (s.witness.size() <= len)
            CHECK(s.delta_min_sq == doctest::Approx(brute).epsilon(1e-12));
        if (s.certified_global) {
            ++certified;
            CHECK(zf_dfe_gain(ch) <= s.delta_min_sq * (1 + 1e-9));
        }
    }
    CHECK(certified >= 15);
}

TEST_CASE("two-tap channel has a strict exponent gap")
{
    for (double q : {0.3, 0.5, 0.9}) {
        const auto g = exponent_gap(two_tap(q), make_bpsk());
        CHECK(g.strict);
        CHECK(g.delta_min_sq == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(g.g_zf_dfe == doctest::Approx(std::max(q * q, 1 - q * q)).epsilon(1e-9));
    }
}

TEST_CASE("search errors")
{
    CHECK(code_of([] { delta_min_sq(ChannelResponse({1.0, 1.0}), make_bpsk()); }) == ErrorCode::NormalizationViolated);
    SearchOptions shortlen;
    shortlen.max_len = 2;
    CHECK(code_of([&] { delta_min_sq(kChannelB, make_bpsk(), shortlen); }) == ErrorCode::InvalidParams);
    SearchOptions tiny;
    tiny.state_budget = 2;
    CHECK(code_of([&] { delta_min_sq(kChannelB, make_bpsk(), tiny); }) == ErrorCode::Inconclusive);
    tiny.throw_if_inconclusive = false;
    const auto s = delta_min_sq(kChannelB, make_bpsk(), tiny);
    CHECK_FALSE(s.certified_global);
    CHECK(code_of([&] { fano_forney_upper(s, make_bpsk(), 10.0, 1.0); }) == ErrorCode::Inconclusive);
}

TEST_CASE("Fano/Forney upper bound")
{
    const auto s = delta_min_sq(kChannelB, make_bpsk());
    const auto x = make_bpsk();
    // P is capped at 1/2: h2(1/2) + log|X| / 2.
    CHECK(fano_forney_upper(s, x, 0.0, 1.0).value == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
    const auto far = fano_forney_upper(s, x, 1e5, 1.0);
    CHECK(far.value == 0.0);
    CHECK(far.log_value < -1e4);
    CHECK(std::isfinite(far.log_value));
    // value at moderate SNR from the definition
    const double p = 2.0 * q_tail(std::sqrt(20.0 * s.delta_min_sq));
    const auto mid = fano_forney_upper(s, x, 20.0, 2.0);
    CHECK(mid.value == doctest::Approx(binary_entropy(p) + p * std::log(2.0)).epsilon(1e-10));
    const double slope = (fano_forney_upper(s, x, 200.0, 1.0).log_value - fano_forney_upper(s, x, 50.0, 1.0).log_value) / 150.0;
    CHECK(slope == doctest::Approx(-0.5 * s.delta_min_sq).epsilon(0.1));
    CHECK(code_of([&] { fano_forney_upper(s, x, 10.0, 0.0); }) == ErrorCode::InvalidParams);
}

TEST_CASE("I_SL gap lower bound")
{
    const ChannelResponse flat({1.0});
    const auto x = make_bpsk();
    for (double rho : {10.0, 100.0}) {
        const auto lb = sl_gap_lower(flat, x, rho);
        CHECK_FALSE(lb.null_branch);
        CHECK(lb.snr_upper == doctest::Approx(rho + 1.0).epsilon(1e-9));
        CHECK(lb.bound.log_value == doctest::Approx(std::log(1.0) + log_q_integral(rho + 1.0)).epsilon(1e-9));
        CHECK(lb.bound.value <= equivocation(x, rho));
    }
    const double ref = x.entropy() - oracle::mutual_info({-1.0, 1.0}, {0.5, 0.5}, 10.0);
    CHECK(sl_gap_lower(flat, x, 10.0).bound.value <= ref);

    const auto sk = make_skewed_binary(0.1);
    CHECK(sl_gap_lower(flat, sk, 50.0).bound.log_value ==
          doctest::Approx(std::log(0.2) + log_q_integral(0.25 * sk.normalized_d_min() * sk.normalized_d_min() * 51.0))
              .epsilon(1e-9));

    CHECK(code_of([&] { sl_gap_lower(flat, x, 4.0); }) == ErrorCode::SnrTooLow);
    CHECK_NOTHROW(sl_gap_lower(flat, x, 4.5));

    const auto sp = spectral_summary(kChannelB, 1.0);
    const double slope = (sl_gap_lower(kChannelB, x, 1e4).bound.log_value - sl_gap_lower(kChannelB, x, 1e3).bound.log_value) / 9e3;
    CHECK(slope == doctest::Approx(-0.5 * sp.g_zf_dfe).epsilon(0.1));
}

TEST_CASE("spectral null branch")
{
    const ChannelResponse null({std::sqrt(0.5), std::sqrt(0.5)});
    const auto lb = sl_gap_lower(null, make_bpsk(), 100.0);
    CHECK(lb.null_branch);
    const double ln2 = std::log(2.0), pi = std::numbers::pi;
    CHECK(lb.c1 == doctest::Approx(std::sqrt(ln2 * ln2 + pi * pi / 3.0)).epsilon(1e-8));
    CHECK(lb.omega_fraction == doctest::Approx((pi - std::acos(-0.9)) / pi).epsilon(1e-10));
    CHECK(lb.snr_upper == doctest::Approx(100.0 * 0.5 * 1.1 * std::exp(lb.c1 * std::sqrt(lb.omega_fraction))).epsilon(1e-8));
    CHECK(low_power_fraction(ChannelResponse({1.0}), 0.5) == 0.0);
    CHECK(low_power_fraction(ChannelResponse({1.0}), 2.0) == doctest::Approx(1.0));
}

TEST_CASE("crossover probe")
{
    std::vector<double> grid;
    for (int db = 10; db <= 60; ++db)
        grid.push_back(std::pow(10.0, db / 10.0));
    CHECK_FALSE(crossover_probe(ChannelResponse({1.0}), make_bpsk(), grid, 1.0).crossing_rho);
    const auto b = crossover_probe(kChannelB, make_bpsk(), grid, 1.0);
    REQUIRE(b.crossing_rho);
    CHECK(b.rows.size() == grid.size());
    for (const auto& r : b.rows)
        if (r.rho >= *b.crossing_rho * 2.0)
            CHECK(r.certified);
    const auto lo = crossover_probe(two_tap(0.5), make_bpsk(), grid, 1.0);
    const auto hi = crossover_probe(two_tap(0.9), make_bpsk(), grid, 1.0);
    REQUIRE(lo.crossing_rho);
    REQUIRE(hi.crossing_rho);
    CHECK(*hi.crossing_rho > *lo.crossing_rho);
    const auto first = crossover_probe(kChannelB, make_bpsk(), {2.0}, 1.0);
    CHECK_FALSE(first.rows[0].log_lower);
    CHECK_FALSE(first.rows[0].certified);
}

}
