#include <doctest.h>

#include <cmath>
#include <random>

#include "isirate/bounds.hpp"
#include "isirate/error.hpp"
#include "isirate/rate_sim.hpp"
#include "oracles.hpp"

using namespace isirate;

TEST_SUITE("rate_sim") {

TEST_CASE("trellis structure")
{
    const ChannelResponse h({0.5, 0.7, 0.3, 0.2});
    const auto x = make_trinary(0.2);
    const Trellis t(h, x);
    CHECK(t.states() == 27);
    CHECK(t.inputs() == 3);
    double total = 0.0;
    for (double p : t.initial())
        total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    // state s holds x_{k-1} in the lowest digit
    for (std::size_t s = 0; s < t.states(); ++s)
        for (std::size_t j = 0; j < 3; ++j) {
            const std::size_t d1 = s % 3, d2 = (s / 3) % 3, d3 = s / 9;
            const double want = 0.5 * x.atoms()[j] + 0.7 * x.atoms()[d1] + 0.3 * x.atoms()[d2] + 0.2 * x.atoms()[d3];
            CHECK(t.output(s, j) == doctest::Approx(want).epsilon(1e-14));
            CHECK(t.next_state(s, j) == j + 3 * d1 + 9 * d2);
        }
    const Trellis flat(ChannelResponse({1.0}), x);
    CHECK(flat.states() == 1);
    CHECK(flat.next_state(0, 2) == 0);
}

TEST_CASE("forward recursion matches brute-force likelihood")
{
    std::mt19937_64 gen(5);
    std::normal_distribution<double> g;
    const std::vector<double> h{0.6, -0.5, 0.4};
    for (const auto& x : {make_bpsk(), make_skewed_binary(0.3), make_trinary(0.25)}) {
        std::vector<double> y(x.size() == 3 ? 7 : 10);
        for (auto& v : y)
            v = 0.8 * g(gen);
        const Trellis t(ChannelResponse(h), x);
        const double got = sequence_log_likelihood(t, y, 0.4);
        const double want = oracle::sequence_log_likelihood(h, x.atoms(), x.probs(), y, 0.4);
        CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
    CHECK_THROWS_AS(sequence_log_likelihood(Trellis(ChannelResponse(h), make_bpsk()), std::vector<double>{0.1}, 0.0), Error);
}

TEST_CASE("renormalisation interval does not change the likelihood")
{
    std::mt19937_64 gen(6);
    std::normal_distribution<double> g;
    std::vector<double> y(5000);
    for (auto& v : y)
        v = g(gen);
    const Trellis t(ChannelResponse({0.408, 0.817, 0.408}), make_bpsk());
    ForwardOptions every, sparse;
    sparse.renorm_interval = 64;
    const double a = sequence_log_likelihood(t, y, 0.5, every);
    const double b = sequence_log_likelihood(t, y, 0.5, sparse);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
}

TEST_CASE("flat BPSK reproduces the scalar mutual information")
{
    const ChannelResponse flat({1.0});
    for (double rho : {0.5, 1.0, 2.0}) {
        for (bool control : {true, false}) {
            SimOptions opt;
            opt.entropy_control = control;
            const auto r = estimate_rate(flat, make_bpsk(), rho, 200000, 8, 11, opt);
            CHECK(r.std_error > 0.0);
            CHECK(std::abs(r.value - mutual_info(make_bpsk(), rho)) <= 3 * r.std_error);
        }
    }
}

TEST_CASE("results do not depend on the thread count")
{
    const ChannelResponse b({0.408, 0.817, 0.408});
    SimOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const auto a = estimate_rate(b, make_trinary(0.1), 1.0, 20000, 5, 3, one);
    const auto c = estimate_rate(b, make_trinary(0.1), 1.0, 20000, 5, 3, many);
    CHECK(a.value == c.value);
    CHECK(a.per_seed == c.per_seed);
    CHECK(a.seeds == std::vector<std::uint64_t>{3, 4, 5, 6, 7});
}

TEST_CASE("seed ranges split consistently")
{
    const ChannelResponse b({0.408, 0.817, 0.408});
    const auto all = estimate_rate(b, make_bpsk(), 2.0, 10000, 4, 20);
    const auto lo = estimate_rate(b, make_bpsk(), 2.0, 10000, 2, 20);
    const auto hi = estimate_rate(b, make_bpsk(), 2.0, 10000, 2, 22);
    CHECK(all.per_seed[0] == lo.per_seed[0]);
    CHECK(all.per_seed[1] == lo.per_seed[1]);
    CHECK(all.per_seed[2] == hi.per_seed[0]);
    CHECK(all.per_seed[3] == hi.per_seed[1]);
}

TEST_CASE("estimates respect proven bounds")
{
    const ChannelResponse b({0.408, 0.817, 0.408});
    for (double rho : {0.2, 10.0}) {
        const auto x = make_bpsk();
        const auto r = estimate_rate(b, x, rho, 100000, 6, 1);
        const auto sp = spectral_summary(b, rho);
        const double tol = 3 * r.std_error;
        CHECK(r.value <= x.entropy() + tol);
        CHECK(r.value <= sp.gaussian_rate + tol);
        CHECK(r.value >= i_sow(b, x, rho) - tol);
        BoundOptions bo;
        bo.compute_mmse = false;
        const auto rep = evaluate_bounds(b, x, rho, bo);
        CHECK(r.value >= rep.ie_opt.value - tol);
    }
}

TEST_CASE("parameter errors")
{
    const ChannelResponse b({0.408, 0.817, 0.408});
    auto code = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::DomainError;
    };
    CHECK(code([&] { estimate_rate(b, make_bpsk(), 0.0, 10000, 1, 1); }) == ErrorCode::InvalidParams);
    CHECK(code([&] { estimate_rate(b, make_bpsk(), 1.0, 100, 1, 1); }) == ErrorCode::InvalidParams);
    CHECK(code([&] { estimate_rate(b, make_bpsk(), 1.0, 10000, 0, 1); }) == ErrorCode::InvalidParams);
    SimOptions tight;
    tight.state_budget = 8;
    CHECK(code([&] { estimate_rate(ChannelResponse({1, 0.5, 0.5, 0.5, 0.2}), make_bpsk(), 1.0, 10000, 1, 1, tight); }) ==
          ErrorCode::StateBudgetExceeded);
    CHECK(code([&] { Trellis(ChannelResponse(std::vector<double>(30, 0.1)), make_trinary(0.2)); }) ==
          ErrorCode::StateBudgetExceeded);
}

}
