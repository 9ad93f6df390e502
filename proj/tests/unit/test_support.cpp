#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "isirate/error.hpp"
#include "isirate/parallel.hpp"
#include "isirate/rate_estimate.hpp"
#include "isirate/rng.hpp"
#include "isirate/units.hpp"

using namespace isirate;

TEST_SUITE("support") {

TEST_CASE("streams are reproducible and distinct")
{
    auto a = make_stream(7, 0), b = make_stream(7, 0), c = make_stream(7, 1), d = make_stream(8, 0);
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
    CHECK(va != d());
}

TEST_CASE("parallel_for covers every index and rethrows the lowest failure")
{
    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; }, 4);
    for (int h : hit)
        CHECK(h == 1);
    try {
        parallel_for(50, [](std::size_t i) {
            if (i == 7 || i == 31)
                throw std::runtime_error(std::to_string(i));
        }, 3);
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "7");
    }
}

TEST_CASE("thread count from the environment")
{
    setenv("ISIRATE_THREADS", "3", 1);
    CHECK(thread_count() == 3);
    unsetenv("ISIRATE_THREADS");
    CHECK(thread_count() >= 1);
}

TEST_CASE("running statistics merge")
{
    RunningStats all, left, right;
    for (int i = 0; i < 100; ++i) {
        const double v = std::sin(i * 0.37) * 3 + i * 0.01;
        all.push(v);
        (i < 40 ? left : right).push(v);
    }
    left.merge(right);
    CHECK(left.n == all.n);
    CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-14));
    CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("units and error codes")
{
    CHECK(nats_to_bits(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bits_to_nats(nats_to_bits(0.37)) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
    CHECK(is_numerical(ErrorCode::NotConverged));
    CHECK_FALSE(is_numerical(ErrorCode::InvalidParams));
    const Error e(ErrorCode::SnrTooLow, "x");
    CHECK(std::string(e.what()).find("SnrTooLow") != std::string::npos);
}

}
