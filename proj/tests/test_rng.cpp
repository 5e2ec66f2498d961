#include "doctest.h"

#include "qps/rng.hpp"

#include <cmath>
#include <set>

using qps::Rng;

TEST_SUITE("rng") {

TEST_CASE("same seed gives identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal(0.0, 1.0) == b.normal(0.0, 1.0));
}

TEST_CASE("substreams differ from each other and are reproducible") {
    Rng parent(7);
    Rng s0 = parent.substream(0);
    Rng s1 = parent.substream(1);
    CHECK(s0.next_u64() != s1.next_u64());

    Rng a = Rng(7).substream(0);
    Rng b = Rng(7).substream(0);
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("labeled streams are stable") {
    CHECK(qps::derive_seed(9, "alpha") == qps::derive_seed(9, "alpha"));
    CHECK(qps::derive_seed(9, "alpha") != qps::derive_seed(9, "beta"));
    CHECK(qps::derive_seed(9, "alpha") != qps::derive_seed(10, "alpha"));
}

TEST_CASE("uniform lies in [0,1) and uniform_int respects its bound") {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.uniform_int(6);
        CHECK(v < 6);
        seen.insert(v);
    }
    CHECK(seen.size() == 6);
}

TEST_CASE("normal deviates have the requested moments") {
    Rng rng(11);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(0.0, 2.0);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(std::sqrt(var) - 2.0) < 0.02);
}

} // TEST_SUITE
