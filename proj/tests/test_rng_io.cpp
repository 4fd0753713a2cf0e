#include <doctest.h>

#include <cstdlib>
#include <numeric>
#include <sstream>
#include <vector>

#include "nystromkit/matrix_io.hpp"
#include "nystromkit/parallel.hpp"
#include "nystromkit/rng.hpp"

using namespace nystromkit;

TEST_CASE("gaussian generator is deterministic per (seed, index)") {
    const Matrix A = standard_gaussian(5, 4, 42);
    const Matrix B = standard_gaussian(5, 4, 42);
    CHECK(A == B);
    const Matrix C = standard_gaussian(5, 4, 43);
    CHECK(A != C);
}

TEST_CASE("gaussian entries have roughly standard moments") {
    const Matrix X = standard_gaussian(100, 100, 7);
    const double mean = X.mean();
    const double var = (X.array() - mean).square().mean();
    CHECK(std::abs(mean) < 0.05);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("different seeds decorrelate entries") {
    const Matrix A = standard_gaussian(100, 100, 1);
    const Matrix B = standard_gaussian(100, 100, 2);
    const double corr = (A.array() * B.array()).mean();
    CHECK(std::abs(corr) <= 0.05);
}

TEST_CASE("substreams do not collide") {
    CHECK(rng::substream(0, 0) != rng::substream(0, 1));
    CHECK(rng::substream(0, 0) != rng::substream(1, 0));
}

TEST_CASE("matrix text round trip keeps 17 significant digits") {
    const Matrix M = standard_gaussian(4, 3, 99);
    std::stringstream ss;
    write_matrix(ss, M);
    const Matrix R = read_matrix(ss);
    CHECK(R.rows() == 4);
    CHECK(R.cols() == 3);
    CHECK((R - M).norm() == 0.0);  // 17 digits round-trips doubles exactly
}

TEST_CASE("matrix reader reports the offending line") {
    std::stringstream ss("2 2\n1 2\n3 oops\n");
    try {
        read_matrix(ss);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("matrix reader rejects malformed headers") {
    std::stringstream a("not a header\n");
    CHECK_THROWS_AS(read_matrix(a), ParseError);
    std::stringstream b("2 2\n1 2\n");
    CHECK_THROWS_AS(read_matrix(b), ParseError);  // missing row
}

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 1000);
    CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
}

TEST_CASE("worker count respects the environment cap") {
    // NYSTROMKIT_THREADS is read per call, so the cap applies immediately.
    setenv("NYSTROMKIT_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    unsetenv("NYSTROMKIT_THREADS");
    CHECK(worker_count() >= 1);
}
