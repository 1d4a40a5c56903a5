#include <doctest.h>

#include <cstring>

#include "mixlab/rng.hpp"
#include "mixlab/tensor.hpp"

using namespace mixlab;

TEST_SUITE_BEGIN("tensor");

TEST_CASE("lerp arithmetic on small fixtures") {
    const Tensor a({2}, {2.0, 4.0});
    const Tensor b({2}, {0.0, 0.0});
    const Tensor mid = tensor_lerp(a, b, 0.5);
    CHECK(mid.at(0) == 1.0);
    CHECK(mid.at(1) == 2.0);

    const Tensor c({1}, {4.0});
    const Tensor d({1}, {8.0});
    CHECK(tensor_lerp(c, d, 0.25).at(0) == 7.0);
}

TEST_CASE("lerp at lambda 1 returns the first input bit-exactly") {
    RngStream s(1, stream_key::kGeneric);
    Tensor a({4, 9});
    Tensor b({4, 9});
    for (double& v : a.values()) v = s.next_gaussian();
    for (double& v : b.values()) v = s.next_gaussian();
    const Tensor r = tensor_lerp(a, b, 1.0);
    CHECK(std::memcmp(r.data(), a.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("lerp is symmetric at dyadic lambdas on dyadic inputs") {
    Tensor a({8});
    Tensor b({8});
    for (size_t i = 0; i < 8; ++i) {
        a.at(i) = 0.25 * static_cast<double>(i) - 1.0;
        b.at(i) = 0.5 * static_cast<double>(i) + 2.0;
    }
    for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        CAPTURE(lam);
        const Tensor x = tensor_lerp(a, b, lam);
        const Tensor y = tensor_lerp(b, a, 1.0 - lam);
        CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("lerp rejects mismatched shapes") {
    CHECK_THROWS_AS(tensor_lerp(Tensor({2, 3}), Tensor({3, 2}), 0.5), ShapeError);
}

TEST_CASE("shape and data length must agree") {
    CHECK_THROWS_AS(Tensor({2, 3}, {1.0, 2.0}), ShapeError);
    CHECK_THROWS_AS(Tensor({0}), ShapeError);
}

TEST_CASE("softmax rows are distributions; zero logits give uniform") {
    const Tensor z({2, 4});
    const Tensor p = softmax_rows(z);
    for (size_t i = 0; i < 2; ++i) {
        double sum = 0.0;
        for (size_t j = 0; j < 4; ++j) {
            CHECK(p.row(i)[j] == doctest::Approx(0.25));
            sum += p.row(i)[j];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    RngStream s(2, stream_key::kGeneric);
    Tensor logits({16, 5});
    for (double& v : logits.values()) v = 10.0 * s.next_gaussian();
    const Tensor probs = softmax_rows(logits);
    for (size_t i = 0; i < 16; ++i) {
        double sum = 0.0;
        for (size_t j = 0; j < 5; ++j) {
            CHECK(probs.row(i)[j] >= 0.0);
            sum += probs.row(i)[j];
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("argmax ties break to the lowest index") {
    const Tensor t({2, 3}, {1.0, 5.0, 5.0, 7.0, 7.0, 2.0});
    const std::vector<size_t> idx = argmax_rows(t);
    CHECK(idx[0] == 1);
    CHECK(idx[1] == 0);
}

TEST_CASE("matmul against hand-computed 2x2") {
    const Tensor a({2, 2}, {1.0, 2.0, 3.0, 4.0});
    const Tensor b({2, 2}, {5.0, 6.0, 7.0, 8.0});
    const Tensor c = matmul(a, b);
    CHECK(c.at(0) == 19.0);
    CHECK(c.at(1) == 22.0);
    CHECK(c.at(2) == 43.0);
    CHECK(c.at(3) == 50.0);
    CHECK_THROWS_AS(matmul(a, Tensor({3, 2})), ShapeError);
}

TEST_CASE("transpose round trip") {
    RngStream s(3, stream_key::kGeneric);
    Tensor a({5, 7});
    for (double& v : a.values()) v = s.next_gaussian();
    const Tensor tt = transpose(transpose(a));
    CHECK(std::memcmp(tt.data(), a.data(), a.size() * sizeof(double)) == 0);
}

TEST_SUITE_END();
