#include "support.hpp"

#include "qimpute/errors.hpp"
#include "qimpute/qrotate.hpp"
#include "qimpute/random.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qimpute;

namespace {

Matrix random_table(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.normal();
    return m;
}

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

TEST_CASE("power of two check") {
    CHECK(is_power_of_two(1));
    CHECK(is_power_of_two(8));
    CHECK_FALSE(is_power_of_two(0));
    CHECK_FALSE(is_power_of_two(6));
}

TEST_CASE("amplitude encoding") {
    const std::vector<double> row = {3, 4, 0, 0};
    const EncodedRow e = encode(row);
    CHECK(e.norm_factor == 5.0);
    CHECK(e.amplitudes == std::vector<double>{0.6, 0.8, 0.0, 0.0});

    const EncodedRow z = encode(std::vector<double>{0, 0});
    CHECK(z.degenerate());
    CHECK(z.amplitudes == std::vector<double>{0, 0});

    const std::vector<double> unit = {0.5, 0.5, 0.5, -0.5};
    const EncodedRow u = encode(unit);
    CHECK(u.norm_factor == 1.0);
    CHECK(u.amplitudes == unit);

    CHECK_THROWS_AS(encode(std::vector<double>{1, 2, 3}), DataError);
}

TEST_CASE("two qubits from |00> at a quarter turn") {
    const EncodedRow e = encode(std::vector<double>{1, 0, 0, 0});
    const EncodedRow r = rotate(e, std::numbers::pi / 2);
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(r.amplitudes[0] == doctest::Approx(h).epsilon(1e-14));
    CHECK(std::fabs(r.amplitudes[1]) < 1e-15);
    CHECK(std::fabs(r.amplitudes[2]) < 1e-15);
    CHECK(r.amplitudes[3] == doctest::Approx(-h).epsilon(1e-14));
    CHECK(r.norm_factor == 1.0);

    const auto sv = oracle::statevector_rotate({1, 0, 0, 0}, std::numbers::pi / 2);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(sv[i] - r.amplitudes[i]) < 1e-12);
}

TEST_CASE("theta = 0 is the identity") {
    const EncodedRow e = encode(std::vector<double>{0.1, -0.7, 0.3, 0.2, 0.0, 0.9, -0.4, 0.25});
    const EncodedRow r = rotate(e, 0.0);
    for (std::size_t i = 0; i < e.amplitudes.size(); ++i)
        CHECK(r.amplitudes[i] == doctest::Approx(e.amplitudes[i]).epsilon(1e-15));
}

TEST_CASE("a single qubit is unchanged after renormalization") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const double a = rng.normal(), b = rng.normal();
        const double theta = rng.uniform(0.0, 3.1);
        const EncodedRow e = encode(std::vector<double>{a, b});
        const EncodedRow r = rotate(e, theta);
        CHECK(r.amplitudes[0] == doctest::Approx(e.amplitudes[0]).epsilon(1e-14));
        CHECK(r.amplitudes[1] == doctest::Approx(e.amplitudes[1]).epsilon(1e-14));
    }
}

TEST_CASE("a single qubit at theta = pi loses all real mass") {
    const EncodedRow e = encode(std::vector<double>{0.6, 0.8});
    CHECK_THROWS_AS(rotate(e, std::numbers::pi), RotationError);
    Matrix z(2, 2);
    z(1, 0) = 0.6;
    z(1, 1) = 0.8;
    const std::vector<std::int64_t> ids = {40, 41};
    try {
        rotate_table(z, std::numbers::pi, 1, ids);
        FAIL("expected an error");
    } catch (const RotationError& err) {
        CHECK(std::string(err.what()).find("degenerate angle for row 41") != std::string::npos);
    }
}

TEST_CASE("angle range is enforced") {
    const EncodedRow e = encode(std::vector<double>{1, 0});
    CHECK_THROWS_AS(rotate(e, -0.01), ConfigError);
    CHECK_THROWS_AS(rotate(e, 3.2), ConfigError);
    CHECK_THROWS_AS(RotationMatrix(1.0, 17), ConfigError);
    CHECK_THROWS_AS(rotate(e, RotationMatrix(1.0, 2)), DataError);
}

TEST_CASE("closed-form real matrix matches the stored Kronecker fixtures") {
    const auto cases = testsupport::read_json(testsupport::fixture_path("rotation.json"));
    REQUIRE(cases.size() == 60);
    for (const auto& c : cases) {
        const double theta = c.at("theta").get<double>();
        const unsigned q = c.at("qubits").get<unsigned>();
        const auto expected = c.at("real_matrix").get<std::vector<std::vector<double>>>();
        const RotationMatrix rx(theta, q);
        REQUIRE(rx.dim() == expected.size());
        for (std::size_t i = 0; i < rx.dim(); ++i)
            for (std::size_t j = 0; j < rx.dim(); ++j) CHECK(std::fabs(rx.real()(i, j) - expected[i][j]) <= 1e-12);

        const auto input = c.at("input").get<std::vector<double>>();
        const auto output = c.at("output").get<std::vector<double>>();
        const EncodedRow r = rotate(encode(input), rx);
        for (std::size_t i = 0; i < output.size(); ++i) CHECK(std::fabs(r.amplitudes[i] - output[i]) <= 1e-12);
    }
}

TEST_CASE("closed-form real matrix matches a live complex Kronecker product") {
    for (int q = 1; q <= 4; ++q) {
        for (double theta : {0.0, 0.3, 1.0, 1.7, 2.9, std::numbers::pi}) {
            const auto full = oracle::rx_kron(theta, q);
            const RotationMatrix rx(theta, static_cast<unsigned>(q));
            for (std::size_t i = 0; i < rx.dim(); ++i)
                for (std::size_t j = 0; j < rx.dim(); ++j)
                    CHECK(std::fabs(rx.real()(i, j) - full[i][j].real()) <= 1e-12);
        }
    }
}

TEST_CASE("table rotation") {
    SUBCASE("theta = 0 is bit-identical") {
        const Matrix z = random_table(50, 8, 1);
        CHECK(rotate_table(z, 0.0) == z);
    }
    SUBCASE("zero table is unchanged") {
        const Matrix z(5, 4);
        CHECK(rotate_table(z, 1.3) == z);
    }
    SUBCASE("3x4 table against a dense matrix product") {
        const Matrix z = random_table(3, 4, 7);
        const Matrix out = rotate_table(z, 1.0);
        const auto full = oracle::rx_kron(1.0, 2);
        for (std::size_t r = 0; r < 3; ++r) {
            const double n = norm(z.row(r));
            std::vector<double> y(4, 0.0);
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) y[i] += full[i][j].real() * z(r, j) / n;
            const double ny = norm(y);
            for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(out(r, i) - y[i] / ny * n) <= 1e-12);
        }
    }
    SUBCASE("row norms survive") {
        const Matrix z = random_table(200, 8, 3);
        const Matrix out = rotate_table(z, 2.2);
        for (std::size_t r = 0; r < z.rows(); ++r)
            CHECK(norm(out.row(r)) == doctest::Approx(norm(z.row(r))).epsilon(1e-12));
    }
    SUBCASE("thread count does not change the result") {
        const Matrix z = random_table(777, 8, 5);
        const Matrix one = rotate_table(z, 0.9, 1);
        CHECK(rotate_table(z, 0.9, 3) == one);
        CHECK(rotate_table(z, 0.9, 8) == one);
    }
    SUBCASE("width must be a power of two") {
        CHECK_THROWS_AS(rotate_table(Matrix(2, 6), 1.0), DataError);
    }
}
