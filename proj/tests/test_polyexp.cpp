#include <doctest.h>

#include <cmath>
#include <functional>

#include "aquaflow/polyexp.hpp"

using namespace aquaflow;

namespace {

ScalarField make_field(int w, int h, const std::function<double(double, double)>& f) {
    ScalarField out(w, h, FieldKind::luma);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = f(x, y);
    return out;
}

ScalarField random_field(int w, int h, std::uint64_t seed) {
    ScalarField out(w, h, FieldKind::luma);
    std::uint64_t s = seed;
    for (double& v : out.data) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        v = static_cast<double>((s >> 33) & 0xff);
    }
    return out;
}

} // namespace

TEST_CASE("expansion of a constant field") {
    const ExpansionParams p;
    const auto field = make_field(24, 20, [](double, double) { return 7.0; });
    const PolyCoeffField c = polynomial_expansion(field, p);
    for (int y = p.window_radius; y < 20 - p.window_radius; ++y)
        for (int x = p.window_radius; x < 24 - p.window_radius; ++x) {
            const std::size_t i = c.index(x, y);
            CHECK(c.c[i] == doctest::Approx(7.0).epsilon(1e-12));
            CHECK(std::abs(c.b1[i]) < 1e-10);
            CHECK(std::abs(c.b2[i]) < 1e-10);
            CHECK(std::abs(c.a11[i]) < 1e-10);
            CHECK(std::abs(c.a12[i]) < 1e-10);
            CHECK(std::abs(c.a22[i]) < 1e-10);
        }
}

TEST_CASE("expansion of a ramp recovers the local linear model") {
    const ExpansionParams p;
    const auto field = make_field(24, 20, [](double x, double) { return x; });
    const PolyCoeffField c = polynomial_expansion(field, p);
    for (int y = p.window_radius; y < 20 - p.window_radius; ++y)
        for (int x = p.window_radius; x < 24 - p.window_radius; ++x) {
            const std::size_t i = c.index(x, y);
            CHECK(c.c[i] == doctest::Approx(x).epsilon(1e-10));
            CHECK(c.b1[i] == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(std::abs(c.b2[i]) < 1e-10);
            CHECK(std::abs(c.a11[i]) < 1e-10);
        }
}

TEST_CASE("expansion of x^2 recovers the local quadratic model") {
    const ExpansionParams p;
    const auto field = make_field(26, 22, [](double x, double) { return x * x; });
    const PolyCoeffField c = polynomial_expansion(field, p);
    for (int y = p.window_radius; y < 22 - p.window_radius; ++y)
        for (int x = p.window_radius; x < 26 - p.window_radius; ++x) {
            const std::size_t i = c.index(x, y);
            CHECK(c.a11[i] == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(std::abs(c.a12[i]) < 1e-9);
            CHECK(std::abs(c.a22[i]) < 1e-9);
            CHECK(c.b1[i] == doctest::Approx(2.0 * x).epsilon(1e-9));
            CHECK(std::abs(c.b2[i]) < 1e-8);
            CHECK(c.c[i] == doctest::Approx(x * x).epsilon(1e-9));
        }
}

TEST_CASE("exactness on a mixed quadratic, including border pixels") {
    // f = 2x^2 + 3xy - y + 5; local model at (px,py):
    //   A = [[2, 1.5], [1.5, 0]], b = (4px + 3py, 3px - 1), c = f(px,py)
    auto f = [](double x, double y) { return 2 * x * x + 3 * x * y - y + 5; };
    const auto field = make_field(20, 18, f);
    for (const double sigma : {0.8, 1.5, 3.0}) {
        for (const int radius : {2, 5}) {
            ExpansionParams p;
            p.window_radius = radius;
            p.applicability_sigma = sigma;
            const PolyCoeffField c = polynomial_expansion(field, p);
            for (int y = 0; y < 18; ++y)
                for (int x = 0; x < 20; ++x) {
                    const std::size_t i = c.index(x, y);
                    CHECK(c.a11[i] == doctest::Approx(2.0).epsilon(1e-6));
                    CHECK(c.a12[i] == doctest::Approx(1.5).epsilon(1e-6));
                    CHECK(std::abs(c.a22[i]) < 1e-6);
                    CHECK(c.b1[i] == doctest::Approx(4.0 * x + 3.0 * y).epsilon(1e-6));
                    CHECK(c.b2[i] == doctest::Approx(3.0 * x - 1.0).epsilon(1e-6));
                    CHECK(c.c[i] == doctest::Approx(f(x, y)).epsilon(1e-6));
                }
        }
    }
}

TEST_CASE("oracle agrees with the mixed quadratic analytically") {
    auto f = [](double x, double y) { return 2 * x * x + 3 * x * y - y + 5; };
    const auto field = make_field(20, 18, f);
    const ExpansionParams p;
    const PolyCoeffs c = dense_lsq_oracle(field, p, 9, 8);
    CHECK(!c.degenerate);
    CHECK(c.a11 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(c.a12 == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(std::abs(c.a22) < 1e-9);
    CHECK(c.b1 == doctest::Approx(4.0 * 9 + 3.0 * 8).epsilon(1e-9));
    CHECK(c.b2 == doctest::Approx(3.0 * 9 - 1.0).epsilon(1e-9));
    CHECK(c.c == doctest::Approx(f(9, 8)).epsilon(1e-9));
}

TEST_CASE("separable expansion matches the dense oracle on random fields") {
    const ExpansionParams p;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const ScalarField field = random_field(16, 16, seed);
        const PolyCoeffField c = polynomial_expansion(field, p);
        for (int y = p.window_radius; y < 16 - p.window_radius; ++y)
            for (int x = p.window_radius; x < 16 - p.window_radius; ++x) {
                const PolyCoeffs o = dense_lsq_oracle(field, p, x, y);
                const std::size_t i = c.index(x, y);
                CHECK(std::abs(c.a11[i] - o.a11) < 1e-8);
                CHECK(std::abs(c.a12[i] - o.a12) < 1e-8);
                CHECK(std::abs(c.a22[i] - o.a22) < 1e-8);
                CHECK(std::abs(c.b1[i] - o.b1) < 1e-8);
                CHECK(std::abs(c.b2[i] - o.b2) < 1e-8);
                CHECK(std::abs(c.c[i] - o.c) < 1e-8);
            }
    }
}

TEST_CASE("expansion is linear in the input field") {
    const ExpansionParams p;
    const ScalarField f = random_field(18, 16, 11);
    const ScalarField g = random_field(18, 16, 22);
    ScalarField combo(18, 16, FieldKind::luma);
    const double alpha = 0.75, beta = -1.25;
    for (std::size_t i = 0; i < combo.data.size(); ++i)
        combo.data[i] = alpha * f.data[i] + beta * g.data[i];
    const PolyCoeffField cf = polynomial_expansion(f, p);
    const PolyCoeffField cg = polynomial_expansion(g, p);
    const PolyCoeffField cc = polynomial_expansion(combo, p);
    for (std::size_t i = 0; i < cf.a11.size(); ++i) {
        CHECK(cc.a11[i] == doctest::Approx(alpha * cf.a11[i] + beta * cg.a11[i]).epsilon(1e-9));
        CHECK(cc.b1[i] == doctest::Approx(alpha * cf.b1[i] + beta * cg.b1[i]).epsilon(1e-9));
        CHECK(cc.c[i] == doctest::Approx(alpha * cf.c[i] + beta * cg.c[i]).epsilon(1e-9));
    }
}

TEST_CASE("horizontal mirroring flips b1 and preserves the diagonal of A") {
    const ExpansionParams p;
    const int w = 17, h = 13;
    const ScalarField f = random_field(w, h, 5);
    ScalarField m(w, h, FieldKind::luma);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.at(x, y) = f.at(w - 1 - x, y);
    const PolyCoeffField cf = polynomial_expansion(f, p);
    const PolyCoeffField cm = polynomial_expansion(m, p);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t a = cf.index(w - 1 - x, y);
            const std::size_t b = cm.index(x, y);
            CHECK(cm.b1[b] == doctest::Approx(-cf.b1[a]).epsilon(1e-9));
            CHECK(cm.b2[b] == doctest::Approx(cf.b2[a]).epsilon(1e-9));
            CHECK(cm.a11[b] == doctest::Approx(cf.a11[a]).epsilon(1e-9));
            CHECK(cm.a22[b] == doctest::Approx(cf.a22[a]).epsilon(1e-9));
            CHECK(cm.a12[b] == doctest::Approx(-cf.a12[a]).epsilon(1e-9));
            CHECK(cm.c[b] == doctest::Approx(cf.c[a]).epsilon(1e-9));
        }
}

TEST_CASE("border pixels are flagged low certainty, interior not") {
    const ExpansionParams p;
    const ScalarField f = random_field(20, 16, 3);
    const PolyCoeffField c = polynomial_expansion(f, p);
    const int r = p.window_radius;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 20; ++x) {
            const bool border = x < r || y < r || x >= 20 - r || y >= 16 - r;
            CHECK(static_cast<bool>(c.low_certainty[c.index(x, y)]) == border);
        }
}

TEST_CASE("certainty modes agree in the deep interior") {
    ExpansionParams pb;
    ExpansionParams pu;
    pu.certainty = ExpansionParams::Certainty::uniform;
    const ScalarField f = random_field(24, 24, 77);
    const PolyCoeffField cb = polynomial_expansion(f, pb);
    const PolyCoeffField cu = polynomial_expansion(f, pu);
    const int r = pb.window_radius;
    for (int y = r; y < 24 - r; ++y)
        for (int x = r; x < 24 - r; ++x) {
            const std::size_t i = cb.index(x, y);
            CHECK(cb.a11[i] == doctest::Approx(cu.a11[i]).epsilon(1e-12));
            CHECK(cb.b1[i] == doctest::Approx(cu.b1[i]).epsilon(1e-12));
            CHECK(cb.c[i] == doctest::Approx(cu.c[i]).epsilon(1e-12));
        }
}

TEST_CASE("window that does not fit raises FrameTooSmall") {
    const ScalarField f = random_field(10, 10, 1);
    ExpansionParams p;
    p.window_radius = 5; // needs > 10
    CHECK_THROWS_AS(polynomial_expansion(f, p), FrameTooSmall);
}

TEST_CASE("oracle rejects pixels too close to the border") {
    const ScalarField f = random_field(16, 16, 1);
    const ExpansionParams p;
    CHECK_THROWS_AS(dense_lsq_oracle(f, p, 2, 8), Error);
}

TEST_CASE("all coefficients stay finite on harsh inputs") {
    ExpansionParams p;
    p.window_radius = 3;
    auto spike = make_field(16, 16, [](double x, double y) {
        return (x == 8 && y == 8) ? 1e6 : 0.0;
    });
    const PolyCoeffField c = polynomial_expansion(spike, p);
    for (std::size_t i = 0; i < c.a11.size(); ++i) {
        CHECK(std::isfinite(c.a11[i]));
        CHECK(std::isfinite(c.a12[i]));
        CHECK(std::isfinite(c.a22[i]));
        CHECK(std::isfinite(c.b1[i]));
        CHECK(std::isfinite(c.b2[i]));
        CHECK(std::isfinite(c.c[i]));
    }
}
