#include <doctest.h>

#include <cmath>

#include "aquaflow/analytics.hpp"

using namespace aquaflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScalarField mag_field(int w, int h, std::initializer_list<double> vals) {
    ScalarField f(w, h, FieldKind::magnitude);
    std::size_t i = 0;
    for (double v : vals) f.data[i++] = v;
    return f;
}

ScalarField random_mag(int w, int h, std::uint64_t seed, double scale = 1.0) {
    ScalarField f(w, h, FieldKind::magnitude);
    std::uint64_t s = seed;
    for (double& v : f.data) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        v = scale * ((s >> 33) & 0xffff) / 65535.0;
    }
    return f;
}

ScalarField random_angle(int w, int h, std::uint64_t seed) {
    ScalarField f(w, h, FieldKind::angle);
    std::uint64_t s = seed;
    for (double& v : f.data) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        v = (((s >> 33) & 0xffff) / 65535.0) * 2.0 * kPi - kPi;
        if (v <= -kPi) v = kPi;
    }
    return f;
}

} // namespace

TEST_CASE("apply_tolerance gates exactly as specified") {
    const ScalarField m = mag_field(3, 1, {0.5, 0.1, 0.2});
    const ScalarField g = apply_tolerance(m, Tolerance{0.2});
    CHECK(g.data[0] == 0.5); // motion detected
    CHECK(g.data[1] == 0.0); // motion not detected
    CHECK(g.data[2] == 0.2); // boundary: >= passes
}

TEST_CASE("apply_tolerance with tol 0 is the identity") {
    const ScalarField m = random_mag(8, 8, 3);
    const ScalarField g = apply_tolerance(m, Tolerance{0.0});
    CHECK(g.data == m.data);
}

TEST_CASE("apply_tolerance is idempotent and needs a magnitude tag") {
    const ScalarField m = random_mag(8, 8, 5);
    const ScalarField once = apply_tolerance(m, Tolerance{0.4});
    const ScalarField twice = apply_tolerance(once, Tolerance{0.4});
    CHECK(once.data == twice.data);

    ScalarField wrong(4, 4, FieldKind::luma);
    CHECK_THROWS_AS(apply_tolerance(wrong, Tolerance{0.1}), Error);
}

TEST_CASE("dispersion: single center pixel lands in the center cell") {
    const int w = 60, h = 72;
    DispersionGrid grid(36, 30, w, h);
    ScalarField m(w, h, FieldKind::magnitude);
    m.at(w / 2, h / 2) = 2.0;
    grid.accumulate(m);
    // row = floor(36*36/72) = 18 = rows/2, col = floor(30*30/60) = 15 = cols/2
    CHECK(grid.sums().at(18, 15) == 2.0);
    CHECK(grid.total() == 2.0);
    CHECK(grid.frames_accumulated() == 1);
}

TEST_CASE("dispersion: all-zero field changes only the frame count") {
    DispersionGrid grid(36, 30, 64, 48);
    ScalarField zero(64, 48, FieldKind::magnitude);
    grid.accumulate(zero);
    CHECK(grid.total() == 0.0);
    CHECK(grid.frames_accumulated() == 1);
}

TEST_CASE("dispersion: accumulating twice doubles the sums") {
    DispersionGrid a(36, 30, 32, 32);
    DispersionGrid b(36, 30, 32, 32);
    const ScalarField m = random_mag(32, 32, 7);
    a.accumulate(m);
    b.accumulate(m);
    b.accumulate(m);
    for (std::size_t i = 0; i < a.sums().v.size(); ++i)
        CHECK(b.sums().v[i] == 2.0 * a.sums().v[i]);
}

TEST_CASE("dispersion conservation: cell sums equal the gated total") {
    DispersionGrid grid(36, 30, 41, 37);
    double direct = 0.0;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const ScalarField m = apply_tolerance(random_mag(41, 37, s), Tolerance{0.5});
        for (double v : m.data) direct += v;
        grid.accumulate(m);
    }
    CHECK(grid.total() == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("dispersion monotonicity: higher tolerance never raises any cell") {
    const ScalarField m = random_mag(50, 50, 11);
    DispersionGrid lo(36, 30, 50, 50), hi(36, 30, 50, 50);
    lo.accumulate(apply_tolerance(m, Tolerance{0.2}));
    hi.accumulate(apply_tolerance(m, Tolerance{0.6}));
    for (std::size_t i = 0; i < lo.sums().v.size(); ++i)
        CHECK(hi.sums().v[i] <= lo.sums().v[i]);
}

TEST_CASE("dispersion rejects mismatched frames and configs") {
    DispersionGrid grid(36, 30, 32, 32);
    ScalarField wrong(33, 32, FieldKind::magnitude);
    CHECK_THROWS_AS(grid.accumulate(wrong), DimensionMismatch);
    DispersionGrid other(36, 30, 64, 64);
    CHECK_THROWS_AS(grid.merge(other), ConfigMismatch);
}

TEST_CASE("motion histogram: symmetric angles share a bin") {
    MotionHistogram h(60, 64, 10.0);
    ScalarField m(2, 1, FieldKind::magnitude);
    m.data = {1.0, 1.0};
    ScalarField a(2, 1, FieldKind::angle);
    a.data = {kPi / 2, -kPi / 2};
    h.accumulate(m, a);
    double maxv = 0;
    for (double v : h.counts().v) maxv = std::max(maxv, v);
    CHECK(maxv == 2.0); // both fell into one bin
    CHECK(h.total() == 2.0);
}

TEST_CASE("motion histogram: fold sends +t and -t to the same bin for 1000 angles") {
    MotionHistogram h(60, 64, 10.0);
    std::uint64_t s = 123;
    for (int i = 0; i < 1000; ++i) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        const double theta = (((s >> 33) & 0xffffff) / double(0xffffff)) * kPi;
        MotionHistogram pos(60, 64, 10.0), neg(60, 64, 10.0);
        ScalarField m(1, 1, FieldKind::magnitude);
        m.data = {1.0};
        ScalarField ap(1, 1, FieldKind::angle), an(1, 1, FieldKind::angle);
        ap.data = {theta};
        an.data = {-theta};
        pos.accumulate(m, ap);
        neg.accumulate(m, an);
        CHECK(pos.counts().v == neg.counts().v);
    }
}

TEST_CASE("motion histogram: zero-motion pixels contribute nothing") {
    MotionHistogram h(60, 64, 10.0);
    ScalarField m(4, 4, FieldKind::magnitude); // all zero
    ScalarField a(4, 4, FieldKind::angle);
    h.accumulate(m, a);
    CHECK(h.total() == 0.0);
    CHECK(h.frames_accumulated() == 1);
}

TEST_CASE("motion histogram: mass equals the count of gated-positive pixels") {
    MotionHistogram h(60, 64, 10.0);
    std::int64_t expected = 0;
    for (std::uint64_t s = 1; s <= 4; ++s) {
        const ScalarField m = apply_tolerance(random_mag(30, 20, s, 12.0), Tolerance{2.0});
        const ScalarField a = random_angle(30, 20, s + 100);
        for (double v : m.data)
            if (v > 0) ++expected;
        h.accumulate(m, a); // overflow above mag_max clamps, never drops
    }
    CHECK(h.total() == static_cast<double>(expected));
}

TEST_CASE("motion histogram binning matches a brute-force oracle on a rotation field") {
    const int w = 40, h = 40;
    // rigid rotation flow about the center
    ScalarField m(w, h, FieldKind::magnitude), a(w, h, FieldKind::angle);
    const double omega = 0.12;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double rx = x - (w - 1) / 2.0, ry = y - (h - 1) / 2.0;
            const double dx = -omega * ry, dy = omega * rx;
            m.at(x, y) = std::sqrt(dx * dx + dy * dy);
            a.at(x, y) = m.at(x, y) == 0 ? 0.0 : std::atan2(dy, dx);
        }
    const ScalarField gated = apply_tolerance(m, Tolerance{0.3});
    MotionHistogram hist(24, 32, 5.0);
    hist.accumulate(gated, a);

    Matrix oracle(24, 32);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double g = gated.at(x, y);
            if (g <= 0) continue;
            int mi = static_cast<int>(std::floor(g / 5.0 * 24));
            mi = std::min(mi, 23);
            int ai = static_cast<int>(std::floor(std::abs(a.at(x, y)) / kPi * 32));
            ai = std::min(ai, 31);
            oracle.at(mi, ai) += 1.0;
        }
    CHECK(hist.counts().v == oracle.v);
    // rotation spreads direction across many bins
    int occupied = 0;
    for (double v : oracle.v)
        if (v > 0) ++occupied;
    CHECK(occupied > 20);
}

TEST_CASE("probabilities normalize to one or stay all zero") {
    DispersionGrid grid(1, 2, 16, 16);
    ScalarField m(16, 16, FieldKind::magnitude);
    m.at(2, 2) = 1.0;  // left half-cell
    m.at(14, 2) = 3.0; // right half-cell
    grid.accumulate(m);
    const Matrix p = grid.probabilities();
    CHECK(p.at(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p.at(0, 1) == doctest::Approx(0.75).epsilon(1e-12));

    DispersionGrid empty(36, 30, 16, 16);
    const Matrix z = empty.probabilities();
    for (double v : z.v) CHECK(v == 0.0);

    MotionHistogram h(60, 64, 10.0);
    ScalarField mm = random_mag(16, 16, 8);
    h.accumulate(mm, random_angle(16, 16, 9));
    double sum = 0;
    for (double v : h.probabilities().v) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("merge is a commutative monoid with the empty accumulator as identity") {
    const int w = 25, h = 19;
    auto make = [&](std::uint64_t seed, int frames) {
        DispersionGrid g(36, 30, w, h);
        for (int i = 0; i < frames; ++i)
            g.accumulate(apply_tolerance(random_mag(w, h, seed + i), Tolerance{0.3}));
        return g;
    };
    const DispersionGrid a = make(1, 3);
    const DispersionGrid b = make(50, 2);
    const DispersionGrid c = make(90, 4);
    const DispersionGrid empty(36, 30, w, h);

    const DispersionGrid ae = merge(a, empty);
    CHECK(ae.sums().v == a.sums().v);
    CHECK(ae.frames_accumulated() == a.frames_accumulated());

    const DispersionGrid ab = merge(a, b);
    const DispersionGrid ba = merge(b, a);
    CHECK(ab.sums().v == ba.sums().v);

    const DispersionGrid ab_c = merge(merge(a, b), c);
    const DispersionGrid a_bc = merge(a, merge(b, c));
    for (std::size_t i = 0; i < ab_c.sums().v.size(); ++i)
        CHECK(ab_c.sums().v[i] == doctest::Approx(a_bc.sums().v[i]).epsilon(1e-12));
}

TEST_CASE("sequential accumulation equals the merge of two halves") {
    const int w = 31, h = 23;
    DispersionGrid whole(36, 30, w, h);
    DispersionGrid first(36, 30, w, h), second(36, 30, w, h);
    MotionHistogram hwhole(60, 64, 10.0), hfirst(60, 64, 10.0), hsecond(60, 64, 10.0);
    for (int i = 0; i < 8; ++i) {
        const ScalarField m = apply_tolerance(random_mag(w, h, 200 + i), Tolerance{0.4});
        const ScalarField a = random_angle(w, h, 300 + i);
        whole.accumulate(m);
        hwhole.accumulate(m, a);
        if (i < 4) {
            first.accumulate(m);
            hfirst.accumulate(m, a);
        } else {
            second.accumulate(m);
            hsecond.accumulate(m, a);
        }
    }
    const DispersionGrid joined = merge(first, second);
    for (std::size_t i = 0; i < whole.sums().v.size(); ++i)
        CHECK(joined.sums().v[i] == doctest::Approx(whole.sums().v[i]).epsilon(1e-12));
    CHECK(joined.frames_accumulated() == whole.frames_accumulated());
    const MotionHistogram hjoined = merge(hfirst, hsecond);
    CHECK(hjoined.counts().v == hwhole.counts().v); // integer counts are exact
}
