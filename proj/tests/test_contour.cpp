#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "doctest.h"
#include "pointvec/contour.hpp"
#include "pointvec/error.hpp"
#include "pointvec/synth.hpp"
#include "support/shapes.hpp"

using namespace pv;

namespace {

Blob rect_blob(int x0, int y0, int w, int h, int frame_w = 64, int frame_h = 64) {
    return shapes::blob_from(frame_w, frame_h, [=](double x, double y) {
        return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h;
    });
}

// Signed shoelace sum over the stored coordinates read with y up: positive
// means counterclockwise in the library's convention (which is clockwise as
// drawn on screen, where y grows downward).
double signed_shoelace_y_up(const std::vector<PointI>& pts) {
    double sum = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % n];
        sum += static_cast<double>(a.x) * b.y - static_cast<double>(b.x) * a.y;
    }
    return sum;
}

std::vector<PointD> square_points(double side) {
    return {{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}};
}

int diagonal_steps(const Contour& c) {
    int n = 0;
    for (std::uint8_t code : c.chain) {
        if (code % 2 == 1) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("tracing a single pixel yields a one-point contour with no chain") {
    const Blob b = shapes::blob_from(16, 16, [](double x, double y) { return x == 3 && y == 7; });
    const Contour c = trace_contour(b);
    REQUIRE(c.points.size() == 1);
    CHECK(c.points[0] == PointI{3, 7});
    CHECK(c.chain.empty());
    CHECK(c.perimeter == 0.0);
}

TEST_CASE("tracing a 2x2 square visits the four corners counterclockwise") {
    const Blob b = rect_blob(4, 5, 2, 2);
    const Contour c = trace_contour(b);
    REQUIRE(c.points.size() == 4);
    CHECK(c.points[0] == PointI{4, 5});  // topmost, then leftmost start

    const std::set<std::pair<int, int>> got{{c.points[0].x, c.points[0].y},
                                            {c.points[1].x, c.points[1].y},
                                            {c.points[2].x, c.points[2].y},
                                            {c.points[3].x, c.points[3].y}};
    const std::set<std::pair<int, int>> want{{4, 5}, {5, 5}, {5, 6}, {4, 6}};
    CHECK(got == want);
    CHECK(signed_shoelace_y_up(c.points) > 0.0);
    CHECK(c.perimeter == doctest::Approx(4.0));
}

TEST_CASE("traced contour covers exactly the boundary pixels of a rectangle") {
    const Blob b = rect_blob(10, 20, 5, 3);
    const Contour c = trace_contour(b);

    std::set<std::pair<int, int>> traced;
    for (const PointI& p : c.points) traced.emplace(p.x, p.y);
    const auto oracle = shapes::boundary_pixels(shapes::rasterize(
        64, 64, [](double x, double y) { return x >= 10 && x < 15 && y >= 20 && y < 23; }));
    CHECK(traced == oracle);
}

TEST_CASE("traced contour covers the boundary pixel set of irregular shapes") {
    const shapes::Pred hand = shapes::pointing_hand(60.0, 60.0, 30.0, 1.0);
    const pv::BinaryMask mask = shapes::rasterize(160, 120, hand);
    const Contour c = trace_contour(shapes::blob_from_mask(mask));

    std::set<std::pair<int, int>> traced;
    for (const PointI& p : c.points) traced.emplace(p.x, p.y);
    CHECK(traced == shapes::boundary_pixels(mask));
}

TEST_CASE("chain codes step exactly from each contour point to the next") {
    const pv::BinaryMask mask = shapes::rasterize(100, 100, shapes::palm(50.0, 55.0, 90.0, 0.7));
    const Contour c = trace_contour(shapes::blob_from_mask(mask));
    REQUIRE(c.points.size() >= 8);
    REQUIRE(c.chain.size() == c.points.size());

    // 0=E 1=NE 2=N 3=NW 4=W 5=SW 6=S 7=SE with N meaning up on screen.
    const int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    const int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    double length = 0.0;
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t code = c.chain[i];
        REQUIRE(code < 8);
        const PointI& a = c.points[i];
        const PointI& b = c.points[(i + 1) % n];
        CHECK(b.x - a.x == dx[code]);
        CHECK(b.y - a.y == dy[code]);
        length += (code % 2 == 0) ? 1.0 : std::sqrt(2.0);
    }
    CHECK(c.perimeter == doctest::Approx(length));
}

TEST_CASE("shoelace area matches hand-computed polygons") {
    Contour tri;
    tri.points = {{0, 0}, {4, 0}, {0, 3}};
    CHECK(area(tri) == doctest::Approx(6.0));

    Contour square;
    square.points = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(area(square) == doctest::Approx(100.0));

    Contour degenerate;
    degenerate.points = {{0, 0}, {4, 0}};
    CHECK_THROWS_AS(area(degenerate), InvalidArgument);
}

TEST_CASE("shoelace area tracks the pixel count of random convex blobs") {
    // Convex vertices are sampled on random ellipses; shapes whose boundary
    // has fewer than five diagonal steps are skipped, since on nearly
    // axis-aligned staircases the half-perimeter accounting bound is not
    // guaranteed (each straight step contributes a full boundary pixel but
    // only unit length).
    SplitMix64 rng(99);
    int tested = 0;
    int attempts = 0;
    while (tested < 50 && attempts < 500) {
        ++attempts;
        const double cx = 30.0 + rng.next_double() * 4.0;
        const double cy = 30.0 + rng.next_double() * 4.0;
        const double ax = 8.0 + rng.next_double() * 17.0;
        const double by = 8.0 + rng.next_double() * 17.0;
        const double tilt = rng.next_double() * 3.14159;
        std::vector<double> angles;
        const int m = 6 + rng.next_int(0, 6);
        for (int i = 0; i < m; ++i) angles.push_back(rng.next_double() * 2.0 * 3.14159265358979);
        std::sort(angles.begin(), angles.end());
        std::vector<std::pair<double, double>> poly;
        for (double a : angles) {
            const double ex = ax * std::cos(a);
            const double ey = by * std::sin(a);
            poly.emplace_back(cx + ex * std::cos(tilt) - ey * std::sin(tilt),
                              cy + ex * std::sin(tilt) + ey * std::cos(tilt));
        }
        const Blob b = shapes::blob_from(64, 64, shapes::polygon(poly));
        if (b.area < 30 || b.bbox.w < 5 || b.bbox.h < 5) continue;
        const Contour c = trace_contour(b);
        if (diagonal_steps(c) < 5) continue;

        ++tested;
        CAPTURE(tested);
        CHECK(std::fabs(area(c) - static_cast<double>(b.area)) <= c.perimeter / 2.0);
    }
    CHECK(tested == 50);
}

TEST_CASE("moments put the centroid at the blob's center of mass") {
    const auto [m_sq, cog_sq] = moments_cog(rect_blob(0, 0, 10, 10));
    CHECK(m_sq.m00 == doctest::Approx(100.0));
    CHECK(cog_sq.x == doctest::Approx(4.5));
    CHECK(cog_sq.y == doctest::Approx(4.5));

    Blob single;
    single.label = 1;
    single.pixels = {{3, 7}};
    single.area = 1;
    single.bbox = {3, 7, 1, 1};
    const auto [m1, c1] = moments_cog(single);
    CHECK(m1.m00 == 1.0);
    CHECK(c1.x == doctest::Approx(3.0));
    CHECK(c1.y == doctest::Approx(7.0));

    Blob pair;
    pair.label = 1;
    pair.pixels = {{0, 0}, {10, 0}};
    pair.area = 2;
    pair.bbox = {0, 0, 11, 1};
    const auto [m2, c2] = moments_cog(pair);
    CHECK(c2.x == doctest::Approx(5.0));
    CHECK(c2.y == doctest::Approx(0.0));
}

TEST_CASE("translating a blob translates its centroid exactly and keeps its area") {
    const pv::BinaryMask mask = shapes::rasterize(120, 120, shapes::palm(40.0, 45.0, 60.0, 0.6));
    const Blob b = shapes::blob_from_mask(mask);
    Blob moved = b;
    for (PointI& p : moved.pixels) {
        p.x += 31;
        p.y += 17;
    }
    moved.bbox.x += 31;
    moved.bbox.y += 17;

    const auto [mb, cb] = moments_cog(b);
    const auto [mm, cm] = moments_cog(moved);
    CHECK(mm.m00 == mb.m00);
    CHECK(cm.x == cb.x + 31.0);
    CHECK(cm.y == cb.y + 17.0);
    CHECK(area(trace_contour(moved)) == doctest::Approx(area(trace_contour(b))));
}

TEST_CASE("resampling a side-10 square to 8 points lands every 5 arc units") {
    const auto out = resample(square_points(10.0), 8);
    REQUIRE(out.size() == 8);
    const std::vector<PointD> want = {{0, 0},   {5, 0},  {10, 0}, {10, 5},
                                      {10, 10}, {5, 10}, {0, 10}, {0, 5}};
    for (std::size_t i = 0; i < want.size(); ++i) {
        CAPTURE(i);
        CHECK(out[i].x == doctest::Approx(want[i].x));
        CHECK(out[i].y == doctest::Approx(want[i].y));
    }
}

TEST_CASE("resampling reproduces uniform-chord inputs and is idempotent on them") {
    // A regular polygon already has equal chords, so resampling to the same
    // count must give the polygon back.
    std::vector<PointD> gon;
    for (int i = 0; i < 16; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / 16.0;
        gon.push_back({20.0 + 9.0 * std::cos(a), 20.0 + 9.0 * std::sin(a)});
    }
    const auto same = resample(gon, 16);
    REQUIRE(same.size() == 16);
    for (int i = 0; i < 16; ++i) {
        CHECK(std::fabs(same[i].x - gon[i].x) <= 1e-9);
        CHECK(std::fabs(same[i].y - gon[i].y) <= 1e-9);
    }

    const auto once = resample(square_points(10.0), 8);
    const auto twice = resample(once, 8);
    REQUIRE(twice.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(std::fabs(twice[i].x - once[i].x) <= 1e-6);
        CHECK(std::fabs(twice[i].y - once[i].y) <= 1e-6);
    }
}

TEST_CASE("resampling at 128 points preserves the perimeter of straight-edged shapes") {
    // Long straight (or uniformly diagonal) runs keep the samples on the
    // original polyline; only the few true corners get cut. Stair-stepped
    // boundaries like discs lose length at every stair edge instead, so they
    // are deliberately not in this domain.
    const Blob rect = rect_blob(8, 12, 40, 20, 64, 48);
    const Contour rc = trace_contour(rect);
    const double rect_resampled = polyline_perimeter(resample(rc, 128));
    CHECK(std::fabs(rect_resampled - rc.perimeter) <= 0.01 * rc.perimeter);

    const Blob diamond = shapes::blob_from(
        64, 64, [](double x, double y) { return std::fabs(x - 32) + std::fabs(y - 32) <= 20; });
    const Contour dc = trace_contour(diamond);
    const double diamond_resampled = polyline_perimeter(resample(dc, 128));
    CHECK(std::fabs(diamond_resampled - dc.perimeter) <= 0.01 * dc.perimeter);
}

TEST_CASE("every traced contour is counterclockwise under the y-up convention") {
    const std::vector<shapes::Pred> preds = {
        shapes::disc(30, 30, 14),
        shapes::pointing_hand(40, 40, 120.0, 0.7),
        shapes::palm(40, 42, 270.0, 0.55),
        [](double x, double y) { return std::fabs(x - 30) + std::fabs(y - 30) <= 12; },
    };
    for (std::size_t i = 0; i < preds.size(); ++i) {
        CAPTURE(i);
        const Contour c = trace_contour(shapes::blob_from(96, 96, preds[i]));
        REQUIRE(c.points.size() >= 3);
        CHECK(signed_shoelace_y_up(c.points) > 0.0);
    }
}

TEST_CASE("tracing the same blob twice gives identical contours") {
    const Blob b = shapes::blob_from(96, 96, shapes::pointing_hand(48, 48, 200.0, 0.8));
    const Contour c1 = trace_contour(b);
    const Contour c2 = trace_contour(b);
    CHECK(c1.points == c2.points);
    CHECK(c1.chain == c2.chain);
    CHECK(c1.perimeter == c2.perimeter);
}

TEST_CASE("contour dump prints one x y code line per point") {
    const Blob b = rect_blob(1, 1, 2, 2, 8, 8);
    const std::string dump = contour_dump(trace_contour(b));
    std::istringstream lines(dump);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        int x = -1, y = -1, code = -1;
        CHECK(std::sscanf(line.c_str(), "%d %d %d", &x, &y, &code) == 3);
        CHECK(code >= 0);
        CHECK(code < 8);
        ++count;
    }
    CHECK(count == 4);
}
