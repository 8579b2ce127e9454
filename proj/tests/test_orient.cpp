#include "chess/orient.hpp"

#include <gtest/gtest.h>

#include "chess/detector.hpp"
#include "chess/synth.hpp"

using namespace chess;

namespace {

SampleVector corner_pattern(int shift) {
    SampleVector s{};
    for (int n = 0; n < 16; ++n) s[(n + shift) % 16] = (n / 4) % 2 == 0 ? 255 : 0;
    return s;
}

int bin_distance(int a, int b) {
    const int d = std::abs(a - b) % 8;
    return std::min(d, 8 - d);
}

// Renders a vertex and returns the selected feature's orientation bin.
int rendered_bin(double angle_deg, int dark = 64, int light = 191) {
    SynthSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.angle_deg = angle_deg;
    spec.dark = dark;
    spec.light = light;
    spec.blur = BlurKernel::gauss3;
    const VertexImage vi = render_vertex(spec);
    const RingGeometry ring = build_ring(5);
    auto features = select_features(detect(vi.image, ring), SelectConfig{});
    EXPECT_EQ(features.size(), 1u);
    label_features(vi.image, ring, features);
    EXPECT_TRUE(features[0].orientation_bin.has_value());
    return features[0].orientation_bin.value_or(-1);
}

} // namespace

TEST(Measures, CornerPattern) {
    const auto m = measures(corner_pattern(0));
    for (int n = 0; n < 4; ++n) EXPECT_EQ(m[n], 510);

    const auto shifted = measures(corner_pattern(4));
    for (int n = 0; n < 4; ++n) EXPECT_EQ(shifted[n], -510);

    SampleVector uniform{};
    uniform.fill(99);
    const auto z = measures(uniform);
    for (int n = 0; n < 4; ++n) EXPECT_EQ(z[n], 0);
}

TEST(Measures, SumOfAbsoluteMeasuresIsSumResponse) {
    SampleVector s{};
    for (int n = 0; n < 16; ++n) s[n] = (n * 37 + 11) % 256;
    const auto m = measures(s);
    EXPECT_EQ(std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]), sum_response(s));
}

TEST(OrientationBin, UniformSamplesHaveNoOrientation) {
    SampleVector uniform{};
    uniform.fill(120);
    EXPECT_FALSE(orientation_bin(uniform).has_value());
}

TEST(OrientationBin, AntiPeriodicWrapInAveraging) {
    // M = (a, 0, 0, 0): the wrap terms -M_3 and -M_0 show up in am3[0]/am3[3].
    SampleVector s{};
    s[0] = s[8] = 100; // M_0 = 200, others 0... plus quadrature contributions
    const auto om = orientation_measures(s);
    ASSERT_TRUE(om.has_value());
    // M_0 = 200, M_1 = 0, M_2 = -0, M_3 = 0 for this pattern:
    EXPECT_EQ(om->m[0], 200);
    EXPECT_EQ(om->m[1], 0);
    EXPECT_EQ(om->m[2], 0);
    EXPECT_EQ(om->m[3], 0);
    EXPECT_EQ(om->am3[0], 200);  // -M3 + M0 + M1
    EXPECT_EQ(om->am3[1], 200);  // M0 + M1 + M2
    EXPECT_EQ(om->am3[3], -200); // M2 + M3 - M0
    EXPECT_EQ(om->bin, 0);       // argmax tie (|200|) resolves to smallest n, M_0 > 0
}

TEST(OrientationBin, ShiftByFourFlipsHalf) {
    const auto a = orientation_bin(corner_pattern(0));
    const auto b = orientation_bin(corner_pattern(4));
    ASSERT_TRUE(a && b);
    EXPECT_EQ((*a + 4) % 8, *b);
}

TEST(OrientationBin, RenderedRotationCyclesAllEightBins) {
    const int b0 = rendered_bin(3.0);
    const int b1 = rendered_bin(3.0 + 22.5);
    const int direction = (b1 - b0 + 8) % 8;
    ASSERT_TRUE(direction == 1 || direction == 7) << "22.5 deg must step one bin";
    std::array<bool, 8> seen{};
    for (int k = 0; k < 8; ++k) {
        const int bk = rendered_bin(3.0 + 22.5 * k);
        EXPECT_EQ(bk, (b0 + direction * k) % 8) << "step " << k;
        seen[bk] = true;
    }
    for (int b = 0; b < 8; ++b) EXPECT_TRUE(seen[b]) << "bin " << b << " never seen";
}

TEST(OrientationBin, ColourInversionShiftsByFour) {
    for (double angle : {3.0, 20.0, 48.0}) {
        const int normal = rendered_bin(angle, 64, 191);
        SynthSpec spec;
        spec.width = 96;
        spec.height = 96;
        spec.angle_deg = angle;
        spec.dark = 64;
        spec.light = 191;
        spec.blur = BlurKernel::gauss3;
        VertexImage vi = render_vertex(spec);
        // Invert the quadrant colours by flipping every pixel around 127.5.
        for (auto& p : vi.image.pixels()) p = static_cast<std::uint8_t>(255 - p);
        const RingGeometry ring = build_ring(5);
        auto features = select_features(detect(vi.image, ring), SelectConfig{});
        ASSERT_EQ(features.size(), 1u);
        label_features(vi.image, ring, features);
        ASSERT_TRUE(features[0].orientation_bin.has_value());
        EXPECT_EQ((normal + 4) % 8, *features[0].orientation_bin) << "angle " << angle;
    }
}

TEST(OrientationBin, SmallPerturbationMovesAtMostOneBin) {
    for (double base : {3.0, 30.0, 60.0}) {
        const int b = rendered_bin(base);
        for (double delta : {-11.25, -5.0, 5.0, 11.25}) {
            const int bp = rendered_bin(base + delta);
            EXPECT_LE(bin_distance(b, bp), 1) << "base " << base << " delta " << delta;
        }
    }
}

TEST(OrientationBin, HalfTurnLeavesBinUnchanged) {
    for (double angle : {4.0, 31.0, 77.0}) {
        EXPECT_EQ(rendered_bin(angle), rendered_bin(angle + 180.0)) << "angle " << angle;
    }
}

TEST(OrientationBin, AdjacentBoardVerticesAreInAntiPhase) {
    SynthSpec spec;
    spec.width = 256;
    spec.height = 256;
    spec.angle_deg = 14.0;
    spec.blur = BlurKernel::gauss3;
    const BoardImage board = render_board(4, 4, 48, spec);
    const RingGeometry ring = build_ring(5);
    auto features = select_features(detect(board.image, ring), SelectConfig{});
    ASSERT_EQ(features.size(), board.vertices.size());
    label_features(board.image, ring, features);

    // Match features to the 3x3 interior lattice, then compare row/column
    // neighbours: opposite-sense vertices must sit 4 bins apart.
    std::array<int, 9> bins{};
    for (std::size_t vi = 0; vi < board.vertices.size(); ++vi) {
        double best = 1e18;
        const Feature* match = nullptr;
        for (const Feature& f : features) {
            const double d = std::hypot(f.x - board.vertices[vi].x, f.y - board.vertices[vi].y);
            if (d < best) {
                best = d;
                match = &f;
            }
        }
        ASSERT_LT(best, 1.0);
        ASSERT_TRUE(match->orientation_bin.has_value());
        bins[vi] = *match->orientation_bin;
    }
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) {
            if (col + 1 < 3) {
                EXPECT_EQ((bins[row * 3 + col] + 4) % 8, bins[row * 3 + col + 1]);
            }
            if (row + 1 < 3) {
                EXPECT_EQ((bins[row * 3 + col] + 4) % 8, bins[(row + 1) * 3 + col]);
            }
        }
}
