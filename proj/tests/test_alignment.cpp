#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pano/alignment.hpp"

using namespace pano;

namespace {
FrameSequence make_seq(const std::vector<std::vector<float>>& nn,
                       const std::vector<std::vector<float>>& recon, int w, int h) {
    FrameSequence seq;
    for (size_t f = 0; f < nn.size(); ++f) {
        Frame fr;
        fr.depth_prior = Image(w, h, 1);
        fr.sparse_depth = Image(w, h, 1);
        fr.depth_prior.data = nn[f];
        fr.sparse_depth.data = recon[f];
        seq.frames.push_back(std::move(fr));
    }
    return seq;
}
}  // namespace

TEST_CASE("compute_scale averages per-pixel depth ratios over valid pixels") {
    // Ratios 1, 2, 3 and one invalid (recon = 0) pixel.
    const auto seq = make_seq({{2.f, 6.f, 12.f, 99.f}}, {{2.f, 3.f, 4.f, 0.f}}, 2, 2);
    CHECK(compute_scale(seq, ScaleEstimator::Mean) == doctest::Approx(2.0));
    CHECK(compute_scale(seq, ScaleEstimator::Median) == doctest::Approx(2.0));
}

TEST_CASE("compute_scale pools valid pixels across frames") {
    const auto seq = make_seq({{4.f, 0.f}, {8.f, 6.f}}, {{1.f, 0.f}, {1.f, 1.f}}, 2, 1);
    // Ratios 4, 8, 6 -> mean 6, median 6.
    CHECK(compute_scale(seq, ScaleEstimator::Mean) == doctest::Approx(6.0));
    CHECK(compute_scale(seq, ScaleEstimator::Median) == doctest::Approx(6.0));
}

TEST_CASE("compute_scale is homogeneous of degree one in the learned depth") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<float> ud(0.5f, 30.f);
    Image nn(8, 4, 1), recon(8, 4, 1);
    for (auto& v : nn.data) v = ud(rng);
    for (auto& v : recon.data) v = (ud(rng) > 15.f) ? 0.f : ud(rng);
    recon.data[0] = 3.f;
    // A power-of-two factor keeps the scaled float input exact, so the check
    // isolates the estimator's homogeneity.
    Image nn_scaled = nn;
    const double s = 4.0;
    for (auto& v : nn_scaled.data) v = static_cast<float>(v * s);
    for (const ScaleEstimator mode : {ScaleEstimator::Mean, ScaleEstimator::Median}) {
        const double base = compute_scale({&nn}, {&recon}, mode);
        const double scaled = compute_scale({&nn_scaled}, {&recon}, mode);
        CHECK(std::abs(scaled - s * base) <= 1e-12 * std::abs(s * base));
    }
}

TEST_CASE("compute_scale rejects degenerate input") {
    const auto none = make_seq({{1.f, 2.f}}, {{0.f, 0.f}}, 2, 1);
    CHECK_THROWS_AS(compute_scale(none), input_error);
    const auto bad_nn = make_seq({{-1.f, 2.f}}, {{1.f, 1.f}}, 2, 1);
    CHECK_THROWS_AS(compute_scale(bad_nn), input_error);
    CHECK_THROWS_AS(compute_scale(FrameSequence{}), input_error);
}

TEST_CASE("apply_scale multiplies translations only") {
    FrameSequence seq;
    Frame f;
    f.pose.rotation = Mat3::rotation_y(0.3);
    f.pose.translation = {1.0, -2.0, 0.5};
    seq.frames.push_back(f);
    const FrameSequence out = apply_scale(seq, 2.5);
    CHECK(out.frames[0].pose.translation.x == doctest::Approx(2.5));
    CHECK(out.frames[0].pose.translation.y == doctest::Approx(-5.0));
    CHECK(out.frames[0].pose.translation.z == doctest::Approx(1.25));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(out.frames[0].pose.rotation(i, j) == f.pose.rotation(i, j));
    CHECK_THROWS_AS(apply_scale(seq, 0.0), input_error);
    CHECK_THROWS_AS(apply_scale(seq, -1.0), input_error);
}

TEST_CASE("alignment_rotation maps the horizontal baseline onto +z") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ut(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        CameraPose a, b;
        a.translation = {ut(rng), ut(rng), ut(rng)};
        Vec3 t{ut(rng), 0.01 * ut(rng), ut(rng)};
        if (std::hypot(t.x, t.z) < 0.3) t.z += 1.0;
        b.translation = a.translation + t;
        const AlignmentResult r = alignment_rotation(a, b);
        REQUIRE(is_rotation(r.rotation, 1e-9));
        const Vec3 aligned = r.rotation * t;
        CHECK(aligned.x == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(aligned.z == doctest::Approx(r.baseline).epsilon(1e-12));
        CHECK(r.baseline == doctest::Approx(std::hypot(t.x, t.z)));
        CHECK(r.baseline > 0);
    }
}

TEST_CASE("alignment_rotation pure yaw keeps the vertical axis fixed") {
    CameraPose a, b;
    b.translation = {1.0, 0.0, 1.0};
    const AlignmentResult r = alignment_rotation(a, b);
    const Vec3 up = r.rotation * Vec3{0, 1, 0};
    CHECK(up.x == doctest::Approx(0.0));
    CHECK(up.y == doctest::Approx(1.0));
    CHECK(up.z == doctest::Approx(0.0));
    CHECK(r.baseline == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("alignment_rotation rejects static and vertical motion") {
    CameraPose a, b;
    CHECK_THROWS_WITH_AS(alignment_rotation(a, b), doctest::Contains("static-viewpoint"),
                         input_error);
    b.translation = {0.1, 5.0, 0.1};
    CHECK_THROWS_WITH_AS(alignment_rotation(a, b), doctest::Contains("vertical-motion"),
                         input_error);
    // At the default threshold, 20% vertical is still accepted.
    b.translation = {1.0, 0.199, 0.0};
    CHECK_NOTHROW(alignment_rotation(a, b));
}
