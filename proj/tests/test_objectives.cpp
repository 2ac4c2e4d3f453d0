#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pano/objectives.hpp"

using namespace pano;

namespace {
Image img1(std::vector<float> v, int w, int h) {
    Image i(w, h, 1);
    i.data = std::move(v);
    return i;
}
}  // namespace

TEST_CASE("berhu frozen case: residuals 5 and 0.5") {
    // c = max|d| / 5 = 1; |0.5| <= c contributes 0.5, |5| > c contributes
    // (25 + 1) / 2 = 13; mean = 6.75.
    const Image pred = img1({5.f, 0.5f}, 2, 1);
    const Image gt = img1({0.f, 0.f}, 2, 1);
    CHECK(berhu_loss(pred, gt) == doctest::Approx(6.75));
}

TEST_CASE("berhu is continuous at the linear/quadratic boundary") {
    // With max residual 5 (so c = 1), per-pixel cost at |d| = 1 is 1 from the
    // linear branch and (1 + 1) / 2 = 1 from the quadratic branch.
    for (const double eps : {1e-3, 1e-4, 1e-5}) {
        const Image below = img1({5.f, static_cast<float>(1.0 - eps)}, 2, 1);
        const Image above = img1({5.f, static_cast<float>(1.0 + eps)}, 2, 1);
        const Image gt = img1({0.f, 0.f}, 2, 1);
        CHECK(std::abs(berhu_loss(above, gt) - berhu_loss(below, gt)) < 4 * eps);
    }
}

TEST_CASE("berhu threshold adapts to the current residuals") {
    // All residuals equal: c = |d| / 5, every pixel is quadratic:
    // (d^2 + c^2) / (2c) with d = 2, c = 0.4 -> 5.2.
    const Image pred = img1({2.f, 2.f, 2.f}, 3, 1);
    const Image gt = img1({0.f, 0.f, 0.f}, 3, 1);
    CHECK(berhu_loss(pred, gt) == doctest::Approx((4.0 + 0.16) / 0.8));
}

TEST_CASE("berhu of identical inputs is exactly zero") {
    const Image a = img1({1.f, 2.f, 3.f, 4.f}, 2, 2);
    CHECK(berhu_loss(a, a) == 0.0);
}

TEST_CASE("berhu respects the validity mask and rejects an all-zero mask") {
    const Image pred = img1({5.f, 100.f}, 2, 1);
    const Image gt = img1({0.f, 0.f}, 2, 1);
    const Image mask = img1({1.f, 0.f}, 2, 1);
    // Only the first pixel counts: c = 1, cost = (25 + 1) / 2 = 13.
    CHECK(berhu_loss(pred, gt, mask) == doctest::Approx(13.0));
    CHECK_THROWS_AS(berhu_loss(pred, gt, img1({0.f, 0.f}, 2, 1)), input_error);
    CHECK_THROWS_AS(berhu_loss(pred, img1({0.f}, 1, 1)), input_error);
}

TEST_CASE("cross entropy picks the labeled channel and clamps tiny probabilities") {
    Image prob(2, 1, 3, 0.f);
    prob.at(0, 0, 1) = 1.0f;   // correct, -ln 1 = 0
    prob.at(1, 0, 2) = 0.0f;   // zero probability: clamped at 1e-12
    prob.at(1, 0, 0) = 1.0f;
    const Image labels = img1({1.f, 2.f}, 2, 1);
    const double want = 0.5 * (-std::log(1e-12));
    CHECK(cross_entropy_loss(prob, labels) == doctest::Approx(want));
    CHECK_THROWS_AS(cross_entropy_loss(prob, img1({1.f, 3.f}, 2, 1)), input_error);
    CHECK_THROWS_AS(cross_entropy_loss(prob, img1({1.f, -1.f}, 2, 1)), input_error);
}

TEST_CASE("cross entropy of a confident correct prediction") {
    Image prob(1, 1, 2, 0.f);
    prob.at(0, 0, 0) = 0.8f;
    prob.at(0, 0, 1) = 0.2f;
    CHECK(cross_entropy_loss(prob, img1({0.f}, 1, 1)) ==
          doctest::Approx(-std::log(0.8)).epsilon(1e-6));
}

TEST_CASE("depth metrics frozen case: prediction = 1.3 x ground truth") {
    const int W = 16, H = 8;
    Image gt(W, H, 1);
    std::mt19937 rng(2);
    std::uniform_real_distribution<float> ur(0.5f, 40.f);
    for (auto& v : gt.data) v = ur(rng);
    Image pred = gt;
    for (auto& v : pred.data) v *= 1.3f;
    const MetricReport r = depth_metrics(pred, gt);
    CHECK(r.abs_rel == doctest::Approx(0.300).epsilon(1e-5));
    CHECK(r.delta1 == doctest::Approx(0.0));   // ratio 1.3 >= 1.25
    CHECK(r.delta2 == doctest::Approx(1.0));   // 1.3 < 1.5625
    CHECK(r.delta3 == doctest::Approx(1.0));
    CHECK(r.rmse_log == doctest::Approx(std::log(1.3)).epsilon(1e-5));
}

TEST_CASE("depth metrics closed forms on a tiny example") {
    const Image pred = img1({2.f, 8.f}, 2, 1);
    const Image gt = img1({4.f, 4.f}, 2, 1);
    const MetricReport r = depth_metrics(pred, gt);
    CHECK(r.abs_rel == doctest::Approx((2.0 / 4 + 4.0 / 4) / 2));
    CHECK(r.sq_rel == doctest::Approx((4.0 / 4 + 16.0 / 4) / 2));
    CHECK(r.rmse == doctest::Approx(std::sqrt((4.0 + 16.0) / 2)));
    CHECK(r.rmse_log == doctest::Approx(std::log(2.0)));  // both off by factor 2
    CHECK(r.delta1 == doctest::Approx(0.0));
    CHECK(r.delta2 == doctest::Approx(0.0));
    CHECK(r.delta3 == doctest::Approx(0.0));  // ratio 2 exceeds 1.25^3 = 1.953
}

TEST_CASE("depth metrics honor the mask and validate input") {
    const Image pred = img1({2.f, 100.f}, 2, 1);
    const Image gt = img1({2.f, 50.f}, 2, 1);
    const Image mask = img1({1.f, 0.f}, 2, 1);
    const MetricReport r = depth_metrics(pred, gt, mask);
    CHECK(r.abs_rel == doctest::Approx(0.0));
    CHECK(r.delta1 == doctest::Approx(1.0));
    CHECK_THROWS_AS(depth_metrics(pred, img1({2.f, 0.f}, 2, 1)), input_error);
    CHECK_THROWS_AS(depth_metrics(pred, img1({1.f}, 1, 1)), input_error);
    CHECK_THROWS_AS(depth_metrics(pred, gt, img1({0.f, 0.f}, 2, 1)), input_error);
}

TEST_CASE("metric report formatting") {
    MetricReport r;
    r.abs_rel = 0.25;
    r.delta1 = 0.5;
    const std::string line = r.to_line();
    CHECK(line.find("abs_rel=0.25") != std::string::npos);
    CHECK(line.find("delta1=0.5") != std::string::npos);
    CHECK(r.to_row().find("0.25") != std::string::npos);
}
