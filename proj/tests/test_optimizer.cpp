#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pano/objectives.hpp"
#include "pano/optimizer.hpp"
#include "pano/synth.hpp"

using namespace pano;

namespace {
OptSequence to_opt(const BenchmarkSequence& seq) {
    OptSequence o;
    for (size_t i = 0; i < seq.rgb.size(); ++i) {
        o.images.push_back(seq.rgb[i]);
        o.z_positions.push_back(seq.poses[i].translation.z);
    }
    o.flows = seq.flows;
    return o;
}

std::vector<Image> perturbed_depth(const BenchmarkSequence& seq, float up, float down) {
    std::vector<Image> out;
    for (const Image& d : seq.depth) {
        Image p = d;
        for (size_t i = 0; i < p.data.size(); ++i) p.data[i] *= ((i / 7) % 2) ? up : down;
        out.push_back(std::move(p));
    }
    return out;
}
}  // namespace

TEST_CASE("depth params round trip a coarse-constant field exactly") {
    const Image flat(64, 32, 1, 3.5f);
    const DepthParams p = make_depth_params({flat}, 4);
    CHECK(p.coarse_width == 16);
    CHECK(p.coarse_height == 8);
    const Image back = render_depth(p, 0);
    for (float v : back.data) CHECK(v == doctest::Approx(3.5).epsilon(1e-6));
}

TEST_CASE("make_depth_params validates its input") {
    CHECK_THROWS_AS(make_depth_params({}, 4), input_error);
    CHECK_THROWS_AS(make_depth_params({Image(10, 10, 1, 1.f)}, 4), input_error);
    CHECK_THROWS_AS(make_depth_params({Image(16, 8, 1, -1.f)}, 4), input_error);
    CHECK_THROWS_AS(
        make_depth_params({Image(16, 8, 1, 1.f), Image(8, 8, 1, 1.f)}, 4), input_error);
}

TEST_CASE("make_depth_params clamps to the depth range") {
    const Image tiny(16, 8, 1, 1e-6f);
    const DepthParams p = make_depth_params({tiny}, 4, 0.1, 1e4);
    const Image back = render_depth(p, 0);
    for (float v : back.data) CHECK(v == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("combined_loss is near zero for ground-truth depth") {
    const BenchmarkSequence seq = make_benchmark_sequence(71, 3, 128, 64);
    OptimizeConfig cfg;
    const DepthParams p = make_depth_params(seq.depth, cfg.downsample);
    const LossBreakdown lb = combined_loss(to_opt(seq), p, cfg);
    CHECK(lb.total < 0.03);
    CHECK(lb.pairs.size() == 4);  // 2 consecutive pairs, both directions
    for (const PairTerm& t : lb.pairs) {
        CHECK(t.geometric >= 0);
        CHECK(t.temporal >= 0);
    }
}

TEST_CASE("combined_loss increases for corrupted depth") {
    const BenchmarkSequence seq = make_benchmark_sequence(72, 2, 96, 48);
    OptimizeConfig cfg;
    const OptSequence opt = to_opt(seq);
    const double good = combined_loss(opt, make_depth_params(seq.depth, 4), cfg).total;
    const double bad =
        combined_loss(opt, make_depth_params(perturbed_depth(seq, 1.4f, 0.7f), 4), cfg).total;
    CHECK(bad > 2 * good);
}

TEST_CASE("optimize_sequence with zero epochs returns the initialization unchanged") {
    const BenchmarkSequence seq = make_benchmark_sequence(73, 2, 64, 32);
    OptimizeConfig cfg;
    cfg.epochs = 0;
    const DepthParams init = make_depth_params(perturbed_depth(seq, 1.3f, 0.8f), 4);
    const DepthParams out = optimize_sequence(to_opt(seq), init, cfg);
    REQUIRE(out.log_depth.size() == init.log_depth.size());
    for (size_t f = 0; f < init.log_depth.size(); ++f)
        CHECK(out.log_depth[f] == init.log_depth[f]);
}

TEST_CASE("optimize_sequence reduces the loss monotonically") {
    const BenchmarkSequence seq = make_benchmark_sequence(74, 3, 128, 64);
    OptimizeConfig cfg;
    cfg.epochs = 6;
    const OptSequence opt = to_opt(seq);
    const DepthParams init = make_depth_params(perturbed_depth(seq, 1.35f, 0.75f), 4);
    std::vector<EpochRecord> trace;
    const DepthParams out = optimize_sequence(opt, init, cfg, &trace);
    REQUIRE(trace.size() == 7);  // initial record + one per epoch
    for (size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i].total <= trace[i - 1].total);
        CHECK(trace[i].epoch == static_cast<int>(i));
    }
    CHECK(trace.back().total < trace.front().total);
    // The refined depth is closer to ground truth than the initialization.
    const double before = depth_metrics(render_depth(init, 0), seq.depth[0]).abs_rel;
    const double after = depth_metrics(render_depth(out, 0), seq.depth[0]).abs_rel;
    CHECK(after < before);
}

TEST_CASE("optimize_sequence is invariant to thread count") {
    const BenchmarkSequence seq = make_benchmark_sequence(75, 2, 64, 32);
    const OptSequence opt = to_opt(seq);
    const DepthParams init = make_depth_params(perturbed_depth(seq, 1.2f, 0.85f), 4);
    OptimizeConfig cfg;
    cfg.epochs = 3;
    DepthParams a, b;
    {
        OptimizeConfig c1 = cfg;
        c1.threads = 1;
        a = optimize_sequence(opt, init, c1);
    }
    {
        OptimizeConfig c4 = cfg;
        c4.threads = 4;
        b = optimize_sequence(opt, init, c4);
    }
    for (size_t f = 0; f < a.log_depth.size(); ++f) CHECK(a.log_depth[f] == b.log_depth[f]);
}

TEST_CASE("optimize_sequence validates configuration and inputs") {
    const BenchmarkSequence seq = make_benchmark_sequence(76, 2, 64, 32);
    const OptSequence opt = to_opt(seq);
    const DepthParams init = make_depth_params(seq.depth, 4);
    OptimizeConfig cfg;
    cfg.epochs = -1;
    CHECK_THROWS_AS(optimize_sequence(opt, init, cfg), input_error);
    cfg.epochs = 1;
    cfg.step_size = 0;
    CHECK_THROWS_AS(optimize_sequence(opt, init, cfg), input_error);
    cfg.step_size = 0.05;
    OptSequence missing = opt;
    missing.flows.erase({1, 0});
    CHECK_THROWS_AS(optimize_sequence(missing, init, cfg), input_error);
    OptSequence single;
    single.images.push_back(seq.rgb[0]);
    single.z_positions.push_back(0.0);
    CHECK_THROWS_AS(
        optimize_sequence(single, make_depth_params({seq.depth[0]}, 4), cfg), input_error);
}

TEST_CASE("forward-only pair policy halves the pair count") {
    const BenchmarkSequence seq = make_benchmark_sequence(77, 3, 64, 32);
    OptimizeConfig cfg;
    cfg.policy = PairPolicy::ConsecutiveForward;
    const LossBreakdown lb = combined_loss(to_opt(seq), make_depth_params(seq.depth, 4), cfg);
    CHECK(lb.pairs.size() == 2);
}
