#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "pano/io_formats.hpp"
#include "pano/synth.hpp"

using namespace pano;
namespace fs = std::filesystem;

namespace {
std::string golden(const std::string& name) { return std::string(GOLDEN_DIR) + "/" + name; }

std::string tmp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("pano_io_" + name)).string();
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}
}  // namespace

TEST_CASE("pfm golden file decodes to the expected raster") {
    const Image img = pfm_read(golden("ref.pfm"));
    REQUIRE(img.width == 3);
    REQUIRE(img.height == 2);
    REQUIRE(img.channels == 1);
    CHECK(img.at(0, 0) == 1.5f);
    CHECK(img.at(1, 0) == -2.25f);
    CHECK(img.at(2, 0) == 0.5f);
    CHECK(img.at(0, 1) == 100.0f);
    CHECK(img.at(1, 1) == 0.001f);
    CHECK(img.at(2, 1) == 7.0f);
}

TEST_CASE("pfm write reproduces the golden bytes and round trips bit-exactly") {
    const Image img = pfm_read(golden("ref.pfm"));
    const std::string out = tmp_path("rt.pfm");
    pfm_write(out, img);
    CHECK(slurp(out) == slurp(golden("ref.pfm")));

    std::mt19937 rng(6);
    Image rnd(13, 7, 1);
    for (auto& v : rnd.data) v = std::uniform_real_distribution<float>(-1e6f, 1e6f)(rng);
    pfm_write(out, rnd);
    const Image back = pfm_read(out);
    REQUIRE(back.same_shape(rnd));
    CHECK(back.data == rnd.data);
    pfm_write(out, back);
    const std::string out2 = tmp_path("rt2.pfm");
    pfm_write(out2, back);
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("pfm 1x1 has the minimal 12-byte payload layout") {
    const std::string out = tmp_path("one.pfm");
    pfm_write(out, Image(1, 1, 1, 2.f));
    const auto bytes = slurp(out);
    CHECK(bytes.size() == std::string("Pf\n1 1\n-1.0\n").size() + 4);
    const Image back = pfm_read(out);
    CHECK(back.at(0, 0) == 2.f);
}

TEST_CASE("malformed pfm files are rejected with positional context") {
    CHECK_THROWS_AS(pfm_read(golden("bad_magic.pfm")), input_error);
    CHECK_THROWS_AS(pfm_read(golden("truncated.pfm")), input_error);
    CHECK_THROWS_AS(pfm_read(golden("bad_scale.pfm")), input_error);
    CHECK_THROWS_AS(pfm_read(golden("nonexistent.pfm")), input_error);
    CHECK_THROWS_WITH_AS(pfm_read(golden("truncated.pfm")), doctest::Contains("byte"),
                         input_error);
}

TEST_CASE("flow golden file decodes and round trips bit-exactly") {
    const Image flow = flow_read(golden("ref.oflo"));
    REQUIRE(flow.width == 2);
    REQUIRE(flow.height == 2);
    REQUIRE(flow.channels == 2);
    CHECK(flow.at(0, 0, 0) == 0.5f);
    CHECK(flow.at(0, 0, 1) == -1.0f);
    CHECK(flow.at(1, 0, 0) == 2.0f);
    CHECK(flow.at(0, 1, 0) == -3.5f);
    CHECK(flow.at(1, 1, 1) == 0.0f);
    const std::string out = tmp_path("rt.oflo");
    flow_write(out, flow);
    CHECK(slurp(out) == slurp(golden("ref.oflo")));
}

TEST_CASE("malformed flow files are rejected") {
    CHECK_THROWS_AS(flow_read(golden("bad_magic.oflo")), input_error);
    CHECK_THROWS_AS(flow_read(golden("truncated.oflo")), input_error);
    CHECK_THROWS_WITH_AS(flow_read(golden("truncated.oflo")), doctest::Contains("expected"),
                         input_error);
    Image not_flow(2, 2, 1);
    CHECK_THROWS_AS(flow_write(tmp_path("bad.oflo"), not_flow), input_error);
}

TEST_CASE("poses golden file decodes with quaternion conversion") {
    const auto poses = poses_read(golden("ref_poses.txt"));
    REQUIRE(poses.size() == 2);
    CHECK(poses[0].first == 0);
    CHECK(poses[0].second.translation.x == 0.0);
    CHECK(is_rotation(poses[0].second.rotation));
    CHECK(poses[1].second.translation.z == 2.0);
    // 90 degree yaw: rotates +x into -z (right-handed about +y).
    const Vec3 v = poses[1].second.rotation * Vec3{1, 0, 0};
    CHECK(v.x == doctest::Approx(0.0));
    CHECK(v.z == doctest::Approx(-1.0));
}

TEST_CASE("poses survive a write/read round trip exactly") {
    std::vector<std::pair<int, CameraPose>> poses;
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> ur(-2.0, 2.0);
    for (int i = 0; i < 5; ++i) {
        CameraPose p;
        p.rotation = Mat3::rotation_y(ur(rng)) * Mat3::rotation_x(0.2 * ur(rng));
        p.translation = {ur(rng), ur(rng), ur(rng)};
        poses.emplace_back(i, p);
    }
    const std::string out = tmp_path("poses.txt");
    poses_write(out, poses);
    const auto back = poses_read(out);
    REQUIRE(back.size() == poses.size());
    for (size_t i = 0; i < poses.size(); ++i) {
        CHECK(back[i].first == poses[i].first);
        CHECK(back[i].second.translation.x == poses[i].second.translation.x);
        CHECK(back[i].second.translation.y == poses[i].second.translation.y);
        CHECK(back[i].second.translation.z == poses[i].second.translation.z);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(back[i].second.rotation(r, c) ==
                      doctest::Approx(poses[i].second.rotation(r, c)).epsilon(1e-12));
    }
    // The raw record API preserves the file verbatim.
    const std::string out2 = tmp_path("poses2.txt");
    poses_write_raw(out2, poses_read_raw(out));
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("malformed pose files are rejected") {
    CHECK_THROWS_AS(poses_read(golden("badquat_poses.txt")), input_error);
    CHECK_THROWS_AS(poses_read(golden("dup_poses.txt")), input_error);
    CHECK_THROWS_AS(poses_read(golden("badtoken_poses.txt")), input_error);
    CHECK_THROWS_AS(poses_read(golden("trailing_poses.txt")), input_error);
    CHECK_THROWS_AS(poses_read(golden("nonexistent.txt")), input_error);
}

TEST_CASE("png round trips 8-bit quantized images exactly") {
    Image img(17, 9, 3);
    std::mt19937 rng(8);
    for (auto& v : img.data) v = static_cast<float>(rng() % 256) / 255.f;
    const std::string out = tmp_path("rt.png");
    png_write_rgb(out, img);
    const Image back = png_read_rgb(out);
    REQUIRE(back.same_shape(img));
    CHECK(back.data == img.data);
    // Repeated writes are deterministic.
    const std::string out2 = tmp_path("rt2.png");
    png_write_rgb(out2, back);
    CHECK(slurp(out) == slurp(out2));
    CHECK_THROWS_AS(png_read_rgb(tmp_path("missing.png")), input_error);
}

TEST_CASE("scene description round trips through text") {
    const Scene scene = make_benchmark_sequence(5, 2, 32, 16).scene;
    const std::string out = tmp_path("scene.txt");
    scene_write(out, scene);
    const Scene back = scene_read(out);
    REQUIRE(back.primitives.size() == scene.primitives.size());
    for (size_t i = 0; i < scene.primitives.size(); ++i) {
        CHECK(back.primitives[i].kind == scene.primitives[i].kind);
        CHECK(back.primitives[i].point.x == scene.primitives[i].point.x);
        CHECK(back.primitives[i].radius == scene.primitives[i].radius);
        CHECK(back.primitives[i].albedo.kind == scene.primitives[i].albedo.kind);
        CHECK(back.primitives[i].albedo.color.y == scene.primitives[i].albedo.color.y);
    }
}

TEST_CASE("meta round trips key=value pairs") {
    std::map<std::string, std::string> meta{{"width", "64"}, {"frames", "3"},
                                            {"baseline", "0.0832529"}};
    const std::string out = tmp_path("meta.txt");
    meta_write(out, meta);
    CHECK(meta_read(out) == meta);
}

TEST_CASE("sequence directory write/load round trip") {
    const BenchmarkSequence seq = make_benchmark_sequence(19, 3, 64, 32);
    const std::string dir = tmp_path("seqdir");
    fs::remove_all(dir);
    write_benchmark(seq, dir);
    const LoadedSequence back = load_sequence(dir);
    CHECK(back.width == 64);
    CHECK(back.height == 32);
    CHECK(back.frames == 3);
    CHECK(back.baseline == doctest::Approx(seq.baseline));
    REQUIRE(back.images.size() == 3);
    REQUIRE(back.gt_depth.size() == 3);
    CHECK(back.gt_depth[0].data == seq.depth[0].data);
    CHECK(back.flows.count({0, 1}) == 1);
    CHECK(back.flows.count({2, 1}) == 1);
    CHECK(back.flows.at({1, 2}).data == seq.flows.at({1, 2}).data);
    CHECK(back.poses[2].translation.z == doctest::Approx(2 * seq.baseline));
    CHECK_THROWS_AS(load_sequence(tmp_path("no_such_dir")), input_error);
}

TEST_CASE("path helpers produce the documented layout") {
    CHECK(frame_path("d", 3) == "d/frame_0003.png");
    CHECK(depth_path("d", 12) == "d/depth_0012.pfm");
    CHECK(flow_path("d", 1, 10) == "d/flow_0001_0010.oflo");
}
