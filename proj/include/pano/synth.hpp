#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "pano/alignment.hpp"
#include "pano/geom.hpp"
#include "pano/grid.hpp"

namespace pano {

struct Albedo {
    enum class Kind { Solid, Checker };
    Kind kind = Kind::Solid;
    Vec3 color{0.5, 0.5, 0.5};
    Vec3 color2{0.5, 0.5, 0.5};
    double period = 1.0;  // meters, checker only
};

struct Primitive {
    enum class Kind { Plane, Sphere, Box, Sky };
    Kind kind = Kind::Sphere;
    Vec3 point;    // plane point / sphere center / box min
    Vec3 extent;   // plane normal / box max
    double radius = 1.0;  // sphere and sky
    Albedo albedo;
};

/// Analytic primitives with procedural albedo, ray-castable from any point.
/// The sky shell is a world-centered sphere hit from inside; it must enclose
/// every other primitive.
struct Scene {
    std::vector<Primitive> primitives;
};

struct RayHit {
    double t = 0;
    int primitive = -1;
};

/// Nearest positive intersection. Returns false only when the scene has no
/// sky shell and the ray escapes.
bool intersect_scene(const Scene& scene, const Vec3& origin, const Vec3& dir, RayHit& hit);

Vec3 albedo_at(const Primitive& prim, const Vec3& world_point);

/// Flat-shaded ERP render: per pixel, cast along d(p) rotated by the camera
/// rotation; depth is the exact radial distance to the nearest hit.
void render_erp(const Scene& scene, const CameraPose& pose, int width, int height,
                Image& rgb, Image& depth, int threads = 1);

/// Exact optical flow from frame j to frame k for a static scene: flow(p) =
/// pixel of the hit point seen from k minus p, longitude-wrapped. 2 channels
/// (du, dv) in pixels.
Image render_flow(const Scene& scene, const CameraPose& pose_j, const CameraPose& pose_k,
                  int width, int height, int threads = 1);

struct BenchmarkSequence {
    Scene scene;
    std::vector<CameraPose> poses;
    std::vector<Image> rgb;
    std::vector<Image> depth;
    std::map<std::pair<int, int>, Image> flows;  // consecutive pairs, both directions
    double baseline = 0;
};

/// Seeded procedural benchmark: 3-8 primitives, horizontal trajectory along
/// +z. The frame spacing targets 2% of the median scene depth, capped at
/// 4.5% of the minimum depth so the small-baseline disparity model stays in
/// range. Deterministic per (seed, frames, width, height).
BenchmarkSequence make_benchmark_sequence(uint64_t seed, int frames, int width, int height,
                                          int threads = 1);

}  // namespace pano
