#include "pano/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pano/parallel.hpp"
#include "pano/sphere_geom.hpp"

namespace pano {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kRayEps = 1e-7;

bool hit_plane(const Primitive& p, const Vec3& o, const Vec3& d, double& t) {
    const Vec3 n = normalized(p.extent);
    const double denom = dot(d, n);
    if (std::abs(denom) < 1e-12) return false;
    t = dot(p.point - o, n) / denom;
    return t > kRayEps;
}

bool hit_sphere(const Primitive& p, const Vec3& o, const Vec3& d, double& t) {
    const Vec3 oc = o - p.point;
    const double b = dot(oc, d);
    const double c = dot(oc, oc) - p.radius * p.radius;
    const double disc = b * b - c;
    if (disc < 0) return false;
    const double sq = std::sqrt(disc);
    const double t0 = -b - sq, t1 = -b + sq;
    if (t0 > kRayEps)
        t = t0;
    else if (t1 > kRayEps)
        t = t1;
    else
        return false;
    return true;
}

bool hit_box(const Primitive& p, const Vec3& o, const Vec3& d, double& t) {
    double tmin = -1e300, tmax = 1e300;
    const double od[3] = {o.x, o.y, o.z};
    const double dd[3] = {d.x, d.y, d.z};
    const double lo[3] = {p.point.x, p.point.y, p.point.z};
    const double hi[3] = {p.extent.x, p.extent.y, p.extent.z};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(dd[i]) < 1e-12) {
            if (od[i] < lo[i] || od[i] > hi[i]) return false;
            continue;
        }
        double t0 = (lo[i] - od[i]) / dd[i];
        double t1 = (hi[i] - od[i]) / dd[i];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return false;
    }
    if (tmin > kRayEps)
        t = tmin;
    else if (tmax > kRayEps)
        t = tmax;
    else
        return false;
    return true;
}

// World-centered shell, camera inside: far root.
bool hit_sky(const Primitive& p, const Vec3& o, const Vec3& d, double& t) {
    const double b = dot(o, d);
    const double c = dot(o, o) - p.radius * p.radius;
    const double disc = b * b - c;
    if (disc < 0) return false;
    t = -b + std::sqrt(disc);
    return t > kRayEps;
}
}  // namespace

bool intersect_scene(const Scene& scene, const Vec3& origin, const Vec3& dir, RayHit& hit) {
    hit = {};
    hit.t = 1e300;
    for (size_t i = 0; i < scene.primitives.size(); ++i) {
        const Primitive& p = scene.primitives[i];
        double t;
        bool ok = false;
        switch (p.kind) {
            case Primitive::Kind::Plane: ok = hit_plane(p, origin, dir, t); break;
            case Primitive::Kind::Sphere: ok = hit_sphere(p, origin, dir, t); break;
            case Primitive::Kind::Box: ok = hit_box(p, origin, dir, t); break;
            case Primitive::Kind::Sky: ok = hit_sky(p, origin, dir, t); break;
        }
        if (ok && t < hit.t) {
            hit.t = t;
            hit.primitive = static_cast<int>(i);
        }
    }
    return hit.primitive >= 0;
}

Vec3 albedo_at(const Primitive& prim, const Vec3& world_point) {
    const Albedo& a = prim.albedo;
    if (a.kind == Albedo::Kind::Solid) return a.color;
    const double inv = 1.0 / a.period;
    const long long parity = static_cast<long long>(std::floor(world_point.x * inv)) +
                             static_cast<long long>(std::floor(world_point.y * inv)) +
                             static_cast<long long>(std::floor(world_point.z * inv));
    return (parity & 1) ? a.color2 : a.color;
}

void render_erp(const Scene& scene, const CameraPose& pose, int width, int height, Image& rgb,
                Image& depth, int threads) {
    if (scene.primitives.empty()) throw input_error("render_erp: empty scene");
    rgb = Image(width, height, 3);
    depth = Image(width, height, 1);
    parallel_rows(height, threads, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const Vec3 d_cam = sph_to_dir(erp_pixel_to_dir(x + 0.5, y + 0.5, width, height));
            const Vec3 d = pose.rotation * d_cam;
            RayHit hit;
            if (!intersect_scene(scene, pose.translation, d, hit))
                throw numerical_error("render_erp: ray escaped the scene (no sky shell?)");
            depth.at(x, y) = static_cast<float>(hit.t);
            const Vec3 pw = pose.translation + d * hit.t;
            const Vec3 col = albedo_at(scene.primitives[hit.primitive], pw);
            rgb.at(x, y, 0) = static_cast<float>(col.x);
            rgb.at(x, y, 1) = static_cast<float>(col.y);
            rgb.at(x, y, 2) = static_cast<float>(col.z);
        }
    });
}

Image render_flow(const Scene& scene, const CameraPose& pose_j, const CameraPose& pose_k,
                  int width, int height, int threads) {
    Image flow(width, height, 2);
    const Mat3 rkt = pose_k.rotation.transposed();
    parallel_rows(height, threads, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const SphericalDir s = erp_pixel_to_dir(x + 0.5, y + 0.5, width, height);
            const Vec3 d_cam = sph_to_dir(s);
            const Vec3 d = pose_j.rotation * d_cam;
            RayHit hit;
            if (!intersect_scene(scene, pose_j.translation, d, hit))
                throw numerical_error("render_flow: ray escaped the scene");
            // Round the hit distance to float so the flow stays consistent,
            // bit for bit, with disparity computed from the stored depth map.
            const double r = static_cast<float>(hit.t);
            const Vec3 pw = pose_j.translation + d * r;
            const Vec3 dk = rkt * (pw - pose_k.translation);
            const double phi_t = std::atan2(dk.z, dk.x);
            const double theta_t = std::atan2(std::hypot(dk.x, dk.z), dk.y);
            flow.at(x, y, 0) =
                static_cast<float>(wrap_angle(phi_t - s.phi) * width / kTwoPi);
            flow.at(x, y, 1) = static_cast<float>((theta_t - s.theta) * height / kPi);
        }
    });
    return flow;
}

BenchmarkSequence make_benchmark_sequence(uint64_t seed, int frames, int width, int height,
                                          int threads) {
    if (frames < 2) throw input_error("make_benchmark_sequence: need at least 2 frames");
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
    };
    auto color = [&]() { return Vec3{uni(0.1, 0.9), uni(0.1, 0.9), uni(0.1, 0.9)}; };

    BenchmarkSequence seq;
    Scene& scene = seq.scene;

    Primitive sky;
    sky.kind = Primitive::Kind::Sky;
    sky.radius = uni(50, 90);
    sky.albedo = {Albedo::Kind::Solid, {uni(0.5, 0.8), uni(0.6, 0.9), uni(0.8, 1.0)}, {}, 1.0};
    scene.primitives.push_back(sky);

    Primitive ground;
    ground.kind = Primitive::Kind::Plane;
    ground.point = {0, -uni(1.4, 2.2), 0};
    ground.extent = {0, 1, 0};
    ground.albedo = {Albedo::Kind::Checker, color(), color(), uni(2.5, 5.0)};
    scene.primitives.push_back(ground);

    const int extra = 1 + static_cast<int>(uni(0, 5.999));  // 3..8 primitives total
    for (int i = 0; i < extra; ++i) {
        const double az = uni(-3.14159, 3.14159);
        const double dist = uni(2.5, 9.0);
        const Vec3 center{dist * std::cos(az), uni(-1.0, 2.5), dist * std::sin(az)};
        Primitive p;
        p.albedo = uni(0, 1) < 0.5
                       ? Albedo{Albedo::Kind::Solid, color(), {}, 1.0}
                       : Albedo{Albedo::Kind::Checker, color(), color(), uni(1.5, 4.0)};
        if (uni(0, 1) < 0.5) {
            p.kind = Primitive::Kind::Sphere;
            p.radius = std::min(uni(0.4, 1.2), dist - 1.5);
            p.point = center;
        } else {
            p.kind = Primitive::Kind::Box;
            const Vec3 half{uni(0.3, 1.0), uni(0.3, 1.0), uni(0.3, 1.0)};
            p.point = center - half;
            p.extent = center + half;
        }
        scene.primitives.push_back(p);
    }

    // Probe depth stats to pick the frame spacing.
    Image probe_rgb, probe_depth;
    render_erp(scene, CameraPose{}, 64, 32, probe_rgb, probe_depth, threads);
    std::vector<float> vals(probe_depth.data);
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    const double median = vals[vals.size() / 2];
    const double min_depth = *std::min_element(probe_depth.data.begin(), probe_depth.data.end());
    seq.baseline = std::min(0.02 * median, 0.045 * min_depth);

    for (int i = 0; i < frames; ++i) {
        CameraPose pose;
        pose.translation = {0, 0, i * seq.baseline};
        seq.poses.push_back(pose);
        Image rgb, depth;
        render_erp(scene, pose, width, height, rgb, depth, threads);
        seq.rgb.push_back(std::move(rgb));
        seq.depth.push_back(std::move(depth));
    }
    for (int i = 0; i + 1 < frames; ++i) {
        seq.flows[{i, i + 1}] =
            render_flow(scene, seq.poses[i], seq.poses[i + 1], width, height, threads);
        seq.flows[{i + 1, i}] =
            render_flow(scene, seq.poses[i + 1], seq.poses[i], width, height, threads);
    }
    return seq;
}

}  // namespace pano
