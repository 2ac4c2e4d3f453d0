#pragma once

#include <array>
#include <utility>

#include "pano/geom.hpp"
#include "pano/grid.hpp"

namespace pano {

/// Longitude phi in [-pi, pi), polar angle (colatitude) theta in [0, pi].
/// Poles lie along +y (theta = 0) and -y (theta = pi).
struct SphericalDir {
    double phi = 0;
    double theta = 0;
};

inline Vec3 sph_to_dir(const SphericalDir& s) {
    const double st = std::sin(s.theta);
    return {st * std::cos(s.phi), std::cos(s.theta), st * std::sin(s.phi)};
}

inline SphericalDir dir_to_sph(const Vec3& d) {
    const double h = std::hypot(d.x, d.z);
    return {std::atan2(d.z, d.x), std::atan2(h, d.y)};
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    a = std::fmod(a, two_pi);
    if (a > 3.14159265358979323846) a -= two_pi;
    if (a <= -3.14159265358979323846) a += two_pi;
    return a;
}

/// Pixel-center convention: pixel (i, j) has continuous coords (i+0.5, j+0.5).
SphericalDir erp_pixel_to_dir(double u, double v, int width, int height);
std::pair<double, double> dir_to_erp_pixel(const Vec3& d, int width, int height);

/// Bilinear interpolation with horizontal wraparound and vertical clamping.
/// `out` must hold grid.channels floats.
void bilinear_sample(const Image& grid, double u, double v, float* out);
float bilinear_sample1(const Image& grid, double u, double v);

/// output(p) = input sampled at direction R^T * d(p); the image content is
/// rotated by R.
Image rotate_erp(const Image& grid, const Mat3& rotation, int threads = 1);

/// Face basis for the fixed cubemap convention. A face pixel at continuous
/// coords (x, y) in [0, F] maps to direction axis + s*right + t*down with
/// s = 2x/F - 1, t = 2y/F - 1.
struct FaceBasis {
    Vec3 axis, right, down;
};
const std::array<FaceBasis, 6>& cubemap_face_bases();

Vec3 cubeface_pixel_to_dir(int face, double x, double y, int face_size);

/// Face containing direction d (largest |axis component|) and the continuous
/// pixel coords on that face.
struct FaceCoord {
    int face;
    double x, y;
};
FaceCoord dir_to_cubeface(const Vec3& d, int face_size);

CubemapGrid erp_to_cubemap(const Image& grid, int face_size, int threads = 1);
Image cubemap_to_erp(const CubemapGrid& cm, int width, int height, int threads = 1);

/// Pads every face with `pad` pixels of geometrically adjacent content from
/// the neighboring faces. Interior is a bit-exact copy; strip pixels are
/// bit-exact copies of the neighbor-face pixels reached by unfolding the cube
/// across the shared edge (corners unfold horizontally first, then
/// vertically).
std::array<Image, 6> spherical_pad(const CubemapGrid& cm, int pad);

/// Source location on the cube for an extended face pixel (a, b) that may lie
/// outside [0, F). Exposed for adjacency tests.
struct CubeSource {
    int face;
    int x, y;
};
CubeSource fold_cube_pixel(int face, int a, int b, int face_size);

}  // namespace pano
