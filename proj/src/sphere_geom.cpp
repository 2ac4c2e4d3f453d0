#include "pano/sphere_geom.hpp"

#include <algorithm>
#include <cmath>

#include "pano/parallel.hpp"

namespace pano {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Bilinear with clamping on both axes; used for cubemap faces.
void bilinear_sample_clamped(const Image& g, double u, double v, float* out) {
    double x = u - 0.5, y = v - 0.5;
    x = std::clamp(x, 0.0, static_cast<double>(g.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(g.height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, g.width - 1);
    const int y1 = std::min(y0 + 1, g.height - 1);
    const double fx = x - x0, fy = y - y0;
    for (int c = 0; c < g.channels; ++c) {
        const double top = (1 - fx) * g.at(x0, y0, c) + fx * g.at(x1, y0, c);
        const double bot = (1 - fx) * g.at(x0, y1, c) + fx * g.at(x1, y1, c);
        out[c] = static_cast<float>((1 - fy) * top + fy * bot);
    }
}

int face_from_axis(const Vec3& a) {
    if (a.x > 0.5) return 0;
    if (a.x < -0.5) return 1;
    if (a.y > 0.5) return 2;
    if (a.y < -0.5) return 3;
    if (a.z > 0.5) return 4;
    return 5;
}
}  // namespace

SphericalDir erp_pixel_to_dir(double u, double v, int width, int height) {
    if (!(u >= 0 && u <= width && v >= 0 && v <= height))
        throw input_error("erp_pixel_to_dir: pixel coords out of range");
    return {(u / width) * kTwoPi - kPi, (v / height) * kPi};
}

std::pair<double, double> dir_to_erp_pixel(const Vec3& d, int width, int height) {
    const SphericalDir s = dir_to_sph(d);
    double u = (s.phi + kPi) / kTwoPi * width;
    if (u >= width) u -= width;
    const double v = s.theta / kPi * height;
    return {u, v};
}

void bilinear_sample(const Image& grid, double u, double v, float* out) {
    double x = u - 0.5;
    double y = std::clamp(v - 0.5, 0.0, static_cast<double>(grid.height - 1));
    x = std::fmod(x, static_cast<double>(grid.width));
    if (x < 0) x += grid.width;
    if (x >= grid.width) x = 0;
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = (x0 + 1) % grid.width;
    const int y1 = std::min(y0 + 1, grid.height - 1);
    const double fx = x - x0, fy = y - y0;
    for (int c = 0; c < grid.channels; ++c) {
        const double top = (1 - fx) * grid.at(x0, y0, c) + fx * grid.at(x1, y0, c);
        const double bot = (1 - fx) * grid.at(x0, y1, c) + fx * grid.at(x1, y1, c);
        out[c] = static_cast<float>((1 - fy) * top + fy * bot);
    }
}

float bilinear_sample1(const Image& grid, double u, double v) {
    float out;
    bilinear_sample(grid, u, v, &out);
    return out;
}

Image rotate_erp(const Image& grid, const Mat3& rotation, int threads) {
    Image out(grid.width, grid.height, grid.channels);
    const Mat3 rt = rotation.transposed();
    parallel_rows(grid.height, threads, [&](int y) {
        for (int x = 0; x < grid.width; ++x) {
            const Vec3 d = sph_to_dir(erp_pixel_to_dir(x + 0.5, y + 0.5, grid.width, grid.height));
            const auto [u, v] = dir_to_erp_pixel(rt * d, grid.width, grid.height);
            bilinear_sample(grid, u, v, &out.at(x, y, 0));
        }
    });
    return out;
}

const std::array<FaceBasis, 6>& cubemap_face_bases() {
    static const std::array<FaceBasis, 6> bases = {{
        {{1, 0, 0}, {0, 0, 1}, {0, -1, 0}},    // +x
        {{-1, 0, 0}, {0, 0, -1}, {0, -1, 0}},  // -x
        {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}},     // +y
        {{0, -1, 0}, {1, 0, 0}, {0, 0, -1}},   // -y
        {{0, 0, 1}, {-1, 0, 0}, {0, -1, 0}},   // +z
        {{0, 0, -1}, {1, 0, 0}, {0, -1, 0}},   // -z
    }};
    return bases;
}

Vec3 cubeface_pixel_to_dir(int face, double x, double y, int face_size) {
    const FaceBasis& b = cubemap_face_bases()[face];
    const double s = 2.0 * x / face_size - 1.0;
    const double t = 2.0 * y / face_size - 1.0;
    return normalized(b.axis + b.right * s + b.down * t);
}

FaceCoord dir_to_cubeface(const Vec3& d, int face_size) {
    int face = 0;
    double best = -2;
    for (int f = 0; f < 6; ++f) {
        const double a = dot(cubemap_face_bases()[f].axis, d);
        if (a > best) {
            best = a;
            face = f;
        }
    }
    const FaceBasis& b = cubemap_face_bases()[face];
    const Vec3 p = d / dot(d, b.axis);
    const double s = dot(p, b.right);
    const double t = dot(p, b.down);
    return {face, (s + 1.0) * face_size / 2.0, (t + 1.0) * face_size / 2.0};
}

CubemapGrid erp_to_cubemap(const Image& grid, int face_size, int threads) {
    if (face_size < 2) throw input_error("erp_to_cubemap: face size must be >= 2");
    CubemapGrid cm(face_size, grid.channels);
    for (int f = 0; f < 6; ++f) {
        Image& face = cm.faces[f];
        parallel_rows(face_size, threads, [&](int y) {
            for (int x = 0; x < face_size; ++x) {
                const Vec3 d = cubeface_pixel_to_dir(f, x + 0.5, y + 0.5, face_size);
                const auto [u, v] = dir_to_erp_pixel(d, grid.width, grid.height);
                bilinear_sample(grid, u, v, &face.at(x, y, 0));
            }
        });
    }
    return cm;
}

Image cubemap_to_erp(const CubemapGrid& cm, int width, int height, int threads) {
    Image out(width, height, cm.channels);
    parallel_rows(height, threads, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const Vec3 d = sph_to_dir(erp_pixel_to_dir(x + 0.5, y + 0.5, width, height));
            const FaceCoord fc = dir_to_cubeface(d, cm.face_size);
            bilinear_sample_clamped(cm.faces[fc.face], fc.x, fc.y, &out.at(x, y, 0));
        }
    });
    return out;
}

CubeSource fold_cube_pixel(int face, int a, int b, int face_size) {
    const double F = face_size;
    int f = face;
    double s = 2.0 * (a + 0.5) / F - 1.0;
    double t = 2.0 * (b + 0.5) / F - 1.0;
    for (int iter = 0; iter < 8; ++iter) {
        const FaceBasis& fb = cubemap_face_bases()[f];
        Vec3 p;
        Vec3 new_axis;
        if (s > 1) {
            p = fb.axis * (2 - s) + fb.right + fb.down * t;
            new_axis = fb.right;
        } else if (s < -1) {
            p = fb.axis * (2 + s) - fb.right + fb.down * t;
            new_axis = -fb.right;
        } else if (t > 1) {
            p = fb.axis * (2 - t) + fb.right * s + fb.down;
            new_axis = fb.down;
        } else if (t < -1) {
            p = fb.axis * (2 + t) + fb.right * s - fb.down;
            new_axis = -fb.down;
        } else {
            const int x = static_cast<int>(std::lround((s + 1) * F / 2 - 0.5));
            const int y = static_cast<int>(std::lround((t + 1) * F / 2 - 0.5));
            return {f, std::clamp(x, 0, face_size - 1), std::clamp(y, 0, face_size - 1)};
        }
        f = face_from_axis(new_axis);
        const FaceBasis& nb = cubemap_face_bases()[f];
        s = dot(p, nb.right);
        t = dot(p, nb.down);
    }
    throw numerical_error("fold_cube_pixel: did not converge");
}

std::array<Image, 6> spherical_pad(const CubemapGrid& cm, int pad) {
    if (pad < 0 || pad >= cm.face_size)
        throw input_error("spherical_pad: pad must satisfy 0 <= pad < face size");
    const int F = cm.face_size;
    const int P = F + 2 * pad;
    std::array<Image, 6> out;
    for (int f = 0; f < 6; ++f) {
        Image padded(P, P, cm.channels);
        for (int y = 0; y < P; ++y) {
            for (int x = 0; x < P; ++x) {
                const int a = x - pad, b = y - pad;
                if (a >= 0 && a < F && b >= 0 && b < F) {
                    for (int c = 0; c < cm.channels; ++c)
                        padded.at(x, y, c) = cm.faces[f].at(a, b, c);
                } else {
                    const CubeSource src = fold_cube_pixel(f, a, b, F);
                    for (int c = 0; c < cm.channels; ++c)
                        padded.at(x, y, c) = cm.faces[src.face].at(src.x, src.y, c);
                }
            }
        }
        out[f] = std::move(padded);
    }
    return out;
}

}  // namespace pano
