#include "pano/disparity.hpp"

#include <algorithm>
#include <cmath>

#include "pano/parallel.hpp"
#include "pano/sphere_geom.hpp"

namespace pano {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

void check_depth(const Image& depth) {
    if (depth.channels != 1) throw input_error("depth map must be single-channel");
    for (float v : depth.data)
        if (!(v > 0) || !std::isfinite(v))
            throw input_error("depth map must be positive and finite");
}

// Bilinear value and derivative at (u, v), horizontal wrap, vertical clamp.
void sample_with_grad(const Image& g, double u, double v, int c, double& val, double& ddu,
                      double& ddv) {
    double x = u - 0.5;
    double y = v - 0.5;
    bool clamped = false;
    if (y <= 0) {
        y = 0;
        clamped = true;
    } else if (y >= g.height - 1) {
        y = g.height - 1;
        clamped = true;
    }
    x = std::fmod(x, static_cast<double>(g.width));
    if (x < 0) x += g.width;
    if (x >= g.width) x = 0;
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = (x0 + 1) % g.width;
    const int y1 = std::min(y0 + 1, g.height - 1);
    const double fx = x - x0, fy = y - y0;
    const double v00 = g.at(x0, y0, c), v10 = g.at(x1, y0, c);
    const double v01 = g.at(x0, y1, c), v11 = g.at(x1, y1, c);
    const double top = (1 - fx) * v00 + fx * v10;
    const double bot = (1 - fx) * v01 + fx * v11;
    val = (1 - fy) * top + fy * bot;
    ddu = (1 - fy) * (v10 - v00) + fy * (v11 - v01);
    ddv = clamped ? 0.0 : bot - top;
}

// Weight and its derivatives at continuous pixel coords.
void weight_with_grad(double u, double v, int width, int height, WeightMode mode, double& m,
                      double& dm_du, double& dm_dv) {
    const double theta = std::clamp(v, 0.0, static_cast<double>(height)) / height * kPi;
    const double st = std::sin(theta), ct = std::cos(theta);
    const double abs_st = std::abs(st);
    const double dtheta_dv = (v <= 0 || v >= height) ? 0.0 : kPi / height;
    if (mode == WeightMode::PolarOnly) {
        m = abs_st;
        dm_du = 0;
        dm_dv = (st >= 0 ? ct : -ct) * dtheta_dv;
        return;
    }
    const double phi = u / width * kTwoPi - kPi;
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double abs_sp = std::abs(sp);
    m = abs_sp * abs_st;
    dm_du = (sp >= 0 ? cp : -cp) * (kTwoPi / width) * abs_st;
    dm_dv = abs_sp * (st >= 0 ? ct : -ct) * dtheta_dv;
}

struct DispAtPixel {
    double du = 0, dv = 0;      // pixel units
    double dphi = 0, dtheta = 0;  // radians
    double target_radius = 0;
};

DispAtPixel disparity_at(int x, int y, int width, int height, double r, double b) {
    DispAtPixel out;
    const double u = x + 0.5, v = y + 0.5;
    const double phi = u / width * kTwoPi - kPi;
    const double theta = v / height * kPi;
    if (b == 0) {
        out.target_radius = r;
        return out;
    }
    const Vec3 d = sph_to_dir({phi, theta});
    const Vec3 p{d.x * r, d.y * r, d.z * r - b};
    const double rp = norm(p);
    if (!(rp > 0)) throw numerical_error("spherical_disparity: point coincides with target camera");
    const double phi_t = std::atan2(p.z, p.x);
    const double theta_t = std::atan2(std::hypot(p.x, p.z), p.y);
    out.dphi = wrap_angle(phi_t - phi);
    out.dtheta = theta_t - theta;
    out.du = out.dphi * width / kTwoPi;
    out.dv = out.dtheta * height / kPi;
    out.target_radius = rp;
    return out;
}
}  // namespace

Image distortion_weight(int width, int height, WeightMode mode) {
    Image m(width, height, 1);
    for (int y = 0; y < height; ++y) {
        const double theta = (y + 0.5) / height * kPi;
        const double st = std::abs(std::sin(theta));
        for (int x = 0; x < width; ++x) {
            if (mode == WeightMode::PolarOnly) {
                m.at(x, y) = static_cast<float>(st);
            } else {
                const double phi = (x + 0.5) / width * kTwoPi - kPi;
                m.at(x, y) = static_cast<float>(std::abs(std::sin(phi)) * st);
            }
        }
    }
    return m;
}

Image spherical_disparity(const Image& depth, double baseline, int threads) {
    check_depth(depth);
    Image out(depth.width, depth.height, 2);
    parallel_rows(depth.height, threads, [&](int y) {
        for (int x = 0; x < depth.width; ++x) {
            const DispAtPixel d =
                disparity_at(x, y, depth.width, depth.height, depth.at(x, y), baseline);
            out.at(x, y, 0) = static_cast<float>(d.dphi);
            out.at(x, y, 1) = static_cast<float>(d.dtheta);
        }
    });
    return out;
}

Image disparity_pixels(const Image& depth, double baseline, int threads) {
    check_depth(depth);
    Image out(depth.width, depth.height, 2);
    parallel_rows(depth.height, threads, [&](int y) {
        for (int x = 0; x < depth.width; ++x) {
            const DispAtPixel d =
                disparity_at(x, y, depth.width, depth.height, depth.at(x, y), baseline);
            out.at(x, y, 0) = static_cast<float>(d.du);
            out.at(x, y, 1) = static_cast<float>(d.dv);
        }
    });
    return out;
}

DisparityJacobian disparity_jacobian(int x, int y, int width, int height, double depth,
                                     double baseline) {
    if (baseline == 0) return {};
    const double u = x + 0.5, v = y + 0.5;
    const double phi = u / width * kTwoPi - kPi;
    const double theta = v / height * kPi;
    const Vec3 d = sph_to_dir({phi, theta});
    const Vec3 p{d.x * depth, d.y * depth, d.z * depth - baseline};
    const double h2 = p.x * p.x + p.z * p.z;
    const double h = std::sqrt(h2);
    const double rho2 = h2 + p.y * p.y;
    if (!(h2 > 0) || !(rho2 > 0)) return {};
    const double dphi_dr = baseline * d.x / h2;
    const double dh_dr = (p.x * d.x + p.z * d.z) / h;
    const double dtheta_dr = (p.y * dh_dr - h * d.y) / rho2;
    return {dphi_dr * width / kTwoPi, dtheta_dr * height / kPi};
}

WarpResult reproject_frame(const Image& source, const Image& depth, double baseline) {
    if (depth.width != source.width || depth.height != source.height)
        throw input_error("reproject_frame: depth shape mismatch");
    check_depth(depth);
    const int w = source.width, h = source.height;
    WarpResult out;
    out.image = Image(w, h, source.channels);
    out.coverage = Image(w, h, 1);
    out.zbuffer = Image(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const DispAtPixel d = disparity_at(x, y, w, h, depth.at(x, y), baseline);
            const double ut = (x + 0.5) + d.du;
            const double vt = (y + 0.5) + d.dv;
            if (vt < 0 || vt >= h) continue;
            int xi = static_cast<int>(std::floor(ut)) % w;
            if (xi < 0) xi += w;
            const int yi = static_cast<int>(vt);
            const float r = static_cast<float>(d.target_radius);
            if (out.coverage.at(xi, yi) == 0.f || r < out.zbuffer.at(xi, yi)) {
                out.coverage.at(xi, yi) = 1.f;
                out.zbuffer.at(xi, yi) = r;
                for (int c = 0; c < source.channels; ++c)
                    out.image.at(xi, yi, c) = source.at(x, y, c);
            }
        }
    }
    return out;
}

GeometricLoss geometric_loss(const WarpResult& k_hat, const Image& target, const Image& weight,
                             double min_coverage) {
    require_same_shape(k_hat.image, target, "geometric_loss");
    if (weight.width != target.width || weight.height != target.height || weight.channels != 1)
        throw input_error("geometric_loss: weight shape mismatch");
    double sum = 0;
    size_t covered = 0;
    for (int y = 0; y < target.height; ++y) {
        for (int x = 0; x < target.width; ++x) {
            if (k_hat.coverage.at(x, y) == 0.f) continue;
            ++covered;
            const double m = weight.at(x, y);
            double s2 = 0;
            for (int c = 0; c < target.channels; ++c) {
                const double e = m * (k_hat.image.at(x, y, c) - target.at(x, y, c));
                s2 += e * e;
            }
            sum += std::sqrt(s2);
        }
    }
    const double frac = static_cast<double>(covered) / target.pixel_count();
    if (frac < min_coverage)
        throw input_error("geometric_loss: insufficient-overlap (coverage below threshold)");
    return {sum / static_cast<double>(covered), frac};
}

double geometric_objective(const Image& depth, const Image& source, const Image& target,
                           double baseline, WeightMode mode, Image* grad, int threads) {
    require_same_shape(source, target, "geometric_objective");
    check_depth(depth);
    if (depth.width != source.width || depth.height != source.height)
        throw input_error("geometric_objective: depth shape mismatch");
    const int w = source.width, h = source.height;
    const size_t n = source.pixel_count();
    if (grad) *grad = Image(w, h, 1);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double loss = parallel_row_sum(h, threads, [&](int y) {
        double row = 0;
        for (int x = 0; x < w; ++x) {
            const double r = depth.at(x, y);
            const DispAtPixel d = disparity_at(x, y, w, h, r, baseline);
            const double ut = (x + 0.5) + d.du;
            const double vt = (y + 0.5) + d.dv;
            double m, dm_du, dm_dv;
            weight_with_grad(ut, vt, w, h, mode, m, dm_du, dm_dv);
            double e2 = 0;
            double de_du = 0, de_dv = 0;  // accumulates e_c * dk_c
            std::array<double, 16> resid{};
            std::array<double, 16> kx{}, ky{};
            const int nc = std::min(source.channels, 16);
            for (int c = 0; c < nc; ++c) {
                double kv, gx, gy;
                sample_with_grad(target, ut, vt, c, kv, gx, gy);
                const double e = source.at(x, y, c) - kv;
                resid[c] = e;
                kx[c] = gx;
                ky[c] = gy;
                e2 += e * e;
            }
            const double enorm = std::sqrt(e2);
            row += m * enorm;
            if (grad) {
                const DisparityJacobian jac = disparity_jacobian(x, y, w, h, r, baseline);
                double g = 0;
                if (enorm > 0) {
                    for (int c = 0; c < nc; ++c) {
                        de_du += (resid[c] / enorm) * kx[c];
                        de_dv += (resid[c] / enorm) * ky[c];
                    }
                    // d/dr of m*|e|: residual derivative plus weight motion.
                    g = m * (-(de_du * jac.du_dr + de_dv * jac.dv_dr)) +
                        enorm * (dm_du * jac.du_dr + dm_dv * jac.dv_dr);
                }
                grad->at(x, y) = static_cast<float>(g * inv_n);
            }
        }
        return row;
    });
    return loss * inv_n;
}

Image geometric_loss_grad(const Image& depth, const Image& source, const Image& target,
                          double baseline, WeightMode mode, int threads) {
    Image grad;
    geometric_objective(depth, source, target, baseline, mode, &grad, threads);
    return grad;
}

}  // namespace pano
