#include "pano/temporal.hpp"

#include <cmath>

#include "pano/parallel.hpp"

namespace pano {

WarpResult flow_warp(const Image& source, const Image& flow) {
    if (flow.width != source.width || flow.height != source.height || flow.channels != 2)
        throw input_error("flow_warp: flow must be a 2-channel field matching the source");
    const int w = source.width, h = source.height;
    WarpResult out;
    out.image = Image(w, h, source.channels);
    out.coverage = Image(w, h, 1);
    out.zbuffer = Image(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double du = flow.at(x, y, 0);
            const double dv = flow.at(x, y, 1);
            const double ut = (x + 0.5) + du;
            const double vt = (y + 0.5) + dv;
            if (vt < 0 || vt >= h) continue;
            int xi = static_cast<int>(std::floor(ut)) % w;
            if (xi < 0) xi += w;
            const int yi = static_cast<int>(vt);
            const float mag = static_cast<float>(std::hypot(du, dv));
            if (out.coverage.at(xi, yi) == 0.f || mag < out.zbuffer.at(xi, yi)) {
                out.coverage.at(xi, yi) = 1.f;
                out.zbuffer.at(xi, yi) = mag;
                for (int c = 0; c < source.channels; ++c)
                    out.image.at(xi, yi, c) = source.at(x, y, c);
            }
        }
    }
    return out;
}

double temporal_loss_photometric(const WarpResult& k_tilde, const Image& target,
                                 double min_coverage) {
    require_same_shape(k_tilde.image, target, "temporal_loss_photometric");
    double sum = 0;
    size_t covered = 0;
    for (int y = 0; y < target.height; ++y) {
        for (int x = 0; x < target.width; ++x) {
            if (k_tilde.coverage.at(x, y) == 0.f) continue;
            ++covered;
            double s2 = 0;
            for (int c = 0; c < target.channels; ++c) {
                const double e = k_tilde.image.at(x, y, c) - target.at(x, y, c);
                s2 += e * e;
            }
            sum += std::sqrt(s2);
        }
    }
    const double frac = static_cast<double>(covered) / target.pixel_count();
    if (frac < min_coverage)
        throw input_error("temporal_loss_photometric: insufficient-overlap");
    return sum / static_cast<double>(covered);
}

double temporal_loss_displacement(const Image& depth, double baseline, const Image& flow,
                                  const Image& weight, Image* grad, int threads) {
    if (flow.width != depth.width || flow.height != depth.height || flow.channels != 2)
        throw input_error("temporal_loss_displacement: flow shape mismatch");
    if (weight.width != depth.width || weight.height != depth.height || weight.channels != 1)
        throw input_error("temporal_loss_displacement: weight shape mismatch");
    const int w = depth.width, h = depth.height;
    const Image disp = disparity_pixels(depth, baseline, threads);
    if (grad) *grad = Image(w, h, 1);
    const double inv_n = 1.0 / static_cast<double>(depth.pixel_count());
    const double loss = parallel_row_sum(h, threads, [&](int y) {
        double row = 0;
        for (int x = 0; x < w; ++x) {
            const double eu = disp.at(x, y, 0) - flow.at(x, y, 0);
            const double ev = disp.at(x, y, 1) - flow.at(x, y, 1);
            const double m = weight.at(x, y);
            const double enorm = std::hypot(eu, ev);
            row += m * enorm;
            if (grad) {
                double g = 0;
                if (enorm > 0 && m != 0) {
                    const DisparityJacobian jac =
                        disparity_jacobian(x, y, w, h, depth.at(x, y), baseline);
                    g = m * (eu * jac.du_dr + ev * jac.dv_dr) / enorm;
                }
                grad->at(x, y) = static_cast<float>(g * inv_n);
            }
        }
        return row;
    });
    return loss * inv_n;
}

Image temporal_loss_grad(const Image& depth, double baseline, const Image& flow,
                         const Image& weight, int threads) {
    Image grad;
    temporal_loss_displacement(depth, baseline, flow, weight, &grad, threads);
    return grad;
}

}  // namespace pano
