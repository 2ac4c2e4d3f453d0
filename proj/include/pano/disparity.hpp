#pragma once

#include "pano/grid.hpp"

namespace pano {

enum class WeightMode {
    Paper,      // |sin(phi)| * |sin(theta)|
    PolarOnly,  // |sin(theta)|
};

/// Distortion weight raster evaluated at pixel centers.
Image distortion_weight(int width, int height, WeightMode mode = WeightMode::Paper);

/// Angular disparity (d_phi, d_theta) in radians between a camera at the
/// origin and a camera at (0, 0, baseline), for radial depth `depth`.
/// d_phi is wrapped to (-pi, pi]. baseline = 0 yields exact zeros.
Image spherical_disparity(const Image& depth, double baseline, int threads = 1);

/// Same field in pixel units: du = d_phi * W / 2pi, dv = d_theta * H / pi.
Image disparity_pixels(const Image& depth, double baseline, int threads = 1);

/// d(du)/dr and d(dv)/dr in pixels per meter at one pixel.
struct DisparityJacobian {
    double du_dr = 0;
    double dv_dr = 0;
};
DisparityJacobian disparity_jacobian(int x, int y, int width, int height, double depth,
                                     double baseline);

/// Forward-splat view synthesis with z-buffer conflict resolution.
struct WarpResult {
    Image image;     // defined only where coverage = 1
    Image coverage;  // binary mask
    Image zbuffer;   // winning target-frame radial distance (or |flow| for flow warps)
};

/// Splats each source pixel to the nearest destination pixel at p + disparity;
/// collisions keep the smallest target-frame radial distance. Holes are legal
/// and reported via coverage. Sequential by contract (exact z-buffer result).
WarpResult reproject_frame(const Image& source, const Image& depth, double baseline);

struct GeometricLoss {
    double loss = 0;
    double coverage_fraction = 0;
};

/// Mean over covered pixels of the per-pixel L2 norm of the weighted residual
/// M * (k_hat - k). Errors when the coverage fraction drops below
/// min_coverage.
GeometricLoss geometric_loss(const WarpResult& k_hat, const Image& target, const Image& weight,
                             double min_coverage = 0.10);

/// Differentiable form of the geometric loss: for each source pixel the
/// target is sampled bilinearly at the disparity-displaced position and the
/// weight is evaluated analytically there. This is the objective whose
/// analytic depth gradient geometric_loss_grad returns.
double geometric_objective(const Image& depth, const Image& source, const Image& target,
                           double baseline, WeightMode mode, Image* grad = nullptr,
                           int threads = 1);

Image geometric_loss_grad(const Image& depth, const Image& source, const Image& target,
                          double baseline, WeightMode mode, int threads = 1);

}  // namespace pano
