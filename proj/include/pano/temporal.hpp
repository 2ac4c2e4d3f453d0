#pragma once

#include "pano/disparity.hpp"
#include "pano/grid.hpp"

namespace pano {

/// Forward splat of the source frame along a 2-channel pixel flow field,
/// horizontal wraparound. Collisions are resolved deterministically by the
/// smaller flow magnitude (first writer wins ties); the winning |flow| is
/// stored in the zbuffer channel.
WarpResult flow_warp(const Image& source, const Image& flow);

/// Mean over covered pixels of ||k_tilde - k||_2.
double temporal_loss_photometric(const WarpResult& k_tilde, const Image& target,
                                 double min_coverage = 0.10);

/// Displacement form: mean over all pixels of M * ||disparity_px - flow||_2,
/// differentiable in depth. Optionally returns d loss / d depth.
double temporal_loss_displacement(const Image& depth, double baseline, const Image& flow,
                                  const Image& weight, Image* grad = nullptr, int threads = 1);

Image temporal_loss_grad(const Image& depth, double baseline, const Image& flow,
                         const Image& weight, int threads = 1);

}  // namespace pano
