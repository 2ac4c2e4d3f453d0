#pragma once

#include <map>
#include <utility>
#include <vector>

#include "pano/disparity.hpp"
#include "pano/grid.hpp"

namespace pano {

/// Optimization variable: per-frame coarse grids of log-depth, bilinearly
/// upsampled (horizontal wrap, vertical clamp) to full resolution for loss
/// evaluation. Log parameterization keeps depth positive and equalizes
/// relative steps.
struct DepthParams {
    int full_width = 0, full_height = 0;
    int factor = 4;
    int coarse_width = 0, coarse_height = 0;
    std::vector<std::vector<double>> log_depth;  // per frame, row-major

    int frames() const { return static_cast<int>(log_depth.size()); }
};

/// Point-samples log depth at the coarse cell centers. Full resolution must
/// be divisible by the factor.
DepthParams make_depth_params(const std::vector<Image>& init_depth, int factor,
                              double depth_min = 0.1, double depth_max = 1e4);

/// Full-resolution depth map for one frame.
Image render_depth(const DepthParams& params, int frame);

/// Frames already rotation-aligned so camera motion is purely along +z.
struct OptSequence {
    std::vector<Image> images;
    std::vector<double> z_positions;                // meters along the aligned axis
    std::map<std::pair<int, int>, Image> flows;     // pixel flow j->k
};

enum class PairPolicy { ConsecutiveBidirectional, ConsecutiveForward };

struct OptimizeConfig {
    int epochs = 10;
    double step_size = 0.05;  // max per-cell log-depth move per epoch
    double weight_geometric = 1.0;
    double weight_temporal = 1.0;
    double min_coverage = 0.10;
    WeightMode weight_mode = WeightMode::Paper;
    int downsample = 4;
    double depth_min = 0.1;
    double depth_max = 1e4;
    PairPolicy policy = PairPolicy::ConsecutiveBidirectional;
    int max_halvings = 5;
    int threads = 1;
};

struct PairTerm {
    int j = 0, k = 0;
    double geometric = 0;
    double temporal = 0;
};

struct LossBreakdown {
    double total = 0;  // mean over pairs of (w_g * geometric + w_t * temporal)
    std::vector<PairTerm> pairs;
};

LossBreakdown combined_loss(const OptSequence& seq, const DepthParams& params,
                            const OptimizeConfig& cfg);

struct EpochRecord {
    int epoch = 0;
    double geometric = 0;
    double temporal = 0;
    double total = 0;
    double step = 0;
};

/// Sign-gradient descent on the coarse log-depth grids with persistent
/// backtracking halving: every cell moves step_size in the direction opposite
/// its gradient; a tentative step that raises the loss is halved (up to
/// max_halvings) and a fully rejected epoch leaves the parameters unchanged,
/// so the loss trace is monotonically non-increasing.
DepthParams optimize_sequence(const OptSequence& seq, const DepthParams& init,
                              const OptimizeConfig& cfg,
                              std::vector<EpochRecord>* trace = nullptr);

}  // namespace pano
