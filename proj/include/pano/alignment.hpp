#pragma once

#include <vector>

#include "pano/geom.hpp"
#include "pano/grid.hpp"

namespace pano {

/// Rigid camera-to-world transform; translation in meters.
struct CameraPose {
    Mat3 rotation;
    Vec3 translation;
};

struct Frame {
    Image image;
    CameraPose pose;
    Image depth_prior;   // learned depth D^NN, may be empty
    Image sparse_depth;  // reconstruction depth, 0 = no value, may be empty
};

struct FrameSequence {
    std::vector<Frame> frames;
};

enum class ScaleEstimator { Mean, Median };

/// Scale between learned and reconstructed depth: the mean (or median) over
/// all pixels with sparse_depth > 0, across all frames, of
/// depth_prior / sparse_depth.
double compute_scale(const FrameSequence& seq, ScaleEstimator mode = ScaleEstimator::Mean);

/// Low-level variant over parallel per-frame grids.
double compute_scale(const std::vector<const Image*>& depth_nn,
                     const std::vector<const Image*>& depth_recon,
                     ScaleEstimator mode = ScaleEstimator::Mean);

/// Multiplies every camera translation by s; images and rotations untouched.
FrameSequence apply_scale(const FrameSequence& seq, double s);

struct AlignmentResult {
    Mat3 rotation;    // world-frame yaw taking the horizontal baseline to +z
    double baseline;  // length of the horizontal translation component
};

/// Yaw aligning the pair so the relative translation t_k - t_j maps to
/// (0, *, baseline). Rejects static viewpoints and trajectories whose
/// vertical component exceeds max_vertical_ratio of the total translation.
AlignmentResult alignment_rotation(const CameraPose& pose_j, const CameraPose& pose_k,
                                   double max_vertical_ratio = 0.2);

}  // namespace pano
