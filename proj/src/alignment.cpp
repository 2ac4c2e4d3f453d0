#include "pano/alignment.hpp"

#include <algorithm>
#include <cmath>

namespace pano {

namespace {
void accumulate_ratios(const Image& nn, const Image& recon, std::vector<double>& ratios) {
    require_same_shape(nn, recon, "compute_scale");
    for (size_t i = 0; i < recon.data.size(); ++i) {
        const double r = recon.data[i];
        if (r > 0) {
            const double d = nn.data[i];
            if (!(d > 0))
                throw input_error("compute_scale: nonpositive learned depth at a valid pixel");
            ratios.push_back(d / r);
        }
    }
}

double reduce_ratios(std::vector<double>& ratios, ScaleEstimator mode) {
    if (ratios.empty())
        throw input_error("compute_scale: no valid reconstruction pixels");
    if (mode == ScaleEstimator::Median) {
        std::sort(ratios.begin(), ratios.end());
        const size_t n = ratios.size();
        return n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
    }
    double sum = 0;
    for (double r : ratios) sum += r;
    return sum / static_cast<double>(ratios.size());
}
}  // namespace

double compute_scale(const FrameSequence& seq, ScaleEstimator mode) {
    std::vector<double> ratios;
    for (const Frame& f : seq.frames) {
        if (f.depth_prior.empty() || f.sparse_depth.empty()) continue;
        accumulate_ratios(f.depth_prior, f.sparse_depth, ratios);
    }
    return reduce_ratios(ratios, mode);
}

double compute_scale(const std::vector<const Image*>& depth_nn,
                     const std::vector<const Image*>& depth_recon, ScaleEstimator mode) {
    if (depth_nn.size() != depth_recon.size())
        throw input_error("compute_scale: frame count mismatch");
    std::vector<double> ratios;
    for (size_t i = 0; i < depth_nn.size(); ++i)
        accumulate_ratios(*depth_nn[i], *depth_recon[i], ratios);
    return reduce_ratios(ratios, mode);
}

FrameSequence apply_scale(const FrameSequence& seq, double s) {
    if (!(s > 0)) throw input_error("apply_scale: scale must be positive");
    FrameSequence out = seq;
    for (Frame& f : out.frames) f.pose.translation = f.pose.translation * s;
    return out;
}

AlignmentResult alignment_rotation(const CameraPose& pose_j, const CameraPose& pose_k,
                                   double max_vertical_ratio) {
    const Vec3 t_rel = pose_k.translation - pose_j.translation;
    const double total = norm(t_rel);
    if (!(total > 0))
        throw input_error("alignment_rotation: static-viewpoint (zero baseline)");
    if (std::abs(t_rel.y) / total > max_vertical_ratio)
        throw input_error("alignment_rotation: vertical-motion ratio exceeded");
    const double b = std::hypot(t_rel.x, t_rel.z);
    if (!(b > 0))
        throw input_error("alignment_rotation: vertical-motion ratio exceeded");
    // R_y(alpha) * (tx, 0, tz) = (0, 0, b) with alpha = -atan2(tx, tz).
    return {Mat3::rotation_y(-std::atan2(t_rel.x, t_rel.z)), b};
}

}  // namespace pano
