#pragma once

#include <string>

#include "pano/grid.hpp"

namespace pano {

/// Inverse Huber (berHu): |d| up to c, quadratic above, with c = max|d| / 5
/// over the valid pixels of this comparison. c = 0 (pred == gt on the mask)
/// gives exactly 0. An all-zero mask is an error; an empty mask image means
/// all pixels are valid.
double berhu_loss(const Image& pred, const Image& gt, const Image& mask = {});

/// Mean over pixels of -ln p[target class]; probabilities clamped below at
/// 1e-12. `prob` has K channels; `labels` holds integer class ids in [0, K).
double cross_entropy_loss(const Image& prob, const Image& labels);

struct MetricReport {
    double abs_rel = 0;
    double sq_rel = 0;
    double rmse = 0;
    double rmse_log = 0;
    double delta1 = 0;  // fraction with max(p/g, g/p) < 1.25
    double delta2 = 0;  // < 1.25^2
    double delta3 = 0;  // < 1.25^3

    /// Single-line key=value record.
    std::string to_line() const;
    /// Human-readable table row, 3-4 decimals.
    std::string to_row() const;
};

/// Standard monocular-depth error metrics over the masked pixels (mask may be
/// empty = all pixels). gt must be positive on the mask.
MetricReport depth_metrics(const Image& pred, const Image& gt, const Image& mask = {});

}  // namespace pano
