#include "pano/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace pano {

namespace {
// Collects masked pixel indices; empty mask image = every pixel.
std::vector<size_t> valid_indices(const Image& ref, const Image& mask, const char* what) {
    if (!mask.empty() && (mask.width != ref.width || mask.height != ref.height))
        throw input_error(std::string(what) + ": mask shape mismatch");
    std::vector<size_t> idx;
    idx.reserve(ref.pixel_count());
    for (size_t i = 0; i < ref.pixel_count(); ++i)
        if (mask.empty() || mask.data[i] != 0.f) idx.push_back(i);
    if (idx.empty()) throw input_error(std::string(what) + ": no valid pixels");
    return idx;
}
}  // namespace

double berhu_loss(const Image& pred, const Image& gt, const Image& mask) {
    require_same_shape(pred, gt, "berhu_loss");
    if (pred.channels != 1) throw input_error("berhu_loss: expects single-channel maps");
    const auto idx = valid_indices(gt, mask, "berhu_loss");
    double max_abs = 0;
    for (size_t i : idx)
        max_abs = std::max(max_abs, std::abs(static_cast<double>(pred.data[i]) - gt.data[i]));
    const double c = max_abs / 5.0;
    if (c == 0) return 0.0;
    double sum = 0;
    for (size_t i : idx) {
        const double d = static_cast<double>(pred.data[i]) - gt.data[i];
        const double ad = std::abs(d);
        sum += ad <= c ? ad : (d * d + c * c) / (2 * c);
    }
    return sum / static_cast<double>(idx.size());
}

double cross_entropy_loss(const Image& prob, const Image& labels) {
    if (labels.channels != 1) throw input_error("cross_entropy_loss: labels must be 1-channel");
    if (prob.width != labels.width || prob.height != labels.height)
        throw input_error("cross_entropy_loss: shape mismatch");
    const int k = prob.channels;
    double sum = 0;
    for (int y = 0; y < prob.height; ++y) {
        for (int x = 0; x < prob.width; ++x) {
            const int cls = static_cast<int>(std::lround(labels.at(x, y)));
            if (cls < 0 || cls >= k)
                throw input_error("cross_entropy_loss: class id out of range");
            const double p = std::max(static_cast<double>(prob.at(x, y, cls)), 1e-12);
            sum -= std::log(p);
        }
    }
    return sum / static_cast<double>(prob.pixel_count());
}

MetricReport depth_metrics(const Image& pred, const Image& gt, const Image& mask) {
    require_same_shape(pred, gt, "depth_metrics");
    if (pred.channels != 1) throw input_error("depth_metrics: expects single-channel maps");
    const auto idx = valid_indices(gt, mask, "depth_metrics");
    MetricReport r;
    size_t d1 = 0, d2 = 0, d3 = 0;
    for (size_t i : idx) {
        const double p = pred.data[i], g = gt.data[i];
        if (!(g > 0)) throw input_error("depth_metrics: nonpositive ground truth on mask");
        if (!(p > 0)) throw input_error("depth_metrics: nonpositive prediction on mask");
        const double e = p - g;
        r.abs_rel += std::abs(e) / g;
        r.sq_rel += e * e / g;
        r.rmse += e * e;
        const double le = std::log(p) - std::log(g);
        r.rmse_log += le * le;
        const double ratio = std::max(p / g, g / p);
        if (ratio < 1.25) ++d1;
        if (ratio < 1.25 * 1.25) ++d2;
        if (ratio < 1.25 * 1.25 * 1.25) ++d3;
    }
    const double n = static_cast<double>(idx.size());
    r.abs_rel /= n;
    r.sq_rel /= n;
    r.rmse = std::sqrt(r.rmse / n);
    r.rmse_log = std::sqrt(r.rmse_log / n);
    r.delta1 = d1 / n;
    r.delta2 = d2 / n;
    r.delta3 = d3 / n;
    return r;
}

std::string MetricReport::to_line() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "abs_rel=%.9g sq_rel=%.9g rmse=%.9g rmse_log=%.9g delta1=%.9g delta2=%.9g "
                  "delta3=%.9g",
                  abs_rel, sq_rel, rmse, rmse_log, delta1, delta2, delta3);
    return buf;
}

std::string MetricReport::to_row() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.3f  %.3f  %.4f  %.4f  %.2f%%  %.2f%%  %.2f%%", abs_rel,
                  sq_rel, rmse, rmse_log, 100 * delta1, 100 * delta2, 100 * delta3);
    return buf;
}

}  // namespace pano
