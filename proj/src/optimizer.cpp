#include "pano/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pano/temporal.hpp"

namespace pano {

namespace {
// Bilinear weights of the coarse neighbors of full-res pixel (x, y):
// horizontal wrap, vertical clamp, matching render_depth exactly.
struct CoarseTaps {
    int x0, x1, y0, y1;
    double fx, fy;
};

CoarseTaps coarse_taps(const DepthParams& p, int x, int y) {
    double cx = (x + 0.5) / p.factor - 0.5;
    double cy = std::clamp((y + 0.5) / p.factor - 0.5, 0.0,
                           static_cast<double>(p.coarse_height - 1));
    cx = std::fmod(cx, static_cast<double>(p.coarse_width));
    if (cx < 0) cx += p.coarse_width;
    CoarseTaps t;
    t.x0 = static_cast<int>(cx);
    t.y0 = static_cast<int>(cy);
    t.x1 = (t.x0 + 1) % p.coarse_width;
    t.y1 = std::min(t.y0 + 1, p.coarse_height - 1);
    t.fx = cx - t.x0;
    t.fy = cy - t.y0;
    return t;
}

std::vector<std::pair<int, int>> select_pairs(int frames, PairPolicy policy) {
    if (frames < 2)
        throw input_error("combined_loss: need at least 2 frames to form pairs");
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i + 1 < frames; ++i) {
        pairs.emplace_back(i, i + 1);
        if (policy == PairPolicy::ConsecutiveBidirectional) pairs.emplace_back(i + 1, i);
    }
    return pairs;
}

const Image& flow_for(const OptSequence& seq, int j, int k) {
    const auto it = seq.flows.find({j, k});
    if (it == seq.flows.end())
        throw input_error("combined_loss: missing flow for pair " + std::to_string(j) + "->" +
                          std::to_string(k));
    return it->second;
}

struct EvalResult {
    LossBreakdown breakdown;
    double geometric_sum = 0;
    double temporal_sum = 0;
    std::vector<std::vector<double>> grad;  // per frame, coarse cells
};

EvalResult evaluate(const OptSequence& seq, const DepthParams& params, const OptimizeConfig& cfg,
                    bool want_grad) {
    const auto pairs = select_pairs(static_cast<int>(seq.images.size()), cfg.policy);
    if (static_cast<int>(seq.z_positions.size()) != static_cast<int>(seq.images.size()))
        throw input_error("combined_loss: z_positions/frames mismatch");
    if (params.frames() != static_cast<int>(seq.images.size()))
        throw input_error("combined_loss: params/frames mismatch");

    const int w = params.full_width, h = params.full_height;
    const Image weight = distortion_weight(w, h, cfg.weight_mode);
    const double inv_pairs = 1.0 / static_cast<double>(pairs.size());

    EvalResult res;
    if (want_grad)
        res.grad.assign(params.log_depth.size(),
                        std::vector<double>(params.log_depth[0].size(), 0.0));

    std::vector<Image> depth(seq.images.size());
    for (size_t f = 0; f < seq.images.size(); ++f) depth[f] = render_depth(params, static_cast<int>(f));

    for (const auto& [j, k] : pairs) {
        const double b = seq.z_positions[k] - seq.z_positions[j];
        Image geo_grad, tmp_grad;
        const double geo =
            geometric_objective(depth[j], seq.images[j], seq.images[k], b, cfg.weight_mode,
                                want_grad ? &geo_grad : nullptr, cfg.threads);
        const Image& flow = flow_for(seq, j, k);
        const double tmp = temporal_loss_displacement(depth[j], b, flow, weight,
                                                      want_grad ? &tmp_grad : nullptr, cfg.threads);
        if (!std::isfinite(geo) || !std::isfinite(tmp))
            throw numerical_error("combined_loss: non-finite loss for pair " + std::to_string(j) +
                                  "->" + std::to_string(k));
        res.breakdown.pairs.push_back({j, k, geo, tmp});
        res.geometric_sum += geo * inv_pairs;
        res.temporal_sum += tmp * inv_pairs;
        if (want_grad) {
            auto& g = res.grad[j];
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const double gf = cfg.weight_geometric * geo_grad.at(x, y) +
                                      cfg.weight_temporal * tmp_grad.at(x, y);
                    if (gf == 0) continue;
                    if (!std::isfinite(gf))
                        throw numerical_error("combined_loss: non-finite gradient for pair " +
                                              std::to_string(j) + "->" + std::to_string(k) +
                                              " at pixel (" + std::to_string(x) + "," +
                                              std::to_string(y) + ")");
                    // Chain through depth = exp(upsampled log-depth).
                    const double gr = gf * depth[j].at(x, y) * inv_pairs;
                    const CoarseTaps t = coarse_taps(params, x, y);
                    g[t.y0 * params.coarse_width + t.x0] += gr * (1 - t.fx) * (1 - t.fy);
                    g[t.y0 * params.coarse_width + t.x1] += gr * t.fx * (1 - t.fy);
                    g[t.y1 * params.coarse_width + t.x0] += gr * (1 - t.fx) * t.fy;
                    g[t.y1 * params.coarse_width + t.x1] += gr * t.fx * t.fy;
                }
            }
        }
    }
    res.breakdown.total =
        cfg.weight_geometric * res.geometric_sum + cfg.weight_temporal * res.temporal_sum;
    return res;
}
}  // namespace

DepthParams make_depth_params(const std::vector<Image>& init_depth, int factor, double depth_min,
                              double depth_max) {
    if (init_depth.empty()) throw input_error("make_depth_params: no frames");
    const int w = init_depth[0].width, h = init_depth[0].height;
    if (factor < 1 || w % factor != 0 || h % factor != 0)
        throw input_error("make_depth_params: resolution must be divisible by the factor");
    DepthParams p;
    p.full_width = w;
    p.full_height = h;
    p.factor = factor;
    p.coarse_width = w / factor;
    p.coarse_height = h / factor;
    const double lo = std::log(depth_min), hi = std::log(depth_max);
    for (const Image& d : init_depth) {
        if (d.width != w || d.height != h || d.channels != 1)
            throw input_error("make_depth_params: inconsistent init depth shapes");
        std::vector<double> grid(static_cast<size_t>(p.coarse_width) * p.coarse_height);
        for (int cy = 0; cy < p.coarse_height; ++cy) {
            for (int cx = 0; cx < p.coarse_width; ++cx) {
                const int x = std::min(cx * factor + factor / 2, w - 1);
                const int y = std::min(cy * factor + factor / 2, h - 1);
                const double v = d.at(x, y);
                if (!(v > 0) || !std::isfinite(v))
                    throw input_error("make_depth_params: init depth must be positive and finite");
                grid[cy * p.coarse_width + cx] = std::clamp(std::log(v), lo, hi);
            }
        }
        p.log_depth.push_back(std::move(grid));
    }
    return p;
}

Image render_depth(const DepthParams& p, int frame) {
    const auto& grid = p.log_depth.at(frame);
    Image out(p.full_width, p.full_height, 1);
    for (int y = 0; y < p.full_height; ++y) {
        for (int x = 0; x < p.full_width; ++x) {
            const CoarseTaps t = coarse_taps(p, x, y);
            const double v00 = grid[t.y0 * p.coarse_width + t.x0];
            const double v10 = grid[t.y0 * p.coarse_width + t.x1];
            const double v01 = grid[t.y1 * p.coarse_width + t.x0];
            const double v11 = grid[t.y1 * p.coarse_width + t.x1];
            const double top = (1 - t.fx) * v00 + t.fx * v10;
            const double bot = (1 - t.fx) * v01 + t.fx * v11;
            out.at(x, y) = static_cast<float>(std::exp((1 - t.fy) * top + t.fy * bot));
        }
    }
    return out;
}

LossBreakdown combined_loss(const OptSequence& seq, const DepthParams& params,
                            const OptimizeConfig& cfg) {
    return evaluate(seq, params, cfg, false).breakdown;
}

DepthParams optimize_sequence(const OptSequence& seq, const DepthParams& init,
                              const OptimizeConfig& cfg, std::vector<EpochRecord>* trace) {
    if (cfg.epochs < 0 || !(cfg.step_size > 0))
        throw input_error("optimize_sequence: invalid config");
    if (trace) trace->clear();
    if (cfg.epochs == 0) return init;

    const double lo = std::log(cfg.depth_min), hi = std::log(cfg.depth_max);
    DepthParams params = init;

    EvalResult cur = evaluate(seq, params, cfg, true);
    if (trace)
        trace->push_back({0, cur.geometric_sum, cur.temporal_sum, cur.breakdown.total, 0.0});

    double step = cfg.step_size;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double gmax = 0;
        for (const auto& g : cur.grad)
            for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax > 0) {
            bool accepted = false;
            for (int halving = 0; halving <= cfg.max_halvings && !accepted; ++halving) {
                DepthParams cand = params;
                for (size_t f = 0; f < cand.log_depth.size(); ++f)
                    for (size_t i = 0; i < cand.log_depth[f].size(); ++i) {
                        const double gv = cur.grad[f][i];
                        const double sgn = (gv > 0) - (gv < 0);
                        cand.log_depth[f][i] =
                            std::clamp(cand.log_depth[f][i] - step * sgn, lo, hi);
                    }
                EvalResult next = evaluate(seq, cand, cfg, true);
                if (next.breakdown.total <= cur.breakdown.total) {
                    params = std::move(cand);
                    cur = std::move(next);
                    accepted = true;
                } else {
                    step *= 0.5;
                }
            }
        }
        if (trace)
            trace->push_back({epoch, cur.geometric_sum, cur.temporal_sum, cur.breakdown.total,
                              step});
    }
    return params;
}

}  // namespace pano
