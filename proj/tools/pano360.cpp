// pano360: spherical depth-consistency toolkit CLI.
//
// Pipeline stages (render -> adjust -> loss/optimize -> eval) communicate only
// through sequence directories (frame_%04d.png, depth_%04d.pfm,
// flow_%04d_%04d.oflo, poses.txt, meta.txt).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pano/alignment.hpp"
#include "pano/disparity.hpp"
#include "pano/io_formats.hpp"
#include "pano/objectives.hpp"
#include "pano/optimizer.hpp"
#include "pano/sphere_geom.hpp"
#include "pano/synth.hpp"
#include "pano/temporal.hpp"

namespace fs = std::filesystem;
using namespace pano;

namespace {

struct GlobalOpts {
    int width = 512;
    int height = 256;
    uint64_t seed = 0;
    int threads = 1;
    std::string weight_mode = "paper";
};

WeightMode parse_weight_mode(const std::string& s) {
    if (s == "paper") return WeightMode::Paper;
    if (s == "polar_only") return WeightMode::PolarOnly;
    throw input_error("unknown weight mode '" + s + "' (expected paper|polar_only)");
}

void echo_config(const std::string& cmd, const GlobalOpts& g, const std::string& extra = "") {
    std::cout << "pano360 " << cmd << " width=" << g.width << " height=" << g.height
              << " seed=" << g.seed << " threads=" << g.threads << " weight-mode=" << g.weight_mode
              << (extra.empty() ? "" : " ") << extra << "\n";
}

// Relative translation of an aligned pair must lie along +z.
double aligned_baseline(const CameraPose& a, const CameraPose& b) {
    const Vec3 t = b.translation - a.translation;
    if (std::hypot(t.x, t.y) > 1e-6 * std::max(1.0, norm(t)))
        throw input_error("pair is not axis-aligned; run `pano360 adjust` first");
    return t.z;
}

std::vector<std::pair<int, int>> needed_flow_pairs(int frames) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i + 1 < frames; ++i) {
        pairs.emplace_back(i, i + 1);
        pairs.emplace_back(i + 1, i);
    }
    return pairs;
}

int run_render(const GlobalOpts& g, const std::string& scene_file, int frames,
               const std::string& out_dir) {
    BenchmarkSequence seq;
    if (!scene_file.empty()) {
        const Scene scene = scene_read(scene_file);
        seq.scene = scene;
        // Pick a frame spacing from a coarse depth probe, the same rule the
        // procedural generator uses.
        Image probe_rgb, probe_depth;
        render_erp(scene, CameraPose{}, 64, 32, probe_rgb, probe_depth, g.threads);
        std::vector<float> vals(probe_depth.data);
        std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
        const double median = vals[vals.size() / 2];
        const double min_depth =
            *std::min_element(probe_depth.data.begin(), probe_depth.data.end());
        seq.baseline = std::min(0.02 * median, 0.045 * min_depth);
        for (int i = 0; i < frames; ++i) {
            CameraPose pose;
            pose.translation = {0, 0, i * seq.baseline};
            seq.poses.push_back(pose);
            Image rgb, depth;
            render_erp(scene, pose, g.width, g.height, rgb, depth, g.threads);
            seq.rgb.push_back(std::move(rgb));
            seq.depth.push_back(std::move(depth));
        }
        for (int i = 0; i + 1 < frames; ++i) {
            seq.flows[{i, i + 1}] =
                render_flow(scene, seq.poses[i], seq.poses[i + 1], g.width, g.height, g.threads);
            seq.flows[{i + 1, i}] =
                render_flow(scene, seq.poses[i + 1], seq.poses[i], g.width, g.height, g.threads);
        }
    } else {
        seq = make_benchmark_sequence(g.seed, frames, g.width, g.height, g.threads);
    }
    write_benchmark(seq, out_dir);
    std::cout << "wrote " << seq.rgb.size() << " frames to " << out_dir
              << " (baseline=" << seq.baseline << ")\n";
    return 0;
}

int run_adjust(const GlobalOpts& g, const std::string& in_dir, int j, int k,
               const std::string& out_dir) {
    const LoadedSequence seq = load_sequence(in_dir);
    if (j < 0 || j >= seq.frames || k < 0 || k >= seq.frames || j == k)
        throw input_error("adjust: bad pair indices");
    const AlignmentResult ar = alignment_rotation(seq.poses[j], seq.poses[k]);
    const double yaw = -std::atan2(ar.rotation(0, 2), ar.rotation(0, 0));
    std::cout << "alignment yaw=" << yaw << " rad baseline=" << ar.baseline << "\n";

    fs::create_directories(out_dir);
    const int pair[2] = {j, k};
    std::vector<std::pair<int, CameraPose>> poses;
    for (int i = 0; i < 2; ++i) {
        const int f = pair[i];
        const Mat3 rot = ar.rotation * seq.poses[f].rotation;
        png_write_rgb(frame_path(out_dir, i), rotate_erp(seq.images[f], rot, g.threads));
        if (!seq.gt_depth[f].empty())
            pfm_write(depth_path(out_dir, i), rotate_erp(seq.gt_depth[f], rot, g.threads));
        CameraPose p;
        p.rotation = ar.rotation.transposed();
        p.translation = ar.rotation * seq.poses[f].translation;
        poses.emplace_back(i, p);
    }
    poses_write((fs::path(out_dir) / "poses.txt").string(), poses);
    // Flow fields cannot be resampled like images, so exact flow for the
    // rotated pair is re-rendered when the scene description is available.
    const fs::path scene_file = fs::path(in_dir) / "scene.txt";
    if (fs::exists(scene_file)) {
        const Scene scene = scene_read(scene_file.string());
        CameraPose pj, pk;
        pj.rotation = pk.rotation = ar.rotation.transposed();
        pj.translation = seq.poses[j].translation;
        pk.translation = seq.poses[k].translation;
        flow_write(flow_path(out_dir, 0, 1),
                   render_flow(scene, pj, pk, seq.width, seq.height, g.threads));
        flow_write(flow_path(out_dir, 1, 0),
                   render_flow(scene, pk, pj, seq.width, seq.height, g.threads));
        fs::copy_file(scene_file, fs::path(out_dir) / "scene.txt",
                      fs::copy_options::overwrite_existing);
    }
    char num[64];
    std::map<std::string, std::string> meta;
    meta["width"] = std::to_string(seq.width);
    meta["height"] = std::to_string(seq.height);
    meta["frames"] = "2";
    std::snprintf(num, sizeof(num), "%.17g", ar.baseline);
    meta["baseline"] = num;
    meta["scale"] = seq.meta.count("scale") ? seq.meta.at("scale") : "1";
    meta["source_pair"] = std::to_string(j) + " " + std::to_string(k);
    meta_write((fs::path(out_dir) / "meta.txt").string(), meta);
    return 0;
}

int run_loss(const GlobalOpts& g, const std::string& in_dir, int j, int k,
             const std::string& depth_file, bool geometric, bool temporal) {
    const LoadedSequence seq = load_sequence(in_dir);
    if (j < 0 || j >= seq.frames || k < 0 || k >= seq.frames || j == k)
        throw input_error("loss: bad pair indices");
    const double b = aligned_baseline(seq.poses[j], seq.poses[k]);
    Image depth;
    if (!depth_file.empty()) {
        depth = pfm_read(depth_file);
    } else if (!seq.gt_depth[j].empty()) {
        depth = seq.gt_depth[j];
    } else {
        throw input_error("loss: no --depth given and no depth PFM for frame " +
                          std::to_string(j));
    }
    const WeightMode mode = parse_weight_mode(g.weight_mode);
    const Image weight = distortion_weight(seq.width, seq.height, mode);
    if (geometric) {
        const WarpResult warp = reproject_frame(seq.images[j], depth, b);
        const GeometricLoss gl = geometric_loss(warp, seq.images[k], weight);
        std::cout << "geometric=" << gl.loss << " coverage=" << gl.coverage_fraction << "\n";
    }
    if (temporal) {
        const auto it = seq.flows.find({j, k});
        if (it == seq.flows.end())
            throw input_error("loss: missing flow file " + flow_path(in_dir, j, k));
        const double t = temporal_loss_displacement(depth, b, it->second, weight, nullptr,
                                                    g.threads);
        const WarpResult warp = flow_warp(seq.images[j], it->second);
        const double tp = temporal_loss_photometric(warp, seq.images[k]);
        std::cout << "temporal_displacement=" << t << " temporal_photometric=" << tp << "\n";
    }
    return 0;
}

int run_optimize(const GlobalOpts& g, const std::string& in_dir,
                 const std::vector<std::string>& init_files, int epochs, double step,
                 int downsample, const std::string& out_dir) {
    const LoadedSequence seq = load_sequence(in_dir);
    if (static_cast<int>(init_files.size()) != seq.frames)
        throw input_error("optimize: need one --init depth file per frame (" +
                          std::to_string(seq.frames) + ")");
    fs::create_directories(out_dir);
    if (epochs == 0) {
        // Bit-exact pass-through of the initial depth files.
        for (int i = 0; i < seq.frames; ++i) {
            std::ifstream in(init_files[i], std::ios::binary);
            if (!in) throw input_error(init_files[i] + ": cannot open for reading");
            std::ofstream out(depth_path(out_dir, i), std::ios::binary | std::ios::trunc);
            out << in.rdbuf();
        }
        std::ofstream trace((fs::path(out_dir) / "trace.txt").string());
        trace << "# epoch geometric temporal total\n";
        return 0;
    }

    OptSequence opt;
    for (int i = 0; i < seq.frames; ++i) {
        opt.images.push_back(seq.images[i]);
        opt.z_positions.push_back(
            aligned_baseline(seq.poses[0], seq.poses[i]));
    }
    for (const auto& [a, b] : needed_flow_pairs(seq.frames)) {
        const auto it = seq.flows.find({a, b});
        if (it == seq.flows.end())
            throw input_error("optimize: missing flow file " + flow_path(in_dir, a, b));
        opt.flows[{a, b}] = it->second;
    }
    std::vector<Image> init;
    for (const std::string& f : init_files) init.push_back(pfm_read(f));

    OptimizeConfig cfg;
    cfg.epochs = epochs;
    cfg.step_size = step;
    cfg.downsample = downsample;
    cfg.weight_mode = parse_weight_mode(g.weight_mode);
    cfg.threads = g.threads;

    const DepthParams params0 = make_depth_params(init, cfg.downsample, cfg.depth_min,
                                                  cfg.depth_max);
    std::vector<EpochRecord> trace;
    const DepthParams refined = optimize_sequence(opt, params0, cfg, &trace);

    for (int i = 0; i < seq.frames; ++i)
        pfm_write(depth_path(out_dir, i), render_depth(refined, i));
    std::ofstream tf((fs::path(out_dir) / "trace.txt").string());
    tf << "# epoch geometric temporal total\n";
    char line[160];
    for (const EpochRecord& r : trace) {
        std::snprintf(line, sizeof(line), "%d %.9g %.9g %.9g\n", r.epoch, r.geometric,
                      r.temporal, r.total);
        tf << line;
    }
    if (!trace.empty())
        std::cout << "loss " << trace.front().total << " -> " << trace.back().total << " over "
                  << epochs << " epochs\n";
    return 0;
}

int run_eval(const std::string& pred_file, const std::string& gt_file,
             const std::string& mask_file, const std::string& append_file) {
    const Image pred = pfm_read(pred_file);
    const Image gt = pfm_read(gt_file);
    Image mask;
    if (!mask_file.empty()) mask = pfm_read(mask_file);
    const MetricReport r = depth_metrics(pred, gt, mask);
    std::cout << r.to_line() << "\n";
    std::cout << "AbsRel  SqRel  RMSE    RMSElog d<1.25  d<1.25^2 d<1.25^3\n"
              << r.to_row() << "\n";
    if (!append_file.empty()) {
        std::ofstream out(append_file, std::ios::app);
        out << r.to_line() << "\n";
    }
    return 0;
}

// Cubemap image files are horizontal strips of the six faces in the fixed
// order (+x, -x, +y, -y, +z, -z).
int run_convert(const GlobalOpts& g, const std::string& in_file, const std::string& out_file,
                const std::string& to, int face_size) {
    const bool in_pfm = in_file.size() > 4 && in_file.substr(in_file.size() - 4) == ".pfm";
    const bool out_pfm = out_file.size() > 4 && out_file.substr(out_file.size() - 4) == ".pfm";
    Image in = in_pfm ? pfm_read(in_file) : png_read_rgb(in_file);
    Image out;
    if (to == "cubemap") {
        const int f = face_size > 0 ? face_size : in.width / 4;
        const CubemapGrid cm = erp_to_cubemap(in, f, g.threads);
        out = Image(6 * f, f, in.channels);
        for (int i = 0; i < 6; ++i)
            for (int y = 0; y < f; ++y)
                for (int x = 0; x < f; ++x)
                    for (int c = 0; c < in.channels; ++c)
                        out.at(i * f + x, y, c) = cm.faces[i].at(x, y, c);
    } else if (to == "erp") {
        if (in.width != 6 * in.height)
            throw input_error("convert: cubemap strip must be 6F x F");
        const int f = in.height;
        CubemapGrid cm(f, in.channels);
        for (int i = 0; i < 6; ++i)
            for (int y = 0; y < f; ++y)
                for (int x = 0; x < f; ++x)
                    for (int c = 0; c < in.channels; ++c)
                        cm.faces[i].at(x, y, c) = in.at(i * f + x, y, c);
        out = cubemap_to_erp(cm, g.width, g.height, g.threads);
    } else {
        throw input_error("convert: --to must be cubemap or erp");
    }
    if (out_pfm) {
        if (out.channels != 1) throw input_error("convert: PFM output needs 1-channel input");
        pfm_write(out_file, out);
    } else {
        if (out.channels != 3) throw input_error("convert: PNG output needs 3-channel input");
        png_write_rgb(out_file, out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical depth-consistency toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--width", g.width, "ERP width in pixels");
    app.add_option("--height", g.height, "ERP height in pixels");
    app.add_option("--seed", g.seed, "RNG seed for procedural scenes");
    app.add_option("--threads", g.threads, "worker threads (results are thread-count invariant)");
    app.add_option("--weight-mode", g.weight_mode, "distortion weight: paper|polar_only");

    auto* render = app.add_subcommand("render", "render a synthetic benchmark sequence");
    std::string scene_file, out_dir, in_dir;
    int frames = 5;
    render->add_option("--scene", scene_file, "scene description file (default: procedural)");
    render->add_option("--frames", frames, "number of frames");
    render->add_option("--out", out_dir, "output sequence directory")->required();

    std::vector<int> pair{0, 1};
    auto* adjust = app.add_subcommand("adjust", "rotate a frame pair into stereo alignment");
    adjust->add_option("--in", in_dir, "input sequence directory")->required();
    adjust->add_option("--pair", pair, "frame pair j k")->expected(2);
    adjust->add_option("--out", out_dir, "output directory")->required();

    auto* loss = app.add_subcommand("loss", "evaluate losses on an aligned pair");
    std::string depth_file;
    bool want_geo = false, want_temp = false;
    loss->add_option("--in", in_dir, "aligned sequence directory")->required();
    loss->add_option("--pair", pair, "frame pair j k")->expected(2);
    loss->add_option("--depth", depth_file, "depth PFM for the source frame (default: GT)");
    loss->add_flag("--geometric", want_geo, "print the geometric splat loss");
    loss->add_flag("--temporal", want_temp, "print the temporal losses");

    auto* optimize = app.add_subcommand("optimize", "test-time depth refinement");
    std::vector<std::string> init_files;
    int epochs = 10, downsample = 4;
    double step = 0.05;
    optimize->add_option("--in", in_dir, "aligned sequence directory")->required();
    optimize->add_option("--init", init_files, "initial depth PFM per frame")->required();
    optimize->add_option("--epochs", epochs, "refinement epochs");
    optimize->add_option("--step", step, "log-depth step size");
    optimize->add_option("--downsample", downsample, "parameter grid downsample factor");
    optimize->add_option("--out", out_dir, "output directory")->required();

    auto* eval = app.add_subcommand("eval", "depth metrics between PFM maps");
    std::string pred_file, gt_file, mask_file, append_file;
    eval->add_option("--pred", pred_file, "predicted depth PFM")->required();
    eval->add_option("--gt", gt_file, "ground-truth depth PFM")->required();
    eval->add_option("--mask", mask_file, "validity mask PFM (nonzero = valid)");
    eval->add_option("--append", append_file, "append the metric line to this file");

    auto* convert = app.add_subcommand("convert", "ERP <-> cubemap image conversion");
    std::string conv_in, conv_out, conv_to;
    int face_size = 0;
    convert->add_option("--in", conv_in, "input image (PNG or PFM)")->required();
    convert->add_option("--out", conv_out, "output image")->required();
    convert->add_option("--to", conv_to, "target projection: cubemap|erp")->required();
    convert->add_option("--face-size", face_size, "cubemap face size (default width/4)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (render->parsed()) {
            echo_config("render", g);
            return run_render(g, scene_file, frames, out_dir);
        }
        if (adjust->parsed()) {
            echo_config("adjust", g);
            return run_adjust(g, in_dir, pair[0], pair[1], out_dir);
        }
        if (loss->parsed()) {
            echo_config("loss", g);
            if (!want_geo && !want_temp) want_geo = true;
            return run_loss(g, in_dir, pair[0], pair[1], depth_file, want_geo, want_temp);
        }
        if (optimize->parsed()) {
            echo_config("optimize", g);
            return run_optimize(g, in_dir, init_files, epochs, step, downsample, out_dir);
        }
        if (eval->parsed()) {
            echo_config("eval", g);
            return run_eval(pred_file, gt_file, mask_file, append_file);
        }
        if (convert->parsed()) {
            echo_config("convert", g);
            return run_convert(g, conv_in, conv_out, conv_to, face_size);
        }
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
