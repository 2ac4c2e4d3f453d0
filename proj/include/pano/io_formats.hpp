#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pano/alignment.hpp"
#include "pano/grid.hpp"
#include "pano/synth.hpp"

namespace pano {

/// Standard PFM, grayscale ("Pf"): dimensions, scale -1.0 (little-endian),
/// 32-bit float rows stored bottom-to-top. Round trips are bit-exact.
Image pfm_read(const std::string& path);
void pfm_write(const std::string& path, const Image& grid);

/// Flow container: magic "OFLO", u32 width, u32 height (little-endian), then
/// row-major top-to-bottom interleaved f32 (du, dv) pairs.
Image flow_read(const std::string& path);
void flow_write(const std::string& path, const Image& flow);

/// Text lines `idx tx ty tz qx qy qz qw` (camera-to-world, unit quaternion),
/// `#` comments. Quaternion norm deviation beyond 1e-3 is an error, as are
/// duplicate indices.
struct PoseRecord {
    int index = 0;
    Vec3 translation;
    std::array<double, 4> quat{0, 0, 0, 1};  // (qx, qy, qz, qw), as in the file
};

/// Raw records preserve the parsed doubles verbatim, so read -> write is
/// byte-exact (%.17g round trips doubles).
std::vector<PoseRecord> poses_read_raw(const std::string& path);
void poses_write_raw(const std::string& path, const std::vector<PoseRecord>& records);

/// Matrix-form convenience wrappers; quaternions are normalized on read and
/// rederived from the rotation on write.
std::vector<std::pair<int, CameraPose>> poses_read(const std::string& path);
void poses_write(const std::string& path, const std::vector<std::pair<int, CameraPose>>& poses);

/// One primitive per line:
///   sky <radius> <albedo>
///   plane <px py pz> <nx ny nz> <albedo>
///   sphere <cx cy cz> <radius> <albedo>
///   box <minx miny minz> <maxx maxy maxz> <albedo>
/// with <albedo> = solid <r g b> | checker <period> <r g b> <r g b>.
Scene scene_read(const std::string& path);
void scene_write(const std::string& path, const Scene& scene);

/// 8-bit RGB PNG; float channels in [0, 1].
Image png_read_rgb(const std::string& path);
void png_write_rgb(const std::string& path, const Image& rgb);

/// key=value lines.
std::map<std::string, std::string> meta_read(const std::string& path);
void meta_write(const std::string& path, const std::map<std::string, std::string>& meta);

/// Sequence directory layout: frame_%04d.png, depth_%04d.pfm,
/// flow_%04d_%04d.oflo, poses.txt, scene.txt (optional), meta.txt.
std::string frame_path(const std::string& dir, int i);
std::string depth_path(const std::string& dir, int i);
std::string flow_path(const std::string& dir, int j, int k);

void write_benchmark(const BenchmarkSequence& seq, const std::string& dir);

struct LoadedSequence {
    int width = 0, height = 0, frames = 0;
    double baseline = 0;
    std::vector<Image> images;
    std::vector<CameraPose> poses;
    std::vector<Image> gt_depth;                  // may be empty per frame
    std::map<std::pair<int, int>, Image> flows;   // whatever flow files exist
    std::map<std::string, std::string> meta;
};
LoadedSequence load_sequence(const std::string& dir);

}  // namespace pano
