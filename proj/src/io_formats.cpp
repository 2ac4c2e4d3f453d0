#include "pano/io_formats.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace pano {

namespace {
std::string offset_msg(const std::string& path, const char* what, long offset) {
    std::ostringstream os;
    os << path << ": " << what << " at byte offset " << offset;
    return os.str();
}

std::vector<char> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error(path + ": cannot open for reading");
    std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return buf;
}

void write_all(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error(path + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw input_error(path + ": write failed");
}

uint32_t read_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void append_u32le(std::string& s, uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}

float read_f32le(const unsigned char* p) {
    const uint32_t u = read_u32le(p);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

void append_f32le(std::string& s, float f) {
    uint32_t u;
    std::memcpy(&u, &f, 4);
    append_u32le(s, u);
}
}  // namespace

Image pfm_read(const std::string& path) {
    const std::vector<char> buf = read_all(path);
    size_t pos = 0;
    auto next_token = [&](const char* what) {
        while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        const size_t start = pos;
        while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        if (start == pos)
            throw input_error(offset_msg(path, what, static_cast<long>(start)));
        return std::string(buf.begin() + start, buf.begin() + pos);
    };
    const std::string magic = next_token("missing PFM magic");
    if (magic == "PF")
        throw input_error(path + ": color PFM unsupported, expected grayscale \"Pf\"");
    if (magic != "Pf") throw input_error(offset_msg(path, "bad PFM magic", 0));
    int w, h;
    double scale;
    try {
        w = std::stoi(next_token("missing width"));
        h = std::stoi(next_token("missing height"));
        scale = std::stod(next_token("missing scale"));
    } catch (const std::exception&) {
        throw input_error(offset_msg(path, "malformed PFM header", static_cast<long>(pos)));
    }
    if (w <= 0 || h <= 0)
        throw input_error(offset_msg(path, "nonpositive PFM dimensions", static_cast<long>(pos)));
    if (scale > 0)
        throw input_error(path + ": big-endian PFM (positive scale) unsupported");
    if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos])))
        throw input_error(offset_msg(path, "missing header terminator", static_cast<long>(pos)));
    ++pos;  // single whitespace separates header and payload
    const size_t need = static_cast<size_t>(w) * h * 4;
    if (buf.size() - pos < need)
        throw input_error(offset_msg(path, "truncated PFM payload", static_cast<long>(buf.size())));
    Image g(w, h, 1);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data()) + pos;
    // Disk rows run bottom-to-top.
    for (int y = h - 1; y >= 0; --y)
        for (int x = 0; x < w; ++x, p += 4) g.at(x, y) = read_f32le(p);
    return g;
}

void pfm_write(const std::string& path, const Image& grid) {
    if (grid.channels != 1) throw input_error("pfm_write: grid must be single-channel");
    std::string out;
    char header[64];
    std::snprintf(header, sizeof(header), "Pf\n%d %d\n-1.0\n", grid.width, grid.height);
    out += header;
    for (int y = grid.height - 1; y >= 0; --y)
        for (int x = 0; x < grid.width; ++x) append_f32le(out, grid.at(x, y));
    write_all(path, out);
}

Image flow_read(const std::string& path) {
    const std::vector<char> buf = read_all(path);
    if (buf.size() < 12 || std::memcmp(buf.data(), "OFLO", 4) != 0)
        throw input_error(offset_msg(path, "bad OFLO magic", 0));
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    const uint32_t w = read_u32le(p + 4);
    const uint32_t h = read_u32le(p + 8);
    const size_t expected = 12 + static_cast<size_t>(w) * h * 8;
    if (buf.size() != expected) {
        std::ostringstream os;
        os << path << ": OFLO size mismatch, expected " << expected << " bytes, got "
           << buf.size();
        throw input_error(os.str());
    }
    Image flow(static_cast<int>(w), static_cast<int>(h), 2);
    p += 12;
    for (size_t i = 0; i < flow.data.size(); ++i, p += 4) flow.data[i] = read_f32le(p);
    return flow;
}

void flow_write(const std::string& path, const Image& flow) {
    if (flow.channels != 2) throw input_error("flow_write: flow must have 2 channels");
    std::string out = "OFLO";
    append_u32le(out, static_cast<uint32_t>(flow.width));
    append_u32le(out, static_cast<uint32_t>(flow.height));
    for (float v : flow.data) append_f32le(out, v);
    write_all(path, out);
}

std::vector<PoseRecord> poses_read_raw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error(path + ": cannot open for reading");
    std::vector<PoseRecord> out;
    std::set<int> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        PoseRecord rec;
        if (!(ls >> rec.index)) {
            if (ls.eof()) continue;  // blank or comment-only line
            throw input_error(path + ": non-numeric token on line " + std::to_string(lineno));
        }
        for (double* v : {&rec.translation.x, &rec.translation.y, &rec.translation.z,
                          &rec.quat[0], &rec.quat[1], &rec.quat[2], &rec.quat[3]})
            if (!(ls >> *v))
                throw input_error(path + ": non-numeric or missing token on line " +
                                  std::to_string(lineno));
        std::string rest;
        if (ls >> rest)
            throw input_error(path + ": trailing token on line " + std::to_string(lineno));
        if (!seen.insert(rec.index).second)
            throw input_error(path + ": duplicate frame index " + std::to_string(rec.index));
        const auto& q = rec.quat;
        const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        if (std::abs(n - 1.0) > 1e-3)
            throw input_error(path + ": quaternion norm " + std::to_string(n) + " on line " +
                              std::to_string(lineno) + " deviates beyond 1e-3");
        out.push_back(rec);
    }
    return out;
}

void poses_write_raw(const std::string& path, const std::vector<PoseRecord>& records) {
    std::ostringstream os;
    os << "# idx tx ty tz qx qy qz qw\n";
    char buf[256];
    for (const PoseRecord& rec : records) {
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                      rec.index, rec.translation.x, rec.translation.y, rec.translation.z,
                      rec.quat[0], rec.quat[1], rec.quat[2], rec.quat[3]);
        os << buf;
    }
    write_all(path, os.str());
}

std::vector<std::pair<int, CameraPose>> poses_read(const std::string& path) {
    std::vector<std::pair<int, CameraPose>> out;
    for (const PoseRecord& rec : poses_read_raw(path)) {
        const auto& q = rec.quat;
        const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        CameraPose pose;
        pose.rotation = quat_to_mat(q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        pose.translation = rec.translation;
        out.emplace_back(rec.index, pose);
    }
    return out;
}

void poses_write(const std::string& path, const std::vector<std::pair<int, CameraPose>>& poses) {
    std::vector<PoseRecord> records;
    for (const auto& [idx, pose] : poses) {
        PoseRecord rec;
        rec.index = idx;
        rec.translation = pose.translation;
        rec.quat = mat_to_quat(pose.rotation);
        records.push_back(rec);
    }
    poses_write_raw(path, records);
}

namespace {
Albedo parse_albedo(std::istringstream& ls, const std::string& path, int lineno) {
    std::string kind;
    if (!(ls >> kind))
        throw input_error(path + ": missing albedo on line " + std::to_string(lineno));
    Albedo a;
    auto num = [&](double& v) {
        if (!(ls >> v))
            throw input_error(path + ": malformed albedo on line " + std::to_string(lineno));
    };
    if (kind == "solid") {
        a.kind = Albedo::Kind::Solid;
        num(a.color.x);
        num(a.color.y);
        num(a.color.z);
    } else if (kind == "checker") {
        a.kind = Albedo::Kind::Checker;
        num(a.period);
        num(a.color.x);
        num(a.color.y);
        num(a.color.z);
        num(a.color2.x);
        num(a.color2.y);
        num(a.color2.z);
        if (!(a.period > 0))
            throw input_error(path + ": checker period must be positive on line " +
                              std::to_string(lineno));
    } else {
        throw input_error(path + ": unknown albedo kind '" + kind + "' on line " +
                          std::to_string(lineno));
    }
    return a;
}

void format_albedo(std::ostringstream& os, const Albedo& a) {
    if (a.kind == Albedo::Kind::Solid) {
        os << "solid " << a.color.x << " " << a.color.y << " " << a.color.z;
    } else {
        os << "checker " << a.period << " " << a.color.x << " " << a.color.y << " " << a.color.z
           << " " << a.color2.x << " " << a.color2.y << " " << a.color2.z;
    }
}
}  // namespace

Scene scene_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error(path + ": cannot open for reading");
    Scene scene;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        auto num = [&](double& v) {
            if (!(ls >> v))
                throw input_error(path + ": malformed primitive on line " +
                                  std::to_string(lineno));
        };
        Primitive p;
        if (kind == "sky") {
            p.kind = Primitive::Kind::Sky;
            num(p.radius);
        } else if (kind == "plane") {
            p.kind = Primitive::Kind::Plane;
            num(p.point.x);
            num(p.point.y);
            num(p.point.z);
            num(p.extent.x);
            num(p.extent.y);
            num(p.extent.z);
        } else if (kind == "sphere") {
            p.kind = Primitive::Kind::Sphere;
            num(p.point.x);
            num(p.point.y);
            num(p.point.z);
            num(p.radius);
        } else if (kind == "box") {
            p.kind = Primitive::Kind::Box;
            num(p.point.x);
            num(p.point.y);
            num(p.point.z);
            num(p.extent.x);
            num(p.extent.y);
            num(p.extent.z);
        } else {
            throw input_error(path + ": unknown primitive '" + kind + "' on line " +
                              std::to_string(lineno));
        }
        p.albedo = parse_albedo(ls, path, lineno);
        scene.primitives.push_back(p);
    }
    if (scene.primitives.empty()) throw input_error(path + ": scene has no primitives");
    return scene;
}

void scene_write(const std::string& path, const Scene& scene) {
    std::ostringstream os;
    os.precision(17);
    for (const Primitive& p : scene.primitives) {
        switch (p.kind) {
            case Primitive::Kind::Sky: os << "sky " << p.radius << " "; break;
            case Primitive::Kind::Plane:
                os << "plane " << p.point.x << " " << p.point.y << " " << p.point.z << " "
                   << p.extent.x << " " << p.extent.y << " " << p.extent.z << " ";
                break;
            case Primitive::Kind::Sphere:
                os << "sphere " << p.point.x << " " << p.point.y << " " << p.point.z << " "
                   << p.radius << " ";
                break;
            case Primitive::Kind::Box:
                os << "box " << p.point.x << " " << p.point.y << " " << p.point.z << " "
                   << p.extent.x << " " << p.extent.y << " " << p.extent.z << " ";
                break;
        }
        format_albedo(os, p.albedo);
        os << "\n";
    }
    write_all(path, os.str());
}

Image png_read_rgb(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw input_error(path + ": cannot open for reading");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw input_error(path + ": PNG decode failed");
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    std::vector<unsigned char> row(static_cast<size_t>(w) * 3);
    Image img(w, h, 3);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = static_cast<float>(row[3 * x + c]) / 255.f;
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

void png_write_rgb(const std::string& path, const Image& rgb) {
    if (rgb.channels != 3) throw input_error("png_write_rgb: image must have 3 channels");
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw input_error(path + ": cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw input_error(path + ": PNG encode failed");
    }
    png_init_io(png, fp);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, rgb.width, rgb.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<unsigned char> row(static_cast<size_t>(rgb.width) * 3);
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x)
            for (int c = 0; c < 3; ++c) {
                const float v = std::clamp(rgb.at(x, y, c), 0.f, 1.f);
                row[3 * x + c] = static_cast<unsigned char>(std::lround(v * 255.f));
            }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

std::map<std::string, std::string> meta_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error(path + ": cannot open for reading");
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw input_error(path + ": malformed meta line '" + line + "'");
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

void meta_write(const std::string& path, const std::map<std::string, std::string>& meta) {
    std::ostringstream os;
    for (const auto& [k, v] : meta) os << k << "=" << v << "\n";
    write_all(path, os.str());
}

namespace {
std::string indexed(const std::string& dir, const char* fmt, int a, int b = -1) {
    char buf[64];
    if (b < 0)
        std::snprintf(buf, sizeof(buf), fmt, a);
    else
        std::snprintf(buf, sizeof(buf), fmt, a, b);
    return (std::filesystem::path(dir) / buf).string();
}
}  // namespace

std::string frame_path(const std::string& dir, int i) {
    return indexed(dir, "frame_%04d.png", i);
}
std::string depth_path(const std::string& dir, int i) {
    return indexed(dir, "depth_%04d.pfm", i);
}
std::string flow_path(const std::string& dir, int j, int k) {
    return indexed(dir, "flow_%04d_%04d.oflo", j, k);
}

void write_benchmark(const BenchmarkSequence& seq, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const int frames = static_cast<int>(seq.rgb.size());
    for (int i = 0; i < frames; ++i) {
        png_write_rgb(frame_path(dir, i), seq.rgb[i]);
        pfm_write(depth_path(dir, i), seq.depth[i]);
    }
    for (const auto& [jk, flow] : seq.flows) flow_write(flow_path(dir, jk.first, jk.second), flow);
    std::vector<std::pair<int, CameraPose>> poses;
    for (int i = 0; i < frames; ++i) poses.emplace_back(i, seq.poses[i]);
    poses_write((std::filesystem::path(dir) / "poses.txt").string(), poses);
    scene_write((std::filesystem::path(dir) / "scene.txt").string(), seq.scene);
    char num[64];
    std::map<std::string, std::string> meta;
    meta["width"] = std::to_string(seq.rgb.empty() ? 0 : seq.rgb[0].width);
    meta["height"] = std::to_string(seq.rgb.empty() ? 0 : seq.rgb[0].height);
    meta["frames"] = std::to_string(frames);
    std::snprintf(num, sizeof(num), "%.17g", seq.baseline);
    meta["baseline"] = num;
    meta["scale"] = "1";
    meta_write((std::filesystem::path(dir) / "meta.txt").string(), meta);
}

LoadedSequence load_sequence(const std::string& dir) {
    LoadedSequence out;
    const auto meta_path = std::filesystem::path(dir) / "meta.txt";
    if (!std::filesystem::exists(meta_path))
        throw input_error(meta_path.string() + ": missing");
    out.meta = meta_read(meta_path.string());
    auto meta_num = [&](const char* key) {
        const auto it = out.meta.find(key);
        if (it == out.meta.end())
            throw input_error(meta_path.string() + ": missing key '" + std::string(key) + "'");
        return std::stod(it->second);
    };
    out.width = static_cast<int>(meta_num("width"));
    out.height = static_cast<int>(meta_num("height"));
    out.frames = static_cast<int>(meta_num("frames"));
    out.baseline = meta_num("baseline");

    const auto pose_list = poses_read((std::filesystem::path(dir) / "poses.txt").string());
    out.poses.resize(out.frames);
    std::vector<bool> have(out.frames, false);
    for (const auto& [idx, pose] : pose_list) {
        if (idx < 0 || idx >= out.frames)
            throw input_error(dir + ": pose index " + std::to_string(idx) + " out of range");
        out.poses[idx] = pose;
        have[idx] = true;
    }
    for (int i = 0; i < out.frames; ++i)
        if (!have[i]) throw input_error(dir + ": missing pose for frame " + std::to_string(i));

    for (int i = 0; i < out.frames; ++i) {
        Image img = png_read_rgb(frame_path(dir, i));
        if (img.width != out.width || img.height != out.height)
            throw input_error(frame_path(dir, i) + ": size differs from meta.txt");
        out.images.push_back(std::move(img));
        const std::string dp = depth_path(dir, i);
        if (std::filesystem::exists(dp)) {
            Image d = pfm_read(dp);
            if (d.width != out.width || d.height != out.height)
                throw input_error(dp + ": size differs from meta.txt");
            out.gt_depth.push_back(std::move(d));
        } else {
            out.gt_depth.emplace_back();
        }
    }
    for (int j = 0; j < out.frames; ++j)
        for (int k = 0; k < out.frames; ++k) {
            if (j == k) continue;
            const std::string fp = flow_path(dir, j, k);
            if (std::filesystem::exists(fp)) {
                Image f = flow_read(fp);
                if (f.width != out.width || f.height != out.height)
                    throw input_error(fp + ": size differs from meta.txt");
                out.flows[{j, k}] = std::move(f);
            }
        }
    return out;
}

}  // namespace pano
