#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pano/errors.hpp"

namespace pano {

/// Row-major raster of float samples, channel-interleaved. Row 0 is the top
/// (north-pole edge for full-sphere equirectangular grids).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.f)
        : width(w), height(h), channels(c),
          data(static_cast<size_t>(w) * h * c, fill) {}

    bool empty() const { return data.empty(); }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

    float& at(int x, int y, int c = 0) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c = 0) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    bool all_finite() const {
        for (float v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

using ErpGrid = Image;

/// Six square face rasters ordered (+x, -x, +y, -y, +z, -z).
struct CubemapGrid {
    int face_size = 0;
    int channels = 1;
    std::array<Image, 6> faces;

    CubemapGrid() = default;
    CubemapGrid(int f, int c, float fill = 0.f) : face_size(f), channels(c) {
        for (auto& face : faces) face = Image(f, f, c, fill);
    }
};

inline void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b))
        throw input_error(std::string(what) + ": shape mismatch");
}

}  // namespace pano
