#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chess {

/// Row-major 2D pixel buffer with value semantics.
template <typename T>
class Image {
public:
    Image() = default;

    Image(int width, int height, T fill = T{})
        : width_(width),
          height_(height),
          pixels_(check_dims(width, height), fill) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    T& operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return pixels_[index(x, y)]; }

    T& at(int x, int y) {
        if (!in_bounds(x, y))
            throw std::out_of_range("Image::at: coordinate outside image");
        return pixels_[index(x, y)];
    }
    const T& at(int x, int y) const {
        if (!in_bounds(x, y))
            throw std::out_of_range("Image::at: coordinate outside image");
        return pixels_[index(x, y)];
    }

    /// Read with coordinates clamped to the border.
    T clamped(int x, int y) const noexcept {
        x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
        y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
        return pixels_[index(x, y)];
    }

    T* row(int y) noexcept { return pixels_.data() + static_cast<std::size_t>(y) * width_; }
    const T* row(int y) const noexcept {
        return pixels_.data() + static_cast<std::size_t>(y) * width_;
    }

    T* data() noexcept { return pixels_.data(); }
    const T* data() const noexcept { return pixels_.data(); }

    std::vector<T>& pixels() noexcept { return pixels_; }
    const std::vector<T>& pixels() const noexcept { return pixels_; }

    bool operator==(const Image&) const = default;

private:
    static std::size_t check_dims(int width, int height) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("Image: width and height must be >= 1");
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> pixels_;
};

using GrayImage = Image<std::uint8_t>;
using ResponseImage = Image<std::int32_t>;
using FloatImage = Image<float>;
using BoolImage = Image<std::uint8_t>;

struct Pixel {
    int x = 0;
    int y = 0;
    bool operator==(const Pixel&) const = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// ---------------------------------------------------------------------------
// Binary PGM (P5) I/O, maxval 255.

namespace detail {

inline int next_pgm_token(std::istream& in) {
    // Skips whitespace and '#' comment lines, returns a non-negative integer.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c))
        throw std::runtime_error("load_pgm: malformed header");
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1 << 30) throw std::runtime_error("load_pgm: header value out of range");
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(value);
}

} // namespace detail

inline GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_pgm: cannot open " + path);

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5')
        throw std::runtime_error("load_pgm: not a binary PGM (P5) file: " + path);

    const int width = detail::next_pgm_token(in);
    const int height = detail::next_pgm_token(in);
    const int maxval = detail::next_pgm_token(in);
    if (maxval != 255)
        throw std::runtime_error("load_pgm: unsupported maxval (only 255): " + path);
    if (in.get() == EOF)
        throw std::runtime_error("load_pgm: truncated header: " + path);

    GrayImage img(width, height);
    in.read(reinterpret_cast<char*>(img.data()), static_cast<std::streamsize>(img.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.size())
        throw std::runtime_error("load_pgm: truncated pixel data: " + path);
    return img;
}

inline void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_pgm: cannot open " + path);
    out << "P5 " << img.width() << ' ' << img.height() << " 255\n";
    out.write(reinterpret_cast<const char*>(img.data()),
              static_cast<std::streamsize>(img.size()));
    if (!out) throw std::runtime_error("save_pgm: write failed: " + path);
}

} // namespace chess
