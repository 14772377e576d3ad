#pragma once

#include "hen/hopfield.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace hen {

struct ImageShape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
           static_cast<std::size_t>(channels);
  }
  bool operator==(const ImageShape&) const = default;
};

/// Row-major, channel-last pixel buffer. Flattening to a pattern vector
/// keeps this order.
struct Image {
  ImageShape shape;
  std::vector<double> data;

  Image() = default;
  explicit Image(ImageShape s, double fill = 0.0) : shape(s), data(s.size(), fill) {}

  double& at(int y, int x, int c) { return data[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data[index(y, x, c)]; }

  Vector flatten() const;
  static Image from_vector(const Vector& v, ImageShape shape);

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(shape.width) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(shape.channels) +
           static_cast<std::size_t>(c);
  }
};

enum class Occlusion { None, LeftHalf, TopHalf };

Occlusion parse_occlusion(std::string_view name);
std::string_view to_string(Occlusion mode) noexcept;

/// LeftHalf zeroes columns [0, W/2), TopHalf zeroes rows [0, H/2).
Image occlude(const Image& image, Occlusion mode);

/// Bilinear resample with pixel-centre alignment. Channel count is kept.
Image resample_bilinear(const Image& image, int height, int width);

}  // namespace hen
