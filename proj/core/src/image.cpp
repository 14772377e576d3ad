#include "hen/image.hpp"

#include "hen/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hen {

Vector Image::flatten() const {
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

Image Image::from_vector(const Vector& v, ImageShape shape) {
  if (static_cast<std::size_t>(v.size()) != shape.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vector length does not match image shape");
  }
  Image img(shape);
  std::copy(v.data(), v.data() + v.size(), img.data.begin());
  return img;
}

Occlusion parse_occlusion(std::string_view name) {
  if (name == "none" || name == "None") return Occlusion::None;
  if (name == "left-half" || name == "LeftHalf" || name == "left") return Occlusion::LeftHalf;
  if (name == "top-half" || name == "TopHalf" || name == "top") return Occlusion::TopHalf;
  throw Error(ErrorCode::InvalidConfig, "unknown occlusion mode '" + std::string(name) + "'");
}

std::string_view to_string(Occlusion mode) noexcept {
  switch (mode) {
    case Occlusion::None: return "none";
    case Occlusion::LeftHalf: return "left-half";
    case Occlusion::TopHalf: return "top-half";
  }
  return "none";
}

Image occlude(const Image& image, Occlusion mode) {
  Image out = image;
  const auto& s = image.shape;
  if (mode == Occlusion::LeftHalf) {
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width / 2; ++x)
        for (int c = 0; c < s.channels; ++c) out.at(y, x, c) = 0.0;
  } else if (mode == Occlusion::TopHalf) {
    for (int y = 0; y < s.height / 2; ++y)
      for (int x = 0; x < s.width; ++x)
        for (int c = 0; c < s.channels; ++c) out.at(y, x, c) = 0.0;
  }
  return out;
}

Image resample_bilinear(const Image& image, int height, int width) {
  const auto& src = image.shape;
  if (height < 1 || width < 1) throw Error(ErrorCode::InvalidArgument, "target size must be >= 1");
  if (src.height == height && src.width == width) return image;
  Image out(ImageShape{height, width, src.channels});
  const double sy = static_cast<double>(src.height) / height;
  const double sx = static_cast<double>(src.width) / width;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width - 1));
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < src.channels; ++c) {
        const double top = (1 - wx) * image.at(y0, x0, c) + wx * image.at(y0, x1, c);
        const double bottom = (1 - wx) * image.at(y1, x0, c) + wx * image.at(y1, x1, c);
        out.at(y, x, c) = (1 - wy) * top + wy * bottom;
      }
    }
  }
  return out;
}

}  // namespace hen
