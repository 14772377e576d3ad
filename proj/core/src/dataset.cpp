#include "hen/dataset.hpp"

#include "hen/error.hpp"
#include "hen/henb.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

namespace fs = std::filesystem;

namespace hen {

namespace {

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
int read_header_int(std::istream& in, const fs::path& path) {
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  std::string digits;
  while (ch != EOF && std::isdigit(ch)) {
    digits.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  if (digits.empty() || ch == EOF || !std::isspace(ch)) {
    throw Error(ErrorCode::MalformedPpm, "bad header field in " + path.string());
  }
  int value = 0;
  std::from_chars(digits.data(), digits.data() + digits.size(), value);
  return value;
}

Image to_channels(const Image& rgb, int channels) {
  if (channels == rgb.shape.channels) return rgb;
  if (channels != 1) {
    throw Error(ErrorCode::InvalidArgument, "PPM images convert to 1 or 3 channels only");
  }
  Image gray(ImageShape{rgb.shape.height, rgb.shape.width, 1});
  for (int y = 0; y < rgb.shape.height; ++y)
    for (int x = 0; x < rgb.shape.width; ++x)
      gray.at(y, x, 0) = (rgb.at(y, x, 0) + rgb.at(y, x, 1) + rgb.at(y, x, 2)) / 3.0;
  return gray;
}

void load_captions(const fs::path& file, Dataset& ds) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + file.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    std::uint32_t id = 0;
    const auto res = std::from_chars(line.data(), line.data() + (tab == std::string::npos ? 0 : tab), id);
    if (tab == std::string::npos || res.ec != std::errc{} || res.ptr != line.data() + tab) {
      throw Error(ErrorCode::CaptionIdMismatch, "malformed caption line '" + line + "'");
    }
    if (id >= ds.items.size()) {
      throw Error(ErrorCode::CaptionIdMismatch, "caption for unknown id " + std::to_string(id));
    }
    ds.items[id].caption = line.substr(tab + 1);
  }
}

void append_henb(const fs::path& file, Dataset& ds) {
  const EmbeddingTable table = load_embedding_table(file, ExpectedDims{std::nullopt, ds.shape.size()});
  for (const auto& [id, entry] : table.entries()) {
    if ((entry.original.array() < 0.0).any() || (entry.original.array() > 1.0).any()) {
      throw Error(ErrorCode::ValueOutOfRange,
                  file.string() + ": record " + std::to_string(id) + " has pixels outside [0, 1]");
    }
    ds.items.push_back({static_cast<std::uint32_t>(ds.items.size()), Image::from_vector(entry.original, ds.shape), {}});
  }
}

}  // namespace

Matrix Dataset::as_matrix() const {
  Matrix m(static_cast<Eigen::Index>(items.size()), static_cast<Eigen::Index>(shape.size()));
  for (std::size_t i = 0; i < items.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = items[i].image.flatten().transpose();
  return m;
}

Dataset Dataset::prefix(std::size_t count) const {
  if (count > items.size()) {
    throw Error(ErrorCode::InvalidConfig, "requested " + std::to_string(count) + " items from a dataset of " +
                                              std::to_string(items.size()));
  }
  Dataset out{shape, {}};
  out.items.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

Image read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '6') {
    throw Error(ErrorCode::MalformedPpm, path.string() + " is not a binary P6 PPM");
  }
  const int width = read_header_int(in, path);
  const int height = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
    throw Error(ErrorCode::MalformedPpm, "invalid dimensions or maxval in " + path.string());
  }
  const std::size_t bytes_per = maxval < 256 ? 1 : 2;
  Image img(ImageShape{height, width, 3});
  std::vector<unsigned char> raw(img.data.size() * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw Error(ErrorCode::MalformedPpm, "pixel data truncated in " + path.string());
  }
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const unsigned v = bytes_per == 1 ? raw[i] : (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1];
    img.data[i] = std::min(1.0, static_cast<double>(v) / maxval);
  }
  return img;
}

void write_ppm(const fs::path& path, const Image& image) {
  if (image.shape.channels != 3 && image.shape.channels != 1) {
    throw Error(ErrorCode::InvalidArgument, "PPM output needs 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "P6\n" << image.shape.width << ' ' << image.shape.height << "\n255\n";
  for (int y = 0; y < image.shape.height; ++y)
    for (int x = 0; x < image.shape.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = image.at(y, x, image.shape.channels == 1 ? 0 : c);
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
      }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Dataset load_dataset(const fs::path& path, ImageShape shape) {
  if (shape.height < 1 || shape.width < 1 || shape.channels < 1) {
    throw Error(ErrorCode::InvalidConfig, "image shape must be positive");
  }
  std::error_code ec;
  std::vector<fs::path> files;
  fs::path captions;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension();
      if (ext == ".ppm" || ext == ".henb") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    if (fs::exists(path / kCaptionsFile)) captions = path / kCaptionsFile;
  } else if (fs::is_regular_file(path, ec)) {
    files.push_back(path);
  } else {
    throw Error(ErrorCode::Io, "dataset path " + path.string() + " does not exist");
  }

  Dataset ds{shape, {}};
  for (const auto& file : files) {
    if (file.extension() == ".henb") {
      append_henb(file, ds);
    } else {
      Image img = to_channels(read_ppm(file), shape.channels);
      img = resample_bilinear(img, shape.height, shape.width);
      ds.items.push_back({static_cast<std::uint32_t>(ds.items.size()), std::move(img), {}});
    }
  }
  if (ds.items.empty()) throw Error(ErrorCode::Io, "no PPM or HENB inputs under " + path.string());
  if (!captions.empty()) load_captions(captions, ds);
  return ds;
}

}  // namespace hen
