#include "hen/metrics.hpp"

#include "hen/error.hpp"
#include "hen/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hen {

namespace {

std::vector<double> gaussian_taps(int side, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(side));
  const double centre = (side - 1) / 2.0;
  for (int i = 0; i < side; ++i) {
    const double d = i - centre;
    taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  const double total = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) t /= total;
  return taps;
}

// Separable valid-mode filter of one channel plane (H x W) -> (H-w+1) x (W-w+1).
std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w,
                                 const std::vector<double>& taps) {
  const int side = static_cast<int>(taps.size());
  const int oh = h - side + 1;
  const int ow = w - side + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * static_cast<std::size_t>(ow));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < side; ++k) acc += taps[static_cast<std::size_t>(k)] * plane[static_cast<std::size_t>(y * w + x + k)];
      rows[static_cast<std::size_t>(y * ow + x)] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * static_cast<std::size_t>(ow));
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < side; ++k) acc += taps[static_cast<std::size_t>(k)] * rows[static_cast<std::size_t>((y + k) * ow + x)];
      out[static_cast<std::size_t>(y * ow + x)] = acc;
    }
  return out;
}

void check_range(const Image& img, double range) {
  for (double v : img.data) {
    if (!(v >= 0.0 && v <= range)) {
      throw Error(ErrorCode::ValueOutOfRange,
                  "SSIM input value " + std::to_string(v) + " outside [0, " + std::to_string(range) + "]");
    }
  }
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

double mse(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "mse operands differ in shape");
  }
  if (a.size() == 0) throw Error(ErrorCode::InvalidArgument, "mse of empty operands");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double mse(const Image& a, const Image& b) {
  if (a.shape != b.shape) throw Error(ErrorCode::DimensionMismatch, "mse images differ in shape");
  return mse(a.flatten(), b.flatten());
}

void SsimParams::validate() const {
  if (window_side < 3 || window_side % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "SSIM window side must be odd and >= 3");
  }
  if (!(gaussian_sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "SSIM sigma must be positive");
  if (!(k1 > 0.0 && k1 < 1.0) || !(k2 > 0.0 && k2 < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "SSIM k1, k2 must lie in (0, 1)");
  }
  if (!(dynamic_range > 0.0)) throw Error(ErrorCode::InvalidArgument, "SSIM dynamic range must be positive");
}

double ssim(const Image& a, const Image& b, const SsimParams& params) {
  params.validate();
  if (a.shape != b.shape) throw Error(ErrorCode::DimensionMismatch, "SSIM images differ in shape");
  const auto& s = a.shape;
  if (s.height < params.window_side || s.width < params.window_side) {
    throw Error(ErrorCode::ImageTooSmall, "image smaller than the SSIM window");
  }
  check_range(a, params.dynamic_range);
  check_range(b, params.dynamic_range);

  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
  const auto taps = gaussian_taps(params.window_side, params.gaussian_sigma);
  const std::size_t plane_size = static_cast<std::size_t>(s.height) * static_cast<std::size_t>(s.width);

  double total = 0.0;
  std::size_t count = 0;
  std::vector<double> pa(plane_size), pb(plane_size), aa(plane_size), bb(plane_size), ab(plane_size);
  for (int c = 0; c < s.channels; ++c) {
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y * s.width + x);
        pa[i] = a.at(y, x, c);
        pb[i] = b.at(y, x, c);
        aa[i] = pa[i] * pa[i];
        bb[i] = pb[i] * pb[i];
        ab[i] = pa[i] * pb[i];
      }
    const auto mu_a = filter_valid(pa, s.height, s.width, taps);
    const auto mu_b = filter_valid(pb, s.height, s.width, taps);
    const auto e_aa = filter_valid(aa, s.height, s.width, taps);
    const auto e_bb = filter_valid(bb, s.height, s.width, taps);
    const auto e_ab = filter_valid(ab, s.height, s.width, taps);
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
      const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
      const double cov = e_ab[i] - mu_a[i] * mu_b[i];
      const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
      const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
      total += num / den;
    }
    count += mu_a.size();
  }
  return total / static_cast<double>(count);
}

double one_minus_ssim(const Image& a, const Image& b, const SsimParams& params) {
  return 1.0 - ssim(a, b, params);
}

double relative_rank(const Matrix& recovered, const Matrix& bank, std::optional<double> tol_factor) {
  if (recovered.rows() != bank.rows() || recovered.cols() != bank.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "recovered and bank matrices differ in shape");
  }
  const double tol = tol_factor.value_or(default_rank_tol(bank.rows(), bank.cols()));
  const Eigen::Index bank_rank = numerical_rank(bank, tol);
  if (bank_rank == 0) throw Error(ErrorCode::ZeroRank, "memory bank has numerical rank 0");
  return static_cast<double>(numerical_rank(recovered, tol)) / static_cast<double>(bank_rank);
}

SeparabilityReport cosine_report(const Matrix& queries, const Matrix& bank, int bins) {
  if (queries.cols() != bank.cols() || queries.rows() != bank.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "queries and bank must both be N x K");
  }
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  const Eigen::Index n = bank.rows();
  const Vector qn = queries.rowwise().norm();
  const Vector bn = bank.rowwise().norm();
  const Matrix dots = queries * bank.transpose();

  SeparabilityReport rep;
  rep.histogram.resize(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) {
    rep.histogram[static_cast<std::size_t>(i)].low = -1.0 + 2.0 * i / bins;
    rep.histogram[static_cast<std::size_t>(i)].high = -1.0 + 2.0 * (i + 1) / bins;
  }
  const auto bin_of = [bins](double v) {
    const int b = static_cast<int>(std::floor((v + 1.0) / 2.0 * bins));
    return static_cast<std::size_t>(std::clamp(b, 0, bins - 1));
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double c = 0.0;
      if (qn[i] == 0.0 || bn[j] == 0.0) {
        ++rep.zero_norm_pairs;
      } else {
        c = std::clamp(dots(i, j) / (qn[i] * bn[j]), -1.0, 1.0);
      }
      if (i == j) {
        rep.self_sims.push_back(c);
        ++rep.histogram[bin_of(c)].self_count;
      } else {
        rep.cross_sims.push_back(c);
        ++rep.histogram[bin_of(c)].cross_count;
      }
    }
  }
  rep.self_mean = mean_of(rep.self_sims);
  rep.self_std = std_of(rep.self_sims, rep.self_mean);
  rep.cross_mean = mean_of(rep.cross_sims);
  rep.cross_std = std_of(rep.cross_sims, rep.cross_mean);
  const double min_self = *std::min_element(rep.self_sims.begin(), rep.self_sims.end());
  // A single memory has no cross pairs; the gap then measures self alone.
  const double max_cross = rep.cross_sims.empty()
                               ? -1.0
                               : *std::max_element(rep.cross_sims.begin(), rep.cross_sims.end());
  rep.gap = min_self - max_cross;
  return rep;
}

BatchEval batch_eval(const std::vector<Vector>& originals, const std::vector<Vector>& retrieved,
                     const SsimParams& ssim_params, std::optional<ImageShape> image_shape) {
  if (originals.size() != retrieved.size()) {
    throw Error(ErrorCode::DimensionMismatch, "originals and retrieved lists differ in length");
  }
  if (originals.empty()) throw Error(ErrorCode::InvalidArgument, "batch_eval needs at least one pair");
  BatchEval out;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    out.mse.push_back(mse(originals[i], retrieved[i]));
    if (image_shape) {
      out.one_minus_ssim.push_back(one_minus_ssim(Image::from_vector(originals[i], *image_shape),
                                                  Image::from_vector(retrieved[i], *image_shape),
                                                  ssim_params));
    }
  }
  out.mean_mse = mean_of(out.mse);
  if (image_shape) out.mean_one_minus_ssim = mean_of(out.one_minus_ssim);
  return out;
}

}  // namespace hen
