#pragma once

#include "hen/hopfield.hpp"
#include "hen/image.hpp"

#include <optional>
#include <vector>

namespace hen {

double mse(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b);
double mse(const Image& a, const Image& b);

/// Single-scale SSIM constants. Defaults are the conventional ones
/// (11x11 Gaussian window, sigma 1.5, k1 0.01, k2 0.03, range 1).
struct SsimParams {
  int window_side = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  void validate() const;
};

/// Mean SSIM over every fully contained window position and every channel.
/// Both images must hold values in [0, dynamic_range].
double ssim(const Image& a, const Image& b, const SsimParams& params = {});
double one_minus_ssim(const Image& a, const Image& b, const SsimParams& params = {});

/// rank(recovered) / rank(bank), each rank counted with cutoff
/// tol_factor * sigma_max of that matrix. Unset tol_factor means
/// max(N, K) * machine epsilon.
double relative_rank(const Matrix& recovered, const Matrix& bank,
                     std::optional<double> tol_factor = std::nullopt);

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t self_count = 0;
  std::size_t cross_count = 0;
};

struct SeparabilityReport {
  std::vector<double> self_sims;   // c_ii
  std::vector<double> cross_sims;  // c_ij, i != j, row-major order
  double self_mean = 0.0;
  double self_std = 0.0;
  double cross_mean = 0.0;
  double cross_std = 0.0;
  double gap = 0.0;  // min(self) - max(cross)
  std::vector<HistogramBin> histogram;
  /// Pairs where either row had zero norm; their similarity is reported as 0.
  std::size_t zero_norm_pairs = 0;
};

inline constexpr int kDefaultHistogramBins = 50;

/// All N^2 cosine similarities between query i and memory j, split into
/// the paired (i == j) and unpaired sets, with a shared histogram over [-1, 1].
SeparabilityReport cosine_report(const Matrix& queries, const Matrix& bank,
                                 int bins = kDefaultHistogramBins);

struct BatchEval {
  std::vector<double> mse;
  std::vector<double> one_minus_ssim;  // empty when no image shape was given
  double mean_mse = 0.0;
  std::optional<double> mean_one_minus_ssim;
};

/// Per-pair MSE (and 1-SSIM when `image_shape` is given) against the stored
/// originals, averaged.
BatchEval batch_eval(const std::vector<Vector>& originals, const std::vector<Vector>& retrieved,
                     const SsimParams& ssim_params = {},
                     std::optional<ImageShape> image_shape = std::nullopt);

}  // namespace hen
