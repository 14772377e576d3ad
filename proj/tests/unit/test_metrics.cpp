#include "hen/metrics.hpp"

#include "oracle_values.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace hen;
using hen_test::gaussian;
using hen_test::unit_rows;

namespace {

Image gradient_image(int h, int w) {
  Image img(ImageShape{h, w, 1});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(y, x, 0) = static_cast<double>(y * w + x) / (h * w - 1);
  return img;
}

Image hash_image(int h, int w, int c) {
  Image img(ImageShape{h, w, c});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < c; ++ch) {
        const double v = std::sin(y * 12.9898 + x * 78.233 + ch * 37.719) * 43758.5453;
        img.at(y, x, ch) = v - std::floor(v);
      }
  return img;
}

Image uniform_image(ImageShape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(shape);
  for (auto& v : img.data) v = u(rng);
  return img;
}

// Direct SSIM: explicit 2D Gaussian window at every fully contained position.
double naive_ssim(const Image& a, const Image& b) {
  const int win = 11;
  const int half = win / 2;
  const double sigma = 1.5;
  std::vector<double> w(win * win);
  double sum = 0.0;
  for (int i = 0; i < win; ++i)
    for (int j = 0; j < win; ++j) {
      w[i * win + j] = std::exp(-((i - half) * (i - half) + (j - half) * (j - half)) / (2 * sigma * sigma));
      sum += w[i * win + j];
    }
  for (auto& v : w) v /= sum;
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  double total = 0.0;
  int count = 0;
  for (int c = 0; c < a.shape.channels; ++c)
    for (int y = half; y < a.shape.height - half; ++y)
      for (int x = half; x < a.shape.width - half; ++x) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int i = 0; i < win; ++i)
          for (int j = 0; j < win; ++j) {
            const double wt = w[i * win + j];
            const double va = a.at(y + i - half, x + j - half, c);
            const double vb = b.at(y + i - half, x + j - half, c);
            ma += wt * va;
            mb += wt * vb;
            saa += wt * va * va;
            sbb += wt * vb * vb;
            sab += wt * va * vb;
          }
        const double va = saa - ma * ma;
        const double vb = sbb - mb * mb;
        const double cov = sab - ma * mb;
        total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
  return total / count;
}

}  // namespace

TEST(Mse, Examples) {
  EXPECT_EQ(mse(Vector::Ones(4), Vector::Ones(4)), 0.0);
  EXPECT_EQ(mse(Vector::Zero(2), Vector::Ones(2)), 1.0);
  EXPECT_NEAR(mse((Vector(3) << 1, 2, 3).finished(), (Vector(3) << 2, 4, 6).finished()), 14.0 / 3.0, 1e-15);
  const Matrix a = gaussian(3, 4, 1);
  const Matrix b = gaussian(3, 4, 2);
  EXPECT_EQ(mse(a, b), mse(b, a));
  EXPECT_GT(mse(a, b), 0.0);
  EXPECT_HEN_ERROR(mse(Vector::Zero(2), Vector::Zero(3)), ErrorCode::DimensionMismatch);
  EXPECT_HEN_ERROR(mse(Image(ImageShape{2, 2, 1}), Image(ImageShape{2, 2, 3})), ErrorCode::DimensionMismatch);
}

TEST(Ssim, IdenticalImagesScoreOne) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Image img = uniform_image(ImageShape{16, 20, 3}, s);
    EXPECT_EQ(ssim(img, img), 1.0);
    EXPECT_EQ(one_minus_ssim(img, img), 0.0);
  }
}

TEST(Ssim, ConstantZeroVsConstantOne) {
  const Image z(ImageShape{16, 16, 1}, 0.0);
  const Image o(ImageShape{16, 16, 1}, 1.0);
  EXPECT_NEAR(ssim(z, o), 1e-4 / (1.0 + 1e-4), 1e-15);
  EXPECT_NEAR(ssim(z, o), hen_oracle::kSsimZeroVsOne, 1e-15);
}

TEST(Ssim, FlippedPixelMatchesReference) {
  const Image a = gradient_image(16, 16);
  Image b = a;
  b.at(7, 8, 0) = 1.0 - b.at(7, 8, 0);
  const double s = ssim(a, b);
  EXPECT_NEAR(s, hen_oracle::kSsimFlippedPixel, 1e-6);
  EXPECT_NEAR(s, naive_ssim(a, b), 1e-12);
  EXPECT_GT(s, 0.9);
  EXPECT_LT(s, 1.0);
}

TEST(Ssim, MultiChannelMatchesReference) {
  const Image x = hash_image(20, 24, 3);
  Image y = x;
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 24; ++c)
      for (int ch = 0; ch < 3; ++ch) y.at(r, c, ch) = 0.7 * x.at(r, c, ch) + 0.3 * x.at(r, 23 - c, ch);
  EXPECT_NEAR(ssim(x, y), hen_oracle::kSsimHashRgb, 1e-6);
  EXPECT_NEAR(ssim(x, y), naive_ssim(x, y), 1e-12);
}

TEST(Ssim, SymmetricAndBounded) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Image a = uniform_image(ImageShape{13, 17, 2}, 10 + s);
    const Image b = uniform_image(ImageShape{13, 17, 2}, 30 + s);
    const double ab = ssim(a, b);
    EXPECT_NEAR(ab, ssim(b, a), 1e-12);
    EXPECT_GE(ab, -1.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(Ssim, Errors) {
  const Image small(ImageShape{10, 16, 1}, 0.5);
  EXPECT_HEN_ERROR(ssim(small, small), ErrorCode::ImageTooSmall);
  Image bad(ImageShape{16, 16, 1}, 0.5);
  bad.at(3, 3, 0) = 1.5;
  const Image good(ImageShape{16, 16, 1}, 0.5);
  EXPECT_HEN_ERROR(ssim(bad, good), ErrorCode::ValueOutOfRange);
  bad.at(3, 3, 0) = -0.1;
  EXPECT_HEN_ERROR(ssim(good, bad), ErrorCode::ValueOutOfRange);
  EXPECT_HEN_ERROR(ssim(good, Image(ImageShape{16, 17, 1})), ErrorCode::DimensionMismatch);
  SsimParams p;
  p.window_side = 4;
  EXPECT_HEN_ERROR(ssim(good, good, p), ErrorCode::InvalidArgument);
  p = {};
  p.k1 = 0.0;
  EXPECT_HEN_ERROR(p.validate(), ErrorCode::InvalidArgument);
}

TEST(RelativeRank, Examples) {
  const Matrix bank = gaussian(8, 32, 3);
  EXPECT_EQ(relative_rank(bank, bank), 1.0);
  const Matrix collapsed = bank.row(0).replicate(8, 1);
  EXPECT_EQ(relative_rank(collapsed, bank), 1.0 / 8.0);
  Matrix two = Matrix(8, 32);
  for (int i = 0; i < 8; ++i) {
    two.row(i) = i < 4 ? 0.6 * bank.row(0) + 0.4 * bank.row(1) : 0.5 * bank.row(5) + 0.5 * bank.row(6);
  }
  EXPECT_EQ(relative_rank(two, bank), 0.25);
  EXPECT_HEN_ERROR(relative_rank(bank, Matrix::Zero(8, 32)), ErrorCode::ZeroRank);
  EXPECT_HEN_ERROR(relative_rank(bank.topRows(4), bank), ErrorCode::DimensionMismatch);
}

TEST(CosineReport, OrthonormalAndNegated) {
  const Matrix bank = Matrix::Identity(5, 5);
  const SeparabilityReport r = cosine_report(bank, bank, 10);
  EXPECT_EQ(r.self_sims.size(), 5u);
  EXPECT_EQ(r.cross_sims.size(), 20u);
  for (double s : r.self_sims) EXPECT_EQ(s, 1.0);
  for (double c : r.cross_sims) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(r.gap, 1.0);
  EXPECT_EQ(r.histogram.back().self_count, 5u);
  EXPECT_EQ(r.histogram[5].cross_count, 20u);
  const SeparabilityReport neg = cosine_report(-bank, bank, 10);
  for (double s : neg.self_sims) EXPECT_EQ(s, -1.0);
  EXPECT_EQ(neg.histogram.front().self_count, 5u);
}

TEST(CosineReport, CountsAndRange) {
  const SeparabilityReport r = cosine_report(gaussian(12, 7, 1), gaussian(12, 7, 2));
  std::size_t self = 0, cross = 0;
  for (const auto& b : r.histogram) {
    self += b.self_count;
    cross += b.cross_count;
  }
  EXPECT_EQ(self, 12u);
  EXPECT_EQ(cross, 132u);
  EXPECT_EQ(r.histogram.size(), 50u);
  EXPECT_DOUBLE_EQ(r.histogram.front().low, -1.0);
  EXPECT_DOUBLE_EQ(r.histogram.back().high, 1.0);
  for (double v : r.cross_sims) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(CosineReport, CorrelatedRowsOverlap) {
  Matrix rows = Matrix::Constant(30, 64, 0.5) + 0.05 * gaussian(30, 64, 4);
  Matrix queries = rows;
  queries.leftCols(32).setZero();
  EXPECT_LT(cosine_report(queries, rows).gap, 0.0);
}

TEST(CosineReport, ZeroNormRowsFlagged) {
  Matrix q = unit_rows(3, 4, 5);
  q.row(1).setZero();
  const SeparabilityReport r = cosine_report(q, unit_rows(3, 4, 6));
  EXPECT_EQ(r.zero_norm_pairs, 3u);
  EXPECT_EQ(r.self_sims[1], 0.0);
  EXPECT_HEN_ERROR(cosine_report(q, unit_rows(3, 5, 6)), ErrorCode::DimensionMismatch);
  EXPECT_HEN_ERROR(cosine_report(q, q, 0), ErrorCode::InvalidArgument);
}

TEST(BatchEval, Averages) {
  const std::vector<Vector> orig{Vector::Zero(2), Vector::Zero(2)};
  const std::vector<Vector> got{Vector::Zero(2), (Vector(2) << 1, 0).finished()};
  const BatchEval e = batch_eval(orig, got);
  EXPECT_EQ(e.mean_mse, 0.25);
  EXPECT_FALSE(e.mean_one_minus_ssim.has_value());
  EXPECT_TRUE(e.one_minus_ssim.empty());
  EXPECT_HEN_ERROR(batch_eval(orig, {Vector::Zero(2)}), ErrorCode::DimensionMismatch);
}

TEST(BatchEval, PerfectRecallIsZero) {
  std::vector<Vector> imgs;
  for (std::uint64_t s = 0; s < 4; ++s) imgs.push_back(uniform_image(ImageShape{12, 12, 3}, s).flatten());
  const BatchEval e = batch_eval(imgs, imgs, {}, ImageShape{12, 12, 3});
  EXPECT_EQ(e.mean_mse, 0.0);
  ASSERT_TRUE(e.mean_one_minus_ssim.has_value());
  EXPECT_EQ(*e.mean_one_minus_ssim, 0.0);
}
