#include "hen/hopfield.hpp"

#include "oracle_values.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace hen;
using hen_test::gaussian;
using hen_test::unit_rows;

namespace {

EnergyParams dot(double beta) {
  EnergyParams p;
  p.beta = beta;
  return p;
}

EnergyParams l2(double beta) {
  EnergyParams p;
  p.beta = beta;
  p.similarity = Similarity::NegSquaredL2;
  return p;
}

// Direct evaluation of values^T softmax(keys query / sqrt(d_k)).
Vector naive_attention(const Vector& s, const Matrix& bank, const TransformerParams& tp) {
  const Eigen::Index n = bank.rows();
  const Eigen::Index d = tp.w_q.rows();
  const Eigen::Index dv = tp.w_v.rows();
  const Eigen::Index k = bank.cols();
  std::vector<double> q(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < k; ++b) q[a] += tp.w_q(a, b) * s(b);
  std::vector<double> logits(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < d; ++a) {
      double key = 0.0;
      for (Eigen::Index b = 0; b < k; ++b) key += tp.w_k(a, b) * bank(i, b);
      logits[i] += key * q[a];
    }
    logits[i] /= std::sqrt(tp.d_k);
  }
  double z = 0.0;
  for (double l : logits) z += std::exp(l);
  Vector out = Vector::Zero(dv);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = std::exp(logits[i]) / z;
    for (Eigen::Index a = 0; a < dv; ++a) {
      double value = 0.0;
      for (Eigen::Index b = 0; b < k; ++b) value += tp.w_v(a, b) * bank(i, b);
      out(a) += w * value;
    }
  }
  return out;
}

}  // namespace

TEST(MemoryBank, RejectsEmptyAndNonFinite) {
  EXPECT_HEN_ERROR(MemoryBank(Matrix(0, 3)), ErrorCode::InvalidArgument);
  EXPECT_HEN_ERROR(MemoryBank(Matrix(2, 0)), ErrorCode::InvalidArgument);
  Matrix m = Matrix::Ones(2, 2);
  m(1, 0) = std::nan("");
  EXPECT_HEN_ERROR(MemoryBank{m}, ErrorCode::NonFinite);
  m(1, 0) = INFINITY;
  EXPECT_HEN_ERROR(MemoryBank{m}, ErrorCode::NonFinite);
}

TEST(MemoryBank, IdTracksContentAndShape) {
  const Matrix m = gaussian(3, 4, 1);
  EXPECT_EQ(MemoryBank(m).id(), MemoryBank(m).id());
  Matrix changed = m;
  changed(2, 3) += 1e-12;
  EXPECT_NE(MemoryBank(m).id(), MemoryBank(changed).id());
  const Matrix reshaped = Eigen::Map<const Matrix>(m.data(), 4, 3);
  EXPECT_NE(MemoryBank(m).id(), MemoryBank(reshaped).id());
}

TEST(EnergyParams, Validation) {
  EXPECT_NO_THROW(EnergyParams{}.validate());
  EnergyParams p;
  p.beta = 0.0;
  EXPECT_HEN_ERROR(p.validate(), ErrorCode::InvalidArgument);
  p = {};
  p.max_iters = 0;
  EXPECT_HEN_ERROR(p.validate(), ErrorCode::InvalidArgument);
  p = {};
  p.convergence_tol = -1.0;
  EXPECT_HEN_ERROR(p.validate(), ErrorCode::InvalidArgument);
  p = {};
  p.beta = NAN;
  EXPECT_HEN_ERROR(p.validate(), ErrorCode::InvalidArgument);
}

TEST(LseEnergy, SingleMemoryCollapses) {
  Matrix m(1, 2);
  m << 0.6, 0.8;
  const MemoryBank bank(m);
  EXPECT_NEAR(lse_energy(m.row(0).transpose(), bank, dot(150)), -0.5, 1e-12);
}

TEST(LseEnergy, TwoOrthonormalMemories) {
  const MemoryBank bank(Matrix::Identity(2, 2));
  EXPECT_NEAR(lse_energy(Vector::Unit(2, 0), bank, dot(1)), hen_oracle::kTwoMemoryEnergy, 1e-12);
}

TEST(LseEnergy, ZeroStateIsMinusLogN) {
  const MemoryBank bank(gaussian(7, 5, 3));
  EXPECT_NEAR(lse_energy(Vector::Zero(5), bank, dot(1)), -std::log(7.0), 1e-12);
}

TEST(LseEnergy, MaxShiftAvoidsOverflow) {
  Matrix m(2, 1);
  m << 1000.0, 999.0;
  const MemoryBank bank(m);
  const double e = lse_energy(Vector::Constant(1, 1.0), bank, dot(10));
  EXPECT_TRUE(std::isfinite(e));
  EXPECT_NEAR(e, -(1000.0 + std::log1p(std::exp(-10.0)) / 10.0) + 0.5, 1e-9);
}

TEST(LseEnergy, ErrorsOnL2AndDimension) {
  const MemoryBank bank(gaussian(3, 4, 2));
  EXPECT_HEN_ERROR(lse_energy(Vector::Zero(4), bank, l2(1)), ErrorCode::InvalidArgument);
  EXPECT_HEN_ERROR(lse_energy(Vector::Zero(3), bank, dot(1)), ErrorCode::DimensionMismatch);
}

TEST(Softmax, UniformWhenEquidistant) {
  const MemoryBank bank(Matrix::Identity(4, 4));
  const Vector w = softmax_weights(Vector::Zero(4), bank, dot(3));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(w(i), 0.25, 1e-15);
  const Vector wl = softmax_weights(Vector::Zero(4), bank, l2(3));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(wl(i), 0.25, 1e-15);
}

TEST(Softmax, LogThreeGapGivesThreeToOne) {
  Matrix m(2, 1);
  m << 1.0, 0.0;
  const MemoryBank bank(m);
  const Vector w = softmax_weights(Vector::Constant(1, 1.0), bank, dot(std::log(3.0)));
  EXPECT_NEAR(w(0), 0.75, 1e-12);
  EXPECT_NEAR(w(1), 0.25, 1e-12);
}

TEST(Softmax, SaturatesAtHighBeta) {
  Matrix m(2, 1);
  m << 1.0, 0.9;
  const MemoryBank bank(m);
  EXPECT_GE(softmax_weights(Vector::Constant(1, 1.0), bank, dot(500))(0), 1.0 - 1e-9);
}

TEST(Softmax, SumsToOneAndNonNegative) {
  const MemoryBank bank(gaussian(20, 6, 4));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Vector s = gaussian(6, 1, 100 + seed);
    for (const auto& p : {dot(0.5), dot(50), l2(2)}) {
      const Vector w = softmax_weights(s, bank, p);
      EXPECT_NEAR(w.sum(), 1.0, 1e-12);
      EXPECT_GE(w.minCoeff(), 0.0);
    }
  }
}

TEST(Similarities, DotAndNegSquaredL2) {
  Matrix m(2, 2);
  m << 1, 0, 0, 2;
  const MemoryBank bank(m);
  const Vector s = Vector::Constant(2, 1.0);
  const Vector d = similarities(s, bank, Similarity::DotProduct);
  EXPECT_DOUBLE_EQ(d(0), 1.0);
  EXPECT_DOUBLE_EQ(d(1), 2.0);
  const Vector l = similarities(s, bank, Similarity::NegSquaredL2);
  EXPECT_DOUBLE_EQ(l(0), -1.0);
  EXPECT_DOUBLE_EQ(l(1), -2.0);
}

TEST(UpdateStep, SingleMemoryIsReturned) {
  const Matrix m = gaussian(1, 5, 9);
  const MemoryBank bank(m);
  for (double beta : {0.01, 1.0, 500.0}) {
    const Vector out = update_step(gaussian(5, 1, 10), bank, dot(beta));
    EXPECT_EQ(out, m.row(0).transpose());
  }
}

TEST(UpdateStep, EqualWeightsGiveMean) {
  Matrix m(2, 2);
  m << 1, 0, 0, 1;
  const MemoryBank bank(m);
  const Vector out = update_step(Vector::Zero(2), bank, dot(10));
  EXPECT_NEAR(out(0), 0.5, 1e-15);
  EXPECT_NEAR(out(1), 0.5, 1e-15);
}

TEST(UpdateStep, NoisyMemoryRecoveredInOneStep) {
  const Matrix m = unit_rows(16, 64, 11);
  const MemoryBank bank(m);
  Vector noise = gaussian(64, 1, 12);
  noise *= 0.05 / noise.norm();
  const Vector out = update_step(m.row(3).transpose() + noise, bank, dot(150));
  EXPECT_LE((out - m.row(3).transpose()).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(UpdateStep, StaysInConvexHull) {
  const Matrix m = gaussian(12, 8, 13);
  const MemoryBank bank(m);
  const Vector lo = m.colwise().minCoeff().transpose();
  const Vector hi = m.colwise().maxCoeff().transpose();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (const auto& p : {dot(0.3), dot(40), l2(1)}) {
      const Vector out = update_step(gaussian(8, 1, 200 + seed) * 3.0, bank, p);
      EXPECT_TRUE(((out - lo).array() >= -1e-12).all());
      EXPECT_TRUE(((hi - out).array() >= -1e-12).all());
    }
  }
}

TEST(UpdateStep, DominantMemoryIsFixedPoint) {
  const Matrix m = unit_rows(10, 32, 14);
  const MemoryBank bank(m);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Vector s = m.row(r).transpose();
    Vector dots = m * s;
    const double self = dots(r);
    dots(r) = -INFINITY;
    const double beta = 40.0 / (self - dots.maxCoeff());
    const Vector out = update_step(s, bank, dot(beta));
    EXPECT_LE((out - s).norm(), 1e-8 * s.norm());
  }
}

TEST(UpdateStep, DimensionMismatch) {
  const MemoryBank bank(gaussian(3, 4, 2));
  EXPECT_HEN_ERROR(update_step(Vector::Zero(5), bank, dot(1)), ErrorCode::DimensionMismatch);
  EXPECT_HEN_ERROR(softmax_weights(Vector::Zero(5), bank, dot(1)), ErrorCode::DimensionMismatch);
}

TEST(Retrieve, StoredMemoryIsFixedPoint) {
  const Matrix m = unit_rows(32, 64, 15);
  const MemoryBank bank(m);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const RetrievalResult res = retrieve(m.row(r).transpose(), bank, dot(150));
    EXPECT_TRUE(res.converged);
    EXPECT_LE((res.final_state - m.row(r).transpose()).norm(), 1e-8);
    ASSERT_TRUE(res.matched_index.has_value());
    EXPECT_EQ(*res.matched_index, r);
  }
}

TEST(Retrieve, DuplicateRowsTieToLowestIndex) {
  Matrix m(3, 3);
  m << 0, 0, 1, 1, 0, 0, 1, 0, 0;
  const MemoryBank bank(m);
  const RetrievalResult res = retrieve(Vector::Unit(3, 0), bank, dot(150));
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(*res.matched_index, 1);
  EXPECT_EQ(best_match(Vector::Unit(3, 0), bank, Similarity::NegSquaredL2), 1);
}

TEST(Retrieve, ZeroToleranceRunsEveryIteration) {
  const MemoryBank bank(unit_rows(8, 16, 16));
  EnergyParams p = dot(150);
  p.convergence_tol = 0.0;
  p.max_iters = 100;
  const RetrievalResult res = retrieve(bank.row(2).transpose(), bank, p);
  EXPECT_EQ(res.iterations_run, 100);
  EXPECT_EQ(res.energy_trajectory.size(), 100u);
}

TEST(Retrieve, TrajectoryMatchesIterationsAndDecreases) {
  const Matrix m = unit_rows(24, 12, 17);
  const MemoryBank bank(m);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const RetrievalResult res = retrieve(gaussian(12, 1, 300 + seed), bank, dot(4));
    EXPECT_LE(res.iterations_run, 100);
    ASSERT_EQ(res.energy_trajectory.size(), static_cast<std::size_t>(res.iterations_run));
    for (std::size_t t = 1; t < res.energy_trajectory.size(); ++t) {
      EXPECT_LE(res.energy_trajectory[t], res.energy_trajectory[t - 1] + 1e-9);
    }
  }
}

TEST(Retrieve, L2ModeRecordsNoEnergy) {
  const MemoryBank bank(unit_rows(8, 16, 18));
  const RetrievalResult res = retrieve(bank.row(0).transpose(), bank, l2(50));
  EXPECT_TRUE(res.energy_trajectory.empty());
  EXPECT_EQ(*res.matched_index, 0);
}

TEST(RetrieveBatch, IndependentOfThreadCount) {
  const Matrix m = unit_rows(40, 20, 19);
  const MemoryBank bank(m);
  const Matrix q = gaussian(40, 20, 20);
  const auto one = retrieve_batch(q, bank, dot(8), 1);
  const auto four = retrieve_batch(q, bank, dot(8), 4);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].final_state, four[i].final_state);
    EXPECT_EQ(one[i].iterations_run, four[i].iterations_run);
    EXPECT_EQ(one[i].energy_trajectory, four[i].energy_trajectory);
    EXPECT_EQ(one[i].final_state, retrieve(q.row(static_cast<Eigen::Index>(i)).transpose(), bank, dot(8)).final_state);
  }
}

TEST(Transformer, IdentityWeightsMatchUpdateStep) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = gaussian(9, 6, 400 + seed);
    const MemoryBank bank(m);
    const double beta = 0.5 + static_cast<double>(seed);
    TransformerParams tp{Matrix::Identity(6, 6), Matrix::Identity(6, 6), Matrix::Identity(6, 6), 1.0 / (beta * beta)};
    const Vector s = gaussian(6, 1, 500 + seed);
    const Vector a = transformer_update(s, bank, tp);
    const Vector b = update_step(s, bank, dot(beta));
    EXPECT_LE((a - b).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Transformer, ZeroValuesGiveZero) {
  const MemoryBank bank(gaussian(4, 8, 21));
  TransformerParams tp{gaussian(8, 8, 22), gaussian(8, 8, 23), Matrix::Zero(8, 8), 8.0};
  EXPECT_EQ(transformer_update(gaussian(8, 1, 24), bank, tp), Vector::Zero(8));
}

TEST(Transformer, MatchesNaiveLoop) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = gaussian(4, 8, 600 + seed);
    const MemoryBank bank(m);
    TransformerParams tp{gaussian(8, 8, 700 + seed), gaussian(8, 8, 800 + seed), gaussian(5, 8, 900 + seed), 8.0};
    const Vector s = gaussian(8, 1, 1000 + seed);
    EXPECT_LE((transformer_update(s, bank, tp) - naive_attention(s, m, tp)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Transformer, RejectsIncompatibleWeights) {
  const MemoryBank bank(gaussian(4, 8, 25));
  TransformerParams tp{gaussian(8, 8, 1), gaussian(7, 8, 2), gaussian(8, 8, 3), 1.0};
  EXPECT_HEN_ERROR(transformer_update(Vector::Zero(8), bank, tp), ErrorCode::DimensionMismatch);
  tp = {gaussian(8, 7, 1), gaussian(8, 7, 2), gaussian(8, 7, 3), 1.0};
  EXPECT_HEN_ERROR(transformer_update(Vector::Zero(8), bank, tp), ErrorCode::DimensionMismatch);
  tp = {gaussian(8, 8, 1), gaussian(8, 8, 2), gaussian(8, 8, 3), 0.0};
  EXPECT_HEN_ERROR(transformer_update(Vector::Zero(8), bank, tp), ErrorCode::InvalidArgument);
}
