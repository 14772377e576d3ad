#include "hen/codec.hpp"
#include "hen/henb.hpp"

#include "test_support.hpp"

using namespace hen;
using hen_test::gaussian;

namespace {

EmbeddingTable small_table() {
  EmbeddingTable t(3, 4, "test");
  t.insert(10, (Vector(3) << 1, 0, 0).finished(), (Vector(4) << 1, 1, 0, 0).finished());
  t.insert(4, (Vector(3) << 0, 2, 0).finished(), (Vector(4) << 0, 1, 1, 0).finished());
  t.insert(7, (Vector(3) << 0, 0, 3).finished(), (Vector(4) << 0, 0, 1, 1).finished());
  return t;
}

}  // namespace

TEST(CodecKindNames, RoundTrip) {
  for (auto k : {CodecKind::Identity, CodecKind::SphericalNorm, CodecKind::RandomProjection, CodecKind::Precomputed,
                 CodecKind::PixelText}) {
    EXPECT_EQ(parse_codec_kind(to_string(k)), k);
  }
  EXPECT_HEN_ERROR(parse_codec_kind("vae"), ErrorCode::InvalidConfig);
}

TEST(Identity, EncodeDecodeUnchanged) {
  const Codec c = Codec::identity(5);
  const Vector x = gaussian(5, 1, 1);
  EXPECT_EQ(c.encode(x), x);
  EXPECT_EQ(c.decode(c.encode(x)), x);
  EXPECT_EQ(c.latent_dim(), 5u);
  EXPECT_HEN_ERROR(c.encode(Vector::Zero(4)), ErrorCode::DimensionMismatch);
  EXPECT_HEN_ERROR(c.decode(Vector::Zero(6)), ErrorCode::DimensionMismatch);
}

TEST(SphericalNorm, ThreeFourFive) {
  const Codec c = Codec::spherical_norm(2);
  const Vector z = c.encode((Vector(2) << 3, 4).finished());
  EXPECT_NEAR(z(0), 0.6, 1e-15);
  EXPECT_NEAR(z(1), 0.8, 1e-15);
  EXPECT_EQ(c.encode(Vector::Zero(2)), Vector::Zero(2));
  EXPECT_EQ(c.decode(z), z);
}

TEST(SphericalNorm, UnitNorm) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_NEAR(spherical_normalize(gaussian(9, 1, s) * 100.0).norm(), 1.0, 1e-12);
  }
}

TEST(RandomProjection, OrthonormalRowsAndDeterministic) {
  const Codec a = Codec::random_projection(64, 40, 7);
  const Codec b = Codec::random_projection(64, 40, 7);
  const Codec c = Codec::random_projection(64, 40, 8);
  const Matrix& q = a.projection();
  EXPECT_EQ(q.rows(), 40);
  EXPECT_EQ(q.cols(), 64);
  EXPECT_LE((q * q.transpose() - Matrix::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(q, b.projection());
  EXPECT_NE(q, c.projection());
  const Vector x = gaussian(64, 1, 3);
  EXPECT_EQ(a.encode(x), a.encode(x));
  EXPECT_EQ(a.encode(x), b.encode(x));
  EXPECT_EQ(*a.seed(), 7u);
  EXPECT_EQ(a.name(), "projection-40");
}

TEST(RandomProjection, DimensionPreservingIsOrthogonal) {
  const Codec a = Codec::random_projection(16, 16, 1);
  const Matrix& q = a.projection();
  EXPECT_LE((q.transpose() * q - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RandomProjection, RowSpaceRoundTripAndCosine) {
  const Codec a = Codec::random_projection(50, 20, 2);
  const Matrix& q = a.projection();
  const Vector x = q.transpose() * gaussian(20, 1, 4);
  const Vector y = q.transpose() * gaussian(20, 1, 5);
  const Vector xn = x / x.norm();
  EXPECT_LE((a.decode(a.encode(xn)) - xn).norm(), 1e-10);
  const double cos_in = x.dot(y) / (x.norm() * y.norm());
  EXPECT_NEAR(a.encode(x).dot(a.encode(y)), cos_in, 1e-10);
}

TEST(RandomProjection, TileGridAnnihilatesTileConstantImages) {
  const ImageShape shape{8, 12, 2};
  const TileGrid grid{shape, 4};
  const std::size_t free_dim = shape.size() - (8 / 4) * (12 / 4) * 2;
  const Codec a = Codec::random_projection(shape.size(), free_dim, 3, grid);
  const Matrix& q = a.projection();
  EXPECT_LE((q * q.transpose() - Matrix::Identity(q.rows(), q.rows())).cwiseAbs().maxCoeff(), 1e-10);
  Image img(shape);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 12; ++x)
      for (int c = 0; c < 2; ++c) img.at(y, x, c) = 0.1 * (y / 4) + 0.3 * (x / 4) + 0.7 * c;
  EXPECT_LE((q * img.flatten()).norm(), 1e-12);
  EXPECT_HEN_ERROR(Codec::random_projection(shape.size(), free_dim + 1, 3, grid), ErrorCode::InvalidArgument);
  EXPECT_HEN_ERROR(Codec::random_projection(shape.size(), 10, 3, TileGrid{shape, 5}), ErrorCode::InvalidArgument);
  EXPECT_HEN_ERROR(Codec::random_projection(shape.size() + 1, 10, 3, grid), ErrorCode::DimensionMismatch);
}

TEST(RandomProjection, RejectsBadLatentDim) {
  EXPECT_HEN_ERROR(Codec::random_projection(10, 11, 1), ErrorCode::InvalidArgument);
  EXPECT_HEN_ERROR(Codec::random_projection(10, 0, 1), ErrorCode::InvalidArgument);
}

TEST(Precomputed, EncodeByExactMatchDecodeByNearest) {
  const Codec c = Codec::precomputed(small_table());
  EXPECT_EQ(c.kind(), CodecKind::Precomputed);
  EXPECT_EQ(c.latent_dim(), 3u);
  EXPECT_EQ(c.input_dim(), 4u);
  const Vector orig = (Vector(4) << 0, 1, 1, 0).finished();
  EXPECT_EQ(c.encode(orig), (Vector(3) << 0, 2, 0).finished());
  EXPECT_EQ(c.decode((Vector(3) << 0, 2, 0).finished()), orig);
  EXPECT_EQ(c.nearest_id((Vector(3) << 0.1, 0.2, 5).finished()), 7u);
  EXPECT_HEN_ERROR(c.encode((Vector(4) << 1, 0, 0, 0).finished()), ErrorCode::LookupMiss);
}

TEST(Precomputed, TiesGoToLowestId) {
  EmbeddingTable t(2, 1);
  t.insert(9, (Vector(2) << 1, 0).finished(), Vector::Constant(1, 0.9));
  t.insert(3, (Vector(2) << 2, 0).finished(), Vector::Constant(1, 0.3));
  const Codec c = Codec::precomputed(std::move(t));
  EXPECT_EQ(c.nearest_id((Vector(2) << 1, 0).finished()), 3u);
}

TEST(Precomputed, EmptyTableRejected) {
  EXPECT_HEN_ERROR(Codec::precomputed(EmbeddingTable(3, 4)), ErrorCode::EmptyTable);
  EXPECT_HEN_ERROR(Codec::identity(3).table(), ErrorCode::EmptyTable);
  EXPECT_HEN_ERROR(Codec::identity(3).projection(), ErrorCode::InvalidArgument);
  EXPECT_HEN_ERROR(Codec::identity(3).nearest_id(Vector::Zero(3)), ErrorCode::InvalidArgument);
}

TEST(PixelTextCodec, EncodesBlockCells) {
  const Codec c = Codec::pixel_text();
  EXPECT_EQ(c.latent_dim(), 256u);
  const Vector v = c.encode_text("");
  EXPECT_EQ(v(0), 1.0);
  EXPECT_TRUE(((v.array() == 0.0) || (v.array() == 1.0)).all());
  EXPECT_EQ(c.encode(v), v);
  EXPECT_HEN_ERROR(Codec::pixel_text(15), ErrorCode::BlockTooSmall);
  EXPECT_HEN_ERROR(Codec::identity(4).encode_text("x"), ErrorCode::InvalidArgument);
  EXPECT_EQ(Codec::pixel_text(20).latent_dim(), 400u);
}
