#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "genlab/data.hpp"
#include "genlab/mnist.hpp"
#include "genlab/rng.hpp"

using namespace genlab;

TEST_CASE("two point distribution puts mass on the two atoms") {
  Rng rng(1);
  const LabeledDataset ds = sample_dataset(two_point(4), 400, rng);
  int positives = 0;
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    if (ds.y[i] == 1) {
      ++positives;
      CHECK(ds.point(i).isApprox(Eigen::VectorXd::Ones(4)));
    } else {
      CHECK(ds.point(i).norm() == 0.0);
    }
  }
  // weight 1/2 each; 400 draws stay within 5 sigma of the mean
  CHECK(positives > 150);
  CHECK(positives < 250);
}

TEST_CASE("parity diagonal supports i/n with odd-index positives") {
  const int n = 7;
  Rng rng(2);
  const LabeledDataset ds = sample_dataset(parity_diagonal(n), 300, rng);
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    const double v = ds.X(i, 0);
    for (Eigen::Index j = 1; j < n; ++j) CHECK(ds.X(i, j) == v);
    const int idx = static_cast<int>(std::lround(v * n));
    CHECK(idx >= 1);
    CHECK(idx <= n);
    CHECK(std::abs(v - static_cast<double>(idx) / n) < 1e-12);
    CHECK(ds.y[i] == (idx % 2 == 1 ? 1 : -1));
  }
}

TEST_CASE("blob pair keeps the promised separation") {
  const int n = 6;
  const double margin = 0.3;
  const double spread = 0.05;
  Rng rng(3);
  const LabeledDataset ds =
      sample_dataset(blob_pair(n, margin, spread), 500, rng);
  CHECK(separation(ds) >= margin - 1e-9);
  CHECK_THROWS_AS(blob_pair(2, 1.5, 0.4), ContractError);
}

TEST_CASE("outlier mix slices have the stated sums") {
  const int n = 8;
  const double c = 0.4;
  Rng rng(4);
  const LabeledDataset ds = sample_dataset(outlier_mix(n, c), 600, rng);
  int s1 = 0, s2 = 0, s3 = 0;
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    const double sum = ds.X.row(i).sum();
    if (ds.y[i] == 1) {
      ++s1;
      CHECK(sum == doctest::Approx(n / 2.0 + c).epsilon(1e-9));
      CHECK(ds.X.row(i).minCoeff() >= 2.0 * c / n - 1e-9);
    } else if (std::abs(sum - (n / 2.0 - c)) < 1e-6) {
      ++s2;
      CHECK(ds.X.row(i).maxCoeff() <= 1.0 - 2.0 * c / n + 1e-9);
    } else {
      ++s3;
      CHECK(sum == doctest::Approx(static_cast<double>(n) - c).epsilon(1e-9));
    }
  }
  // slice weights 99/200, 99/200, 1/100
  CHECK(s1 > 200);
  CHECK(s2 > 200);
  CHECK(s3 < 40);
  CHECK(s3 >= 1);
  CHECK_THROWS_AS(outlier_mix(6, 1.0), ContractError);
}

TEST_CASE("samplers stay inside the unit box") {
  Rng rng(5);
  for (const DistributionSpec& spec :
       {two_point(3), parity_diagonal(5), blob_pair(4, 0.2, 0.1),
        outlier_mix(5, 0.3)}) {
    const LabeledDataset ds = sample_dataset(spec, 200, rng);
    CHECK(ds.X.minCoeff() >= 0.0);
    CHECK(ds.X.maxCoeff() <= 1.0);
  }
}

TEST_CASE("sampling is deterministic per seed") {
  Rng a(99), b(99);
  const LabeledDataset da = sample_dataset(blob_pair(3, 0.2, 0.1), 50, a);
  const LabeledDataset db = sample_dataset(blob_pair(3, 0.2, 0.1), 50, b);
  CHECK(da.X == db.X);
  CHECK(da.y == db.y);
}

TEST_CASE("separation is infinite for a single-label dataset") {
  LabeledDataset ds = make_dataset(3, 2);
  ds.X.setConstant(0.5);
  ds.X(1, 0) = 0.1;
  ds.X(2, 1) = 0.9;
  ds.y.setConstant(1);
  CHECK(std::isinf(separation(ds)));
}

TEST_CASE("perturb_cloud appends clipped copies after the originals") {
  LabeledDataset ds = make_dataset(2, 2);
  ds.X << 0.05, 0.5, 0.9, 0.9;
  ds.y << 1, -1;
  std::vector<Eigen::VectorXd> moves(2);
  moves[0] = Eigen::VectorXd(2);
  moves[0] << -0.1, 0.0;  // pushes below 0, must clip
  moves[1] = Eigen::VectorXd(2);
  moves[1] << 0.05, 0.05;

  const LabeledDataset cloud = perturb_cloud(ds, 0.12, moves);
  CHECK(cloud.count() == 4);
  CHECK(cloud.X.topRows(2) == ds.X);
  CHECK(cloud.y[2] == 1);
  CHECK(cloud.y[3] == -1);
  CHECK(cloud.X(2, 0) == 0.0);
  CHECK(cloud.X(3, 0) == doctest::Approx(0.95));

  moves[0] << 0.2, 0.2;  // norm above eps
  CHECK_THROWS_AS(perturb_cloud(ds, 0.12, moves), ContractError);
}

TEST_CASE("alternating line knots must increase strictly") {
  AlternatingLineSpec spec;
  spec.n = 2;
  spec.knots = {0.1, 0.5, 0.5, 0.9};
  CHECK_THROWS_AS(alternating_line_dataset(spec), ContractError);

  spec.knots = {0.2, 0.4, 0.6};
  const LabeledDataset ds = alternating_line_dataset(spec);
  CHECK(ds.count() == 3);
  CHECK(ds.y[0] == 1);
  CHECK(ds.y[1] == -1);
  CHECK(ds.y[2] == 1);
  CHECK(ds.X(1, 0) == 0.4);
  CHECK(ds.X(1, 1) == 0.4);
}

TEST_CASE("equispaced knots cover [0.1, 0.9]") {
  const AlternatingLineSpec spec = equispaced_alternating_line(3, 5);
  CHECK(spec.knots.front() == doctest::Approx(0.1));
  CHECK(spec.knots.back() == doctest::Approx(0.9));
  CHECK(spec.knots.size() == 5);
}

TEST_CASE("data_fraction rounds and samples without replacement") {
  Rng rng(6);
  const LabeledDataset ds = sample_dataset(blob_pair(3, 0.2, 0.1), 100, rng);
  const LabeledDataset half = data_fraction(ds, 0.5, rng);
  CHECK(half.count() == 50);
  const LabeledDataset third = data_fraction(ds, 1.0 / 3.0, rng);
  CHECK(third.count() == 33);
  const LabeledDataset all = data_fraction(ds, 1.0, rng);
  CHECK(all.count() == 100);

  // no row appears twice: distances between distinct picks stay positive
  for (Eigen::Index i = 0; i < half.count(); ++i)
    for (Eigen::Index j = i + 1; j < half.count(); ++j)
      CHECK((half.X.row(i) - half.X.row(j)).norm() > 0.0);
  CHECK_THROWS_AS(data_fraction(ds, 0.0, rng), ContractError);
}

namespace {

void write_bytes(const std::string& path,
                 const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void push_be32(std::vector<unsigned char>& bytes, std::uint32_t v) {
  bytes.push_back(static_cast<unsigned char>(v >> 24));
  bytes.push_back(static_cast<unsigned char>(v >> 16));
  bytes.push_back(static_cast<unsigned char>(v >> 8));
  bytes.push_back(static_cast<unsigned char>(v));
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("idx loader round trip with the even-odd rule") {
  std::vector<unsigned char> images;
  push_be32(images, 0x00000803);
  push_be32(images, 3);  // three 2x2 images
  push_be32(images, 2);
  push_be32(images, 2);
  for (int i = 0; i < 12; ++i)
    images.push_back(static_cast<unsigned char>(i * 20));

  std::vector<unsigned char> labels;
  push_be32(labels, 0x00000801);
  push_be32(labels, 3);
  labels.push_back(7);
  labels.push_back(2);
  labels.push_back(0);

  const std::string ipath = temp_path("genlab_idx_images");
  const std::string lpath = temp_path("genlab_idx_labels");
  write_bytes(ipath, images);
  write_bytes(lpath, labels);

  const LabeledDataset ds = mnist_load(ipath, lpath);
  CHECK(ds.count() == 3);
  CHECK(ds.dim() == 4);
  CHECK(ds.y[0] == 1);   // 7 is odd
  CHECK(ds.y[1] == -1);  // 2 is even
  CHECK(ds.y[2] == -1);  // 0 is even
  CHECK(ds.X(0, 0) == 0.0);
  CHECK(ds.X(0, 1) == doctest::Approx(20.0 / 255.0));
  CHECK(ds.X.maxCoeff() <= 1.0);

  std::filesystem::remove(ipath);
  std::filesystem::remove(lpath);
}

TEST_CASE("idx loader distinguishes its failure modes") {
  const std::string ipath = temp_path("genlab_idx_bad_images");
  const std::string lpath = temp_path("genlab_idx_bad_labels");

  // wrong magic
  std::vector<unsigned char> bad_magic;
  push_be32(bad_magic, 0x00000707);
  push_be32(bad_magic, 1);
  push_be32(bad_magic, 1);
  push_be32(bad_magic, 1);
  bad_magic.push_back(0);
  write_bytes(ipath, bad_magic);
  CHECK_THROWS_AS(read_idx_images(ipath), IdxMagicError);

  // truncated pixel payload
  std::vector<unsigned char> truncated;
  push_be32(truncated, 0x00000803);
  push_be32(truncated, 2);
  push_be32(truncated, 2);
  push_be32(truncated, 2);
  truncated.push_back(1);
  write_bytes(ipath, truncated);
  CHECK_THROWS_AS(read_idx_images(ipath), IdxTruncatedError);

  // count mismatch between images and labels
  std::vector<unsigned char> images;
  push_be32(images, 0x00000803);
  push_be32(images, 1);
  push_be32(images, 1);
  push_be32(images, 1);
  images.push_back(128);
  std::vector<unsigned char> labels;
  push_be32(labels, 0x00000801);
  push_be32(labels, 2);
  labels.push_back(1);
  labels.push_back(2);
  write_bytes(ipath, images);
  write_bytes(lpath, labels);
  CHECK_THROWS_AS(mnist_load(ipath, lpath), IdxCountMismatchError);

  std::filesystem::remove(ipath);
  std::filesystem::remove(lpath);
}

TEST_CASE("label rules can drop classes but not all of them") {
  std::vector<unsigned char> images;
  push_be32(images, 0x00000803);
  push_be32(images, 2);
  push_be32(images, 1);
  push_be32(images, 1);
  images.push_back(10);
  images.push_back(250);
  std::vector<unsigned char> labels;
  push_be32(labels, 0x00000801);
  push_be32(labels, 2);
  labels.push_back(3);
  labels.push_back(8);

  const std::string ipath = temp_path("genlab_idx_rule_images");
  const std::string lpath = temp_path("genlab_idx_rule_labels");
  write_bytes(ipath, images);
  write_bytes(lpath, labels);

  LabelRule keep_three{};
  keep_three.fill(0);
  keep_three[3] = 1;
  const LabeledDataset ds = mnist_load(ipath, lpath, keep_three);
  CHECK(ds.count() == 1);
  CHECK(ds.y[0] == 1);

  LabelRule drop_all{};
  drop_all.fill(0);
  CHECK_THROWS_AS(mnist_load(ipath, lpath, drop_all), ContractError);

  std::filesystem::remove(ipath);
  std::filesystem::remove(lpath);
}
