#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mavi/quality/niqe.hpp"
#include "mavi/quality/psnr.hpp"
#include "mavi/quality/synth_images.hpp"

using namespace mavi;

namespace {

const NsModel& test_model() {
  static const NsModel m = fit_ns_model(render_corpus(32, 128, 1000), 32, 500);
  return m;
}

// Direct 7x7 Gaussian-window MSCN with periodic indexing.
double mscn_at(const GrayImage& img, int x, int y, double C) {
  const double s = 7.0 / 6.0;
  double wsum = 0, m = 0, m2 = 0;
  for (int dy = -3; dy <= 3; ++dy)
    for (int dx = -3; dx <= 3; ++dx) {
      const double w = std::exp(-(dx * dx + dy * dy) / (2 * s * s));
      const int xx = (x + dx + img.width()) % img.width(), yy = (y + dy + img.height()) % img.height();
      wsum += w;
      m += w * img.at(xx, yy);
      m2 += w * img.at(xx, yy) * img.at(xx, yy);
    }
  m /= wsum;
  m2 /= wsum;
  return (img.at(x, y) - m) / (std::sqrt(std::abs(m2 - m * m)) + C);
}

}  // namespace

TEST_CASE("mscn: constant image, checkerboard, direct oracle, scale invariance") {
  GrayImage flat(40, 30, 0.37);
  const cv::Mat1d z = mscn(flat);
  CHECK(cv::norm(z, cv::NORM_INF) == 0.0);

  GrayImage cb(32, 24);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 32; ++x) cb.at(x, y) = (x + y) % 2;
  CHECK(std::abs(cv::mean(mscn(cb))[0]) < 1e-6);

  const GrayImage img = render_clean(64, 7);
  const cv::Mat1d m = mscn(img, 1e-3);
  for (int y = 0; y < 64; y += 5)
    for (int x = 0; x < 64; x += 3) CHECK(m(y, x) == doctest::Approx(mscn_at(img, x, y, 1e-3)).epsilon(1e-9));

  // Scaling by k leaves MSCN unchanged up to the C term.
  GrayImage scaled(img.pixels * 0.5);
  const cv::Mat1d a = mscn(img, 1e-12), b = mscn(scaled, 1e-12);
  CHECK(cv::norm(a - b, cv::NORM_INF) < 1e-6);
  CHECK_THROWS_AS(mscn(img, 0.0), InvalidInput);
}

TEST_CASE("mahalanobis score: identity covariance and x = mu") {
  NsModel m;
  m.mu = Eigen::VectorXd::Zero(kNiqeFeatureDim);
  m.sigma = Eigen::MatrixXd::Identity(kNiqeFeatureDim, kNiqeFeatureDim);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(kNiqeFeatureDim);
  x(0) = 3;
  x(1) = 4;
  CHECK(mahalanobis_score(x, m) == doctest::Approx(5.0).epsilon(1e-5));
  CHECK(mahalanobis_score(m.mu, m) == 0.0);
  // Diagonal oracle.
  m.sigma.diagonal().setConstant(4.0);
  CHECK(mahalanobis_score(x, m) == doctest::Approx(2.5).epsilon(1e-5));
  // Indefinite covariance is rejected.
  m.sigma(0, 0) = -1.0;
  CHECK_THROWS_AS(mahalanobis_score(x, m), Error);
  CHECK_THROWS_AS(m.validate(), InvalidInput);
}

TEST_CASE("niqe of the model's own mean features is zero") {
  const GrayImage img = render_clean(128, 42);
  NsModel m = test_model();
  m.mu = image_features(img, m.patch_size, m.C);
  CHECK(niqe(img, m) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(niqe(GrayImage(16, 16, 0.5), m), InvalidInput);
}

TEST_CASE("fitted model is symmetric PSD and round-trips through JSON") {
  const NsModel& m = test_model();
  m.validate();
  CHECK(m.mu.size() == kNiqeFeatureDim);
  const auto path = std::filesystem::temp_directory_path() / "mavi_test_model.json";
  save_ns_model(path.string(), m);
  const NsModel back = load_ns_model(path.string());
  CHECK((back.mu - m.mu).cwiseAbs().maxCoeff() < 1e-12 * (1 + m.mu.cwiseAbs().maxCoeff()));
  CHECK((back.sigma - m.sigma).cwiseAbs().maxCoeff() < 1e-12 * (1 + m.sigma.cwiseAbs().maxCoeff()));
  CHECK(back.patch_size == m.patch_size);
  std::filesystem::remove(path);
}

TEST_CASE("blur always raises the score") {
  const NsModel& m = test_model();
  int wins = 0, total = 0;
  for (int i = 0; i < 10; ++i) {
    const GrayImage c = render_clean(128, 5000 + i);
    const double sc = niqe(c, m);
    for (double s : {1.0, 2.0, 4.0}) {
      wins += niqe(gaussian_blur(c, s), m) > sc;
      ++total;
    }
  }
  CHECK(total == 30);
  CHECK(wins >= 29);  // at least 95 %
}

TEST_CASE("niqe is invariant to translation by whole patches") {
  const NsModel& m = test_model();
  for (int seed : {1, 2, 3}) {
    const GrayImage img = render_clean(128, 7000 + seed);
    const double a = niqe(img, m);
    const double b = niqe(shift_wrap(img, 32, 64), m);
    CHECK(std::abs(a - b) <= 0.02 * a);
  }
}

TEST_CASE("normalisation and dataset filtering") {
  CHECK(niqe_normalize(2.0, 2.0, 6.0) == 0.0);
  CHECK(niqe_normalize(6.0, 2.0, 6.0) == 1.0);
  CHECK(niqe_normalize(4.0, 2.0, 6.0) == 0.5);
  CHECK(niqe_normalize(9.0, 2.0, 6.0) == 1.0);
  CHECK_THROWS_AS(niqe_normalize(1.0, 2.0, 2.0), InvalidInput);

  const NsModel& m = test_model();
  std::vector<GrayImage> batch;
  for (int i = 0; i < 10; ++i) batch.push_back(render_clean(128, 9000 + i));
  batch.push_back(gaussian_blur(render_clean(128, 9100), 4.0));
  batch.push_back(gaussian_blur(render_clean(128, 9101), 4.0));
  const FilterResult r = filter_dataset(batch, m, 0.8);
  CHECK(r.rejected_count() == 2);
  CHECK_FALSE(r.kept[10]);
  CHECK_FALSE(r.kept[11]);
  for (int i = 0; i < 10; ++i) CHECK(r.kept[i]);
  CHECK(filter_dataset(batch, m, 1.0).rejected_count() == 0);

  // Identical images: degenerate normalisation keeps everything.
  std::vector<GrayImage> same(4, batch[0]);
  CHECK(filter_dataset(same, m, 0.5).rejected_count() == 0);
  CHECK(filter_scores({3.0}, 0.1).rejected_count() == 0);
  CHECK_THROWS_AS(filter_scores({1.0, 2.0}, 0.0), InvalidInput);

  std::ostringstream os;
  write_filter_csv(os, {"a.pgm", "b.pgm"}, filter_scores({1.0, 3.0}, 0.8));
  CHECK(os.str() == "file,niqe,niqe_norm,kept\na.pgm,1.000000,0.000000,1\nb.pgm,3.000000,1.000000,0\n");
}

TEST_CASE("psnr closed forms and symmetry") {
  GrayImage a(50, 40, 0.5), b(50, 40, 0.6), c(50, 40, 0.525);
  CHECK(psnr(a, a) == std::numeric_limits<double>::infinity());
  CHECK(std::abs(psnr(a, b) - 20.0) < 1e-9);
  CHECK(std::abs(psnr(a, c) - 10.0 * std::log10(1.0 / (0.025 * 0.025))) < 1e-9);
  CHECK(psnr(a, c) == doctest::Approx(32.04).epsilon(1e-3));
  std::mt19937_64 rng(5);
  const GrayImage x = render_clean(64, 3), y = add_noise(x, 0.05, rng);
  CHECK(psnr(x, y) == psnr(y, x));
  double mse = 0;
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) mse += (x.at(i, j) - y.at(i, j)) * (x.at(i, j) - y.at(i, j));
  mse /= 64 * 64;
  CHECK(std::abs(psnr(x, y) - 10 * std::log10(1 / mse)) < 1e-9);
  CHECK_THROWS_AS(psnr(a, GrayImage(40, 50, 0.5)), InvalidInput);
}

TEST_CASE("renders are deterministic, tileable and round-trip through PGM") {
  const GrayImage a = render_clean(64, 11), b = render_clean(64, 11);
  CHECK(cv::norm(a.pixels - b.pixels, cv::NORM_INF) == 0.0);
  double lo, hi;
  cv::minMaxLoc(a.pixels, &lo, &hi);
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
  const auto path = (std::filesystem::temp_directory_path() / "mavi_test.pgm").string();
  write_pgm(path, a);
  const GrayImage back = read_pgm(path);
  CHECK(cv::norm(back.pixels - a.pixels, cv::NORM_INF) <= 0.5 / 255.0 + 1e-12);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_pgm("/nonexistent/x.pgm"), Error);
}
