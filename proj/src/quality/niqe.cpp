#include "mavi/quality/niqe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "mavi/geometry/types.hpp"

namespace mavi {

void NsModel::validate() const {
  if (patch_size < 8) throw InvalidInput("patch size must be at least 8");
  if (!(C > 0.0)) throw InvalidInput("MSCN constant must be positive");
  if (mu.size() != kNiqeFeatureDim) throw InvalidInput("model mean has the wrong dimension");
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size()) throw InvalidInput("model covariance has the wrong shape");
  if (!mu.allFinite() || !sigma.allFinite()) throw InvalidInput("model has non-finite entries");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) throw InvalidInput("model covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale) throw InvalidInput("model covariance is not positive semi-definite");
}

NsModel load_ns_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed model " + path + ": " + e.what());
  }
  NsModel m;
  const auto mu = j.at("mu").get<std::vector<double>>();
  const auto sg = j.at("sigma").get<std::vector<std::vector<double>>>();
  m.patch_size = j.value("patch_size", m.patch_size);
  m.C = j.value("C", m.C);
  m.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  m.sigma.resize(static_cast<Eigen::Index>(sg.size()), static_cast<Eigen::Index>(mu.size()));
  for (std::size_t r = 0; r < sg.size(); ++r) {
    if (sg[r].size() != mu.size()) throw InvalidInput("model covariance row has the wrong length");
    for (std::size_t c = 0; c < mu.size(); ++c) m.sigma(r, c) = sg[r][c];
  }
  m.validate();
  return m;
}

void save_ns_model(const std::string& path, const NsModel& model) {
  model.validate();
  nlohmann::json j;
  j["patch_size"] = model.patch_size;
  j["C"] = model.C;
  j["mu"] = std::vector<double>(model.mu.data(), model.mu.data() + model.mu.size());
  std::vector<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < model.sigma.rows(); ++r) {
    rows.emplace_back();
    for (Eigen::Index c = 0; c < model.sigma.cols(); ++c) rows.back().push_back(model.sigma(r, c));
  }
  j["sigma"] = rows;
  std::ofstream out(path);
  if (!out) throw Error("cannot write model " + path);
  out << j.dump(1) << '\n';
}

namespace {

void moments(const double* v, std::size_t n, double* out) {
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = v[i], x2 = x * x;
    m1 += x;
    m2 += x2;
    m3 += x2 * x;
    m4 += x2 * x2;
  }
  const double inv = 1.0 / static_cast<double>(n);
  m1 *= inv, m2 *= inv, m3 *= inv, m4 *= inv;
  out[0] = m1;
  out[1] = std::max(0.0, m2 - m1 * m1);
  out[2] = m3;
  out[3] = m4 / (m2 * m2 + 1e-12);
}

}  // namespace

std::vector<Eigen::VectorXd> patch_features(const GrayImage& img, int P, double C) {
  if (P < 8) throw InvalidInput("patch size must be at least 8");
  if (img.width() < P || img.height() < P) throw InvalidInput("image is smaller than one patch");
  const cv::Mat1d m = mscn(img, C);
  const int W = img.width(), H = img.height();
  // Neighbour offsets, wrapping at the borders like the MSCN window.
  const int off[4][2] = {{1, 0}, {0, 1}, {1, 1}, {-1, 1}};
  std::vector<Eigen::VectorXd> out;
  std::vector<double> buf(static_cast<std::size_t>(P) * P);
  for (int py = 0; py + P <= H; py += P)
    for (int px = 0; px + P <= W; px += P) {
      Eigen::VectorXd f(kNiqeFeatureDim);
      std::size_t n = 0;
      for (int y = py; y < py + P; ++y)
        for (int x = px; x < px + P; ++x) buf[n++] = m(y, x);
      moments(buf.data(), n, f.data());
      for (int o = 0; o < 4; ++o) {
        n = 0;
        for (int y = py; y < py + P; ++y)
          for (int x = px; x < px + P; ++x) {
            const int xx = (x + off[o][0] + W) % W, yy = (y + off[o][1]) % H;
            buf[n++] = m(y, x) * m(yy, xx);
          }
        moments(buf.data(), n, f.data() + 4 * (o + 1));
      }
      out.push_back(std::move(f));
    }
  return out;
}

Eigen::VectorXd image_features(const GrayImage& img, int patch_size, double C) {
  const auto rows = patch_features(img, patch_size, C);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(kNiqeFeatureDim);
  for (const auto& r : rows) x += r;
  return x / static_cast<double>(rows.size());
}

double mahalanobis_score(const Eigen::VectorXd& x, const NsModel& model) {
  if (x.size() != model.mu.size()) throw InvalidInput("feature dimension does not match the model");
  const Eigen::MatrixXd S = model.sigma + 1e-6 * Eigen::MatrixXd::Identity(model.sigma.rows(), model.sigma.cols());
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw Error("model covariance is singular after regularisation");
  const Eigen::VectorXd d = x - model.mu;
  return std::sqrt(std::max(0.0, d.dot(llt.solve(d))));
}

double niqe(const GrayImage& img, const NsModel& model) {
  return mahalanobis_score(image_features(img, model.patch_size, model.C), model);
}

NsModel fit_ns_model(const std::vector<GrayImage>& images, int patch_size, int max_patches, double C) {
  if (max_patches < 2) throw InvalidInput("need at least two patches to fit a model");
  std::vector<Eigen::VectorXd> rows;
  for (const auto& img : images) {
    for (auto& r : patch_features(img, patch_size, C)) {
      if (static_cast<int>(rows.size()) >= max_patches) break;
      rows.push_back(std::move(r));
    }
    if (static_cast<int>(rows.size()) >= max_patches) break;
  }
  if (rows.size() < 2) throw InvalidInput("not enough patches to fit a model");
  NsModel m;
  m.patch_size = patch_size;
  m.C = C;
  m.mu = Eigen::VectorXd::Zero(kNiqeFeatureDim);
  for (const auto& r : rows) m.mu += r;
  m.mu /= static_cast<double>(rows.size());
  m.sigma = Eigen::MatrixXd::Zero(kNiqeFeatureDim, kNiqeFeatureDim);
  for (const auto& r : rows) m.sigma += (r - m.mu) * (r - m.mu).transpose();
  m.sigma /= static_cast<double>(rows.size() - 1);
  m.sigma = 0.5 * (m.sigma + m.sigma.transpose());
  return m;
}

double niqe_normalize(double score, double lo, double hi) {
  if (!(hi > lo)) throw InvalidInput("normalisation needs max > min");
  return std::clamp((score - lo) / (hi - lo), 0.0, 1.0);
}

int FilterResult::rejected_count() const {
  return static_cast<int>(std::count(kept.begin(), kept.end(), false));
}

FilterResult filter_scores(const std::vector<double>& scores, double s_dis) {
  if (!(s_dis > 0.0) || s_dis > 1.0) throw InvalidInput("S_dis must lie in (0, 1]");
  FilterResult r;
  r.scores = scores;
  r.normalized.assign(scores.size(), 0.0);
  r.kept.assign(scores.size(), true);
  if (scores.empty()) return r;
  if (scores.size() == 1) {
    spdlog::warn("single-image batch: kept without filtering");
    return r;
  }
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  if (!(*hi > *lo)) return r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    r.normalized[i] = niqe_normalize(scores[i], *lo, *hi);
    r.kept[i] = r.normalized[i] <= s_dis;
  }
  return r;
}

FilterResult filter_dataset(const std::vector<GrayImage>& images, const NsModel& model, double s_dis) {
  std::vector<double> scores;
  scores.reserve(images.size());
  for (const auto& img : images) scores.push_back(niqe(img, model));
  return filter_scores(scores, s_dis);
}

void write_filter_csv(std::ostream& os, const std::vector<std::string>& names, const FilterResult& r) {
  if (names.size() != r.scores.size()) throw InvalidInput("one name per image is required");
  os << "file,niqe,niqe_norm,kept\n";
  char buf[64];
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%d\n", r.scores[i], r.normalized[i], r.kept[i] ? 1 : 0);
    os << names[i] << buf;
  }
}

}  // namespace mavi
