#include "mavi/harness/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "mavi/harness/facility.hpp"

namespace mavi {

F1Score eval_f1(const std::vector<Vec2>& predicted, const std::vector<Vec2>& truth, double match_distance) {
  std::vector<std::tuple<double, int, int>> pairs;
  for (int i = 0; i < static_cast<int>(predicted.size()); ++i)
    for (int j = 0; j < static_cast<int>(truth.size()); ++j) {
      const double d = (predicted[i] - truth[j]).norm();
      if (d < match_distance) pairs.emplace_back(d, i, j);
    }
  std::sort(pairs.begin(), pairs.end());
  std::vector<char> used_p(predicted.size(), 0), used_t(truth.size(), 0);
  F1Score s;
  for (const auto& [d, i, j] : pairs) {
    if (used_p[i] || used_t[j]) continue;
    used_p[i] = used_t[j] = 1;
    ++s.true_positives;
  }
  s.predicted = static_cast<int>(predicted.size());
  s.truth = static_cast<int>(truth.size());
  if (s.predicted == 0 && s.truth == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  s.precision = s.predicted ? static_cast<double>(s.true_positives) / s.predicted : 0.0;
  s.recall = s.truth ? static_cast<double>(s.true_positives) / s.truth : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

std::vector<Vec2> truth_column_centers(const PointCloud& cloud) {
  if (!cloud.has_labels()) throw InvalidInput("cloud carries no truth labels");
  std::map<int, std::pair<Vec2, int>> acc;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!is_column_label(cloud.labels[i])) continue;
    auto& [sum, n] = acc.try_emplace(cloud.labels[i], Vec2::Zero(), 0).first->second;
    sum += cloud.points[i].head<2>();
    ++n;
  }
  std::vector<Vec2> out;
  for (const auto& [label, a] : acc) out.push_back(a.first / a.second);
  return out;
}

F1Score eval_f1(const std::vector<StructureInstance>& columns, const PointCloud& cloud, double match_distance) {
  std::vector<Vec2> pred;
  for (const auto& c : columns) {
    if (c.axis) {
      pred.push_back(c.axis->center);
    } else {
      Vec2 s = Vec2::Zero();
      for (int i : c.indices) s += cloud.points.at(i).head<2>();
      pred.push_back(c.indices.empty() ? s : Vec2(s / c.indices.size()));
    }
  }
  return eval_f1(pred, truth_column_centers(cloud), match_distance);
}

double eval_wall_fraction(const std::vector<StructureInstance>& walls, const PointCloud& cloud) {
  if (!cloud.has_labels()) throw InvalidInput("cloud carries no truth labels");
  std::vector<char> hit(cloud.size(), 0);
  for (const auto& w : walls)
    for (int i : w.indices) {
      if (i < 0 || static_cast<std::size_t>(i) >= cloud.size()) throw InvalidInput("wall index out of range");
      hit[i] = 1;
    }
  std::size_t truth = 0, found = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!is_wall_label(cloud.labels[i])) continue;
    ++truth;
    found += hit[i];
  }
  return truth ? static_cast<double>(found) / truth : 1.0;
}

TrackingStats eval_tracking(const std::vector<double>& t, const std::vector<Vec3>& reference,
                            const std::vector<Vec3>& executed, double window) {
  if (t.empty()) throw InvalidInput("empty tracking log");
  if (reference.size() != t.size() || executed.size() != t.size())
    throw InvalidInput("tracking log columns differ in length");
  if (!(window > 0.0)) throw InvalidInput("RPE window must be positive");
  TrackingStats s;
  s.samples = static_cast<int>(t.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = (executed[i] - reference[i]).norm();
    s.ape_max = std::max(s.ape_max, e);
    sq += e * e;
  }
  s.ape_rmse = std::sqrt(sq / t.size());

  sq = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    j = std::max(j, i + 1);
    while (j < t.size() && t[j] < t[i] + window - 1e-9) ++j;
    if (j >= t.size()) break;
    const double e = ((executed[j] - executed[i]) - (reference[j] - reference[i])).norm();
    s.rpe_max = std::max(s.rpe_max, e);
    sq += e * e;
    ++s.rpe_pairs;
  }
  if (s.rpe_pairs) s.rpe_rmse = std::sqrt(sq / s.rpe_pairs);
  return s;
}

TrackingStats eval_tracking(const std::vector<FlightSample>& log, double window) {
  std::vector<double> t;
  std::vector<Vec3> ref, exe;
  for (const auto& s : log) {
    t.push_back(s.t);
    ref.push_back(s.reference);
    exe.push_back(s.position);
  }
  return eval_tracking(t, ref, exe, window);
}

}  // namespace mavi
