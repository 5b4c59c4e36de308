#include "lgeo/phase.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lgeo/error.hpp"
#include "lgeo/observables.hpp"

namespace lgeo::phase {

namespace {

// Differences closer than this count as ties (linear profiles are not
// exactly equal-stepped in binary floating point).
constexpr double kTieTol = 1e-12;

bool beats(double candidate, double best) {
  return candidate > best + kTieTol * std::max(1.0, std::abs(best));
}

}  // namespace

void DepthProfile::validate() const {
  if (total_layers <= 0) throw InputError("profile '" + model_id + "': total_layers must be > 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (pt.layer < 0 || pt.layer > total_layers) {
      throw InputError("profile '" + model_id + "': layer " + std::to_string(pt.layer) +
                       " outside [0, " + std::to_string(total_layers) + "]");
    }
    if (i > 0 && pt.layer <= points[i - 1].layer) {
      throw InputError("profile '" + model_id + "': layers must be strictly increasing");
    }
    if (pt.gamma != static_cast<double>(pt.layer) / total_layers) {
      throw InputError("profile '" + model_id + "': gamma != layer / L");
    }
    if (!(pt.mean_omega >= 0.0 && pt.mean_omega < 1.0)) {
      throw InputError("profile '" + model_id + "': mean omega outside [0, 1)");
    }
    if (!(pt.var_omega >= 0.0)) throw InputError("profile '" + model_id + "': negative variance");
  }
}

DepthProfile make_profile(std::string model_id, std::vector<ProfilePoint> points, int total_layers) {
  std::sort(points.begin(), points.end(),
            [](const ProfilePoint& a, const ProfilePoint& b) { return a.layer < b.layer; });
  if (total_layers <= 0) total_layers = points.empty() ? 1 : points.back().layer + 1;
  for (auto& pt : points) pt.gamma = static_cast<double>(pt.layer) / total_layers;
  DepthProfile p{std::move(model_id), total_layers, std::move(points)};
  p.validate();
  return p;
}

DepthProfile build_profile(std::span<const ActivationMatrix> batches, int total_layers) {
  if (batches.size() < 2) throw InputError("build_profile needs at least 2 layers");
  const auto d = batches.front().cols();
  std::set<int> seen;
  std::vector<ProfilePoint> points;
  points.reserve(batches.size());
  for (const auto& X : batches) {
    if (X.cols() != d) {
      throw InputError("build_profile: layer " + std::to_string(X.layer) + " has d = " +
                       std::to_string(X.cols()) + ", expected " + std::to_string(d));
    }
    if (X.rows() < 1) throw InputError("build_profile: empty batch");
    if (!seen.insert(X.layer).second) {
      throw InputError("build_profile: duplicate layer " + std::to_string(X.layer));
    }
    // Welford update over rows.
    double mean = 0.0;
    double m2 = 0.0;
    std::vector<double> row(d);
    for (Eigen::Index r = 0; r < X.data.rows(); ++r) {
      for (std::size_t j = 0; j < d; ++j) row[j] = X.data(r, static_cast<Eigen::Index>(j));
      const double w = omega(row);
      const double delta = w - mean;
      mean += delta / static_cast<double>(r + 1);
      m2 += delta * (w - mean);
    }
    const auto n = X.rows();
    points.push_back({X.layer, 0.0, mean, std::max(0.0, m2 / static_cast<double>(n)), n});
  }
  std::string model = batches.front().model_id;
  return make_profile(std::move(model), std::move(points), total_layers);
}

PhaseReport critical_depth(const DepthProfile& p, double tau_c) {
  std::optional<std::size_t> best;
  double best_jump = -1.0;
  for (std::size_t i = 0; i + 1 < p.points.size(); ++i) {
    if (p.points[i + 1].layer != p.points[i].layer + 1) continue;
    const double jump = std::abs(p.points[i + 1].mean_omega - p.points[i].mean_omega);
    if (!best || beats(jump, best_jump)) {
      best = i;
      best_jump = jump;
    }
  }
  if (!best) throw InputError("critical_depth: profile '" + p.model_id + "' has no consecutive layer pair");

  const ThresholdClass cls = classify_phase(p, tau_c);
  PhaseReport r;
  r.model_id = p.model_id;
  r.total_layers = p.total_layers;
  r.jump_layer_pair = {p.points[*best].layer, p.points[*best + 1].layer};
  r.jump_magnitude = best_jump;
  r.gamma_c_hat = static_cast<double>(r.jump_layer_pair.second) / p.total_layers;
  r.susceptibility_peak_gamma = susceptibility_peak(p);
  r.tau_c = tau_c;
  r.exceeds_threshold = cls.exceeds;
  r.onset_layer = cls.onset_layer;
  return r;
}

std::optional<double> susceptibility_peak(const DepthProfile& p) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    if (!(p.points[i].var_omega > 0.0)) continue;
    if (!best || beats(p.points[i].var_omega, p.points[*best].var_omega)) best = i;
  }
  if (!best) return std::nullopt;
  return p.points[*best].gamma;
}

ThresholdClass classify_phase(const DepthProfile& p, double tau_c) {
  if (!(tau_c > 0.0 && tau_c < 1.0)) throw InputError("classify_phase: tau_c must lie in (0, 1)");
  ThresholdClass out;
  for (const auto& pt : p.points) {
    if (pt.mean_omega > tau_c) {
      out.exceeds = true;
      out.onset_layer = pt.layer;
      break;
    }
  }
  return out;
}

}  // namespace lgeo::phase
