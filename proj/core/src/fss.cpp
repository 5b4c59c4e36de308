#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "lgeo/error.hpp"
#include "lgeo/phase.hpp"
#include "stats.hpp"

namespace lgeo::phase {

namespace {

using Params = std::array<double, 3>;  // beta/nu, 1/nu, gamma_c

struct Sample {
  double log_scale;  // log(N / N0)
  double gamma;
  double m;
};

// Flattened, canonically ordered data so the objective does not depend on
// the order the curves were supplied in.
std::vector<Sample> flatten(std::span<const ScaledCurve> curves) {
  double log_mean = 0.0;
  for (const auto& c : curves) log_mean += std::log(c.scale);
  log_mean /= static_cast<double>(curves.size());
  std::vector<Sample> out;
  for (const auto& c : curves) {
    for (const auto& pt : c.profile.points) {
      out.push_back({std::log(c.scale) - log_mean, pt.gamma, pt.mean_omega});
    }
  }
  std::sort(out.begin(), out.end(), [](const Sample& a, const Sample& b) {
    return std::tie(a.log_scale, a.gamma, a.m) < std::tie(b.log_scale, b.gamma, b.m);
  });
  return out;
}

// N0 is the geometric mean of the scales; rescaling N multiplies every x and
// every y by a common factor, which leaves the normalised dispersion unchanged.
double dispersion(const std::vector<Sample>& samples, const Params& p, int bins) {
  const std::size_t n = samples.size();
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (samples[i].gamma - p[2]) * std::exp(p[1] * samples[i].log_scale);
    y[i] = samples[i].m * std::exp(p[0] * samples[i].log_scale);
  }
  const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  const double xmin = *xmin_it;
  const double width = (*xmax_it - xmin) / bins;

  std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> mean(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> m2(static_cast<std::size_t>(bins), 0.0);
  double total_mean = 0.0;
  double total_m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    long b = width > 0.0 ? static_cast<long>(std::floor((x[i] - xmin) / width)) : 0;
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    const auto k = static_cast<std::size_t>(b);
    count[k] += 1.0;
    double delta = y[i] - mean[k];
    mean[k] += delta / count[k];
    m2[k] += delta * (y[i] - mean[k]);
    delta = y[i] - total_mean;
    total_mean += delta / static_cast<double>(i + 1);
    total_m2 += delta * (y[i] - total_mean);
  }
  double within = 0.0;
  for (std::size_t k = 0; k < count.size(); ++k) {
    if (count[k] >= 2.0) within += m2[k];
  }
  if (!(total_m2 > 0.0)) return 0.0;
  if (!std::isfinite(within) || !std::isfinite(total_m2)) return std::numeric_limits<double>::infinity();
  return within / total_m2;
}

struct NelderMeadResult {
  Params x;
  double f;
  int evaluations;
  bool converged;
};

template <class F>
NelderMeadResult nelder_mead(F&& f, const Params& start, const Params& step, int max_eval,
                             double tol) {
  std::array<Params, 4> simplex;
  std::array<double, 4> values;
  simplex[0] = start;
  for (int i = 0; i < 3; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1][i] += step[i];
  }
  int evals = 0;
  auto eval = [&](const Params& p) {
    ++evals;
    return f(p);
  };
  for (int i = 0; i < 4; ++i) values[i] = eval(simplex[i]);

  auto lerp = [](const Params& a, const Params& b, double t) {
    Params r;
    for (int i = 0; i < 3; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
  };

  bool converged = false;
  while (evals < max_eval) {
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return values[a] < values[b] || (values[a] == values[b] && simplex[a] < simplex[b]);
    });
    std::array<Params, 4> s2;
    std::array<double, 4> v2;
    for (int i = 0; i < 4; ++i) {
      s2[i] = simplex[order[i]];
      v2[i] = values[order[i]];
    }
    simplex = s2;
    values = v2;

    double size = 0.0;
    for (int i = 1; i < 4; ++i) {
      for (int j = 0; j < 3; ++j) {
        size = std::max(size, std::abs(simplex[i][j] - simplex[0][j]) /
                                  std::max(std::abs(step[j]), 1e-300));
      }
    }
    if (std::abs(values[3] - values[0]) <= tol * (std::abs(values[0]) + 1e-12) || size < 1e-9) {
      converged = true;
      break;
    }

    Params centroid{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) centroid[j] += simplex[i][j] / 3.0;
    }
    const Params reflected = lerp(centroid, simplex[3], -1.0);
    const double fr = eval(reflected);
    if (fr < values[0]) {
      const Params expanded = lerp(centroid, simplex[3], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[3] = expanded;
        values[3] = fe;
      } else {
        simplex[3] = reflected;
        values[3] = fr;
      }
      continue;
    }
    if (fr < values[2]) {
      simplex[3] = reflected;
      values[3] = fr;
      continue;
    }
    const bool outside = fr < values[3];
    const Params contracted = lerp(centroid, outside ? reflected : simplex[3], 0.5);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[3])) {
      simplex[3] = contracted;
      values[3] = fc;
      continue;
    }
    for (int i = 1; i < 4; ++i) {
      simplex[i] = lerp(simplex[0], simplex[i], 0.5);
      values[i] = eval(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evals, converged};
}

void check_curves(std::span<const ScaledCurve> curves) {
  std::set<double> scales;
  for (const auto& c : curves) {
    if (!(c.scale > 0.0) || !std::isfinite(c.scale)) throw InputError("fss: scale N must be > 0");
    if (c.profile.points.size() < 5) {
      throw InputError("fss: curve '" + c.profile.model_id + "' has fewer than 5 points");
    }
    scales.insert(c.scale);
  }
  if (scales.size() < 3) throw InputError("fss: need at least 3 distinct scales");
}

}  // namespace

double collapse_dispersion(std::span<const ScaledCurve> curves, double beta_over_nu,
                           double one_over_nu, double gamma_c, int bins) {
  if (bins < 1) throw InputError("fss: bins must be >= 1");
  if (curves.empty()) throw InputError("fss: no curves");
  return dispersion(flatten(curves), {beta_over_nu, one_over_nu, gamma_c}, bins);
}

FSSFit fss_collapse(std::span<const ScaledCurve> curves, const FSSOptions& opts) {
  check_curves(curves);
  const std::vector<Sample> samples = flatten(curves);

  std::vector<double> gammas;
  for (const auto& s : samples) gammas.push_back(s.gamma);
  std::sort(gammas.begin(), gammas.end());
  std::vector<double> gc_starts = opts.gamma_c_starts;
  if (gc_starts.empty()) {
    for (double q : {0.25, 0.5, 0.75}) gc_starts.push_back(detail::quantile_sorted(gammas, q));
  }
  const double gamma_range = gammas.back() - gammas.front();
  const Params step{0.1, 0.1, gamma_range > 0.0 ? 0.1 * gamma_range : 0.01};

  auto objective = [&](const Params& p) { return dispersion(samples, p, opts.bins); };

  std::optional<NelderMeadResult> best;
  bool any_converged = false;
  int total_evals = 0;
  for (double b : opts.beta_over_nu_starts) {
    for (double s : opts.one_over_nu_starts) {
      for (double g : gc_starts) {
        const auto r = nelder_mead(objective, {b, s, g}, step, opts.max_evaluations, opts.tolerance);
        total_evals += r.evaluations;
        any_converged = any_converged || r.converged;
        if (!best || r.f < best->f || (r.f == best->f && r.x < best->x)) best = r;
      }
    }
  }
  FSSFit fit{best->x[0], best->x[1], best->x[2], best->f, total_evals};
  if (!any_converged) {
    std::ostringstream msg;
    msg << "fss: no start converged within " << opts.max_evaluations
        << " evaluations; best residual " << fit.collapse_residual;
    throw FSSFitError(msg.str(), fit);
  }
  return fit;
}

}  // namespace lgeo::phase
