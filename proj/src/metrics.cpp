#include "modereg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modereg/errors.hpp"

namespace modereg {

double hausdorff(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw UndefinedDistanceError("Hausdorff distance of an empty set");
  auto directed = [](std::span<const double> from, std::span<const double> to) {
    double worst = 0.0;
    for (double p : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (double q : to) nearest = std::min(nearest, std::abs(p - q));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double ise_penalty_distance(const ModeCurves& truth) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : truth.sets)
    for (double y : s.modes) {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  return hi > lo ? hi - lo : 1.0;
}

double ise_term(const ModeSet& estimated, const ModeSet& truth, double penalty_distance) {
  const bool e = estimated.modes.empty(), t = truth.modes.empty();
  if (!e && !t) {
    const double h = hausdorff(estimated.modes, truth.modes);
    return h * h;
  }
  return e == t ? 0.0 : penalty_distance * penalty_distance;
}

IseReport empirical_ise(const ModeCurves& estimated, const ModeCurves& truth) {
  const auto& g = estimated.grid;
  if (g.size() != truth.grid.size() || estimated.sets.size() != g.size() ||
      truth.sets.size() != truth.grid.size() || estimated.delta != truth.delta)
    throw GridMismatchError("mode curves are on different grids");
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(g[k] - truth.grid[k]) > 1e-9 * std::max(1.0, std::abs(g[k])))
      throw GridMismatchError("mode curves are on different grids");

  const double range = ise_penalty_distance(truth);
  IseReport r;
  r.delta = truth.delta;
  r.penalty = range * range;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto& e = estimated.sets[k];
    const auto& t = truth.sets[k];
    const double sq = ise_term(e, t, range);
    IsePoint p{truth.grid[k], std::sqrt(sq), !e.empty() && !t.empty()};
    if (!p.defined) ++r.undefined_points;
    r.ise += sq * r.delta;
    r.per_point.push_back(p);
  }
  return r;
}

void write_csv(std::ostream& os, const IseReport& report) {
  const auto old = os.precision(17);
  os << "x,haus,defined\n";
  for (const auto& p : report.per_point)
    os << p.x << ',' << p.haus << ',' << (p.defined ? 1 : 0) << '\n';
  os << "# ise=" << report.ise << ",delta=" << report.delta
     << ",undefined_points=" << report.undefined_points << ",penalty=" << report.penalty
     << '\n';
  os.precision(old);
}

void write_csv(std::ostream& os, const ModeCurves& curves) {
  const auto old = os.precision(17);
  os << "x,mode_index,y,converged,iters\n";
  for (const auto& s : curves.sets) {
    if (s.modes.empty()) {
      os << s.x << ",,,0,0\n";
      continue;
    }
    for (std::size_t i = 0; i < s.modes.size(); ++i)
      os << s.x << ',' << i << ',' << s.modes[i] << ",1,"
         << (i < s.diagnostics.size() ? s.diagnostics[i].iters : 0) << '\n';
  }
  os.precision(old);
}

}  // namespace modereg
