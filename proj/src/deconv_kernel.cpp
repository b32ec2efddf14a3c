#include "modereg/deconv_kernel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "modereg/errors.hpp"
#include "modereg/quadrature.hpp"

namespace modereg {

namespace {

constexpr int kBaseNodes = 256;
constexpr int kWidePanelNodes = 48;
// Largest phase t * width a 48-node panel is asked to resolve.
constexpr double kPanelMaxPhase = 40.0;
// Beyond this |t| the 256-node rule no longer resolves cos(ts) on [0, 1].
constexpr double kBaseMaxT = 120.0;

constexpr double kInvSqrt2Pi = 0.3989422804014327;

void check_ell(int ell) {
  if (ell < 0 || ell > 2) throw DomainError("kernel order must be 0, 1 or 2");
}

}  // namespace

double phi_k1(int deriv, double s) noexcept {
  if (s < -1.0 || s > 1.0) return 0.0;
  const double q = 1.0 - s * s;
  switch (deriv) {
    case 0:
      return q * q * q;
    case 1:
      return -6.0 * s * q * q;
    case 2:
      return q * (30.0 * s * s - 6.0);
    default:
      return 0.0;
  }
}

double k2(int deriv, double t) noexcept {
  const double g = kInvSqrt2Pi * std::exp(-0.5 * t * t);
  switch (deriv) {
    case 0:
      return g;
    case 1:
      return -t * g;
    case 2:
      return (t * t - 1.0) * g;
    default:
      return 0.0;
  }
}

KernelQuadrature::KernelQuadrature(const ErrorModel& model, double h1)
    : model_(model), h1_(h1) {
  if (!(h1 > 0.0) || !std::isfinite(h1)) throw DomainError("h1 must be positive");
  const auto& base = gauss_legendre(kBaseNodes);
  for (int ell = 0; ell < 3; ++ell) {
    auto& b = base_[ell];
    for (int i = kBaseNodes / 2; i < kBaseNodes; ++i) {
      const double s = base.nodes[i];
      b.s.push_back(s);
      // doubled weight for the mirrored node, 1/(2 pi) * 2 = 1/pi
      b.factor.push_back(base.weights[i] * phi_k1(ell, s) / model.phi(s / h1) /
                         std::numbers::pi);
    }
    const auto& panel = gauss_legendre(kWidePanelNodes);
    for (std::size_t tier = 0; tier < wide_.size(); ++tier) {
      const int panels = 4 << tier;
      auto& w = wide_[tier][ell];
      for (int p = 0; p < panels; ++p) {
        const double lo = static_cast<double>(p) / panels;
        const double half = 0.5 / panels;
        for (int i = 0; i < kWidePanelNodes; ++i) {
          const double s = lo + half * (panel.nodes[i] + 1.0);
          w.s.push_back(s);
          w.factor.push_back(half * panel.weights[i] * phi_k1(ell, s) /
                             model.phi(s / h1) / std::numbers::pi);
        }
      }
    }
  }
}

int KernelQuadrature::tier_for(double t) noexcept {
  const double a = std::abs(t);
  if (a <= kBaseMaxT) return 0;
  for (int tier = 0; tier < 3; ++tier)
    if (a <= kPanelMaxPhase * (4 << tier)) return tier + 1;
  return 4;
}

const KernelQuadrature::Panelled& KernelQuadrature::rule(int ell, int tier) const {
  return tier == 0 ? base_[ell] : wide_[static_cast<std::size_t>(tier - 1)][ell];
}

const KernelQuadrature::Panelled& KernelQuadrature::rule_for(int ell, double t) const {
  check_ell(ell);
  return rule(ell, tier_for(t));
}

// l = 0: (1/pi) int_0^1 f cos(ts);   slope: -(1/pi) int s f sin(ts)
// l = 1: -(1/pi) int_0^1 f sin(ts);  slope: -(1/pi) int s f cos(ts)
// l = 2: -(1/pi) int_0^1 f cos(ts);  slope:  (1/pi) int s f sin(ts)
std::array<double, 2> KernelQuadrature::value_and_slope(int ell, double t) const {
  const auto& r = rule_for(ell, t);
  double cs = 0.0, sn = 0.0, scs = 0.0, ssn = 0.0;
  for (std::size_t i = 0; i < r.s.size(); ++i) {
    const double s = r.s[i];
    const double c = std::cos(t * s), si = std::sin(t * s);
    cs += r.factor[i] * c;
    sn += r.factor[i] * si;
    scs += r.factor[i] * s * c;
    ssn += r.factor[i] * s * si;
  }
  switch (ell) {
    case 0:
      return {cs, -ssn};
    case 1:
      return {-sn, -scs};
    default:
      return {-cs, ssn};
  }
}

void KernelQuadrature::sweep(int ell, double t0, double step, std::size_t count,
                             double* values, double* slopes) const {
  check_ell(ell);
  // Tiles small enough for the accumulators to stay in cache; each tile
  // restarts from exact cos/sin, which bounds the rotation drift.
  constexpr std::size_t kTile = 256;
  auto at = [&](std::size_t k) { return t0 + step * static_cast<double>(k); };
  std::array<double, kTile> cs, sn, scs, ssn;
  std::size_t a = 0;
  while (a < count) {
    const int tier = tier_for(at(a));
    std::size_t b = a + 1;
    while (b < count && b - a < kTile && tier_for(at(b)) == tier) ++b;
    const std::size_t m = b - a;
    cs.fill(0.0), sn.fill(0.0), scs.fill(0.0), ssn.fill(0.0);
    const auto& r = rule(ell, tier);
    for (std::size_t i = 0; i < r.s.size(); ++i) {
      const double s = r.s[i], f = r.factor[i], fs = f * s;
      const double rc = std::cos(step * s), rs = std::sin(step * s);
      double c = std::cos(at(a) * s), si = std::sin(at(a) * s);
      for (std::size_t k = 0; k < m; ++k) {
        cs[k] += f * c;
        sn[k] += f * si;
        scs[k] += fs * c;
        ssn[k] += fs * si;
        const double nc = c * rc - si * rs;
        si = si * rc + c * rs;
        c = nc;
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      switch (ell) {
        case 0:
          values[a + k] = cs[k], slopes[a + k] = -ssn[k];
          break;
        case 1:
          values[a + k] = -sn[k], slopes[a + k] = -scs[k];
          break;
        default:
          values[a + k] = -cs[k], slopes[a + k] = ssn[k];
      }
    }
    a = b;
  }
}

double KernelQuadrature::value(int ell, double t) const {
  const auto& r = rule_for(ell, t);
  double acc = 0.0;
  if (ell == 1) {
    for (std::size_t i = 0; i < r.s.size(); ++i) acc += r.factor[i] * std::sin(t * r.s[i]);
    return -acc;
  }
  for (std::size_t i = 0; i < r.s.size(); ++i) acc += r.factor[i] * std::cos(t * r.s[i]);
  return ell == 0 ? acc : -acc;
}

double KernelQuadrature::slope(int ell, double t) const { return value_and_slope(ell, t)[1]; }

double ku_ell(int ell, double t, double h1, const ErrorModel& model) {
  check_ell(ell);
  return KernelQuadrature(model, h1).value(ell, t);
}

double k1(double t) {
  static const KernelQuadrature quad(ErrorModel::none(), 1.0);
  return quad.value(0, t);
}

double k1_dd(double t) {
  // K1''(t) = -(1/2pi) int s^2 (1 - s^2)^3 cos(ts) ds
  static const auto nodes = [] {
    std::vector<std::pair<double, double>> out;
    const auto& base = gauss_legendre(kBaseNodes);
    for (int i = kBaseNodes / 2; i < kBaseNodes; ++i) {
      const double s = base.nodes[i];
      out.emplace_back(s, base.weights[i] * s * s * phi_k1(0, s) / std::numbers::pi);
    }
    return out;
  }();
  double acc = 0.0;
  for (auto [s, f] : nodes) acc += f * std::cos(t * s);
  return -acc;
}

KernelTable::KernelTable(int ell, const KernelQuadrature& quad, double t_min,
                         double t_max, std::size_t resolution)
    : ell_(ell), quad_(quad), t_min_(t_min), t_max_(t_max) {
  check_ell(ell);
  if (resolution < 2) throw DomainError("kernel table needs at least 2 nodes");
  if (!(t_max > t_min) || !std::isfinite(t_min) || !std::isfinite(t_max))
    throw DomainError("kernel table range must be finite and nonempty");
  step_ = (t_max - t_min) / static_cast<double>(resolution - 1);
  inv_step_ = 1.0 / step_;
  values_.resize(resolution);
  slopes_.resize(resolution);
  quad_.sweep(ell, t_min_, step_, resolution, values_.data(), slopes_.data());
}

double KernelTable::operator()(double t) const {
  if (!(t >= t_min_ && t <= t_max_)) return quad_.value(ell_, t);
  const double pos = (t - t_min_) * inv_step_;
  // Exact at the nodes, which (t - t_min) / step alone misses by rounding.
  const auto r = static_cast<std::size_t>(pos + 0.5);
  if (r < values_.size() && node(r) == t) return values_[r];
  auto i = static_cast<std::size_t>(pos);
  if (i >= values_.size() - 1) i = values_.size() - 2;
  const double u = pos - static_cast<double>(i);
  if (u == 0.0) return values_[i];
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  return h00 * values_[i] + h01 * values_[i + 1] +
         step_ * (h10 * slopes_[i] + h11 * slopes_[i + 1]);
}

KernelTable build_table(int ell, double h1, const ErrorModel& model,
                        double range_lo, double range_hi, std::size_t resolution) {
  return KernelTable(ell, KernelQuadrature(model, h1), range_lo, range_hi, resolution);
}

DeconvKernels DeconvKernels::exact(const ErrorModel& model, double h1) {
  DeconvKernels k;
  k.quad_ = std::make_shared<const KernelQuadrature>(model, h1);
  return k;
}

DeconvKernels DeconvKernels::tabulated(const ErrorModel& model, double h1,
                                       double max_abs_t) {
  constexpr double kBlock = 40.0;
  constexpr double kMaxRange = 400.0;
  constexpr std::size_t kNodesPerBlock = 8000;  // spacing 0.005
  constexpr std::size_t kMaxCached = 64;
  double range = kBlock;
  if (std::isfinite(max_abs_t) && max_abs_t > kBlock)
    range = std::min(kMaxRange, kBlock * std::ceil(max_abs_t / kBlock));
  const auto nodes = static_cast<std::size_t>(2 * kNodesPerBlock * (range / kBlock)) + 1;

  using Key = std::tuple<int, double, double, double>;
  struct Entry {
    std::shared_ptr<const KernelQuadrature> quad;
    std::array<std::shared_ptr<const KernelTable>, 3> tables;
  };
  static std::mutex mutex;
  static std::map<Key, Entry> cache;

  // Without error the kernels do not depend on h1, so one table serves all.
  const bool free_of_h1 = model.kind() == ErrorKind::NoError;
  const double table_h1 = free_of_h1 ? 1.0 : h1;
  const Key key{static_cast<int>(model.kind()), model.sigma_u(), table_h1, range};
  std::unique_lock lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    lock.unlock();
    Entry e;
    e.quad = std::make_shared<const KernelQuadrature>(model, table_h1);
    for (int ell = 0; ell < 3; ++ell)
      e.tables[ell] = std::make_shared<const KernelTable>(ell, *e.quad, -range, range, nodes);
    lock.lock();
    // Holders keep their tables alive through the shared pointers, so
    // dropping everything only costs rebuilds.
    if (cache.size() >= kMaxCached) cache.clear();
    it = cache.emplace(key, std::move(e)).first;
  }
  DeconvKernels k;
  k.quad_ = free_of_h1 ? std::make_shared<const KernelQuadrature>(model, h1) : it->second.quad;
  k.tables_ = it->second.tables;
  return k;
}

}  // namespace modereg
