#include "finsler/distance.hpp"

#include "finsler/error.hpp"
#include "finsler/spray.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace finsler {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Regular grid with square cells aligned so that `anchor` is a node.
struct Lattice {
  int n = 0;
  double h = 0.0;
  Vec lo;
  std::vector<int> counts;
  std::size_t size = 0;

  Lattice(const Vec& anchor, const Vec& box_lo, const Vec& box_hi, int cells_longest) : n(static_cast<int>(anchor.size())), lo(anchor.size()), counts(anchor.size()) {
    double longest = 0.0;
    for (int k = 0; k < n; ++k) longest = std::max(longest, box_hi[k] - box_lo[k]);
    h = longest / cells_longest;
    size = 1;
    for (int k = 0; k < n; ++k) {
      const int below = static_cast<int>(std::ceil((anchor[k] - box_lo[k]) / h - 1e-9));
      const int above = static_cast<int>(std::ceil((box_hi[k] - anchor[k]) / h - 1e-9));
      lo[k] = anchor[k] - below * h;
      counts[k] = below + above + 1;
      size *= static_cast<std::size_t>(counts[k]);
    }
  }

  [[nodiscard]] Vec position(std::size_t idx) const {
    Vec x(n);
    for (int k = 0; k < n; ++k) {
      const auto i = static_cast<int>(idx % counts[k]);
      idx /= counts[k];
      x[k] = lo[k] + i * h;
    }
    return x;
  }

  [[nodiscard]] std::vector<int> multi(std::size_t idx) const {
    std::vector<int> m(n);
    for (int k = 0; k < n; ++k) {
      m[k] = static_cast<int>(idx % counts[k]);
      idx /= counts[k];
    }
    return m;
  }

  [[nodiscard]] long flat(const std::vector<int>& m) const {
    long idx = 0;
    for (int k = n - 1; k >= 0; --k) {
      if (m[k] < 0 || m[k] >= counts[k]) return -1;
      idx = idx * counts[k] + m[k];
    }
    return idx;
  }

  // Nearest-node multi-index (rounded).
  [[nodiscard]] std::vector<int> nearest(const Vec& x) const {
    std::vector<int> m(n);
    for (int k = 0; k < n; ++k) m[k] = static_cast<int>(std::lround((x[k] - lo[k]) / h));
    return m;
  }
};

struct Box {
  Vec lo, hi;
};

Box padded_box(const Vec& a, const Vec& b, double padding) {
  const int n = static_cast<int>(a.size());
  Box box{a.cwiseMin(b), a.cwiseMax(b)};
  double longest = (box.hi - box.lo).maxCoeff();
  if (longest == 0.0) longest = 1.0;
  const double pad = std::max(padding, 1e-3) * longest;
  for (int k = 0; k < n; ++k) {
    box.lo[k] -= pad;
    box.hi[k] += pad;
  }
  return box;
}

struct SingleSource {
  Lattice lattice;
  std::vector<double> dist;
  std::vector<long> pred;
};

// Dijkstra from the lattice node at `source` over nodes in the metric domain. When
// `target` is given, it is an extra node (index lattice.size) with incoming edges from
// every node within `radius` cells.
SingleSource run_dijkstra(const FinslerMetric& metric, const Lattice& lattice, const Vec& source,
                          const Vec* target, int radius) {
  const int n = lattice.n;
  const auto offsets = stencil_offsets(n, radius);
  const std::size_t N = lattice.size;
  const std::size_t target_idx = N;
  SingleSource out{lattice, std::vector<double>(N + 1, kInf), std::vector<long>(N + 1, -1)};

  std::vector<char> valid(N);
  for (std::size_t i = 0; i < N; ++i) valid[i] = metric.in_domain(Point(lattice.position(i)));

  // Minkowski metrics: edge weight depends on the offset only.
  std::vector<double> offset_weight;
  if (metric.x_independent()) {
    const Point origin(Vec::Zero(n));
    for (const auto& off : offsets) {
      Vec d(n);
      for (int k = 0; k < n; ++k) d[k] = off[k] * lattice.h;
      offset_weight.push_back(metric.F(origin, d));
    }
  }

  // Nodes from which the target is reachable directly.
  std::vector<char> near_target;
  if (target != nullptr) {
    near_target.assign(N, 0);
    const auto c = lattice.nearest(*target);
    std::vector<int> m(n);
    const int span = 2 * radius + 1;
    int total = 1;
    for (int k = 0; k < n; ++k) total *= span;
    for (int t = 0; t < total; ++t) {
      int rem = t;
      for (int k = 0; k < n; ++k) {
        m[k] = c[k] - radius + rem % span;
        rem /= span;
      }
      const long idx = lattice.flat(m);
      if (idx >= 0 && valid[static_cast<std::size_t>(idx)]) near_target[static_cast<std::size_t>(idx)] = 1;
    }
  }

  const long src = lattice.flat(lattice.nearest(source));
  if (src < 0 || !valid[static_cast<std::size_t>(src)]) {
    throw DomainError("dijkstra: source node outside the metric domain");
  }
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  out.dist[static_cast<std::size_t>(src)] = 0.0;
  queue.emplace(0.0, static_cast<std::size_t>(src));
  std::vector<char> done(N + 1, 0);

  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == target_idx) break;
    const auto mu = lattice.multi(u);
    const Point pu(lattice.position(u));
    std::vector<int> mv(n);
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      for (int k = 0; k < n; ++k) mv[k] = mu[k] + offsets[o][k];
      const long v = lattice.flat(mv);
      if (v < 0) continue;
      const auto vi = static_cast<std::size_t>(v);
      if (!valid[vi] || done[vi]) continue;
      const double w = offset_weight.empty() ? segment_length(metric, pu, Point(lattice.position(vi)))
                                             : offset_weight[o];
      if (d + w < out.dist[vi]) {
        out.dist[vi] = d + w;
        out.pred[vi] = static_cast<long>(u);
        queue.emplace(d + w, vi);
      }
    }
    if (target != nullptr && near_target[u]) {
      const double w = segment_length(metric, pu, Point(*target));
      if (d + w < out.dist[target_idx]) {
        out.dist[target_idx] = d + w;
        out.pred[target_idx] = static_cast<long>(u);
        queue.emplace(d + w, target_idx);
      }
    }
  }
  return out;
}

}  // namespace

std::string to_string(DistanceTier tier) {
  switch (tier) {
    case DistanceTier::ClosedForm: return "closed_form";
    case DistanceTier::GridDijkstra: return "grid_dijkstra";
    case DistanceTier::CurveDescent: return "curve_descent";
  }
  return "unknown";
}

DistanceTier parse_distance_tier(const std::string& name) {
  if (name == "closed_form") return DistanceTier::ClosedForm;
  if (name == "grid_dijkstra") return DistanceTier::GridDijkstra;
  if (name == "curve_descent") return DistanceTier::CurveDescent;
  throw ArgumentError("unknown distance tier '" + name + "'");
}

void DistanceProvider::validate() const {
  if (grid_n < 8) throw ArgumentError("distance provider: grid_n must be >= 8");
  if (descent_iters < 1) throw ArgumentError("distance provider: descent_iters must be >= 1");
  if (stencil < 0) throw ArgumentError("distance provider: stencil must be >= 0");
  if (!(padding >= 0.0)) throw ArgumentError("distance provider: padding must be >= 0");
}

std::string DistanceProvider::describe() const {
  std::ostringstream os;
  os << to_string(tier);
  if (tier != DistanceTier::ClosedForm) {
    os << "(grid_n=" << grid_n << ",stencil=" << stencil;
    if (tier == DistanceTier::CurveDescent) os << ",iters=" << descent_iters;
    os << ")";
  }
  return os.str();
}

int default_stencil(int n) { return n == 2 ? 4 : 1; }

std::vector<std::vector<int>> stencil_offsets(int n, int radius) {
  std::vector<std::vector<int>> out;
  const int span = 2 * radius + 1;
  int total = 1;
  for (int k = 0; k < n; ++k) total *= span;
  for (int t = 0; t < total; ++t) {
    std::vector<int> off(n);
    int rem = t;
    int g = 0;
    for (int k = 0; k < n; ++k) {
      off[k] = rem % span - radius;
      rem /= span;
      g = std::gcd(g, std::abs(off[k]));
    }
    if (g == 1) out.push_back(std::move(off));
  }
  return out;
}

PathResult dijkstra_path(const FinslerMetric& metric, const Point& x1, const Point& x2,
                         const DistanceProvider& provider) {
  provider.validate();
  metric.require_domain(x1);
  metric.require_domain(x2);
  if (x1.coords == x2.coords) return {0.0, {x1, x2}};
  const int radius = provider.stencil > 0 ? provider.stencil : default_stencil(metric.dim());
  const Box box = padded_box(x1.coords, x2.coords, provider.padding);
  const Lattice lattice(x1.coords, box.lo, box.hi, provider.grid_n);
  const SingleSource ss = run_dijkstra(metric, lattice, x1.coords, &x2.coords, radius);
  const std::size_t target = lattice.size;
  if (!std::isfinite(ss.dist[target])) {
    throw NumericalError("distance: target unreachable on the grid (domain truncation of " +
                         metric.describe() + ")");
  }
  PathResult result;
  result.length = ss.dist[target];
  std::vector<Point> rev{x2};
  for (long v = ss.pred[target]; v >= 0; v = ss.pred[static_cast<std::size_t>(v)]) {
    rev.emplace_back(lattice.position(static_cast<std::size_t>(v)));
  }
  rev.back() = x1;  // the source node coincides with x1
  result.path.assign(rev.rbegin(), rev.rend());
  return result;
}

PathResult descend_polyline(const FinslerMetric& metric, std::vector<Point> seed, int iterations) {
  if (seed.size() < 2) throw ArgumentError("descend_polyline: need at least 2 vertices");
  if (iterations < 1) throw ArgumentError("descend_polyline: iterations must be >= 1");
  const int n = metric.dim();
  // Keep at most 64 interior vertices, evenly spread along the seed.
  constexpr std::size_t kMaxVertices = 66;
  if (seed.size() > kMaxVertices) {
    std::vector<Point> thin;
    const std::size_t last = seed.size() - 1;
    for (std::size_t i = 0; i < kMaxVertices; ++i) thin.push_back(seed[i * last / (kMaxVertices - 1)]);
    seed = std::move(thin);
  }
  double step = 0.0;
  for (std::size_t i = 0; i + 1 < seed.size(); ++i) {
    step = std::max(step, (seed[i + 1].coords - seed[i].coords).norm());
  }
  step *= 0.25;
  auto local = [&](std::size_t i, const Point& p) {
    return segment_length(metric, seed[i - 1], p) + segment_length(metric, p, seed[i + 1]);
  };
  for (int it = 0; it < iterations && step > 0.0; ++it) {
    bool improved = false;
    for (std::size_t i = 1; i + 1 < seed.size(); ++i) {
      double best = local(i, seed[i]);
      for (int k = 0; k < n; ++k) {
        for (double sgn : {1.0, -1.0}) {
          Point trial = seed[i];
          trial.coords[k] += sgn * step;
          if (!metric.in_domain(trial)) continue;
          const double val = local(i, trial);
          if (val < best) {
            best = val;
            seed[i] = trial;
            improved = true;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {polyline_length(metric, seed), std::move(seed)};
}

double distance(const FinslerMetric& metric, const Point& x1, const Point& x2,
                const DistanceProvider& provider) {
  provider.validate();
  switch (provider.tier) {
    case DistanceTier::ClosedForm:
      return metric.closed_form_distance(x1, x2);
    case DistanceTier::GridDijkstra:
      return dijkstra_path(metric, x1, x2, provider).length;
    case DistanceTier::CurveDescent: {
      const PathResult seed = dijkstra_path(metric, x1, x2, provider);
      if (seed.length == 0.0) return 0.0;
      const PathResult refined = descend_polyline(metric, seed.path, provider.descent_iters);
      return std::min(seed.length, refined.length);
    }
  }
  return 0.0;
}

bool forward_ball_indicator(const FinslerMetric& metric, const Point& center, double radius,
                            const Point& x, const DistanceProvider& provider) {
  if (!(radius >= 0.0)) throw ArgumentError("forward_ball_indicator: radius must be >= 0");
  return distance(metric, center, x, provider) < radius;
}

DistanceFunction make_distance_function(const FinslerMetric& metric, const Point& x0,
                                        const DistanceProvider& provider, const Vec& lo,
                                        const Vec& hi) {
  provider.validate();
  metric.require_domain(x0);
  const int n = metric.dim();
  if (provider.tier == DistanceTier::ClosedForm) {
    if (!metric.has_closed_form_distance()) {
      throw UnsupportedError(metric.describe() + " has no closed-form distance");
    }
    DistanceFunction df;
    df.provider = provider.describe();
    df.value = [metric, x0](const Point& x) { return metric.closed_form_distance(x0, x); };
    df.gradient = [metric, x0, n](const Point& x) {
      Vec grad(n);
      for (int k = 0; k < n; ++k) {
        double h = 1e-3 * (1.0 + x.coords.norm());
        const Vec e = Vec::Unit(n, k);
        while (!metric.in_domain(Point(Vec(x.coords + 2.0 * h * e))) ||
               !metric.in_domain(Point(Vec(x.coords - 2.0 * h * e)))) {
          h *= 0.5;
          if (h < 1e-12) throw DomainError("distance gradient: too close to the domain boundary");
        }
        auto d = [&](double s) { return metric.closed_form_distance(x0, Point(Vec(x.coords + s * e))); };
        grad[k] = (d(-2.0 * h) - 8.0 * d(-h) + 8.0 * d(h) - d(2.0 * h)) / (12.0 * h);
      }
      return grad;
    };
    return df;
  }

  // Numeric tiers share one single-source Dijkstra field.
  const int radius = provider.stencil > 0 ? provider.stencil : default_stencil(n);
  auto ss = std::make_shared<SingleSource>(
      run_dijkstra(metric, Lattice(x0.coords, lo.cwiseMin(x0.coords), hi.cwiseMax(x0.coords), provider.grid_n),
                   x0.coords, nullptr, radius));
  DistanceFunction df;
  df.provider = provider.describe() + "[single-source field]";
  df.value = [ss, n](const Point& x) {
    const Lattice& L = ss->lattice;
    std::vector<int> base(n);
    Vec frac(n);
    for (int k = 0; k < n; ++k) {
      const double s = (x.coords[k] - L.lo[k]) / L.h;
      int i = static_cast<int>(std::floor(s));
      i = std::clamp(i, 0, L.counts[k] - 2);
      base[k] = i;
      frac[k] = std::clamp(s - i, 0.0, 1.0);
    }
    double acc = 0.0, wsum = 0.0;
    std::vector<int> m(n);
    for (int corner = 0; corner < (1 << n); ++corner) {
      double w = 1.0;
      for (int k = 0; k < n; ++k) {
        const int bit = (corner >> k) & 1;
        m[k] = base[k] + bit;
        w *= bit ? frac[k] : 1.0 - frac[k];
      }
      const double d = ss->dist[static_cast<std::size_t>(L.flat(m))];
      if (w > 0.0 && std::isfinite(d)) {
        acc += w * d;
        wsum += w;
      }
    }
    if (wsum == 0.0) throw NumericalError("distance field: query outside the reachable grid");
    return acc / wsum;
  };
  df.gradient = [ss, n, value = df.value](const Point& x) {
    const double h = 0.5 * ss->lattice.h;
    Vec grad(n);
    for (int k = 0; k < n; ++k) {
      Point a = x, b = x;
      a.coords[k] += h;
      b.coords[k] -= h;
      grad[k] = (value(a) - value(b)) / (2.0 * h);
    }
    return grad;
  };
  return df;
}

}  // namespace finsler
