#include "finsler/experiments.hpp"

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"
#include "finsler/sobolev.hpp"

#include <fftw3.h>

#include "fftw_lock.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

namespace finsler {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

bool power_of_two(int N) { return N > 0 && (N & (N - 1)) == 0; }

// Spectral transforms on the torus grid; axis 0 is the fastest index.
class TorusFFT {
 public:
  explicit TorusFFT(const Domain& d) : n_(d.dim()), count_(d.node_count()) {
    for (int j = 0; j < n_; ++j) dims_[j] = d.resolution()[static_cast<std::size_t>(n_ - 1 - j)];
    half_ = count_ / static_cast<std::size_t>(dims_[n_ - 1]) * static_cast<std::size_t>(dims_[n_ - 1] / 2 + 1);
    for (int k = 0; k < n_; ++k) scale_[k] = 2.0 * std::numbers::pi / (d.hi()[k] - d.lo()[k]);
  }

  [[nodiscard]] std::size_t half() const { return half_; }

  std::vector<std::complex<double>> forward(std::vector<double> real) const {
    std::vector<std::complex<double>> out(half_);
    fftw_plan plan;
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_r2c(n_, dims_, real.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    return out;
  }

  std::vector<double> backward(std::vector<std::complex<double>> spec) const {
    std::vector<double> out(count_);
    fftw_plan plan;
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_c2r(n_, dims_, reinterpret_cast<fftw_complex*>(spec.data()), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    for (double& v : out) v /= static_cast<double>(count_);
    return out;
  }

  /// Physical wavevector of half-spectrum entry idx; component k belongs to axis k.
  [[nodiscard]] Vec wavevector(std::size_t idx) const {
    Vec kv(n_);
    // half-spectrum layout: dims_[0] x ... x (dims_[n-1]/2 + 1), last fastest
    const int last = dims_[n_ - 1] / 2 + 1;
    std::size_t rem = idx;
    for (int j = n_ - 1; j >= 0; --j) {
      const int extent = j == n_ - 1 ? last : dims_[j];
      int i = static_cast<int>(rem % static_cast<std::size_t>(extent));
      rem /= static_cast<std::size_t>(extent);
      if (j != n_ - 1 && i > dims_[j] / 2) i -= dims_[j];
      const int axis = n_ - 1 - j;
      kv[axis] = i * scale_[axis];
    }
    return kv;
  }

 private:
  int n_;
  std::size_t count_;
  std::size_t half_ = 0;
  int dims_[kMaxDim] = {0, 0, 0};
  double scale_[kMaxDim] = {1.0, 1.0, 1.0};
};

}  // namespace

double ShrinkingFiberModel::fiber_length(double x1) const {
  return 2.0 * std::numbers::pi * fiber_radius(x1);
}

Domain ShrinkingFiberModel::strip(double L) const {
  const int nx = static_cast<int>(std::lround(2.0 * L * cells_per_unit_x));
  if (std::abs(nx - 2.0 * L * cells_per_unit_x) > 1e-9) {
    throw ArgumentError("shrinking-fiber model: 2 L must be a multiple of the cell width");
  }
  return Domain::box(make_vec({-L, 0.0}), make_vec({L, 1.0}), std::vector<int>{nx, cells_y});
}

double ShrinkingFiberModel::stry_constant(double L, int sample_count) const {
  if (sample_count < 100) throw ArgumentError("stry_constant: sample_count must be >= 100");
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sample_count; ++i) {
    const double x = -L + 2.0 * L * i / (sample_count - 1);
    inf = std::min(inf, fiber_radius(x));
  }
  return 2.0 * std::numbers::pi * inf;
}

FiberDecayResult fiber_decay_example(double L, const ShrinkingFiberModel& model) {
  if (!(L >= 1.0)) throw ArgumentError("fiber_decay_example: L must be >= 1");
  const Domain strip = model.strip(L);
  FiberDecayResult r;
  r.L = L;
  r.sm_integral = base_quadrature(strip, [&](const Vec& x) { return model.fiber_length(x[0]); });
  r.m_integral = base_quadrature(strip, [](const Vec&) { return 1.0; });
  return r;
}

double sharpness_bound(double p) {
  if (!(p >= 1.0)) throw ArgumentError("sharpness_bound: p must be >= 1");
  // 1/p' = 1 - 1/p
  return 1.0 / (2.0 + std::pow(2.0, 1.0 - 1.0 / p));
}

ConvergenceTable sharpness_experiment(double p, const std::vector<double>& widths, int resolution) {
  if (widths.empty()) throw ArgumentError("sharpness_experiment: no widths");
  if (resolution < 16 || resolution % 2 != 0) throw ArgumentError("sharpness_experiment: resolution must be even and >= 16");
  const Domain W = Domain::box(make_vec({-1.0, 0.0}), make_vec({1.0, 1.0}),
                               std::vector<int>{resolution, resolution / 2});
  const ScalarField u = fields::step(2);
  const SobolevSpec spec{1, p};
  ConvergenceTable table;
  table.columns = {"w", "h1p", "lp", "grad_lp"};
  for (double w : widths) {
    const ScalarField diff = u - fields::ramp(2, w);
    const SobolevTerms t = classical_sobolev_terms(diff, spec, W);
    table.add_row({w, t.total, t.lp, t.grad_lp});
  }
  table.set_meta("p", num(p));
  table.set_meta("bound", num(sharpness_bound(p)));
  table.set_meta("domain", W.describe());
  table.set_meta("norm", "classical H_1^p(W), dx measure");
  return table;
}

DirichletSolution dirichlet_solve_torus(const ScalarField& f, int N, int n) {
  if (!power_of_two(N) || N < 16) throw ArgumentError("dirichlet: N must be a power of two >= 16");
  if (n < 1 || n > kMaxDim) throw UnsupportedError("dirichlet: dimension must be 1, 2 or 3");
  const Domain torus = Domain::torus(Vec::Constant(n, 2.0 * std::numbers::pi), N);
  const std::size_t count = torus.node_count();
  std::vector<double> fv(count);
  parallel_for(count, [&](std::size_t i) { fv[i] = f.value(torus.node(i)); });
  const double mean = pairwise_sum(fv) / static_cast<double>(count);
  if (std::abs(mean) >= 1e-10) {
    std::ostringstream os;
    os << "dirichlet: source has mean " << mean << "; a solution requires int f dV = 0";
    throw HypothesisError(os.str());
  }
  const TorusFFT fft(torus);
  const auto fh = fft.forward(fv);
  std::vector<std::complex<double>> uh(fh.size());
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double k2 = fft.wavevector(i).squaredNorm();
    uh[i] = k2 == 0.0 ? std::complex<double>(0.0, 0.0) : -fh[i] / k2;
  }
  std::vector<double> u = fft.backward(uh);
  std::vector<double> grads(count * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    std::vector<std::complex<double>> gh(uh.size());
    for (std::size_t i = 0; i < uh.size(); ++i) gh[i] = std::complex<double>(0.0, fft.wavevector(i)[k]) * uh[i];
    const auto g = fft.backward(std::move(gh));
    for (std::size_t i = 0; i < count; ++i) grads[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = g[i];
  }
  std::vector<std::complex<double>> lh(uh.size());
  for (std::size_t i = 0; i < uh.size(); ++i) lh[i] = -fft.wavevector(i).squaredNorm() * uh[i];
  const auto lap = fft.backward(std::move(lh));
  double residual = 0.0;
  for (std::size_t i = 0; i < count; ++i) residual = std::max(residual, std::abs(lap[i] - fv[i]));
  ScalarField uf = grid_field(torus, std::move(u), std::move(grads), "u[" + f.name + "]");
  return DirichletSolution{torus, std::move(uf), std::move(fv), residual, mean};
}

double dirichlet_weak_form_defect(const DirichletSolution& sol, int test_fields, std::uint64_t seed) {
  const Domain& d = sol.domain;
  const int n = d.dim();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wave(-4, 4);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const NodeSamples us = sample(sol.u, d, true);
  const std::size_t count = d.node_count();
  double worst = 0.0;
  for (int t = 0; t < test_fields; ++t) {
    Vec k(n);
    for (int a = 0; a < n; ++a) k[a] = wave(rng);
    const ScalarField v = fields::trig(k, phase(rng));
    std::vector<double> a(count), b(count), gu2(count), gv2(count), f2(count), v2(count);
    for (std::size_t i = 0; i < count; ++i) {
      const Vec x = d.node(i);
      const double vv = v.value(x);
      const Vec gv = v.grad(x);
      a[i] = us.gradients[i].dot(gv);
      b[i] = sol.f[i] * vv;
      gu2[i] = us.gradients[i].squaredNorm();
      gv2[i] = gv.squaredNorm();
      f2[i] = sol.f[i] * sol.f[i];
      v2[i] = vv * vv;
    }
    const double lhs = base_quadrature_values(d, a) + base_quadrature_values(d, b);
    const double scale = std::sqrt(base_quadrature_values(d, gu2) * base_quadrature_values(d, gv2)) +
                         std::sqrt(base_quadrature_values(d, f2) * base_quadrature_values(d, v2));
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs) / scale);
  }
  return worst;
}

ConvergenceTable dirichlet_approximation(const DirichletSolution& sol, const std::vector<double>& eps_list) {
  const int n = sol.domain.dim();
  const FinslerMetric flat = FinslerMetric::euclidean(n);
  const FiberQuadrature rule = FiberQuadrature::make(n, n == 3 ? 4 : 16);
  ConvergenceTable t = mollification_convergence(flat, sol.u, 2.0, eps_list, sol.domain, rule, 0.0);
  t.set_meta("laplacian", "div grad");
  t.set_meta("residual", num(sol.residual));
  return t;
}

GsComparison compare_gs(const FinslerMetric& metric, const ScalarField& u, const Domain& domain,
                        const FiberQuadrature& rule) {
  if (!metric.reversible()) {
    throw ReversibilityError("compare_gs: metric " + metric.describe() + " is not reversible");
  }
  GsComparison c;
  c.ours = sobolev_norm(metric, u, SobolevSpec{1, 2.0}, domain, rule);
  c.gs = gs_norm(metric, u, domain, rule);
  c.ratio = c.gs > 0.0 ? c.ours / c.gs : 0.0;
  return c;
}

}  // namespace finsler
