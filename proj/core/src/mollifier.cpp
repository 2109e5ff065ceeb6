#include "finsler/mollifier.hpp"

#include "finsler/error.hpp"
#include "finsler/parallel.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fftw3.h>

#include "fftw_lock.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

namespace finsler {
namespace {

struct StencilEntry {
  std::vector<int> offset;
  double weight = 0.0;
  Vec dweight;  // gradient weight: grad J_eps(-offset h) * cell volume / S
};

struct Stencil {
  std::vector<StencilEntry> entries;
  double mass = 0.0;  // unnormalized sum of J_eps(kh) h^n
};

void require_resolved(const MollifierSpec& spec, const Domain& domain) {
  if (spec.dim != domain.dim()) throw ArgumentError("mollify: kernel dimension does not match domain");
  for (int k = 0; k < domain.dim(); ++k) {
    if (domain.spacing(k) >= spec.eps / 4.0) {
      std::ostringstream os;
      os << "mollify: eps=" << spec.eps << " is below the grid resolution (spacing " << domain.spacing(k)
         << " on axis " << k << " must be < eps/4)";
      throw ArgumentError(os.str());
    }
  }
  if (domain.kind() == DomainKind::Torus) {
    for (int k = 0; k < domain.dim(); ++k) {
      if (2.0 * spec.eps >= domain.hi()[k] - domain.lo()[k]) {
        throw ArgumentError("mollify: eps must be smaller than half of every torus period");
      }
    }
  }
}

Stencil build_stencil(const MollifierSpec& spec, const Domain& domain) {
  const int n = domain.dim();
  std::vector<int> reach(static_cast<std::size_t>(n));
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    reach[static_cast<std::size_t>(k)] = static_cast<int>(std::ceil(spec.eps / domain.spacing(k)));
    total *= static_cast<std::size_t>(2 * reach[static_cast<std::size_t>(k)] + 1);
  }
  const double vol = domain.cell_volume();
  Stencil st;
  std::vector<double> masses;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<int> off(static_cast<std::size_t>(n));
    Vec v(n);
    std::size_t rem = idx;
    for (int k = 0; k < n; ++k) {
      const auto w = static_cast<std::size_t>(2 * reach[static_cast<std::size_t>(k)] + 1);
      off[static_cast<std::size_t>(k)] = static_cast<int>(rem % w) - reach[static_cast<std::size_t>(k)];
      rem /= w;
      v[k] = off[static_cast<std::size_t>(k)] * domain.spacing(k);
    }
    if (v.norm() >= spec.eps) continue;
    StencilEntry e;
    e.offset = std::move(off);
    e.weight = mollifier_kernel(spec, v) * vol;
    e.dweight = mollifier_kernel_gradient(spec, Vec(-v)) * vol;
    masses.push_back(e.weight);
    st.entries.push_back(std::move(e));
  }
  st.mass = pairwise_sum(masses);
  for (auto& e : st.entries) {
    e.weight /= st.mass;
    e.dweight /= st.mass;
  }
  return st;
}

// Direct summation over the stencil at every node of a box (zero extension). With
// gradient samples, nodes whose stencil stays inside the grid use J * grad u; the rest
// differentiate the kernel.
void convolve_box(const Domain& domain, const Stencil& st, const std::vector<double>& u,
                  const std::vector<Vec>* du, std::vector<double>& out, std::vector<double>& grad) {
  const int n = domain.dim();
  const std::size_t count = domain.node_count();
  out.assign(count, 0.0);
  grad.assign(count * static_cast<std::size_t>(n), 0.0);
  parallel_for(count, [&](std::size_t i) {
    const std::vector<int> m = domain.node_multi_index(i);
    std::vector<int> q(m.size());
    double acc = 0.0;
    double g[kMaxDim] = {0.0, 0.0, 0.0};
    double gu[kMaxDim] = {0.0, 0.0, 0.0};
    bool whole = true;
    for (const auto& e : st.entries) {
      bool inside = true;
      for (int k = 0; k < n; ++k) {
        const int qi = m[static_cast<std::size_t>(k)] + e.offset[static_cast<std::size_t>(k)];
        if (qi < 0 || qi >= domain.resolution()[static_cast<std::size_t>(k)]) {
          inside = false;
          break;
        }
        q[static_cast<std::size_t>(k)] = qi;
      }
      if (!inside) {
        whole = false;
        continue;
      }
      const std::size_t z = domain.flat_index(q);
      if (du) {
        for (int k = 0; k < n; ++k) gu[k] += e.weight * (*du)[z][k];
      }
      const double uz = u[z];
      if (uz == 0.0) continue;
      acc += e.weight * uz;
      for (int k = 0; k < n; ++k) g[k] += e.dweight[k] * uz;
    }
    out[i] = acc;
    const double* src = du && whole ? gu : g;
    for (int k = 0; k < n; ++k) grad[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = src[k];
  });
}

// Circular convolution out[m] = sum_k w_k u[m + k] through FFTW.
std::vector<double> circular(const Domain& domain, const std::vector<double>& u,
                             const std::vector<double>& kernel) {
  const int n = domain.dim();
  int dims[kMaxDim];
  for (int j = 0; j < n; ++j) dims[j] = domain.resolution()[static_cast<std::size_t>(n - 1 - j)];
  const std::size_t count = domain.node_count();
  const std::size_t half = count / static_cast<std::size_t>(dims[n - 1]) * static_cast<std::size_t>(dims[n - 1] / 2 + 1);
  std::vector<double> a(u), b(kernel), out(count);
  auto* fa = fftw_alloc_complex(half);
  auto* fb = fftw_alloc_complex(half);
  fftw_plan pa, pb, pc;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    pa = fftw_plan_dft_r2c(n, dims, a.data(), fa, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c(n, dims, b.data(), fb, FFTW_ESTIMATE);
    pc = fftw_plan_dft_c2r(n, dims, fa, out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < half; ++i) {
    const std::complex<double> za(fa[i][0], fa[i][1]), zb(fb[i][0], fb[i][1]);
    const std::complex<double> z = za * zb;
    fa[i][0] = z.real();
    fa[i][1] = z.imag();
  }
  fftw_execute(pc);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pc);
  }
  fftw_free(fa);
  fftw_free(fb);
  for (double& v : out) v /= static_cast<double>(count);
  return out;
}

// With gradient samples the gradient is J * grad u, else the kernel is differentiated.
void convolve_torus(const Domain& domain, const Stencil& st, const std::vector<double>& u,
                    const std::vector<Vec>* du, std::vector<double>& out, std::vector<double>& grad) {
  const int n = domain.dim();
  const std::size_t count = domain.node_count();
  std::vector<std::vector<double>> kernels(static_cast<std::size_t>(n + 1), std::vector<double>(count, 0.0));
  std::vector<int> q(static_cast<std::size_t>(n));
  for (const auto& e : st.entries) {
    for (int k = 0; k < n; ++k) {
      const int r = domain.resolution()[static_cast<std::size_t>(k)];
      q[static_cast<std::size_t>(k)] = ((-e.offset[static_cast<std::size_t>(k)]) % r + r) % r;
    }
    const std::size_t idx = domain.flat_index(q);
    kernels[0][idx] += e.weight;
    for (int k = 0; k < n; ++k) kernels[static_cast<std::size_t>(k + 1)][idx] += e.dweight[k];
  }
  out = circular(domain, u, kernels[0]);
  grad.assign(count * static_cast<std::size_t>(n), 0.0);
  std::vector<double> component(du ? count : 0);
  for (int k = 0; k < n; ++k) {
    std::vector<double> gk;
    if (du) {
      for (std::size_t i = 0; i < count; ++i) component[i] = (*du)[i][k];
      gk = circular(domain, component, kernels[0]);
    } else {
      gk = circular(domain, u, kernels[static_cast<std::size_t>(k + 1)]);
    }
    for (std::size_t i = 0; i < count; ++i) grad[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = gk[i];
  }
}

struct OffNode {
  double value;
  Vec gradient;
};

// N(x)/S(x) with N summed over grid nodes and S over the full lattice.
OffNode evaluate_off_node(const MollifierSpec& spec, const Domain& domain, const std::vector<double>& u,
                          const Vec& x) {
  const int n = domain.dim();
  const bool periodic = domain.kind() == DomainKind::Torus;
  int lo[kMaxDim], hi[kMaxDim];
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    const double h = domain.spacing(k);
    const double t = (x[k] - domain.lo()[k]) / h - 0.5;
    lo[k] = static_cast<int>(std::floor(t - spec.eps / h));
    hi[k] = static_cast<int>(std::ceil(t + spec.eps / h));
    total *= static_cast<std::size_t>(hi[k] - lo[k] + 1);
  }
  double num = 0.0, den = 0.0;
  Vec gnum = Vec::Zero(n), gden = Vec::Zero(n);
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    Vec z(n);
    bool inside = true;
    for (int k = 0; k < n; ++k) {
      const auto w = static_cast<std::size_t>(hi[k] - lo[k] + 1);
      int i = lo[k] + static_cast<int>(rem % w);
      rem /= w;
      z[k] = domain.lo()[k] + (i + 0.5) * domain.spacing(k);
      const int r = domain.resolution()[static_cast<std::size_t>(k)];
      if (periodic) {
        i = ((i % r) + r) % r;
      } else if (i < 0 || i >= r) {
        inside = false;
      }
      idx[static_cast<std::size_t>(k)] = i;
    }
    const Vec v = x - z;
    if (v.norm() >= spec.eps) continue;
    const double J = mollifier_kernel(spec, v);
    const Vec dJ = mollifier_kernel_gradient(spec, v);
    den += J;
    gden += dJ;
    if (!inside) continue;
    const double uz = u[domain.flat_index(idx)];
    num += J * uz;
    gnum += dJ * uz;
  }
  return {num / den, (gnum * den - num * gden) / (den * den)};
}

}  // namespace

double bump_normalization(int n) {
  if (n < 1 || n > kMaxDim) throw UnsupportedError("mollifier: dimension must be 1, 2 or 3");
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto radial = [n](double r) {
    if (r >= 1.0) return 0.0;
    return std::pow(r, n - 1) * std::exp(1.0 / (r * r - 1.0));
  };
  const double I = integrator.integrate(radial, 0.0, 1.0);
  return 1.0 / (sphere_volume(n) * I);
}

MollifierSpec MollifierSpec::make(int n, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ArgumentError("mollifier: eps must be positive");
  return MollifierSpec{eps, n, bump_normalization(n)};
}

double mollifier_kernel(const MollifierSpec& spec, const Vec& x) {
  const double s = x.squaredNorm() / (spec.eps * spec.eps);
  if (s >= 1.0) return 0.0;
  return spec.C * std::exp(1.0 / (s - 1.0)) / std::pow(spec.eps, spec.dim);
}

Vec mollifier_kernel_gradient(const MollifierSpec& spec, const Vec& x) {
  const double s = x.squaredNorm() / (spec.eps * spec.eps);
  if (s >= 1.0) return Vec::Zero(x.size());
  const double J = spec.C * std::exp(1.0 / (s - 1.0)) / std::pow(spec.eps, spec.dim);
  const double q = s - 1.0;
  return -J / (q * q) * 2.0 * x / (spec.eps * spec.eps);
}

double discrete_kernel_mass(const MollifierSpec& spec, const Domain& domain) {
  require_resolved(spec, domain);
  return build_stencil(spec, domain).mass;
}

ScalarField mollify(const ScalarField& u, const MollifierSpec& spec, const Domain& domain) {
  require_resolved(spec, domain);
  const Stencil st = build_stencil(spec, domain);
  // Piecewise fields keep the jump part of their gradient only through the kernel.
  const bool weak = u.smoothness != Smoothness::Piecewise;
  NodeSamples samples = sample(u, domain, weak);
  auto values = std::make_shared<std::vector<double>>(std::move(samples.values));
  const std::vector<Vec>* du = weak ? &samples.gradients : nullptr;
  std::vector<double> out, grad;
  if (domain.kind() == DomainKind::Torus) {
    convolve_torus(domain, st, *values, du, out, grad);
  } else {
    convolve_box(domain, st, *values, du, out, grad);
  }
  ScalarField w;
  w.value = [spec, domain, values](const Vec& x) { return evaluate_off_node(spec, domain, *values, x).value; };
  w.gradient = [spec, domain, values](const Vec& x) { return evaluate_off_node(spec, domain, *values, x).gradient; };
  w.smoothness = Smoothness::Smooth;
  std::ostringstream os;
  os << "J_" << spec.eps << "*" << u.name;
  w.name = os.str();
  w.grid = std::make_shared<GridData>(GridData{domain, std::move(out), std::move(grad)});
  return w;
}

}  // namespace finsler
