#pragma once

#include <limits>
#include <map>
#include <random>
#include <string>

#include "curveflow/energy.hpp"
#include "curveflow/reference.hpp"

namespace curveflow {

namespace detail {

// zeta^q with the convention zeta^0 = indicator of the support, so that
// integrals "restricted to [zeta > 0]" are uniform across exponents.
inline std::vector<Real> weight_power(std::span<const Real> zeta, Real q) {
  std::vector<Real> out(zeta.size(), 0.0);
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    if (zeta[i] <= 0) continue;
    out[i] = q == 0 ? Real(1) : std::pow(zeta[i], q);
  }
  return out;
}

inline std::vector<Real> magnitude_sq(const DiscreteCurve& g, std::span<const Real> vec) {
  std::vector<Real> out(g.total_nodes(), 0.0);
  for (std::size_t i = 0; i < g.total_nodes(); ++i) {
    Real m = 0;
    for (int c = 0; c < g.dim; ++c) m += sqr(vec[i * g.dim + c]);
    out[i] = m;
  }
  return out;
}

}  // namespace detail

// Weighted seminorms of a normal field X along the curve:
//   plain_l2      : L2 norm of X restricted to the support of zeta
//   weighted_k    : L2 norm of zeta^k (k-th covariant derivative of X)
//   composite_k   : weighted_k + plain_l2
//   weighted_lp   : Lp norm of zeta^{1/2 - 1/p} X on the support (p can be inf)
struct SeminormSet {
  Real plain_l2 = 0;
  Real weighted_k = 0;
  Real composite_k = 0;
  Real weighted_lp = 0;
};

inline SeminormSet seminorms(const DiscreteCurve& g, const CurveFields& f,
                             std::span<const Real> X, std::span<const Real> zeta, int k,
                             Real p) {
  require(k >= 0, "seminorms: derivative order must be nonnegative");
  require(p >= 2, "seminorms: p must be at least 2 (use INFINITY for the sup form)");
  SeminormSet out;
  auto ind = detail::weight_power(zeta, 0);
  auto x_sq = detail::magnitude_sq(g, X);
  out.plain_l2 = std::sqrt(integrate(g, x_sq, f.w, ind));
  if (k == 0) {
    // the k = 0 member of the family is the plain restricted norm itself
    out.weighted_k = out.plain_l2;
    out.composite_k = out.plain_l2;
  } else {
    auto dk = covariant_derivative(g, X, f.w, f.t, k);
    auto dk_sq = detail::magnitude_sq(g, dk);
    auto zk = detail::weight_power(zeta, 2 * static_cast<Real>(k));
    out.weighted_k = std::sqrt(integrate(g, dk_sq, f.w, zk));
    out.composite_k = out.weighted_k + out.plain_l2;
  }
  if (std::isinf(p)) {
    Real best = 0;
    for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i)
      if (zeta[i] > 0) best = std::max(best, std::sqrt(zeta[i] * x_sq[i]));
    out.weighted_lp = best;
  } else {
    Real q = 0.5 - 1 / p;
    std::vector<Real> density(g.total_nodes(), 0.0);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
      if (zeta[i] <= 0) continue;
      density[i] = std::pow(std::pow(zeta[i], q) * std::sqrt(x_sq[i]), p);
    }
    out.weighted_lp = std::pow(integrate(g, density, f.w), 1 / p);
  }
  return out;
}

// First-derivative interpolation bound with unit constants:
//   ∫ |∇X|² ζ^ℓ  vs  ε ∫ |∇²X|² ζ^{ℓ+2} + (1/ε) ∫_{[ζ>0]} |X|² ζ^{ℓ-2},
// valid for ℓ ≥ 2 and ε in (0, 1] up to a constant depending only on the
// weight's Lipschitz bound. The reported ratio folds that constant in.
struct DerivativeBoundResult {
  int ell = 2;
  Real eps = 1;
  Real lhs = 0, term_high = 0, term_low = 0, rhs = 0, ratio = 0;
};

inline DerivativeBoundResult check_derivative_bound(const DiscreteCurve& g,
                                                    const CurveFields& f,
                                                    std::span<const Real> X,
                                                    std::span<const Real> zeta, int ell,
                                                    Real eps) {
  require(ell >= 2, "derivative bound: weight exponent must be at least 2");
  require(eps > 0 && eps <= 1, "derivative bound: eps must lie in (0, 1]");
  DerivativeBoundResult r;
  r.ell = ell;
  r.eps = eps;
  auto d1 = covariant_derivative(g, X, f.w, f.t, 1);
  auto d2 = covariant_derivative(g, d1, f.w, f.t, 1);
  auto d1_sq = detail::magnitude_sq(g, d1);
  auto d2_sq = detail::magnitude_sq(g, d2);
  auto x_sq = detail::magnitude_sq(g, X);
  r.lhs = integrate(g, d1_sq, f.w, detail::weight_power(zeta, ell));
  r.term_high = integrate(g, d2_sq, f.w, detail::weight_power(zeta, ell + 2));
  r.term_low = integrate(g, x_sq, f.w, detail::weight_power(zeta, ell - 2));
  r.rhs = eps * r.term_high + r.term_low / eps;
  r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 0;
  return r;
}

// Weighted Gagliardo-Nirenberg bound with unit constants and θ = (p-2)/(2p):
//   |X|_{0,p,r-ish}  vs  A^{θ/2} B^{(1-θ)/2} + B^{1/2},
// where A = ∫ |∇X|² ζ^{2r+2}, B = ∫ |X|² ζ^{2r}; p = inf uses the sup form
// with exponents 1/4, 1/4.
struct GNBoundResult {
  Real p = 2, r = 0, theta = 0;
  Real lhs = 0, term_a = 0, term_b = 0, rhs = 0, ratio = 0;
};

inline GNBoundResult check_gn(const DiscreteCurve& g, const CurveFields& f,
                              std::span<const Real> X, std::span<const Real> zeta,
                              Real r, Real p) {
  require(p >= 2, "gn bound: p must be at least 2");
  require(r >= 0, "gn bound: weight exponent must be nonnegative");
  GNBoundResult out;
  out.p = p;
  out.r = r;
  out.theta = std::isinf(p) ? Real(0.5) : (p - 2) / (2 * p);
  auto d1 = covariant_derivative(g, X, f.w, f.t, 1);
  auto d1_sq = detail::magnitude_sq(g, d1);
  auto x_sq = detail::magnitude_sq(g, X);
  out.term_a = integrate(g, d1_sq, f.w, detail::weight_power(zeta, 2 * r + 2));
  out.term_b = integrate(g, x_sq, f.w, detail::weight_power(zeta, 2 * r));
  if (std::isinf(p)) {
    Real best = 0;
    for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i)
      if (zeta[i] > 0)
        best = std::max(best, std::pow(zeta[i], r + 0.5) * std::sqrt(x_sq[i]));
    out.lhs = best;
  } else {
    std::vector<Real> density(g.total_nodes(), 0.0);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
      if (zeta[i] <= 0) continue;
      density[i] = std::pow(std::sqrt(x_sq[i]), p) * std::pow(zeta[i], p * (r + out.theta));
    }
    out.lhs = std::pow(integrate(g, density, f.w), 1 / p);
  }
  out.rhs = std::pow(out.term_a, out.theta / 2) * std::pow(out.term_b, (1 - out.theta) / 2) +
            std::sqrt(out.term_b);
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0;
  return out;
}

// A curvature monomial: the pointwise product of |∇^{i_j} κ| over the listed
// derivative orders. total order a = Σ i_j, factor count b, top order c.
struct MonomialSpec {
  std::vector<int> indices;

  int total_order() const {
    int a = 0;
    for (int i : indices) a += i;
    return a;
  }
  int factor_count() const { return static_cast<int>(indices.size()); }
  int max_order() const {
    int c = 0;
    for (int i : indices) c = std::max(c, i);
    return c;
  }
  void validate() const {
    require(indices.size() >= 2, "monomial: need at least two factors");
    for (int i : indices) require(i >= 0, "monomial: orders must be nonnegative");
  }
  // weight exponent a + b/2 - 1 used in the monomial integral
  Real weight_exponent() const { return total_order() + factor_count() / Real(2) - 1; }
};

// Canonical spec with b factors of total order a, each capped at order c.
inline MonomialSpec canonical_monomial(int a, int b, int c) {
  require(b >= 2, "monomial: need at least two factors");
  require(c >= 0 && a >= 0, "monomial: orders must be nonnegative");
  MonomialSpec spec;
  spec.indices.assign(static_cast<std::size_t>(b), 0);
  int left = a;
  for (int j = 0; j < b && left > 0; ++j) {
    int take = std::min(left, c);
    spec.indices[static_cast<std::size_t>(j)] = take;
    left -= take;
  }
  require(left == 0, "monomial: total order not realizable with the factor cap");
  return spec;
}

namespace detail {

// squared magnitudes of ∇^0 κ .. ∇^m κ
inline std::vector<std::vector<Real>> curvature_derivative_mags(const DiscreteCurve& g,
                                                                const CurveFields& f,
                                                                int m) {
  std::vector<std::vector<Real>> mags;
  mags.push_back(magnitude_sq(g, f.kappa));
  std::vector<Real> cur(f.kappa.begin(), f.kappa.end());
  for (int j = 1; j <= m; ++j) {
    cur = covariant_derivative(g, cur, f.w, f.t, 1);
    mags.push_back(magnitude_sq(g, cur));
  }
  return mags;
}

}  // namespace detail

// ∫ Π_j |∇^{i_j} κ| ζ^{a + b/2 - 1} ds
inline Real monomial_integral(const DiscreteCurve& g, const CurveFields& f,
                              const MonomialSpec& spec, std::span<const Real> zeta) {
  spec.validate();
  auto mags = detail::curvature_derivative_mags(g, f, spec.max_order());
  const std::size_t n = g.total_nodes();
  std::vector<Real> density(n, 1.0);
  for (int order : spec.indices) {
    const auto& mag = mags[static_cast<std::size_t>(order)];
    for (std::size_t i = 0; i < n; ++i) density[i] *= std::sqrt(mag[i]);
  }
  return integrate(g, density, f.w, detail::weight_power(zeta, spec.weight_exponent()));
}

// Curvature-monomial interpolation bound with unit constants: for b ≥ 2
// factors of total order a, top order c ≤ k, and a + b/2 - 1 < 2k,
//   ∫ Π |∇^{i_j} κ| ζ^{a+b/2-1}  vs
//   ε ∫ |∇^k κ|² ζ^{2k} + I0^{(b-δ)/(2-δ)} + I0^{b/2},
// with I0 = ∫_{[ζ>0]} |κ|² and δ = (a + b/2 - 1)/k.
struct MonomialBoundResult {
  int a = 0, b = 2, c = 0, k = 2;
  Real eps = 1, delta = 0;
  Real lhs = 0, term_high = 0, term_low_a = 0, term_low_b = 0, rhs = 0, ratio = 0;
  bool holds = false;  // lhs within the unit-constant right side
};

inline MonomialBoundResult check_p_interpolation(const DiscreteCurve& g,
                                                 const CurveFields& f,
                                                 const MonomialSpec& spec,
                                                 std::span<const Real> zeta, int k,
                                                 Real eps) {
  spec.validate();
  require(k >= 1 && spec.max_order() <= k,
          "monomial bound: factor orders must not exceed k");
  require(eps > 0 && eps <= 1, "monomial bound: eps must lie in (0, 1]");
  Real weight_exp = spec.weight_exponent();
  require(weight_exp < 2 * k, "monomial bound: total order too high for k derivatives");
  MonomialBoundResult out;
  out.a = spec.total_order();
  out.b = spec.factor_count();
  out.c = spec.max_order();
  out.k = k;
  out.eps = eps;
  out.delta = weight_exp / k;

  out.lhs = monomial_integral(g, f, spec, zeta);
  auto mags = detail::curvature_derivative_mags(g, f, k);
  out.term_high = integrate(g, mags[static_cast<std::size_t>(k)], f.w,
                            detail::weight_power(zeta, 2 * static_cast<Real>(k)));
  Real i0 = integrate(g, mags[0], f.w, detail::weight_power(zeta, 0));
  out.term_low_a = std::pow(i0, (out.b - out.delta) / (2 - out.delta));
  out.term_low_b = std::pow(i0, out.b / Real(2));
  out.rhs = eps * out.term_high + out.term_low_a + out.term_low_b;
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0;
  out.holds = out.lhs <= out.rhs * (1 + 1e-12) + 1e-300;
  return out;
}

// The flat-line specialization: a scalar function u on an interval embeds as
// the normal field u * e2 along the straight line, where the covariant
// derivative reduces to the plain derivative.
inline GNBoundResult check_line_corollary(std::span<const Real> u, Real h,
                                          std::span<const Real> zeta, Real r, Real p) {
  require(u.size() == zeta.size(), "line bound: sample size mismatch");
  require(u.size() >= 9, "line bound: need at least 9 samples");
  DiscreteCurve g;
  g.dim = 2;
  g.h = h;
  g.ends = EndCondition::Clamped;
  g.ghost = 4;
  g.s0 = 0;
  const std::size_t n = u.size();
  g.pts.assign(n * 2, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    g.pts[i * 2] = (static_cast<Real>(i) - g.ghost) * h;
  auto f = compute_fields(g);
  std::vector<Real> X(n * 2, 0.0);
  for (std::size_t i = 0; i < n; ++i) X[i * 2 + 1] = u[i];
  return check_gn(g, f, X, zeta, r, p);
}

// ---------------------------------------------------------------------------
// Randomized trial inputs for the verification batches: Fourier-perturbed
// lines and circles, Fourier normal fields, and smoothstep cutoffs with unit
// Lipschitz bound. Fully determined by (seed, index, refine).
// ---------------------------------------------------------------------------

struct InterpTrial {
  DiscreteCurve curve;
  CurveFields fields;
  std::vector<Real> X;   // normal field
  CutoffWeight zeta;
  Real eps = 1;          // for the eps-type bounds
  int ell = 2;           // for the derivative bound
};

inline InterpTrial make_interp_trial(std::uint64_t seed, int index, int refine = 0) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1)));
  std::uniform_real_distribution<Real> unit(0.0, 1.0);
  auto uni = [&](Real a, Real b) { return a + (b - a) * unit(rng); };

  const int modes = 12;
  std::array<Real, 12> amp{}, phase{};
  bool closed = unit(rng) < 0.5;
  for (int j = 0; j < modes; ++j) {
    amp[static_cast<std::size_t>(j)] = uni(-1, 1);
    phase[static_cast<std::size_t>(j)] = uni(0, 2 * kPi);
  }

  InterpTrial trial;
  const Real refine_factor = std::pow(Real(2), refine);
  if (closed) {
    const Real r0 = 1;
    const int n = static_cast<int>(256 * refine_factor);
    DiscreteCurve g;
    g.dim = 2;
    g.ends = EndCondition::Periodic;
    g.h = 2 * kPi * r0 / n;
    g.pts.assign(static_cast<std::size_t>(n) * 2, 0.0);
    for (int i = 0; i < n; ++i) {
      Real th = 2 * kPi * i / n;
      Real rad = r0;
      for (int j = 2; j < modes; ++j)
        rad += 0.25 * amp[static_cast<std::size_t>(j)] / sqr(Real(j)) *
               std::cos(j * th + phase[static_cast<std::size_t>(j)]);
      g.pts[static_cast<std::size_t>(i) * 2] = rad * std::cos(th);
      g.pts[static_cast<std::size_t>(i) * 2 + 1] = rad * std::sin(th);
    }
    trial.curve = std::move(g);
  } else {
    const Real S = 8;
    ReferenceCurveSpec spec;
    spec.S = S;
    spec.h = 0.05 / refine_factor;
    auto profile = [&](Real x) {
      Real y = 0;
      for (int j = 1; j < modes; ++j)
        y += 0.5 * amp[static_cast<std::size_t>(j)] / sqr(Real(j)) *
             std::sin(kPi * j * (x + S) / (2 * S) + phase[static_cast<std::size_t>(j)]);
      return y;
    };
    trial.curve = detail::from_plane_map(spec, [&](Real x, Real& px, Real& py) {
      px = x;
      py = profile(x);
    });
  }
  trial.fields = compute_fields(trial.curve);

  // normal field: Fourier components projected off the tangent
  std::array<Real, 24> fc{};
  for (auto& v : fc) v = uni(-1, 1);
  const std::size_t n = trial.curve.total_nodes();
  trial.X.assign(n * 2, 0.0);
  auto s = cumulative_arclength(trial.curve);
  Real span = s[n - 1] - s[0];
  for (std::size_t i = 0; i < n; ++i) {
    Real vx = 0, vy = 0;
    for (int j = 0; j < modes; ++j) {
      Real arg = 2 * kPi * (j + 1) * (s[i] - s[0]) / span;
      Real a = fc[static_cast<std::size_t>(2 * j)] / (1 + j);
      Real b = fc[static_cast<std::size_t>(2 * j + 1)] / (1 + j);
      vx += a * std::cos(arg) + b * std::sin(arg);
      vy += a * std::sin(arg) - b * std::cos(arg);
    }
    trial.X[i * 2] = vx;
    trial.X[i * 2 + 1] = vy;
  }
  project_normal(trial.curve, trial.fields.t, trial.X);

  // cutoff with Lipschitz bound at most 1; the support (plateau plus both
  // ramps) must stay strictly inside the parameterized arclength range
  Real ramp, a, b;
  if (closed) {
    ramp = uni(1.5, 1.7);
    a = ramp + uni(Real(0.05), Real(0.6));
    b = a + uni(Real(0.5), Real(1.0));
  } else {
    ramp = uni(1.5, 2.5);
    a = uni(-3.5, 0.0);
    b = a + uni(Real(1.0), Real(3.0));
  }
  trial.zeta = smoothstep_cutoff(trial.curve, a, b, ramp);

  trial.eps = uni(Real(0.05), Real(1.0));
  trial.ell = 2 + static_cast<int>(uni(0, 3));  // 2, 3, or 4
  return trial;
}

// Enveloped single-frequency probe field: the cutoff profile times a wave in
// arclength, rotated into the normal direction. The bounds are claimed for
// every normal field, so batches evaluate these near-resonant candidates
// alongside the random field; the worst case over the dictionary sits on a
// densely sampled edge of the ratio distribution, where a purely random field
// draw reaches it only by luck.
inline std::vector<Real> enveloped_wave_field(const DiscreteCurve& g,
                                              const CurveFields& f,
                                              const CutoffWeight& zeta,
                                              std::span<const Real> s, Real cycles,
                                              Real phase, Real envelope_power = 1) {
  require(g.dim >= 2, "probe fields need at least two coordinates");
  const std::size_t n = g.total_nodes();
  const std::size_t dim = static_cast<std::size_t>(g.dim);
  std::vector<Real> X(n * dim, 0.0);
  auto [lo, hi] = zeta.support();
  if (hi <= lo) return X;
  const Real s0 = s[lo];
  const Real len = std::max(s[hi - 1] - s0, Real(1e-12));
  for (std::size_t i = lo; i < hi; ++i) {
    // envelope power 0 keeps the amplitude flat across the support; the
    // integrands' own weight factors then window it, which admits fields whose
    // amplitude peaks where the cutoff decays
    Real env = envelope_power == 0 ? Real(1)
                                   : std::pow(zeta.values[i], envelope_power);
    Real amp = env * std::cos(2 * kPi * cycles * (s[i] - s0) / len + phase);
    // quarter-turn of the tangent within the first coordinate plane
    X[i * dim + 0] = -amp * f.t[i * dim + 1];
    X[i * dim + 1] = amp * f.t[i * dim + 0];
  }
  project_normal(g, f.t, X);
  return X;
}

// ---------------------------------------------------------------------------
// Batch verification over the randomized trial family. One row per check.
// ---------------------------------------------------------------------------

struct InterpBatchRow {
  int trial = 0;
  std::string lemma;  // "first_derivative" | "sobolev_gn" | "curvature_monomial"
  Real p = 0, eps = 0;
  int ell = 0, a = 0, b = 0, c = 0, k = 0;
  Real lhs = 0, rhs = 0, ratio = 0;
};

struct InterpFamilyStats {
  std::size_t count = 0;
  Real max_ratio = 0;
  Real median_ratio = 0;
};

inline std::vector<InterpBatchRow> run_interp_batch(std::uint64_t seed, int trials,
                                                    int refine = 0) {
  require(trials > 0, "interp batch needs a positive trial count");
  std::vector<InterpBatchRow> rows;
  const Real ps[] = {2.0, 4.0, 6.0, std::numeric_limits<Real>::infinity()};
  const int mono_specs[][4] = {{2, 2, 1, 2}, {0, 4, 0, 2}, {1, 3, 1, 2}};
  for (int i = 0; i < trials; ++i) {
    auto trial = make_interp_trial(seed, i, refine);
    Real weight_r = (i % 3) * Real(0.5);

    // First-derivative bound. It is claimed for every eps in (0, 1] and every
    // normal field, so record the worst case over both: evaluate at the eps
    // minimizing the right-hand side (eps* = min(1, sqrt(term_low/term_high)),
    // giving rhs = 2 sqrt(term_low * term_high) when interior) and take the
    // maximum ratio over the random field plus the wave-probe dictionary. The
    // batch maximum then measures the sampled geometry, not draw luck.
    auto hardest = [&](std::span<const Real> X) {
      auto r = check_derivative_bound(trial.curve, trial.fields, X,
                                      trial.zeta.values, trial.ell, Real(1));
      if (r.term_high > 0 && r.term_low > 0) {
        Real e = std::sqrt(r.term_low / r.term_high);
        if (e < 1) {
          r.eps = e;
          r.rhs = 2 * std::sqrt(r.term_low * r.term_high);
          r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 0;
        }
      }
      return r;
    };
    auto d = hardest(trial.X);
    auto arc = cumulative_arclength(trial.curve);
    for (Real cycles : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
      for (Real ph : {0.0, 0.5 * kPi}) {
        for (Real env : {1.0, 0.0}) {
          auto probe = enveloped_wave_field(trial.curve, trial.fields,
                                            trial.zeta, arc, cycles, ph, env);
          auto cand = hardest(probe);
          if (cand.ratio > d.ratio) d = cand;
        }
      }
    }
    InterpBatchRow dr;
    dr.trial = i;
    dr.lemma = "first_derivative";
    dr.eps = d.eps;
    dr.ell = trial.ell;
    dr.lhs = d.lhs;
    dr.rhs = d.rhs;
    dr.ratio = d.ratio;
    rows.push_back(std::move(dr));

    for (Real p : ps) {
      auto g = check_gn(trial.curve, trial.fields, trial.X, trial.zeta.values,
                        weight_r, p);
      InterpBatchRow gr;
      gr.trial = i;
      gr.lemma = "sobolev_gn";
      gr.p = p;
      gr.lhs = g.lhs;
      gr.rhs = g.rhs;
      gr.ratio = g.ratio;
      rows.push_back(std::move(gr));
    }

    // Monomial bounds: the right-hand side grows with eps, so the hardest
    // admissible probe is the smallest eps the harness adopts. Pinning every
    // trial there removes eps draw luck from the recorded ratios.
    const Real mono_eps = Real(0.05);
    for (const auto& spec : mono_specs) {
      auto m = check_p_interpolation(trial.curve, trial.fields,
                                     canonical_monomial(spec[0], spec[1], spec[2]),
                                     trial.zeta.values, spec[3], mono_eps);
      InterpBatchRow mr;
      mr.trial = i;
      mr.lemma = "curvature_monomial";
      mr.eps = mono_eps;
      mr.a = spec[0];
      mr.b = spec[1];
      mr.c = spec[2];
      mr.k = spec[3];
      mr.lhs = m.lhs;
      mr.rhs = m.rhs;
      mr.ratio = m.ratio;
      rows.push_back(std::move(mr));
    }
  }
  return rows;
}

inline std::map<std::string, InterpFamilyStats> summarize_interp_batch(
    const std::vector<InterpBatchRow>& rows) {
  std::map<std::string, std::vector<Real>> ratios;
  for (const auto& r : rows) ratios[r.lemma].push_back(r.ratio);
  std::map<std::string, InterpFamilyStats> out;
  for (auto& [lemma, vals] : ratios) {
    InterpFamilyStats st;
    st.count = vals.size();
    std::sort(vals.begin(), vals.end());
    st.max_ratio = vals.back();
    st.median_ratio = vals[vals.size() / 2];
    out[lemma] = st;
  }
  return out;
}

}  // namespace curveflow
