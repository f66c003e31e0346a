#pragma once

#include <algorithm>

#include "curveflow/flow.hpp"

namespace curveflow {

namespace detail {

// Unwrapped tangential angle at every interior node of a planar curve.
// For closed curves one extra entry carries the turning of the closing step.
inline std::vector<Real> unwrapped_tangent_angle(const DiscreteCurve& g,
                                                 const CurveFields& f) {
  require(g.dim == 2, "tangential angle requires a planar curve");
  const std::size_t b = g.interior_begin(), e = g.interior_end();
  std::vector<Real> theta;
  theta.reserve(e - b + 1);
  Real prev_x = f.t[b * 2], prev_y = f.t[b * 2 + 1];
  Real acc = std::atan2(prev_y, prev_x);
  theta.push_back(acc);
  auto advance = [&](Real tx, Real ty) {
    // rotation from the previous tangent to this one, in (-pi, pi]
    Real cross = prev_x * ty - prev_y * tx;
    Real dotp = prev_x * tx + prev_y * ty;
    acc += std::atan2(cross, dotp);
    theta.push_back(acc);
    prev_x = tx;
    prev_y = ty;
  };
  for (std::size_t i = b + 1; i < e; ++i) advance(f.t[i * 2], f.t[i * 2 + 1]);
  if (g.ends == EndCondition::Periodic) advance(f.t[b * 2], f.t[b * 2 + 1]);
  return theta;
}

inline Real end_tangent_deviation(const DiscreteCurve& g, const CurveFields& f) {
  const std::size_t b = g.interior_begin(), e = g.interior_end();
  auto dev = [&](std::size_t i) {
    return std::hypot(f.t[i * 2] - 1, f.t[i * 2 + 1]);
  };
  return std::max(dev(b), dev(e - 1));
}

}  // namespace detail

// Total tangential-angle increment divided by 2 pi, snapped to an integer.
// Open curves must have near-horizontal ends for the count to be meaningful;
// closed curves always qualify.
inline int rotation_number(const DiscreteCurve& g, const CurveFields& f,
                           Real snap_margin = 0.1) {
  require(g.dim == 2, "rotation number requires a planar curve");
  if (g.ends == EndCondition::Clamped)
    require(detail::end_tangent_deviation(g, f) <= 0.2,
            "rotation number needs horizontal ends on open curves");
  auto theta = detail::unwrapped_tangent_angle(g, f);
  Real raw = (theta.back() - theta.front()) / (2 * kPi);
  Real snapped = std::round(raw);
  require(std::abs(raw - snapped) <= snap_margin,
          "tangential angle increment is not close to a whole number of turns");
  return static_cast<int>(snapped);
}

// Pointwise norm of the elastica residual  grad2 kappa + |kappa|^2 kappa / 2
// - lambda kappa  over the interior, reported in sup and L2 norms.
struct StationarityResidual {
  Real sup = 0;
  Real l2 = 0;
};

inline StationarityResidual stationarity_residual(const DiscreteCurve& g,
                                                  const CurveFields& f, Real lambda) {
  auto d1 = covariant_derivative(g, f.kappa, f.w, f.t, 1);
  auto d2 = covariant_derivative(g, d1, f.w, f.t, 1);
  const std::size_t n = g.total_nodes();
  std::vector<Real> r_sq(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Real k_sq = 0;
    for (int c = 0; c < g.dim; ++c) k_sq += sqr(f.kappa[i * g.dim + c]);
    for (int c = 0; c < g.dim; ++c) {
      Real ri = d2[i * g.dim + c] + (k_sq / 2 - lambda) * f.kappa[i * g.dim + c];
      r_sq[i] += sqr(ri);
    }
  }
  StationarityResidual out;
  for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i)
    out.sup = std::max(out.sup, std::sqrt(r_sq[i]));
  out.l2 = std::sqrt(integrate(g, r_sq, f.w));
  return out;
}

// Limit-shape classification: straight line, the translated/shifted
// 2 sech profile, or neither.
enum class LimitVerdict { Line, BorderlineElastica, Unknown };

struct ClassifyTolerances {
  Real tol_b = 1e-3;         // bending energy for the Line verdict
  Real tol_t = 0.02;         // sup tangent deviation for the Line verdict
  Real residual_scale = 20;  // profile residual allowance: residual_scale * h^2
  Real peak_tol = 0.1;       // fitted curvature maximum must be 2 within this
};

struct LimitClassification {
  LimitVerdict verdict = LimitVerdict::Unknown;
  Real bending = 0;
  Real tangent_dev = 0;       // sup |T - e1| over interior nodes
  Real kappa_peak = 0;        // refined maximum of |kappa|
  Real s_peak = 0;            // arclength location of the maximum
  Real s0 = 0;                // fitted shift: |kappa(s)| = 2 sech(s + s0)
  Real profile_residual = 0;  // sup | |kappa| - 2 sech(s - s_peak) |
  std::vector<Real> omega;    // unit direction opposite the curvature peak
};

inline LimitClassification classify_limit(const DiscreteCurve& g, const CurveFields& f,
                                          const ClassifyTolerances& tol = {}) {
  require(g.ends == EndCondition::Clamped, "limit classification expects an open curve");
  LimitClassification out;
  out.bending = bending_energy(g, f);
  const std::size_t b = g.interior_begin(), e = g.interior_end();
  auto node_dev = [&](std::size_t i) {
    Real d = 0;
    for (int c = 0; c < g.dim; ++c) d += sqr(f.t[i * g.dim + c] - (c == 0 ? 1 : 0));
    return std::sqrt(d);
  };
  for (std::size_t i = b; i < e; ++i) out.tangent_dev = std::max(out.tangent_dev, node_dev(i));

  if (out.bending <= tol.tol_b && out.tangent_dev <= tol.tol_t) {
    out.verdict = LimitVerdict::Line;
    return out;
  }

  // locate the curvature peak with a parabolic refinement
  std::vector<Real> mag(g.total_nodes(), 0.0);
  for (std::size_t i = 0; i < g.total_nodes(); ++i) {
    Real m = 0;
    for (int c = 0; c < g.dim; ++c) m += sqr(f.kappa[i * g.dim + c]);
    mag[i] = std::sqrt(m);
  }
  std::size_t ip = b;
  for (std::size_t i = b; i < e; ++i)
    if (mag[i] > mag[ip]) ip = i;
  auto s = cumulative_arclength(g);
  Real s_pk = s[ip], k_pk = mag[ip];
  if (ip > b && ip + 1 < e) {
    Real y0 = mag[ip - 1], y1 = mag[ip], y2 = mag[ip + 1];
    Real denom = y0 - 2 * y1 + y2;
    if (denom < 0) {
      Real shift = 0.5 * (y0 - y2) / denom;  // in units of the local spacing
      shift = std::clamp(shift, Real(-0.5), Real(0.5));
      s_pk = s[ip] + shift * (s[ip + 1] - s[ip - 1]) / 2;
      k_pk = y1 - 0.25 * (y0 - y2) * shift;
    }
  }
  out.kappa_peak = k_pk;
  out.s_peak = s_pk;
  out.s0 = -s_pk;

  // the profile's axis: at the curvature maximum the curvature vector points
  // exactly opposite the unit direction the 2 sech arch stands along
  const int d = g.dim;
  std::vector<Real> v(static_cast<std::size_t>(d), 0.0);
  for (int c = 0; c < d; ++c) v[static_cast<std::size_t>(c)] = -f.kappa[ip * d + c];
  Real vn = norm(std::span<const Real>(v));
  if (vn > 0)
    for (auto& x : v) x /= vn;
  out.omega = v;

  if (std::abs(k_pk - 2) > tol.peak_tol) return out;  // Unknown

  Real res = 0;
  for (std::size_t i = b; i < e; ++i)
    res = std::max(res, std::abs(mag[i] - 2 / std::cosh(s[i] - s_pk)));
  out.profile_residual = res;
  if (res <= tol.residual_scale * sqr(g.h)) out.verdict = LimitVerdict::BorderlineElastica;
  return out;
}

// Power-law fit of the squared-curvature integral against remaining time:
// integral(|kappa|^2) ~ (T_hat - t)^(-beta) over the deepest available decade.
struct BlowupFit {
  Real t_hat = 0;
  Real beta = 0;
  Real residual_rms = 0;   // scatter of log data around the fitted line
  Real window_lo = 0, window_hi = 0;  // remaining-time window of the fit
  std::size_t samples = 0;
  std::size_t first = 0, last = 0;  // dense-series index range [first, last)
};

inline BlowupFit fit_blowup_rate(const Trajectory& traj, std::size_t min_samples = 8) {
  require(traj.termination == Termination::Blowup,
          "blow-up fit requires a trajectory that ended in blow-up");
  const auto& t = traj.times;
  const auto& bend = traj.bending_series;
  require(t.size() == bend.size() && t.size() >= min_samples,
          "blow-up fit: too few recorded steps");
  BlowupFit fit;
  fit.t_hat = traj.blowup_estimate;
  // remaining times are positive and decreasing along the series
  std::vector<Real> rem(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) rem[i] = fit.t_hat - t[i];
  require(rem.back() > 0, "blow-up fit: estimated time not beyond the last step");

  // deepest decade [r_min, 10 r_min], widened outward until it holds enough
  // samples; the series is time-ordered so the window is a suffix range
  Real r_min = rem.back();
  Real hi = 10 * r_min;
  std::size_t first = t.size();
  auto count_from = [&](Real bound) {
    std::size_t idx = t.size();
    while (idx > 0 && rem[idx - 1] <= bound) --idx;
    return idx;
  };
  first = count_from(hi);
  while (t.size() - first < min_samples && hi < rem.front()) {
    hi *= 1.5;
    first = count_from(hi);
  }
  require(t.size() - first >= min_samples, "blow-up fit: too few samples in any decade");
  fit.first = first;
  fit.last = t.size();
  fit.samples = t.size() - first;
  fit.window_lo = r_min;
  fit.window_hi = rem[first];

  std::vector<Real> lx, ly;
  lx.reserve(fit.samples);
  ly.reserve(fit.samples);
  for (std::size_t i = first; i < t.size(); ++i) {
    if (bend[i] <= 0) continue;
    lx.push_back(std::log(rem[i]));
    ly.push_back(std::log(2 * bend[i]));
  }
  require(lx.size() >= min_samples, "blow-up fit: degenerate data in the window");
  // least-squares slope of log integral vs log remaining time
  Real mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<Real>(lx.size());
  my /= static_cast<Real>(lx.size());
  Real sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += sqr(lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0, "blow-up fit: window has no time spread");
  Real slope = sxy / sxx;
  fit.beta = -slope;
  Real rss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i)
    rss += sqr(ly[i] - (my + slope * (lx[i] - mx)));
  fit.residual_rms = std::sqrt(rss / static_cast<Real>(lx.size()));
  return fit;
}

// Audits the recorded per-step series against the exact decay laws:
// for normal-velocity (gradient) presets the adapted energy dissipates at
// rate |V|^2; for sigma > 0, lambda = 0, mu >= 0 the direction energy
// dissipates at rate |grad kappa|^2 + mu |kappa|^4.
struct DecayAudit {
  bool gradient_applicable = false;
  Real max_step_defect = 0;      // worst per-step energy identity violation
  Real cumulative_defect = 0;    // |E_end - E_0 + sum dt |V|^2|
  Real dissipated = 0;           // sum dt |V|^2
  bool energy_monotone = true;   // E nonincreasing along the dense series
  bool direction_applicable = false;
  Real direction_cumulative_defect = 0;
  Real direction_dissipated = 0;
  bool direction_monotone = true;
};

inline DecayAudit energy_decay_audit(const Trajectory& traj, Real mono_tol = 1e-12) {
  DecayAudit audit;
  const auto& p = traj.params;
  audit.gradient_applicable = p.is_gradient();
  audit.direction_applicable = p.sigma > 0 && p.lambda == 0 && p.mu >= 0;
  const std::size_t n = traj.times.size();
  if (n == 0) return audit;
  Real scale = std::max(std::abs(traj.initial_energy), Real(1));
  if (audit.gradient_applicable) {
    Real prev = traj.initial_energy;
    for (std::size_t k = 0; k < n; ++k) {
      Real cur = traj.energy_series[k];
      Real drop = traj.dts[k] * traj.v_l2_sq[k];
      audit.max_step_defect = std::max(audit.max_step_defect, std::abs(cur - prev + drop));
      if (cur > prev + mono_tol * scale) audit.energy_monotone = false;
      audit.dissipated += drop;
      prev = cur;
    }
    audit.cumulative_defect =
        std::abs(traj.energy_series[n - 1] - traj.initial_energy + audit.dissipated);
  }
  if (audit.direction_applicable && !traj.direction_series.empty()) {
    Real first = traj.direction_series.front();
    Real prev = first;
    Real dscale = std::max(std::abs(first), Real(1));
    // the first step's pre-step direction energy is not stored; audit the
    // identity across steps 1..n-1 where both endpoints are recorded
    for (std::size_t k = 1; k < n; ++k) {
      Real cur = traj.direction_series[k];
      Real drop = traj.dts[k] * traj.diss_second[k];
      audit.direction_dissipated += drop;
      if (cur > prev + mono_tol * dscale) audit.direction_monotone = false;
      prev = cur;
    }
    audit.direction_cumulative_defect = std::abs(
        traj.direction_series[n - 1] - first + audit.direction_dissipated);
  }
  return audit;
}

// Adapted energy against the rotation count: slack = E - 8 |N|.
struct QuantizationCheck {
  Real energy = 0;
  int rotation = 0;
  Real slack = 0;
};

inline QuantizationCheck quantization_check(const DiscreteCurve& g,
                                            const CurveFields& f) {
  QuantizationCheck out;
  out.energy = adapted_energy(g, f, 1.0, 1.0);
  out.rotation = rotation_number(g, f);
  out.slack = out.energy - 8 * std::abs(out.rotation);
  return out;
}

// Loop base points: per snapshot, the arclength locations where the
// unwrapped tangential angle crosses 2 pi (i - 1/2) upward, i = 1..N.
struct LoopTrack {
  int rotation = 0;
  bool rotation_preserved = true;
  std::vector<Real> times;
  std::vector<std::vector<Real>> base_points;  // one vector per snapshot
  std::vector<Real> separations;               // max - min base point (N >= 2)
};

inline LoopTrack loop_tracker(const Trajectory& traj) {
  LoopTrack track;
  require(!traj.snapshots.empty(), "loop tracking needs recorded snapshots");
  bool first = true;
  for (std::size_t si = 0; si < traj.snapshots.size(); ++si) {
    const auto& g = traj.snapshots[si];
    auto f = compute_fields(g);
    int n_turns = rotation_number(g, f);
    if (first) {
      track.rotation = n_turns;
      first = false;
    } else if (n_turns != track.rotation) {
      track.rotation_preserved = false;
    }
    auto theta = detail::unwrapped_tangent_angle(g, f);
    // normalize so the starting angle lies in (-pi, pi]
    Real base = 2 * kPi * std::round(theta.front() / (2 * kPi));
    for (auto& th : theta) th -= base;
    auto s = cumulative_arclength(g);
    const std::size_t ib = g.interior_begin();
    std::vector<Real> pts;
    for (int i = 1; i <= std::abs(n_turns); ++i) {
      Real level = 2 * kPi * (i - 0.5);
      if (n_turns < 0) level = -level;
      for (std::size_t j = 0; j + 1 < theta.size(); ++j) {
        Real a = theta[j], b = theta[j + 1];
        bool crosses = n_turns >= 0 ? (a <= level && b > level && b > a)
                                    : (a >= level && b < level && b < a);
        if (!crosses) continue;
        Real frac = (level - a) / (b - a);
        pts.push_back(s[ib + j] + frac * (s[ib + j + 1] - s[ib + j]));
        break;
      }
    }
    track.times.push_back(traj.stats[si].t);
    if (pts.size() >= 2)
      track.separations.push_back(pts.back() - pts.front());
    track.base_points.push_back(std::move(pts));
  }
  return track;
}

// Least constant C_m with  sup |d^m/ds^m kappa| <= C_m (1 + t^(-e_m))  along
// the snapshots, where e_m = (2m+1)/8 for fourth-order presets and
// (2m+1)/4 for second-order ones.
struct SmoothingEnvelope {
  int m = 0;
  Real exponent = 0;
  Real c_m = 0;
  std::vector<Real> times;
  std::vector<Real> sup_norms;
};

inline SmoothingEnvelope smoothing_monitor(const Trajectory& traj, int m) {
  require(m >= 0 && m <= 3, "smoothing monitor supports derivative orders up to 3");
  require(traj.termination != Termination::Blowup,
          "smoothing envelopes are undefined on blow-up trajectories");
  SmoothingEnvelope env;
  env.m = m;
  env.exponent = traj.params.order() == 4 ? (2 * m + 1) / Real(8) : (2 * m + 1) / Real(4);
  for (std::size_t si = 0; si < traj.snapshots.size(); ++si) {
    const auto& g = traj.snapshots[si];
    auto f = compute_fields(g);
    std::vector<Real> field(f.kappa.begin(), f.kappa.end());
    for (int j = 0; j < m; ++j) field = d_ds(g, field, f.w, g.dim);
    Real sup = 0;
    for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i) {
      Real mag = 0;
      for (int c = 0; c < g.dim; ++c) mag += sqr(field[i * g.dim + c]);
      sup = std::max(sup, std::sqrt(mag));
    }
    Real t = traj.stats[si].t;
    env.times.push_back(t);
    env.sup_norms.push_back(sup);
    if (t > 0) env.c_m = std::max(env.c_m, sup / (1 + std::pow(t, -env.exponent)));
  }
  return env;
}

}  // namespace curveflow
