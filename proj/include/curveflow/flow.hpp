#pragma once

#include <string_view>

#include "curveflow/energy.hpp"
#include "curveflow/spline.hpp"

namespace curveflow {

// Velocity law  dγ/dt = -σ ∇²κ + λ κ + μ |κ|² κ + θ <κ, ∇κ> T  with ∇ the
// normal covariant arclength derivative. σ = 0 gives a second-order law,
// σ > 0 a fourth-order one.
struct FlowParams {
  Real sigma = 0;
  Real lambda = 0;
  Real mu = 0;
  Real vartheta = 0;

  int order() const { return sigma == 0 ? 2 : 4; }
  bool is_gradient() const { return vartheta == 0 && (sigma == 0 || mu == -0.5 || mu == 0); }
};

// Named parameter sets. "elastic" takes the length-penalty weight as an
// argument; the others ignore it.
inline FlowParams flow_preset(std::string_view name, Real lambda = 1) {
  if (name == "csf") return {0, 1, 0, 0};
  if (name == "sdf") return {1, 0, 0, 0};
  if (name == "chen") return {1, 0, 1, 3};
  if (name == "elastic") {
    require(lambda >= 0, "elastic flow: length weight must be nonnegative");
    return {1, lambda, -0.5, 0};
  }
  if (name == "free-elastic") return {1, 0, -0.5, 0};
  throw InvalidInput("unknown flow preset: " + std::string(name));
}

struct VelocityField {
  std::vector<Real> full;    // full velocity vectors
  std::vector<Real> normal;  // normal part
  std::vector<Real> xi;      // tangential coefficient, full = normal + xi T
  Real sup = 0;              // max |full| over interior nodes
};

inline VelocityField velocity(const DiscreteCurve& g, const CurveFields& f,
                              const FlowParams& p) {
  const std::size_t n = g.total_nodes();
  const std::size_t d = static_cast<std::size_t>(g.dim);
  VelocityField v;
  v.full.assign(n * d, 0.0);
  v.normal.assign(n * d, 0.0);
  v.xi.assign(n, 0.0);
  auto dkappa = covariant_derivative(g, f.kappa, f.w, f.t, 1);
  std::vector<Real> d2kappa;
  if (p.sigma != 0) d2kappa = covariant_derivative(g, dkappa, f.w, f.t, 1);
  for (std::size_t i = 0; i < n; ++i) {
    Real ksq = 0, kdk = 0;
    for (std::size_t c = 0; c < d; ++c) {
      ksq += sqr(f.kappa[i * d + c]);
      kdk += f.kappa[i * d + c] * dkappa[i * d + c];
    }
    for (std::size_t c = 0; c < d; ++c) {
      Real val = p.lambda * f.kappa[i * d + c] + p.mu * ksq * f.kappa[i * d + c] +
                 p.vartheta * kdk * f.t[i * d + c];
      if (p.sigma != 0) val -= p.sigma * d2kappa[i * d + c];
      v.full[i * d + c] = val;
    }
  }
  // tangential/normal split and sup norm over the interior
  for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i) {
    std::span<const Real> fi(v.full.data() + i * d, d);
    std::span<const Real> ti(f.t.data() + i * d, d);
    Real xi = dot(fi, ti);
    v.xi[i] = xi;
    Real mag = 0;
    for (std::size_t c = 0; c < d; ++c) {
      v.normal[i * d + c] = fi[c] - xi * ti[c];
      mag += sqr(fi[c]);
    }
    v.sup = std::max(v.sup, std::sqrt(mag));
  }
  if (g.ends == EndCondition::Clamped) {
    // ghost layers are frozen: no velocity there
    for (std::size_t i = 0; i < g.interior_begin(); ++i)
      for (std::size_t c = 0; c < d; ++c) v.full[i * d + c] = v.normal[i * d + c] = 0;
    for (std::size_t i = g.interior_end(); i < n; ++i)
      for (std::size_t c = 0; c < d; ++c) v.full[i * d + c] = v.normal[i * d + c] = 0;
  }
  return v;
}

// A proposed time step would degenerate the grid; the caller should retry
// with a smaller step.
struct StepRejected : SolverError {
  explicit StepRejected(const std::string& msg) : SolverError(msg) {}
};

// One semi-implicit step: the stiff leading term (fourth or second parameter
// derivative scaled by the frozen metric) is treated implicitly, the
// remainder explicitly:
//   (I - dt L) γ⁺ = γ + dt (V(γ) - L γ).
// Clamped curves keep their ghost layers fixed and move only interior nodes;
// closed curves solve a cyclic system.
inline DiscreteCurve step(const DiscreteCurve& g, const CurveFields& f,
                          const VelocityField& vel, const FlowParams& p, Real dt,
                          Real rho_min = 1e-3) {
  require(dt > 0, "step size must be positive");
  const std::size_t d = static_cast<std::size_t>(g.dim);
  const int bw = p.order() == 4 ? 2 : 1;
  const Real sten4[5] = {1, -4, 6, -4, 1};
  const Real sten2[3] = {1, -2, 1};

  // row coefficients of L at node i: stencil / (h^order * w^order) with sign
  auto l_coef = [&](std::size_t i, int k) -> Real {
    if (p.order() == 4) {
      Real scale = -p.sigma / (sqr(sqr(g.h)) * sqr(sqr(f.w[i])));
      return scale * sten4[k + 2];
    }
    Real scale = p.lambda / (sqr(g.h) * sqr(f.w[i]));
    return scale * sten2[k + 1];
  };
  auto l_apply = [&](std::size_t i, std::size_t c) -> Real {
    Real acc = 0;
    const std::size_t n = g.total_nodes();
    for (int k = -bw; k <= bw; ++k) {
      std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + k;
      std::size_t jw = g.ends == EndCondition::Periodic
                           ? detail::wrap_index(j, n)
                           : static_cast<std::size_t>(j);
      acc += l_coef(i, k) * g.pts[jw * d + c];
    }
    return acc;
  };

  DiscreteCurve out = g;
  if (g.ends == EndCondition::Periodic) {
    const int n = static_cast<int>(g.total_nodes());
    CyclicBandedLU lu(n, bw);
    std::vector<Real> row(static_cast<std::size_t>(2 * bw + 1));
    for (int i = 0; i < n; ++i) {
      for (int k = -bw; k <= bw; ++k)
        row[static_cast<std::size_t>(k + bw)] =
            (k == 0 ? 1.0 : 0.0) - dt * l_coef(static_cast<std::size_t>(i), k);
      lu.set_row(i, row);
    }
    lu.factor();
    std::vector<Real> rhs(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < d; ++c) {
      for (int i = 0; i < n; ++i) {
        auto iu = static_cast<std::size_t>(i);
        rhs[iu] = g.pts[iu * d + c] +
                  dt * (vel.full[iu * d + c] - l_apply(iu, c));
      }
      lu.solve(rhs);
      for (int i = 0; i < n; ++i) out.pts[static_cast<std::size_t>(i) * d + c] = rhs[static_cast<std::size_t>(i)];
    }
  } else {
    const std::size_t b = g.interior_begin(), e = g.interior_end();
    const int m = static_cast<int>(e - b);
    require(g.ghost >= bw, "clamped step needs ghost layers covering the stencil");
    BandedLU lu(m, bw, bw);
    for (int j = 0; j < m; ++j) {
      std::size_t i = b + static_cast<std::size_t>(j);
      for (int k = -bw; k <= bw; ++k) {
        int jj = j + k;
        if (jj < 0 || jj >= m) continue;
        lu.at(j, jj) = (k == 0 ? 1.0 : 0.0) - dt * l_coef(i, k);
      }
    }
    lu.factor();
    std::vector<Real> rhs(static_cast<std::size_t>(m));
    for (std::size_t c = 0; c < d; ++c) {
      for (int j = 0; j < m; ++j) {
        std::size_t i = b + static_cast<std::size_t>(j);
        Real r = g.pts[i * d + c] + dt * (vel.full[i * d + c] - l_apply(i, c));
        // stencil legs resting on frozen ghost nodes move to the right side
        for (int k = -bw; k <= bw; ++k) {
          int jj = j + k;
          if (jj >= 0 && jj < m) continue;
          std::size_t ig = b + static_cast<std::size_t>(j + k);
          r += dt * l_coef(i, k) * g.pts[ig * d + c];
        }
        rhs[static_cast<std::size_t>(j)] = r;
      }
      lu.solve(rhs);
      for (int j = 0; j < m; ++j)
        out.pts[(b + static_cast<std::size_t>(j)) * d + c] = rhs[static_cast<std::size_t>(j)];
    }
  }

  Real ratio = min_segment_ratio(out);
  if (!(ratio >= rho_min))
    throw StepRejected("step rejected: grid degenerated (segment ratio " +
                       std::to_string(ratio) + ")");
  return out;
}

enum class Termination { ReachedEnd, Blowup, StepFailure };

struct SnapshotStats {
  Real t = 0;
  Real energy = 0;       // adapted energy with the flow's sigma and max(lambda, 0)
  Real bending = 0;
  Real direction = 0;
  Real kappa_sup = 0;
  Real length = 0;
};

struct Trajectory {
  FlowParams params;
  Real energy_sigma = 0, energy_lambda = 0;  // weights used for the energy column
  std::vector<DiscreteCurve> snapshots;
  std::vector<SnapshotStats> stats;
  // dense per-step records (index k spans accepted steps):
  std::vector<Real> times;        // time after step k
  std::vector<Real> dts;          // size of step k
  std::vector<Real> v_l2_sq;      // squared L2 norm of the normal velocity before step k
  std::vector<Real> diss_second;  // integral of |∇κ|² + μ|κ|⁴ before step k
  std::vector<Real> energy_series;  // adapted energy after step k
  std::vector<Real> kappa_sup_series;  // max |κ| before step k
  std::vector<Real> bending_series;    // bending energy after step k
  std::vector<Real> direction_series;  // direction energy after step k
  std::vector<std::uint8_t> cfl_limited;  // step k was capped by the velocity
  Real initial_energy = 0;
  Termination termination = Termination::ReachedEnd;
  Real t_final = 0;
  Real blowup_estimate = 0;  // populated when termination == Blowup
  long accepted_steps = 0;
  long rejected_steps = 0;
};

struct SolverConfig {
  Real t_end = 1;
  Real dt_max = 1e-3;
  Real dt_min = 1e-12;
  Real dt_init = 0;         // 0: start from dt_max (the velocity cap clips it)
  Real cfl = 0.3;           // dt <= cfl * h / sup |V|
  Real kappa_max = 1e3;     // blow-up threshold for max |κ|
  Real rho_min = 1e-3;      // reject steps that compress segments below this
  int snapshot_stride = 25; // snapshots every this many accepted steps
  int resample_every = 10;  // arclength rebalancing cadence; 0 disables
  int grow_every = 20;      // accepted steps between cruise step increases
  Real grow_factor = 1.2;
  long max_steps = 2000000;
};

// Estimates the blow-up time from the tail of the accepted step sizes under
// the assumption dt ≈ c (T - t)^α: golden-section search for the T that makes
// log dt most linear in log(T - t) over the trailing velocity-capped steps.
inline Real estimate_blowup_time(const std::vector<Real>& times,
                                 const std::vector<Real>& dts,
                                 const std::vector<std::uint8_t>& limited) {
  const std::size_t n = times.size();
  if (n == 0) return 0;
  Real t_last = times[n - 1], dt_last = dts[n - 1];
  // walk back across the velocity-capped tail until the step size has grown
  // by a factor 50, so the fit spans scales instead of a sliver of them
  std::vector<std::size_t> tail;
  for (std::size_t i = n; i-- > 0;) {
    if (!limited[i] || dts[i] > 50 * dt_last) break;
    tail.push_back(i);
  }
  if (tail.size() < 8) return t_last + dt_last;
  if (tail.size() > 400) {
    std::vector<std::size_t> thin;
    std::size_t stride = (tail.size() + 399) / 400;
    for (std::size_t k = 0; k < tail.size(); k += stride) thin.push_back(tail[k]);
    thin.push_back(tail.back());
    tail.swap(thin);
  }

  auto neg_r2 = [&](Real T) {
    Real sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    auto m = static_cast<Real>(tail.size());
    for (std::size_t idx : tail) {
      Real x = std::log(T - times[idx]);
      Real y = std::log(dts[idx]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
    }
    Real cov = sxy - sx * sy / m;
    Real vx = sxx - sx * sx / m, vy = syy - sy * sy / m;
    if (vx <= 0 || vy <= 0) return Real(0);
    return -(cov * cov) / (vx * vy);
  };
  // search over the remaining time beyond t_last on a log scale; the upper
  // end must admit step laws dt ≈ c (T - t) with small c, where the remaining
  // time is many multiples of the last step
  Real lo = std::log(0.05 * dt_last), hi = std::log(1e5 * dt_last);
  const Real gr = (std::sqrt(Real(5)) - 1) / 2;
  Real a = lo, b = hi;
  Real c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  Real f1 = neg_r2(t_last + std::exp(c1)), f2 = neg_r2(t_last + std::exp(c2));
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = neg_r2(t_last + std::exp(c1));
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = neg_r2(t_last + std::exp(c2));
    }
  }
  return t_last + std::exp((a + b) / 2);
}

inline Trajectory simulate(DiscreteCurve g, const FlowParams& p, const SolverConfig& cfg) {
  g.validate();
  require(cfg.t_end > 0 && cfg.dt_max > 0 && cfg.cfl > 0, "invalid solver configuration");
  Trajectory traj;
  traj.params = p;
  traj.energy_sigma = p.sigma;
  traj.energy_lambda = std::max(p.lambda, Real(0));

  auto record_stats = [&](const DiscreteCurve& cur, const CurveFields& f, Real t) {
    SnapshotStats st;
    st.t = t;
    st.bending = bending_energy(cur, f);
    st.direction = direction_energy(cur, f);
    st.energy = traj.energy_sigma * st.bending + traj.energy_lambda * st.direction;
    std::vector<Real> ones(cur.total_nodes(), 1.0);
    st.length = integrate(cur, ones, f.w);
    Real ks = 0;
    for (std::size_t i = cur.interior_begin(); i < cur.interior_end(); ++i) {
      Real m = 0;
      for (int c = 0; c < cur.dim; ++c) m += sqr(f.kappa[i * cur.dim + c]);
      ks = std::max(ks, std::sqrt(m));
    }
    st.kappa_sup = ks;
    traj.stats.push_back(st);
    traj.snapshots.push_back(cur);
    return st;
  };

  Real t = 0;
  Real dt_cruise = cfg.dt_init > 0 ? cfg.dt_init : cfg.dt_max;
  {
    auto f0 = compute_fields(g);
    auto st = record_stats(g, f0, 0);
    traj.initial_energy = st.energy;
  }
  long since_snapshot = 0, since_resample = 0, since_grow = 0;

  while (t < cfg.t_end * (1 - 1e-12)) {
    if (traj.accepted_steps + traj.rejected_steps > cfg.max_steps) {
      traj.termination = Termination::StepFailure;
      break;
    }
    auto f = compute_fields(g);
    auto vel = velocity(g, f, p);

    Real kappa_sup = 0;
    std::vector<Real> vn_sq(g.total_nodes(), 0.0), diss(g.total_nodes(), 0.0);
    auto dkappa = covariant_derivative(g, f.kappa, f.w, f.t, 1);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
      Real km = 0, vm = 0, dm = 0;
      for (int c = 0; c < g.dim; ++c) {
        km += sqr(f.kappa[i * g.dim + c]);
        vm += sqr(vel.normal[i * g.dim + c]);
        dm += sqr(dkappa[i * g.dim + c]);
      }
      vn_sq[i] = vm;
      diss[i] = dm + p.mu * sqr(km);
      if (i >= g.interior_begin() && i < g.interior_end())
        kappa_sup = std::max(kappa_sup, std::sqrt(km));
    }

    if (kappa_sup > cfg.kappa_max) {
      traj.termination = Termination::Blowup;
      traj.blowup_estimate = estimate_blowup_time(traj.times, traj.dts, traj.cfl_limited);
      break;
    }

    Real dt_vel = cfg.cfl * min_segment_ratio(g) * g.h / std::max(vel.sup, Real(1e-300));
    Real dt = std::min({dt_cruise, dt_vel, cfg.dt_max, cfg.t_end - t});
    bool limited = dt_vel <= std::min(dt_cruise, cfg.dt_max) * (1 - 1e-12);
    if (dt < cfg.dt_min) {
      traj.termination = Termination::Blowup;
      traj.blowup_estimate = estimate_blowup_time(traj.times, traj.dts, traj.cfl_limited);
      break;
    }

    DiscreteCurve gnew;
    try {
      gnew = step(g, f, vel, p, dt, cfg.rho_min);
    } catch (const StepRejected&) {
      ++traj.rejected_steps;
      dt_cruise = dt / 2;
      if (dt_cruise < cfg.dt_min) {
        traj.termination = Termination::StepFailure;
        break;
      }
      continue;
    }

    g = std::move(gnew);
    t += dt;
    ++traj.accepted_steps;
    ++since_snapshot;
    ++since_resample;
    ++since_grow;

    traj.times.push_back(t);
    traj.dts.push_back(dt);
    traj.v_l2_sq.push_back(integrate(g /*unused metric below*/, vn_sq, f.w));
    traj.diss_second.push_back(integrate(g, diss, f.w));
    traj.kappa_sup_series.push_back(kappa_sup);
    traj.cfl_limited.push_back(limited ? 1 : 0);

    auto fnew = compute_fields(g);
    Real bend = bending_energy(g, fnew);
    Real dir = direction_energy(g, fnew);
    traj.bending_series.push_back(bend);
    traj.direction_series.push_back(dir);
    traj.energy_series.push_back(traj.energy_sigma * bend + traj.energy_lambda * dir);

    if (cfg.resample_every > 0 && since_resample >= cfg.resample_every) {
      g = resample_arclength(g);
      since_resample = 0;
    }
    if (since_grow >= cfg.grow_every) {
      dt_cruise = std::min(dt_cruise * cfg.grow_factor, cfg.dt_max);
      since_grow = 0;
    }
    if (since_snapshot >= cfg.snapshot_stride) {
      auto fs = compute_fields(g);
      record_stats(g, fs, t);
      since_snapshot = 0;
    }
  }

  traj.t_final = t;
  if (since_snapshot > 0 || traj.snapshots.size() == 1) {
    auto fs = compute_fields(g);
    record_stats(g, fs, t);
  }
  return traj;
}

}  // namespace curveflow
