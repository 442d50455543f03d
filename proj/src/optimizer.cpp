#include "relaycoex/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "relaycoex/interference.hpp"

namespace relaycoex {

namespace {

double abs2(const cxd& z) { return std::norm(z); }

// a*b/(1+a+b) with b = num/den, rearranged to stay finite as den -> 0.
double sinr_summand(double a, double num, double den) {
  if (a <= 0.0 || num <= 0.0) return 0.0;
  return a * num / (den * (1.0 + a) + num);
}

// Dense, subset-ordered view of one (channels, config, subset) triple.
// Member index m corresponds to relay relays[m]; all hot-path evaluation
// runs on these arrays.
struct Workspace {
  int n = 0;
  std::vector<int> relays;  // member -> 1-based relay id

  std::vector<double> s2r;   // |h_sr|^2
  std::vector<double> a_of;  // |h_rd|^2 / sigma_d^2
  std::vector<double> rp2;   // |h_rp|^2
  std::vector<double> rp_abs;
  std::vector<double> zeta;
  std::vector<double> sigma2;
  std::vector<double> w;  // w[j*n+k] = zeta_j |h_rr(j,k)|^2
  std::vector<double> box;
  double sp2 = 0.0;
  double p_s_max = 0.0;
  double i_bar = 0.0;

  cxd h_sp;
  std::vector<cxd> h_sr, h_rp;
  std::vector<cxd> h_rr;          // member-indexed, row-major
  std::vector<cxd> noise_phasor;  // sigma_k (1+j)/sqrt(2)
  std::vector<cxd> rr_coef;       // h_rr(j,k) * sqrt(zeta_j), same layout
  std::vector<cxd> rp_coef;       // h_rp[j] * sqrt(zeta_j)

  Workspace(const ChannelRealization& ch, const ScenarioConfig& cfg,
            const RelaySubset& subset) {
    subset.validate(cfg.relay_count);
    n = subset.size();
    relays = subset.indices;
    const auto un = static_cast<size_t>(n);
    s2r.resize(un);
    a_of.resize(un);
    rp2.resize(un);
    rp_abs.resize(un);
    zeta.resize(un);
    sigma2.resize(un);
    box.resize(un);
    h_sr.resize(un);
    h_rp.resize(un);
    noise_phasor.resize(un);
    rp_coef.resize(un);
    w.resize(un * un);
    h_rr.resize(un * un);
    rr_coef.resize(un * un);
    sp2 = abs2(ch.h_sp);
    h_sp = ch.h_sp;
    p_s_max = cfg.p_s_max;
    i_bar = cfg.i_bar;
    for (int m = 0; m < n; ++m) {
      const auto um = static_cast<size_t>(m);
      const int ki = relays[um] - 1;
      const auto uk = static_cast<size_t>(ki);
      s2r[um] = abs2(ch.h_sr[uk]);
      a_of[um] = abs2(ch.h_rd[uk]) / cfg.noise_power_dest;
      rp2[um] = abs2(ch.h_rp[uk]);
      rp_abs[um] = std::abs(ch.h_rp[uk]);
      zeta[um] = cfg.zeta[uk];
      sigma2[um] = cfg.noise_power_relay[uk];
      box[um] = cfg.p_r_max[uk];
      h_sr[um] = ch.h_sr[uk];
      h_rp[um] = ch.h_rp[uk];
      const double sig = std::sqrt(sigma2[um]);
      noise_phasor[um] = cxd(sig / std::sqrt(2.0), sig / std::sqrt(2.0));
      rp_coef[um] = ch.h_rp[uk] * std::sqrt(zeta[um]);
    }
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const cxd h = ch.rr(relays[static_cast<size_t>(j)] - 1, relays[static_cast<size_t>(k)] - 1);
        w[static_cast<size_t>(j * n + k)] = zeta[static_cast<size_t>(j)] * abs2(h);
        h_rr[static_cast<size_t>(j * n + k)] = h;
        rr_coef[static_cast<size_t>(j * n + k)] = h * std::sqrt(zeta[static_cast<size_t>(j)]);
      }
    }
  }

  // Inner sum of the exact rate; rate = log2(1 + this).
  double exact_inner(double ps, const double* pr) const {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<size_t>(k);
      double den = sigma2[uk];
      for (int j = 0; j < n; ++j) den += w[static_cast<size_t>(j * n + k)] * pr[j];
      acc += sinr_summand(pr[k] * a_of[uk], ps * s2r[uk], den);
    }
    return acc;
  }

  double noncoh_i(double ps, const double* pr) const {
    double acc = sp2 * ps;
    for (int k = 0; k < n; ++k) {
      acc += rp2[static_cast<size_t>(k)] * (1.0 + zeta[static_cast<size_t>(k)]) * pr[k];
    }
    return acc;
  }

  // Magnitudes of the radar-side phasors: out[0] = |A|, out[m+1] = |B_m|.
  void coherent_values(double ps, const double* pr, double* out) const {
    const double sqs = std::sqrt(ps);
    cxd a = h_sp * sqs;
    for (int j = 0; j < n; ++j) a += rp_coef[static_cast<size_t>(j)] * std::sqrt(pr[j]);
    out[0] = std::abs(a);
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<size_t>(k);
      cxd inner = h_sr[uk] * sqs + noise_phasor[uk];
      double gden = ps * s2r[uk] + sigma2[uk];
      for (int j = 0; j < n; ++j) {
        inner += rr_coef[static_cast<size_t>(j * n + k)] * std::sqrt(pr[j]);
        gden += w[static_cast<size_t>(j * n + k)] * pr[j];
      }
      out[k + 1] = std::abs(inner) * rp_abs[uk] * std::sqrt(pr[k]) / std::sqrt(gden);
    }
  }

  // Signed residual of a fixed split; sign[m] is +1 or -1, |A| always +.
  double partition_residual(const double* values, const int* sign) const {
    double d = values[0];
    for (int m = 0; m < n; ++m) d += sign[m] * values[m + 1];
    return d;
  }

  double partition_i(double ps, const double* pr, const int* sign,
                     double* scratch) const {
    coherent_values(ps, pr, scratch);
    const double d = partition_residual(scratch, sign);
    return d * d;
  }

  // Best split achievable at this point, early-stopped at the threshold.
  bool coherent_feasible(double ps, const double* pr, double* scratch) const {
    coherent_values(ps, pr, scratch);
    const double limit = std::sqrt(i_bar);
    const double stop = std::nextafter(limit, std::numeric_limits<double>::infinity());
    return cga_min_difference(scratch, n + 1, stop) <= limit;
  }
};

// ---------------------------------------------------------------------------
// 1-D search

constexpr double kGolden = 0.61803398874989484820;

// Golden-section maximization; returns the best probed point, endpoints
// included.
template <typename F>
void golden_max(F&& f, double lo, double hi, double tol, double& best_x,
                double& best_f) {
  best_x = lo;
  best_f = f(lo);
  const double fhi = f(hi);
  if (fhi > best_f) {
    best_f = fhi;
    best_x = hi;
  }
  double a = lo;
  double b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  auto note = [&](double x, double fx) {
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  };
  note(x1, f1);
  note(x2, f2);
  int guard = 200;
  while (b - a > tol && guard-- > 0) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
      note(x2, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
      note(x1, f1);
    }
  }
}

// ---------------------------------------------------------------------------
// Feasible intervals

// Single-variable view of the partition-form interference with every other
// power frozen: each phasor is rest + coef * sqrt(x), the gain bracket is
// rest + coef * x.
struct VarScan {
  const Workspace* ws = nullptr;
  int var_member = -1;  // -1 means the source power
  cxd a_rest;
  cxd a_coef;
  std::vector<cxd> inner_rest, inner_coef;
  std::vector<double> q_rest, q_coef;
  std::vector<double> mfac;  // rp_abs * sqrt(pr), var member filled at eval
  const int* sign = nullptr;

  VarScan(const Workspace& w, int member, double ps, const double* pr,
          const int* signs)
      : ws(&w), var_member(member), sign(signs) {
    const int n = w.n;
    inner_rest.resize(static_cast<size_t>(n));
    inner_coef.resize(static_cast<size_t>(n));
    q_rest.resize(static_cast<size_t>(n));
    q_coef.resize(static_cast<size_t>(n));
    mfac.resize(static_cast<size_t>(n));
    const bool src = member < 0;
    a_rest = src ? cxd(0.0, 0.0) : ws->h_sp * std::sqrt(ps);
    for (int j = 0; j < n; ++j) {
      if (j == member) continue;
      a_rest += w.rp_coef[static_cast<size_t>(j)] * std::sqrt(pr[j]);
    }
    a_coef = src ? w.h_sp : w.rp_coef[static_cast<size_t>(member)];
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<size_t>(k);
      cxd rest = w.noise_phasor[uk];
      double q = w.sigma2[uk];
      if (!src) {
        rest += w.h_sr[uk] * std::sqrt(ps);
        q += ps * w.s2r[uk];
      }
      for (int j = 0; j < n; ++j) {
        if (j == member) continue;
        rest += w.rr_coef[static_cast<size_t>(j * n + k)] * std::sqrt(pr[j]);
        q += w.w[static_cast<size_t>(j * n + k)] * pr[j];
      }
      inner_rest[uk] = rest;
      inner_coef[uk] = src ? w.h_sr[uk] : w.rr_coef[static_cast<size_t>(member * n + k)];
      q_rest[uk] = q;
      q_coef[uk] = src ? w.s2r[uk] : w.w[static_cast<size_t>(member * n + k)];
      mfac[uk] = w.rp_abs[uk] * std::sqrt(pr[k]);
    }
  }

  double residual(double x) const {
    const double sx = std::sqrt(x);
    double d = std::abs(a_rest + a_coef * sx);
    const int n = ws->n;
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<size_t>(k);
      const cxd inner = inner_rest[uk] + inner_coef[uk] * sx;
      const double q = q_rest[uk] + q_coef[uk] * x;
      const double m = (k == var_member) ? ws->rp_abs[uk] * sx : mfac[uk];
      d += sign[k] * std::abs(inner) * m / std::sqrt(q);
    }
    return d;
  }

  double interference(double x) const {
    const double d = residual(x);
    return d * d;
  }
};

constexpr int kScanPoints = 512;
constexpr int kBisectIters = 60;

// Bisects between an infeasible and a feasible value, returning a feasible
// endpoint of the bracketing pair.
template <typename Feas>
double bisect_boundary(Feas&& feasible, double bad, double good) {
  for (int i = 0; i < kBisectIters; ++i) {
    const double mid = 0.5 * (bad + good);
    if (feasible(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  return good;
}

// Component of {x in [0, box] : interference(x) <= i_bar} containing x_cur,
// located on a uniform scan and sharpened by bisection. Returns false when
// the current value itself is infeasible beyond `slack`.
bool coherent_interval(const VarScan& scan, double x_cur, double box, double i_bar,
                       double slack, FeasibleInterval& out) {
  auto feasible = [&](double x) { return scan.interference(x) <= i_bar; };
  if (scan.interference(x_cur) > i_bar + slack) return false;

  const double step = box / kScanPoints;
  int i_cur = static_cast<int>(std::floor(x_cur / step));
  i_cur = std::min(std::max(i_cur, 0), kScanPoints);

  double lo = 0.0;
  double last_good = x_cur;
  bool found = false;
  for (int i = i_cur; i >= 0; --i) {
    const double x = step * i;
    if (x > x_cur) continue;
    if (feasible(x)) {
      last_good = x;
    } else {
      lo = bisect_boundary(feasible, x, last_good);
      found = true;
      break;
    }
  }
  if (!found) lo = 0.0;

  double hi = box;
  last_good = x_cur;
  found = false;
  for (int i = i_cur + 1; i <= kScanPoints; ++i) {
    const double x = step * i;
    if (x < x_cur) continue;
    if (feasible(x)) {
      last_good = x;
    } else {
      hi = bisect_boundary(feasible, x, last_good);
      found = true;
      break;
    }
  }
  if (!found) hi = box;

  out.lo = std::min(lo, x_cur);
  out.hi = std::max(hi, x_cur);
  return true;
}

// Closed-form interval for the affine non-coherent constraint. Returns
// false when no value of the variable is feasible.
bool noncoh_interval(const Workspace& ws, int member, double ps, const double* pr,
                     FeasibleInterval& out) {
  double others = (member < 0) ? 0.0 : ws.sp2 * ps;
  for (int k = 0; k < ws.n; ++k) {
    if (k == member) continue;
    others += ws.rp2[static_cast<size_t>(k)] * (1.0 + ws.zeta[static_cast<size_t>(k)]) * pr[k];
  }
  const double coef = (member < 0)
                          ? ws.sp2
                          : ws.rp2[static_cast<size_t>(member)] *
                                (1.0 + ws.zeta[static_cast<size_t>(member)]);
  const double cap = (member < 0) ? ws.p_s_max : ws.box[static_cast<size_t>(member)];
  if (others > ws.i_bar) return false;
  out.lo = 0.0;
  out.hi = (coef > 0.0) ? std::min(cap, (ws.i_bar - others) / coef) : cap;
  return true;
}

// ---------------------------------------------------------------------------
// Coordinate ascent

struct DensePoint {
  double ps = 0.0;
  std::vector<double> pr;
};

struct Ascent {
  const Workspace& ws;
  const SolverOptions& opts;
  DensePoint pt;
  std::vector<int> sign;         // coherent split, +1 / -1 per member
  std::vector<double> scratch;   // n + 1 phasor magnitudes
  double f_cur = 0.0;

  Ascent(const Workspace& w, const SolverOptions& o) : ws(w), opts(o) {
    pt.pr.assign(static_cast<size_t>(ws.n), 0.0);
    sign.assign(static_cast<size_t>(ws.n), 1);
    scratch.assign(static_cast<size_t>(ws.n) + 1, 0.0);
  }

  bool coherent() const { return opts.mode == Mode::coherent; }

  double objective() const { return ws.exact_inner(pt.ps, pt.pr.data()); }

  double var_value(int member) const {
    return member < 0 ? pt.ps : pt.pr[static_cast<size_t>(member)];
  }

  void set_var(int member, double x) {
    if (member < 0) {
      pt.ps = x;
    } else {
      pt.pr[static_cast<size_t>(member)] = x;
    }
  }

  bool point_feasible() {
    if (!coherent()) return ws.noncoh_i(pt.ps, pt.pr.data()) <= ws.i_bar;
    return ws.partition_i(pt.ps, pt.pr.data(), sign.data(), scratch.data()) <= ws.i_bar;
  }

  // Re-solves the phase split at the current powers. Interference can only
  // shrink, so feasibility survives; the objective does not involve phases.
  void refresh_split() {
    ws.coherent_values(pt.ps, pt.pr.data(), scratch.data());
    PartitionInstance inst;
    inst.values = scratch;
    double total = 0.0;
    for (double v : inst.values) total += v;
    inst.epsilon = 1e-9 * total;
    const PartitionSolution sol = solve_cga(inst);
    for (auto& s : sign) s = -1;
    for (int p : sol.set1) {
      if (p > 0) sign[static_cast<size_t>(p - 1)] = 1;
    }
  }

  bool interval_for(int member, FeasibleInterval& iv) {
    if (!coherent()) return noncoh_interval(ws, member, pt.ps, pt.pr.data(), iv);
    VarScan scan(ws, member, pt.ps, pt.pr.data(), sign.data());
    const double cap = member < 0 ? ws.p_s_max : ws.box[static_cast<size_t>(member)];
    return coherent_interval(scan, var_value(member), cap, ws.i_bar, 0.0, iv);
  }

  // Maximizes the objective in one variable over its feasible interval.
  // Coherent searches run in sqrt coordinates. Commits only strict
  // improvements that stay feasible.
  bool update_single(int member) {
    FeasibleInterval iv;
    if (!interval_for(member, iv)) return false;
    if (!(iv.hi > iv.lo)) return false;
    const double x0 = var_value(member);
    auto eval_at = [&](double x) {
      set_var(member, x);
      const double f = objective();
      return f;
    };
    double cand_x = 0.0;
    double cand_f = 0.0;
    if (coherent()) {
      const double ulo = std::sqrt(iv.lo);
      const double uhi = std::sqrt(iv.hi);
      const double tol = opts.scalar_tol * std::max(1.0, uhi - ulo);
      double ux = 0.0;
      golden_max([&](double u) { return eval_at(std::min(std::max(u * u, iv.lo), iv.hi)); },
                 ulo, uhi, tol, ux, cand_f);
      cand_x = std::min(std::max(ux * ux, iv.lo), iv.hi);
    } else {
      const double tol = opts.scalar_tol * std::max(1.0, iv.hi - iv.lo);
      golden_max(eval_at, iv.lo, iv.hi, tol, cand_x, cand_f);
    }
    set_var(member, x0);
    if (cand_f > f_cur) {
      set_var(member, cand_x);
      if (coherent() && !point_feasible()) {
        set_var(member, x0);  // a spike the scan missed; keep the old value
        return false;
      }
      f_cur = cand_f;
      return true;
    }
    return false;
  }

  // Joint update of two relay powers: the first is swept on a fixed grid
  // over its interval, the second solved by the 1-D search at each grid
  // value; the best joint point is taken if it improves.
  bool update_pair(int ma, int mb) {
    FeasibleInterval iva;
    if (!interval_for(ma, iva)) return false;
    if (!(iva.hi > iva.lo)) return update_single(mb);
    const double xa0 = var_value(ma);
    const double xb0 = var_value(mb);
    constexpr int kOuterGrid = 33;

    double best_f = f_cur;
    double best_a = xa0;
    double best_b = xb0;
    for (int g = 0; g < kOuterGrid; ++g) {
      const double t = static_cast<double>(g) / (kOuterGrid - 1);
      double xa;
      if (coherent()) {
        const double u = std::sqrt(iva.lo) + t * (std::sqrt(iva.hi) - std::sqrt(iva.lo));
        xa = std::min(std::max(u * u, iva.lo), iva.hi);
      } else {
        xa = iva.lo + t * (iva.hi - iva.lo);
      }
      set_var(ma, xa);
      FeasibleInterval ivb;
      if (!interval_for(mb, ivb)) {
        set_var(ma, xa0);
        continue;
      }
      auto eval_b = [&](double x) {
        set_var(mb, std::min(std::max(x, ivb.lo), ivb.hi));
        return objective();
      };
      double xb = xb0;
      double fb = 0.0;
      if (coherent()) {
        const double ulo = std::sqrt(ivb.lo);
        const double uhi = std::sqrt(ivb.hi);
        const double tol = opts.scalar_tol * std::max(1.0, uhi - ulo);
        double ub = 0.0;
        golden_max([&](double u) { return eval_b(u * u); }, ulo, uhi, tol, ub, fb);
        xb = std::min(std::max(ub * ub, ivb.lo), ivb.hi);
      } else {
        const double tol = opts.scalar_tol * std::max(1.0, ivb.hi - ivb.lo);
        golden_max(eval_b, ivb.lo, ivb.hi, tol, xb, fb);
      }
      if (fb > best_f) {
        set_var(ma, xa);
        set_var(mb, xb);
        if (!coherent() || point_feasible()) {
          best_f = fb;
          best_a = xa;
          best_b = xb;
        }
      }
      set_var(ma, xa0);
      set_var(mb, xb0);
    }
    if (best_f > f_cur) {
      set_var(ma, best_a);
      set_var(mb, best_b);
      f_cur = best_f;
      return true;
    }
    return false;
  }

  // Largest scaling of the capped point that satisfies the constraint.
  void init_from_caps() {
    pt.ps = ws.p_s_max;
    for (int m = 0; m < ws.n; ++m) pt.pr[static_cast<size_t>(m)] = ws.box[static_cast<size_t>(m)];
    scale_to_feasible();
  }

  void scale_to_feasible() {
    if (!coherent()) {
      const double i_full = ws.noncoh_i(pt.ps, pt.pr.data());
      if (i_full > ws.i_bar) {
        double c = ws.i_bar / i_full;
        for (int guard = 0; guard < 8; ++guard) {
          DensePoint test = pt;
          test.ps *= c;
          for (auto& p : test.pr) p *= c;
          if (ws.noncoh_i(test.ps, test.pr.data()) <= ws.i_bar) {
            pt = test;
            return;
          }
          c *= 1.0 - 1e-12;
        }
        pt.ps = 0.0;
        for (auto& p : pt.pr) p = 0.0;
      }
      return;
    }
    const DensePoint base = pt;
    std::vector<double> scaled(static_cast<size_t>(ws.n));
    for (int step = kScanPoints; step >= 1; --step) {
      const double c = static_cast<double>(step) / kScanPoints;
      for (int m = 0; m < ws.n; ++m) scaled[static_cast<size_t>(m)] = c * base.pr[static_cast<size_t>(m)];
      if (ws.coherent_feasible(c * base.ps, scaled.data(), scratch.data())) {
        pt.ps = c * base.ps;
        pt.pr = scaled;
        return;
      }
    }
    pt.ps = 0.0;
    for (auto& p : pt.pr) p = 0.0;
  }
};

PowerAllocation to_allocation(const Workspace& ws, const DensePoint& pt) {
  PowerAllocation alloc;
  alloc.p_s = pt.ps;
  for (int m = 0; m < ws.n; ++m) {
    alloc.p_r[ws.relays[static_cast<size_t>(m)]] = pt.pr[static_cast<size_t>(m)];
  }
  return alloc;
}

PhasePartition split_from_signs(const Workspace& ws, const DensePoint& pt,
                                const std::vector<int>& sign) {
  PhasePartition part;
  std::vector<double> values(static_cast<size_t>(ws.n) + 1);
  ws.coherent_values(pt.ps, pt.pr.data(), values.data());
  double d = values[0];
  for (int m = 0; m < ws.n; ++m) {
    const int k = ws.relays[static_cast<size_t>(m)];
    if (sign[static_cast<size_t>(m)] > 0) {
      part.in_phase.push_back(k);
      d += values[static_cast<size_t>(m) + 1];
    } else {
      part.anti_phase.push_back(k);
      d -= values[static_cast<size_t>(m) + 1];
    }
  }
  part.residual = d;
  part.interference = d * d;
  return part;
}

SolveResult finish_result(const ChannelRealization& ch, const ScenarioConfig& cfg,
                          const RelaySubset& subset, const Workspace& ws,
                          const Ascent& asc) {
  SolveResult res;
  res.subset = subset;
  res.allocation = to_allocation(ws, asc.pt);
  res.rate = achievable_rate(ch, cfg, subset, res.allocation).total_rate;
  if (asc.coherent()) {
    res.partition = split_from_signs(ws, asc.pt, asc.sign);
    res.interference = res.partition->interference;
  } else {
    res.interference =
        interference_noncoherent_simplified(ch, cfg, subset, res.allocation);
  }
  return res;
}

}  // namespace

SolverOptions SolverOptions::make(Mode mode, Schedule schedule) {
  SolverOptions o;
  o.mode = mode;
  o.schedule = schedule;
  o.block_size = (schedule == Schedule::greedy2) ? 2 : 1;
  return o;
}

void SolverOptions::validate() const {
  if (block_size < 1 || block_size > 2) {
    throw std::invalid_argument("block_size must be 1 or 2");
  }
  if (!(scalar_tol > 0.0)) throw std::invalid_argument("scalar_tol must be > 0");
  if (outer_tol < 0.0) throw std::invalid_argument("outer_tol must be >= 0");
  if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
  if (grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");
}

FeasibleInterval feasible_interval(Mode mode, const ChannelRealization& ch,
                                   const ScenarioConfig& cfg, const RelaySubset& subset,
                                   const PowerAllocation& alloc, VariableId var,
                                   const std::optional<PhasePartition>& partition) {
  cfg.validate();
  subset.validate(cfg.relay_count);
  int member = -1;
  if (!var.is_source) {
    if (!subset.contains(var.relay)) {
      throw std::invalid_argument("feasible_interval: variable relay not in subset");
    }
    member = static_cast<int>(
        std::lower_bound(subset.indices.begin(), subset.indices.end(), var.relay) -
        subset.indices.begin());
  }
  Workspace ws(ch, cfg, subset);
  DensePoint pt;
  pt.ps = alloc.p_s;
  pt.pr.resize(static_cast<size_t>(ws.n));
  for (int m = 0; m < ws.n; ++m) {
    pt.pr[static_cast<size_t>(m)] = alloc.relay_power(ws.relays[static_cast<size_t>(m)]);
  }

  FeasibleInterval iv;
  if (mode == Mode::noncoherent) {
    if (!noncoh_interval(ws, member, pt.ps, pt.pr.data(), iv)) {
      throw std::runtime_error("feasible_interval: current point infeasible");
    }
    return iv;
  }

  std::vector<int> sign(static_cast<size_t>(ws.n), 1);
  if (partition.has_value()) {
    std::vector<int> all = partition->in_phase;
    all.insert(all.end(), partition->anti_phase.begin(), partition->anti_phase.end());
    std::sort(all.begin(), all.end());
    if (all != subset.indices) {
      throw std::invalid_argument("feasible_interval: partition does not cover subset");
    }
    for (int m = 0; m < ws.n; ++m) {
      const int k = ws.relays[static_cast<size_t>(m)];
      const bool anti = std::find(partition->anti_phase.begin(), partition->anti_phase.end(),
                                  k) != partition->anti_phase.end();
      sign[static_cast<size_t>(m)] = anti ? -1 : 1;
    }
  } else {
    CoherentTerms terms = coherent_terms(ch, cfg, subset, alloc);
    PartitionInstance inst = make_partition_instance(terms);
    const PartitionSolution sol = solve_cga(inst);
    for (auto& s : sign) s = -1;
    for (int p : sol.set1) {
      if (p > 0) sign[static_cast<size_t>(p - 1)] = 1;
    }
  }

  VarScan scan(ws, member, pt.ps, pt.pr.data(), sign.data());
  const double cap = member < 0 ? ws.p_s_max : ws.box[static_cast<size_t>(member)];
  const double x_cur = member < 0 ? pt.ps : pt.pr[static_cast<size_t>(member)];
  if (!coherent_interval(scan, x_cur, cap, ws.i_bar, 1e-9, iv)) {
    throw std::runtime_error("feasible_interval: current point infeasible");
  }
  return iv;
}

SolveResult solve_coordinate_ascent(const ChannelRealization& ch, const ScenarioConfig& cfg,
                                    const RelaySubset& subset, const SolverOptions& opts) {
  cfg.validate();
  subset.validate(cfg.relay_count);
  opts.validate();
  Workspace ws(ch, cfg, subset);
  Ascent asc(ws, opts);
  std::vector<double> trace;
  int iters = 0;

  auto run = [&]() {
    if (asc.coherent()) asc.refresh_split();
    asc.f_cur = asc.objective();
    trace.clear();
    trace.push_back(std::log2(1.0 + asc.f_cur));
    const int block = std::min(opts.block_size, ws.n);
    iters = 0;
    for (int it = 0; it < opts.max_outer_iters; ++it) {
      const double f_prev = asc.f_cur;
      if (asc.coherent()) asc.refresh_split();
      asc.update_single(-1);  // source power
      if (block <= 1) {
        for (int m = 0; m < ws.n; ++m) asc.update_single(m);
      } else {
        int m = 0;
        for (; m + 1 < ws.n; m += 2) asc.update_pair(m, m + 1);
        if (m < ws.n) asc.update_single(m);
      }
      ++iters;
      trace.push_back(std::log2(1.0 + asc.f_cur));
      if (asc.f_cur - f_prev < opts.outer_tol * (1.0 + std::abs(f_prev))) break;
    }
  };

  if (opts.initial_allocation.has_value()) {
    const PowerAllocation& init = *opts.initial_allocation;
    asc.pt.ps = std::min(std::max(init.p_s, 0.0), ws.p_s_max);
    for (int m = 0; m < ws.n; ++m) {
      const double p = init.relay_power(ws.relays[static_cast<size_t>(m)]);
      asc.pt.pr[static_cast<size_t>(m)] =
          std::min(std::max(p, 0.0), ws.box[static_cast<size_t>(m)]);
    }
    asc.scale_to_feasible();
    run();
  } else {
    // A single scaled start can wedge itself against the shared budget: once
    // the constraint is tight, no lone coordinate move trades source power
    // against relay power. Deterministic restarts span the mix space: the
    // scaled caps (first, wins ties), two budget-lean mixes, and a coarse
    // grid sweep where the dimension guard allows one.
    constexpr double kLean = 1e-3;
    const double w_s[3] = {1.0, kLean, 1.0};
    const double w_r[3] = {1.0, 1.0, kLean};
    const bool grid_seed = ws.n + 1 <= 5;
    DensePoint best_pt;
    std::vector<int> best_sign;
    std::vector<double> best_trace;
    double best_f = 0.0;
    int best_iters = 0;
    for (int a = 0; a < (grid_seed ? 4 : 3); ++a) {
      if (a < 3) {
        asc.pt.ps = w_s[a] * ws.p_s_max;
        for (int m = 0; m < ws.n; ++m) {
          asc.pt.pr[static_cast<size_t>(m)] = w_r[a] * ws.box[static_cast<size_t>(m)];
        }
      } else {
        SolverOptions seed_opts = opts;
        seed_opts.schedule = Schedule::grid_oracle;
        // Sharper seeds where the tuple count stays small: on the active
        // budget line no lone coordinate move can trade source against relay
        // power, so the landing point inherits the seed's quantization.
        seed_opts.grid_points = ws.n <= 1 ? 65 : (ws.n == 2 ? 17 : 9);
        seed_opts.oracle_refine = false;
        const SolveResult coarse = solve_grid_oracle(ch, cfg, subset, seed_opts);
        asc.pt.ps = coarse.allocation.p_s;
        for (int m = 0; m < ws.n; ++m) {
          asc.pt.pr[static_cast<size_t>(m)] =
              coarse.allocation.relay_power(ws.relays[static_cast<size_t>(m)]);
        }
      }
      asc.scale_to_feasible();
      run();
      if (a == 0 || asc.f_cur > best_f) {
        best_pt = asc.pt;
        best_sign = asc.sign;
        best_trace = trace;
        best_f = asc.f_cur;
        best_iters = iters;
      }
    }
    asc.pt = std::move(best_pt);
    asc.sign = std::move(best_sign);
    asc.f_cur = best_f;
    trace = std::move(best_trace);
    iters = best_iters;
  }

  SolveResult out = finish_result(ch, cfg, subset, ws, asc);
  out.objective_value = std::log2(1.0 + asc.f_cur);
  out.iterations = iters;
  out.objective_trace = std::move(trace);
  return out;
}

SolveResult solve_grid_oracle(const ChannelRealization& ch, const ScenarioConfig& cfg,
                              const RelaySubset& subset, const SolverOptions& opts) {
  cfg.validate();
  subset.validate(cfg.relay_count);
  opts.validate();
  Workspace ws(ch, cfg, subset);
  const int n = ws.n;
  if (n + 1 > 5) {
    throw std::invalid_argument("solve_grid_oracle: more than 5 grid dimensions");
  }
  const int g_count = opts.grid_points;
  const auto ug = static_cast<size_t>(g_count);
  const bool coherent = opts.mode == Mode::coherent;

  // Per-dimension value tables; everything the inner loop touches is a
  // cached multiply-free lookup. In noncoherent mode the affine constraint
  // caps each relay term at i_bar on its own, so the grid covers only that
  // slab; tight budgets keep full resolution instead of collapsing onto the
  // lone feasible point near zero. Coherent cancellation has no per-variable
  // bound, so those grids span the whole box.
  std::vector<double> vals_s(ug);
  for (int g = 0; g < g_count; ++g) {
    vals_s[static_cast<size_t>(g)] = ws.p_s_max * (g / (g_count - 1.0));
  }
  std::vector<std::vector<double>> vals_r(static_cast<size_t>(n));
  std::vector<std::vector<double>> a_tab(static_cast<size_t>(n));   // pr * |h_rd|^2/sigma_d
  std::vector<std::vector<double>> it_tab(static_cast<size_t>(n));  // pr * rp2 * (1+zeta)
  std::vector<std::vector<double>> mt_tab(static_cast<size_t>(n));  // rp_abs * sqrt(pr)
  std::vector<std::vector<cxd>> crp_tab(static_cast<size_t>(n));    // rp_coef * sqrt(pr)
  std::vector<std::vector<std::vector<cxd>>> crr_tab(static_cast<size_t>(n));
  std::vector<std::vector<std::vector<double>>> wq_tab(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<size_t>(j);
    vals_r[uj].resize(ug);
    a_tab[uj].resize(ug);
    it_tab[uj].resize(ug);
    mt_tab[uj].resize(ug);
    crp_tab[uj].resize(ug);
    crr_tab[uj].assign(static_cast<size_t>(n), std::vector<cxd>(ug));
    wq_tab[uj].assign(static_cast<size_t>(n), std::vector<double>(ug));
    const double leak_coef = ws.rp2[uj] * (1.0 + ws.zeta[uj]);
    double range = ws.box[uj];
    if (!coherent && leak_coef > 0.0) range = std::min(range, ws.i_bar / leak_coef);
    for (int g = 0; g < g_count; ++g) {
      const auto ugi = static_cast<size_t>(g);
      const double p = range * (g / (g_count - 1.0));
      vals_r[uj][ugi] = p;
      a_tab[uj][ugi] = p * ws.a_of[uj];
      it_tab[uj][ugi] = p * ws.rp2[uj] * (1.0 + ws.zeta[uj]);
      mt_tab[uj][ugi] = ws.rp_abs[uj] * std::sqrt(p);
      const double sz = std::sqrt(ws.zeta[uj] * p);
      crp_tab[uj][ugi] = ws.h_rp[uj] * sz;
      for (int k = 0; k < n; ++k) {
        crr_tab[uj][static_cast<size_t>(k)][ugi] = ws.h_rr[static_cast<size_t>(j * n + k)] * sz;
        wq_tab[uj][static_cast<size_t>(k)][ugi] = ws.w[static_cast<size_t>(j * n + k)] * p;
      }
    }
  }

  const double limit = std::sqrt(ws.i_bar);
  const double stop = std::nextafter(limit, std::numeric_limits<double>::infinity());

  // Incumbent: the all-zero point, always feasible; ties prefer it.
  double best_inner = 0.0;
  DensePoint best;
  best.ps = 0.0;
  best.pr.assign(static_cast<size_t>(n), 0.0);

  std::vector<int> gi(static_cast<size_t>(n), 0);
  std::vector<double> q(static_cast<size_t>(n));   // loop power + noise per relay
  std::vector<double> ak(static_cast<size_t>(n));  // destination-side SNR per relay
  std::vector<cxd> inner_rel(static_cast<size_t>(n));
  std::vector<double> mk(static_cast<size_t>(n));
  std::vector<double> values(static_cast<size_t>(n) + 1);

  double i_rel = 0.0;
  cxd a_rel(0.0, 0.0);

  auto inner_at = [&](double ps) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<size_t>(k);
      acc += sinr_summand(ak[uk], ps * ws.s2r[uk], q[uk]);
    }
    return acc;
  };
  auto coh_feasible = [&](double ps) {
    const double sqs = std::sqrt(ps);
    values[0] = std::abs(a_rel + ws.h_sp * sqs);
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<size_t>(k);
      const double gden = q[uk] + ps * ws.s2r[uk];
      values[uk + 1] =
          std::abs(inner_rel[uk] + ws.h_sr[uk] * sqs) * mk[uk] / std::sqrt(gden);
    }
    return cga_min_difference(values.data(), n + 1, stop) <= limit;
  };
  auto commit = [&](double inner, double ps) {
    best_inner = inner;
    best.ps = ps;
    for (int j = 0; j < n; ++j) {
      const auto uj = static_cast<size_t>(j);
      best.pr[uj] = vals_r[uj][static_cast<size_t>(gi[uj])];
    }
  };

  bool done = false;
  while (!done) {
    // Tuple context at the current relay grid indices.
    i_rel = 0.0;
    a_rel = cxd(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const auto uj = static_cast<size_t>(j);
      const auto gij = static_cast<size_t>(gi[uj]);
      i_rel += it_tab[uj][gij];
      ak[uj] = a_tab[uj][gij];
      mk[uj] = mt_tab[uj][gij];
      if (coherent) a_rel += crp_tab[uj][gij];
    }
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<size_t>(k);
      double qk = ws.sigma2[uk];
      cxd irk = ws.noise_phasor[uk];
      for (int j = 0; j < n; ++j) {
        const auto uj = static_cast<size_t>(j);
        const auto gij = static_cast<size_t>(gi[uj]);
        qk += wq_tab[uj][uk][gij];
        if (coherent) irk += crr_tab[uj][uk][gij];
      }
      q[uk] = qk;
      inner_rel[uk] = irk;
    }

    if (!coherent) {
      // The affine constraint pins the best source power for this relay
      // tuple in closed form, and the rate is nondecreasing in it.
      if (i_rel <= ws.i_bar) {
        const double ps = ws.sp2 > 0.0
                              ? std::min(ws.p_s_max, (ws.i_bar - i_rel) / ws.sp2)
                              : ws.p_s_max;
        const double inner = inner_at(ps);
        if (inner > best_inner) commit(inner, ps);
      }
    } else {
      // Descending source scan; inner_at is increasing in ps, so the first
      // feasible point wins and anything at or below best_inner prunes the
      // whole tuple. The winner is then pushed up against the infeasible
      // grid point above it by bisection, since cancellation boundaries sit
      // between grid values.
      for (int gs = g_count - 1; gs >= 0; --gs) {
        const auto ugs = static_cast<size_t>(gs);
        double ps = vals_s[ugs];
        if (inner_at(ps) <= best_inner) break;
        if (!coh_feasible(ps)) continue;
        if (gs + 1 < g_count) {
          double bad = vals_s[ugs + 1];  // evaluated just before, infeasible
          for (int it = 0; it < 48; ++it) {
            const double mid = 0.5 * (ps + bad);
            if (coh_feasible(mid)) {
              ps = mid;
            } else {
              bad = mid;
            }
          }
        }
        const double inner = inner_at(ps);
        if (inner > best_inner) commit(inner, ps);
        break;
      }
    }

    // Odometer step over the relay grid.
    int d = 0;
    for (; d < n; ++d) {
      if (++gi[static_cast<size_t>(d)] < g_count) break;
      gi[static_cast<size_t>(d)] = 0;
    }
    if (d == n) done = true;
  }

  // Wrap the best grid point in an ascent state for polish and reporting.
  SolverOptions polish_opts = opts;
  Ascent asc(ws, polish_opts);
  asc.pt = best;
  if (coherent) asc.refresh_split();

  std::vector<double> trace;
  trace.push_back(std::log2(1.0 + best_inner));

  if (opts.oracle_refine) {
    // One pass of per-coordinate polish on the exact rate, continuous now.
    auto exact_obj = [&]() { return ws.exact_inner(asc.pt.ps, asc.pt.pr.data()); };
    double f_cur = exact_obj();
    auto polish = [&](int member) {
      FeasibleInterval iv;
      if (!asc.interval_for(member, iv)) return;
      if (!(iv.hi > iv.lo)) return;
      const double x0 = asc.var_value(member);
      double cand_x = x0;
      double cand_f = f_cur;
      auto eval_at = [&](double x) {
        asc.set_var(member, x);
        return exact_obj();
      };
      if (coherent) {
        const double ulo = std::sqrt(iv.lo);
        const double uhi = std::sqrt(iv.hi);
        const double tol = opts.scalar_tol * std::max(1.0, uhi - ulo);
        double ux = 0.0;
        golden_max([&](double u) { return eval_at(std::min(std::max(u * u, iv.lo), iv.hi)); },
                   ulo, uhi, tol, ux, cand_f);
        cand_x = std::min(std::max(ux * ux, iv.lo), iv.hi);
      } else {
        const double tol = opts.scalar_tol * std::max(1.0, iv.hi - iv.lo);
        golden_max(eval_at, iv.lo, iv.hi, tol, cand_x, cand_f);
      }
      asc.set_var(member, x0);
      if (cand_f > f_cur) {
        asc.set_var(member, cand_x);
        if (coherent && !asc.point_feasible()) {
          asc.set_var(member, x0);
          return;
        }
        f_cur = cand_f;
      }
    };
    polish(-1);
    for (int m = 0; m < n; ++m) polish(m);
    trace.push_back(std::log2(1.0 + f_cur));
  }

  if (coherent) asc.refresh_split();

  SolveResult out = finish_result(ch, cfg, subset, ws, asc);
  out.objective_value = out.rate;
  out.iterations = opts.oracle_refine ? 1 : 0;
  out.objective_trace = std::move(trace);
  return out;
}

SolveResult solve(const ChannelRealization& ch, const ScenarioConfig& cfg,
                  const RelaySubset& subset, const SolverOptions& opts) {
  if (opts.schedule == Schedule::grid_oracle) {
    return solve_grid_oracle(ch, cfg, subset, opts);
  }
  return solve_coordinate_ascent(ch, cfg, subset, opts);
}

const char* to_string(Mode mode) {
  return mode == Mode::noncoherent ? "noncoherent" : "coherent";
}

const char* to_string(Schedule schedule) {
  switch (schedule) {
    case Schedule::greedy1: return "greedy1";
    case Schedule::greedy2: return "greedy2";
    default: return "oracle";
  }
}

Mode mode_from_string(const std::string& s) {
  if (s == "noncoherent") return Mode::noncoherent;
  if (s == "coherent") return Mode::coherent;
  throw std::invalid_argument("unknown mode: " + s);
}

Schedule schedule_from_string(const std::string& s) {
  if (s == "greedy1") return Schedule::greedy1;
  if (s == "greedy2") return Schedule::greedy2;
  if (s == "oracle" || s == "grid_oracle") return Schedule::grid_oracle;
  throw std::invalid_argument("unknown schedule: " + s);
}

}  // namespace relaycoex
