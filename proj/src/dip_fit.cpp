#include "nvdr/dip_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nvdr/errors.hpp"

namespace nvdr {

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (n % 2 == 0) {
    auto lo = std::max_element(v.begin(), mid);
    m = 0.5 * (m + *lo);
  }
  return m;
}

// unit-peak dip shapes; w is the full width at half depth
double shape_at(DipModel model, double x, double c, double w) {
  if (model == DipModel::LorentzianSum) {
    const double hw = 0.5 * w;
    return hw * hw / ((x - c) * (x - c) + hw * hw);
  }
  const double z = (x - c) / w;
  return std::exp(-4.0 * std::numbers::ln2 * z * z);
}

struct Component {
  double center = 0.0;
  double width = 0.0;
  double depth = 0.0;  // solved linearly, not a search parameter
};

struct FitWork {
  const std::vector<double>& x;
  const std::vector<double>& s;
  DipModel model;
  double step;       // median grid spacing
  double range;      // x.back() - x.front()
  std::vector<Component> comps;
  double baseline = 0.0;
  double rms = std::numeric_limits<double>::infinity();
};

// depths and baseline are linear in the model, so for fixed shapes the
// optimum is a small least-squares solve. dips only pull the signal down,
// so negative depths are excluded: any component the unconstrained solve
// drives negative is dropped from the active set and frozen at zero, which
// stops shallow seeds from turning into anti-dips that cancel real tails
double solve_linear(FitWork& fw) {
  const auto n = static_cast<Eigen::Index>(fw.x.size());
  std::vector<std::size_t> active(fw.comps.size());
  for (std::size_t j = 0; j < active.size(); ++j) active[j] = j;
  for (auto& cp : fw.comps) cp.depth = 0.0;

  for (;;) {
    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd a(n, k + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, 0) = 1.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        const auto& cp = fw.comps[active[static_cast<std::size_t>(j)]];
        a(i, j + 1) = -shape_at(fw.model, fw.x[static_cast<std::size_t>(i)],
                                cp.center, cp.width);
      }
      y(i) = fw.s[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd beta = a.colPivHouseholderQr().solve(y);

    Eigen::Index worst = -1;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (beta(j + 1) < 0.0 &&
          (worst < 0 || beta(j + 1) < beta(worst + 1))) {
        worst = j;
      }
    }
    if (worst >= 0) {
      active.erase(active.begin() + worst);
      continue;
    }

    fw.baseline = beta(0);
    for (Eigen::Index j = 0; j < k; ++j) {
      fw.comps[active[static_cast<std::size_t>(j)]].depth = beta(j + 1);
    }
    fw.rms = std::sqrt((a * beta - y).squaredNorm() / static_cast<double>(n));
    return fw.rms;
  }
}

// the signal is a population, so the fitted model must stay non-negative;
// a narrow over-deep component can interpolate two samples while plunging
// far below zero between them, and this is what rules that shape out
double unphysical_penalty(const FitWork& fw) {
  double pen = 0.0;
  for (const auto& at : fw.comps) {
    double m = fw.baseline;
    for (const auto& cp : fw.comps) {
      m -= cp.depth * shape_at(fw.model, at.center, cp.center, cp.width);
    }
    if (m < -1e-3) pen += 10.0 * (-1e-3 - m);
  }
  return pen;
}

// objective for one dip's (center, width) with the others held fixed.
// widths are floored at 3/4 of a grid step: a feature narrower than the
// sampling cannot be resolved, and letting the width collapse under the
// grid turns the component into a biased interpolator of its two or three
// lowest samples
double shape_objective(FitWork& fw, std::size_t j, double c, double w) {
  if (!(w > 0.75 * fw.step) || w > 2.0 * fw.range + fw.step) return 1e12;
  if (c < fw.x.front() - 2.0 * fw.step || c > fw.x.back() + 2.0 * fw.step) {
    return 1e12;
  }
  const double c0 = fw.comps[j].center;
  const double w0 = fw.comps[j].width;
  fw.comps[j].center = c;
  fw.comps[j].width = w;
  const double r = solve_linear(fw) + unphysical_penalty(fw);
  fw.comps[j].center = c0;
  fw.comps[j].width = w0;
  return r;
}

// standard Nelder-Mead in two dimensions, small and bounded; keeps the best
// vertex it ever saw, so a polish step never makes the fit worse
void polish_dip(FitWork& fw, std::size_t j) {
  struct Vertex {
    double c, w, f;
  };
  auto eval = [&](double c, double w) { return shape_objective(fw, j, c, w); };
  Vertex v[3] = {
      {fw.comps[j].center, fw.comps[j].width, 0.0},
      {fw.comps[j].center + 0.5 * fw.step, fw.comps[j].width, 0.0},
      {fw.comps[j].center, fw.comps[j].width * 1.4, 0.0},
  };
  for (auto& p : v) p.f = eval(p.c, p.w);
  for (int iter = 0; iter < 80; ++iter) {
    std::sort(std::begin(v), std::end(v),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (std::abs(v[2].f - v[0].f) < 1e-12) break;
    const double mc = 0.5 * (v[0].c + v[1].c);
    const double mw = 0.5 * (v[0].w + v[1].w);
    Vertex refl{mc + (mc - v[2].c), mw + (mw - v[2].w), 0.0};
    refl.f = eval(refl.c, refl.w);
    if (refl.f < v[0].f) {
      Vertex exp_{mc + 2.0 * (mc - v[2].c), mw + 2.0 * (mw - v[2].w), 0.0};
      exp_.f = eval(exp_.c, exp_.w);
      v[2] = exp_.f < refl.f ? exp_ : refl;
    } else if (refl.f < v[1].f) {
      v[2] = refl;
    } else {
      Vertex con{mc + 0.5 * (v[2].c - mc), mw + 0.5 * (v[2].w - mw), 0.0};
      con.f = eval(con.c, con.w);
      if (con.f < v[2].f) {
        v[2] = con;
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i].c = v[0].c + 0.5 * (v[i].c - v[0].c);
          v[i].w = v[0].w + 0.5 * (v[i].w - v[0].w);
          v[i].f = eval(v[i].c, v[i].w);
        }
      }
    }
  }
  const auto* best =
      std::min_element(std::begin(v), std::end(v),
                       [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  fw.comps[j].center = best->c;
  fw.comps[j].width = best->w;
  solve_linear(fw);
}

struct Seed {
  std::size_t idx;
  double depth;
};

// local minima below the detection threshold, deepest first. a lone
// sub-threshold point is noise, not a dip, so one of its neighbours must be
// below the threshold too; this keeps the false-dip rate on flat noisy
// spectra well under 1% while any resolvable dip spans several points
// anyway. only immediately adjacent candidates collapse onto the deeper
// one: dips two grid steps apart are routinely genuine
std::vector<Seed> find_seeds(const std::vector<double>& s, double threshold,
                             double baseline, int max_dips) {
  std::vector<Seed> seeds;
  const std::size_t n = s.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i] >= threshold) continue;
    if (s[i - 1] >= threshold && s[i + 1] >= threshold) continue;
    if (s[i] <= s[i - 1] && s[i] <= s[i + 1] &&
        (s[i] < s[i - 1] || s[i] < s[i + 1])) {
      seeds.push_back({i, baseline - s[i]});
    }
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.depth > b.depth; });
  std::vector<Seed> kept;
  for (const auto& cand : seeds) {
    bool close = false;
    for (const auto& k : kept) {
      const auto d = cand.idx > k.idx ? cand.idx - k.idx : k.idx - cand.idx;
      if (d <= 1) close = true;
    }
    if (!close) kept.push_back(cand);
    if (static_cast<int>(kept.size()) >= max_dips) break;
  }
  return kept;
}

double half_depth_span(const std::vector<double>& x, const std::vector<double>& s,
                       std::size_t i, double baseline, double step) {
  const double half = baseline - 0.5 * (baseline - s[i]);
  std::size_t l = i;
  while (l > 0 && s[l - 1] < half) --l;
  std::size_t r = i;
  while (r + 1 < s.size() && s[r + 1] < half) ++r;
  return std::max(x[r] - x[l], step);
}

// the longitudinal hyperfine mismatch a/2 between the dressed doublet's
// branches repels them, stretching the effective sideband offset from
// omega' to omega' + a^2/(8 omega'). the dip condition is therefore
// quadratic in a, and solving it exactly keeps strong couplings accurate
// where the linear inversion drifts by a few linewidths (1.6 kHz at
// a = 38 kHz, omega' = 104 kHz). a_lead is the linear-inversion value
// 2(larmor - (nu_c -+ omega')), kept as a fallback for dip positions
// outside the model's reach
double invert_sideband(double a_lead, double omega_prime, bool lower) {
  const double disc = 1.0 + (lower ? a_lead : -a_lead) / omega_prime;
  if (disc < 0.0) return a_lead;
  const double root = 2.0 * omega_prime * (std::sqrt(disc) - 1.0);
  return lower ? root : -root;
}

// inverts each protocol's resonance condition to a parallel coupling.
// frequency dips on the lower sideband sit at larmor - a/2 - omega'_eff,
// on the upper at larmor - a/2 + omega'_eff; which applies follows from the
// dip's side of the Larmor frequency (or the fixed carrier's side when
// omega' is swept)
void assign_coupling(Dip& dip, const SweepPlan& plan, double larmor_khz,
                     double step) {
  const auto& fx = plan.fixed;
  switch (plan.protocol) {
    case Protocol::Hhdr:
      // dip directly at the dressed splitting larmor - a/2
      dip.center_khz = dip.center_x;
      dip.width_khz = dip.width_x;
      dip.a_par_khz = 2.0 * (larmor_khz - dip.center_x);
      break;
    case Protocol::PmHhdr:
      if (plan.swept == SweptParameter::Nu) {
        dip.center_khz = dip.center_x;
        dip.width_khz = dip.width_x;
        dip.a_par_ambiguous = std::abs(dip.center_x - larmor_khz) <= step;
        const bool lower = dip.center_x < larmor_khz;
        const double lead = 2.0 * (larmor_khz - dip.center_x -
                                   (lower ? fx.omega_prime_khz
                                          : -fx.omega_prime_khz));
        dip.a_par_khz = invert_sideband(lead, fx.omega_prime_khz, lower);
      } else {
        // omega' sweep at fixed carrier: the matching sideband is the one
        // pointing from the carrier toward the Larmor frequency, and the
        // dip's own omega' sets the doublet repulsion
        dip.center_khz = dip.center_x;
        dip.width_khz = dip.width_x;
        dip.a_par_ambiguous = std::abs(fx.nu_khz - larmor_khz) <= step;
        const bool lower = fx.nu_khz < larmor_khz;
        const double lead = 2.0 * (larmor_khz - fx.nu_khz -
                                   (lower ? dip.center_x : -dip.center_x));
        dip.a_par_khz = invert_sideband(lead, dip.center_x, lower);
      }
      break;
    case Protocol::XyN:
      // tau dip probes the mean of the two nuclear frequencies, 1/(2 tau)
      dip.center_khz = 500.0 / dip.center_x;
      dip.width_khz = 500.0 / (dip.center_x * dip.center_x) * dip.width_x;
      dip.a_par_khz = 2.0 * larmor_khz - dip.center_khz;
      break;
  }
}

}  // namespace

const char* dip_model_tag(DipModel m) {
  return m == DipModel::LorentzianSum ? "lorentzian_sum" : "gaussian_sum";
}

std::optional<DipModel> parse_dip_model(const std::string& tag) {
  if (tag == "lorentzian_sum" || tag == "lorentzian") {
    return DipModel::LorentzianSum;
  }
  if (tag == "gaussian_sum" || tag == "gaussian") return DipModel::GaussianSum;
  return std::nullopt;
}

void DipReport::validate() const {
  for (std::size_t j = 0; j < dips.size(); ++j) {
    const auto& d = dips[j];
    const bool sane = std::isfinite(d.center_x) && d.width_x > 0.0 &&
                      d.depth > 0.0 && d.depth <= 1.0 + 1e-9;
    if (!sane) {
      throw NumericError("dip " + std::to_string(j) +
                         " has a non-positive width or a depth outside (0, 1]");
    }
  }
  if (!std::isfinite(fit_residual) || fit_residual < 0.0) {
    throw NumericError("fit residual must be finite and non-negative");
  }
}

DipReport fit_dips(const Spectrum& spec, int max_dips, DipModel model) {
  spec.validate();
  const std::size_t n = spec.points.size();
  if (n < 10) {
    throw ConfigError("dip fitting needs at least 10 spectrum points, got " +
                      std::to_string(n));
  }
  if (max_dips < 1) {
    throw ConfigError("max_dips must be at least 1");
  }

  std::vector<double> x(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = spec.points[i].x;
    s[i] = spec.points[i].signal;
  }

  // sigma-clipped baseline: crowded spectra can park close to half the
  // points inside dips, which inflates a single-pass MAD until nothing is
  // detectable. re-estimating on the points above threshold converges on
  // the true top level; flat spectra clip nothing and are unaffected
  double baseline0 = median_of(s);
  double noise = 1e-9;
  std::vector<double> top = s;
  for (int round = 0; round < 3; ++round) {
    std::vector<double> dev(top.size());
    for (std::size_t i = 0; i < top.size(); ++i)
      dev[i] = std::abs(top[i] - baseline0);
    noise = std::max(1.4826 * median_of(dev), 1e-9);
    std::vector<double> next;
    next.reserve(top.size());
    for (double v : s)
      if (v >= baseline0 - 3.0 * noise) next.push_back(v);
    if (next.size() < std::max<std::size_t>(5, n / 4) ||
        next.size() == top.size()) {
      break;
    }
    top = std::move(next);
    baseline0 = median_of(top);
  }
  const double threshold = baseline0 - 3.0 * noise;

  std::vector<double> gaps(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = x[i + 1] - x[i];
  const double step = median_of(gaps);

  DipReport report;
  report.model = model;

  const auto seeds = find_seeds(s, threshold, baseline0, max_dips);
  if (seeds.empty()) {
    double ss = 0.0;
    for (double v : s) ss += (v - baseline0) * (v - baseline0);
    report.fit_residual = std::sqrt(ss / static_cast<double>(n));
    report.converged = true;
    return report;
  }

  FitWork fw{x, s, model, step, x.back() - x.front(), {}, 0.0, 0.0};
  for (const auto& seed : seeds) {
    fw.comps.push_back({x[seed.idx],
                        half_depth_span(x, s, seed.idx, baseline0, step),
                        seed.depth});
  }

  double prev = solve_linear(fw);
  for (int cycle = 1; cycle <= 500; ++cycle) {
    for (std::size_t j = 0; j < fw.comps.size(); ++j) polish_dip(fw, j);
    report.cycles = cycle;
    if (prev - fw.rms < 1e-6) {
      report.converged = true;
      break;
    }
    prev = fw.rms;
  }

  // drop components the data does not support: inverted or insignificant
  // depths, widths collapsed under the grid, centers pushed off the range
  std::vector<Component> kept;
  for (const auto& cp : fw.comps) {
    const bool keep = cp.depth > std::max(3.0 * noise, 1e-9) &&
                      cp.width > 0.25 * step && cp.center >= x.front() &&
                      cp.center <= x.back();
    if (keep) kept.push_back(cp);
  }
  if (kept.size() != fw.comps.size()) {
    fw.comps = std::move(kept);
    if (fw.comps.empty()) {
      double ss = 0.0;
      for (double v : s) ss += (v - baseline0) * (v - baseline0);
      report.fit_residual = std::sqrt(ss / static_cast<double>(n));
      return report;
    }
    solve_linear(fw);
  }
  std::sort(fw.comps.begin(), fw.comps.end(),
            [](const Component& a, const Component& b) {
              return a.center < b.center;
            });

  report.fit_residual = fw.rms;
  for (const auto& cp : fw.comps) {
    Dip dip;
    dip.center_x = cp.center;
    dip.width_x = cp.width;
    dip.depth = std::min(cp.depth, 1.0);
    assign_coupling(dip, spec.plan, spec.larmor_khz, step);
    report.dips.push_back(dip);
  }
  report.validate();
  return report;
}

std::vector<NoiseWidthPoint> linewidth_vs_noise(
    const SpinSystemSpec& sys, const SweepPlan& plan,
    const std::vector<double>& sigma_grid, int shots, std::uint64_t seed,
    int n_threads) {
  if (sigma_grid.size() < 2) {
    throw ConfigError("linewidth study needs at least 2 noise levels, got " +
                      std::to_string(sigma_grid.size()));
  }
  std::vector<NoiseWidthPoint> rows;
  rows.reserve(sigma_grid.size());
  for (double sigma : sigma_grid) {
    AmplitudeNoise nz;
    nz.relative_std = sigma;
    nz.shots = sigma > 0.0 ? shots : 1;
    nz.seed = seed;
    const Spectrum spectrum = run_sweep(sys, plan, nz, n_threads);
    const DipReport rep = fit_dips(spectrum);
    NoiseWidthPoint row;
    row.sigma = sigma;
    if (!rep.dips.empty()) {
      // area, not depth: noise spikes inside a broadened line can out-dip
      // the line itself, but never out-weigh it
      const auto& dom = *std::max_element(
          rep.dips.begin(), rep.dips.end(), [](const Dip& a, const Dip& b) {
            return a.depth * a.width_khz < b.depth * b.width_khz;
          });
      row.width_khz = dom.width_khz;
      row.ok = rep.converged;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nvdr
