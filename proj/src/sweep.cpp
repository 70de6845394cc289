#include "nvdr/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "nvdr/errors.hpp"
#include "nvdr/propagator.hpp"

namespace nvdr {

namespace {

// splitmix64 finalizer; decorrelates consecutive inputs
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point,
                          std::uint64_t shot) {
  return mix64(mix64(mix64(base) + point) + shot);
}

bool frequency_swept(SweptParameter p) { return p != SweptParameter::Tau; }

double damp_toward_half(double signal, double rate_khz, double duration_us) {
  const double lambda = std::exp(-2.0 * M_PI * rate_khz * kKhzToMhz * duration_us);
  return 0.5 + (signal - 0.5) * lambda;
}

// one trajectory on one (sub)system
double simulate_point(const SpinSystemSpec& sys, const SweepPlan& plan,
                      double x, double scale) {
  const ControlProgram program = compile_plan_point(sys, plan, x, scale);
  const DensityState in =
      make_initial_state(sys, plan.fixed.electron, plan.fixed.nuclear);
  const DensityState out = propagate_to_end(in, program);
  double sig = measure_dressed_population(out, plan.fixed.readout);
  if (plan.fixed.dephasing_khz > 0.0)
    sig = damp_toward_half(sig, plan.fixed.dephasing_khz,
                           program.total_duration_us);
  return sig;
}

double composed_signal(const SpinSystemSpec& sys, const SweepPlan& plan,
                       double x, double scale) {
  if (plan.composition == Composition::Joint || sys.n_nuclei() <= 1)
    return simulate_point(sys, plan, x, scale);
  if (plan.protocol == Protocol::XyN) {
    // non-interacting nuclei dephase the electron independently, so the
    // coherence factors multiply
    double m = 1.0;
    for (int j = 0; j < sys.n_nuclei(); ++j)
      m *= 2.0 * simulate_point(sys.single_nucleus(j), plan, x, scale) - 1.0;
    return 0.5 * (1.0 + m);
  }
  // dressed protocols: leading-order independent flip-flops, survival
  // probabilities multiply
  double p = 1.0;
  for (int j = 0; j < sys.n_nuclei(); ++j)
    p *= simulate_point(sys.single_nucleus(j), plan, x, scale);
  return p;
}

[[noreturn]] void rethrow_with_point(const SweepPlan& plan, std::size_t index,
                                     double x, const std::exception& e,
                                     bool config) {
  std::ostringstream msg;
  msg << e.what() << " [at grid point " << swept_parameter_tag(plan.swept)
      << " = " << x << ", index " << index << "]";
  if (config) throw ConfigError(msg.str());
  throw NumericError(msg.str());
}

template <typename PointFn>
void for_each_point_parallel(std::size_t n_points, int n_threads, PointFn fn) {
  const int workers = std::max(1, n_threads);
  if (workers == 1 || n_points <= 1) {
    for (std::size_t i = 0; i < n_points; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  const std::size_t cap = std::min<std::size_t>(workers, n_points);
  pool.reserve(cap);
  for (std::size_t w = 0; w < cap; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_points) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

const char* swept_parameter_tag(SweptParameter p) {
  switch (p) {
    case SweptParameter::Nu: return "nu";
    case SweptParameter::Omega: return "omega";
    case SweptParameter::Tau: return "tau";
  }
  return "?";
}

std::optional<SweptParameter> parse_swept_parameter(const std::string& tag) {
  if (tag == "nu") return SweptParameter::Nu;
  if (tag == "omega") return SweptParameter::Omega;
  if (tag == "tau") return SweptParameter::Tau;
  return std::nullopt;
}

const char* composition_tag(Composition c) {
  return c == Composition::Joint ? "joint" : "independent";
}

std::optional<Composition> parse_composition(const std::string& tag) {
  if (tag == "joint") return Composition::Joint;
  if (tag == "independent") return Composition::IndependentSpins;
  return std::nullopt;
}

void SweepPlan::validate() const {
  const bool ok =
      (protocol == Protocol::PmHhdr &&
       (swept == SweptParameter::Nu || swept == SweptParameter::Omega)) ||
      (protocol == Protocol::Hhdr && swept == SweptParameter::Omega) ||
      (protocol == Protocol::XyN && swept == SweptParameter::Tau);
  if (!ok) {
    std::ostringstream msg;
    msg << "protocol " << protocol_tag(protocol) << " cannot sweep parameter "
        << swept_parameter_tag(swept);
    throw ConfigError(msg.str());
  }

  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ConfigError("sweep grid must be strictly increasing");

  if (enforce_floor && frequency_swept(swept) && grid.size() >= 2) {
    if (!(resolution_floor_khz >= 0.0))
      throw ConfigError("resolution_floor_khz must be non-negative");
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double step = grid[i] - grid[i - 1];
      if (step < resolution_floor_khz * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "grid step " << step << " kHz is below the "
            << resolution_floor_khz << " kHz resolution floor";
        throw ConfigError(msg.str());
      }
    }
  }

  if (protocol == Protocol::PmHhdr) {
    if (swept == SweptParameter::Nu && !(fixed.omega_prime_khz > 0.0))
      throw ConfigError("pm nu sweep needs fixed omega_prime_khz > 0");
    if (swept == SweptParameter::Omega && !(fixed.nu_khz > 0.0))
      throw ConfigError("pm omega sweep needs fixed nu_khz > 0");
  }
  if (protocol != Protocol::XyN && !(fixed.t_f_us > 0.0))
    throw ConfigError("dressed sweep needs fixed t_f_us > 0");
  if (protocol == Protocol::XyN) {
    XyParams probe;
    probe.n_pulses = fixed.n_pulses;
    probe.tau_us = grid.empty() ? 1.0 : grid.front();
    probe.pulse = fixed.pulse;
    probe.omega_pi_khz = fixed.omega_pi_khz;
    probe.validate();
    if (fixed.n_pulses == 0)
      throw ConfigError("xy sweep needs n_pulses > 0");
  }
  if (fixed.dephasing_khz < 0.0)
    throw ConfigError("dephasing_khz must be non-negative");
}

void AmplitudeNoise::validate() const {
  if (!(relative_std >= 0.0))
    throw ConfigError("noise relative_std must be non-negative");
  if (relative_std > 0.3)
    throw ConfigError("noise relative_std above 0.3 is not supported");
  if (shots < 1) throw ConfigError("noise shots must be >= 1");
}

void Spectrum::validate() const {
  plan.validate();
  if (points.size() != plan.grid.size())
    throw NumericError("spectrum holds a different point count than its grid");
  constexpr double eps = 1e-6;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].x != plan.grid[i])
      throw NumericError("spectrum x values diverge from the sweep grid");
    if (!(points[i].signal >= -eps && points[i].signal <= 1.0 + eps)) {
      std::ostringstream msg;
      msg << "signal " << points[i].signal << " outside [0,1] at "
          << swept_parameter_tag(plan.swept) << " = " << points[i].x;
      throw NumericError(msg.str());
    }
  }
}

ControlProgram compile_plan_point(const SpinSystemSpec& sys,
                                  const SweepPlan& plan, double x,
                                  double amplitude_scale) {
  // a deeply negative noise excursion would flip the drive sign; floor it
  const double scale = std::max(amplitude_scale, 1e-6);
  switch (plan.protocol) {
    case Protocol::Hhdr:
      return compile_hhdr(sys, x * scale, plan.fixed.t_f_us);
    case Protocol::PmHhdr: {
      PmParams pm;
      pm.omega_prime_khz =
          (plan.swept == SweptParameter::Omega ? x : plan.fixed.omega_prime_khz) *
          scale;
      pm.nu_khz = plan.swept == SweptParameter::Nu ? x : plan.fixed.nu_khz;
      pm.t_f_us = plan.fixed.t_f_us;
      return compile_pm_hhdr(sys, pm);
    }
    case Protocol::XyN: {
      XyParams xy;
      xy.n_pulses = plan.fixed.n_pulses;
      xy.tau_us = x;
      xy.pulse = plan.fixed.pulse;
      xy.omega_pi_khz = plan.fixed.omega_pi_khz * scale;
      return compile_xyn(sys, xy);
    }
  }
  throw ConfigError("unknown protocol in sweep plan");
}

Spectrum run_sweep(const SpinSystemSpec& sys, const SweepPlan& plan,
                   const AmplitudeNoise& noise, int n_threads) {
  sys.validate();
  plan.validate();
  noise.validate();
  // independent composition never builds the joint space, so only the joint
  // path is dimension-capped
  if (plan.composition == Composition::Joint) sys.validate_joint();

  Spectrum spec;
  spec.plan = plan;
  spec.shots = noise.shots;
  spec.seed = noise.seed;
  spec.larmor_khz = sys.larmor_khz();
  spec.points.resize(plan.grid.size());

  for_each_point_parallel(
      plan.grid.size(), n_threads, [&](std::size_t i) {
        const double x = plan.grid[i];
        double accum = 0.0;
        try {
          for (int s = 0; s < noise.shots; ++s) {
            double scale = 1.0;
            if (noise.relative_std > 0.0) {
              std::mt19937_64 rng(derive_seed(noise.seed, i, s));
              std::normal_distribution<double> g(0.0, noise.relative_std);
              scale = 1.0 + g(rng);
            }
            accum += composed_signal(sys, plan, x, scale);
          }
        } catch (const ConfigError& e) {
          rethrow_with_point(plan, i, x, e, true);
        } catch (const NumericError& e) {
          rethrow_with_point(plan, i, x, e, false);
        }
        spec.points[i] = {x, accum / noise.shots};
      });

  spec.validate();
  return spec;
}

Spectrum run_sweep_lab_oracle(const SpinSystemSpec& sys, const SweepPlan& plan,
                              const LabOracleOptions& opt, int n_threads) {
  sys.validate_joint();  // the oracle always integrates the joint space
  plan.validate();

  Spectrum spec;
  spec.plan = plan;
  spec.shots = 1;
  spec.seed = 0;
  spec.larmor_khz = sys.larmor_khz();
  spec.points.resize(plan.grid.size());

  for_each_point_parallel(
      plan.grid.size(), n_threads, [&](std::size_t i) {
        const double x = plan.grid[i];
        try {
          const ControlProgram program = compile_plan_point(sys, plan, x, 1.0);
          const DensityState in =
              make_initial_state(sys, plan.fixed.electron, plan.fixed.nuclear);
          const DensityState out = lab_frame_oracle(sys, program, in, opt);
          double sig = measure_dressed_population(out, plan.fixed.readout);
          if (plan.fixed.dephasing_khz > 0.0)
            sig = damp_toward_half(sig, plan.fixed.dephasing_khz,
                                   program.total_duration_us);
          spec.points[i] = {x, sig};
        } catch (const ConfigError& e) {
          rethrow_with_point(plan, i, x, e, true);
        } catch (const NumericError& e) {
          rethrow_with_point(plan, i, x, e, false);
        }
      });

  spec.validate();
  return spec;
}

}  // namespace nvdr
