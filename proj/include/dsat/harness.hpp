#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsat/greedy.hpp"
#include "dsat/spectrum.hpp"

namespace dsat::harness {

/// Seed of trial `trial` at density `c`: base ^ H(c, trial), where H folds
/// the IEEE-754 bits of c and the trial index through mix64.
std::uint64_t trial_seed(std::uint64_t base, double c, std::uint64_t trial);

struct SweepConfig {
    std::vector<double> densities;
    Var n = 10'000;
    std::size_t trials = 100;
    std::uint64_t base_seed = 1;
    SolverConfig solver;  // seed field is overwritten per trial
    int threads = 0;      // 0: OpenMP default
};

struct SweepRecord {
    double c = 0.0;
    Var n = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    double mean_free_moves = 0.0;
    double mean_forced_moves = 0.0;
    double wall_seconds = 0.0;
};

/// Per-variable greedy runs on fresh random formulas; rows sorted by c. Each
/// trial is a pure function of (base_seed, c, trial index).
std::vector<SweepRecord> mc_sweep(const SweepConfig& cfg);

/// Same sweep with every trial run in order on the calling thread.
std::vector<SweepRecord> mc_sweep_serial(const SweepConfig& cfg);

/// CSV with header c,n,trials,successes,success_rate,mean_free_moves,
/// mean_forced_moves; wall time (nondeterministic) only when asked for.
std::string sweep_csv(const std::vector<SweepRecord>& rows, bool with_wall_time = false);

struct XvalConfig {
    double c = 3.52;
    Var n = 100'000;
    std::vector<double> checkpoints{0.1};
    std::size_t trials = 5;
    std::uint64_t base_seed = 1;
    SolverConfig solver;
    ode::OdeConfig ode;
    int threads = 0;
};

inline constexpr Var kXvalRecommendedN = 10'000;

struct XvalPoint {
    double t = 0.0;
    std::size_t trials_reached = 0;  // trials that got to t without a conflict
    double mean_linf = 0.0;
    double max_linf = 0.0;
    double mean_l1 = 0.0;
};

struct XvalReport {
    std::vector<XvalPoint> points;
    bool small_n = false;   // n below kXvalRecommendedN
    double tolerance = 0.0; // suggested L-infinity tolerance for this n
};

/// The ODE spectrum at time t, interpolated linearly between the rounds that
/// straddle t. Throws std::invalid_argument when the trajectory ends first.
std::vector<ode::SpectrumState> ode_spectra_at(double c, const ode::OdeConfig& cfg, SelectionRule rule,
                                               PolarityRule polarity, const std::vector<double>& times);

/// Normalized degree spectrum of the unset variables, folded at h.
ode::SpectrumState empirical_spectrum(const Formula& f, int h);

/// Cell-batched greedy runs (batch = max(1, floor(delta * n))) against the ODE:
/// L-infinity and L1 distance between spectra at each checkpoint.
XvalReport cross_validate(const XvalConfig& cfg);

std::string xval_csv(const XvalConfig& cfg, const XvalReport& report);

}  // namespace dsat::harness
