#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsat/spectrum.hpp"

namespace dsat::search {

struct Probe {
    double c = 0.0;
    double delta = 0.0;
    ode::Termination termination = ode::Termination::MaxRounds;
    bool success = false;
    std::uint64_t rounds = 0;
    double max_rho = 0.0;
};

struct ThresholdResult {
    SelectionRule rule = SelectionRule::MaxDiffMaxSum;
    PolarityRule polarity = PolarityRule::SatisfyMajority;
    double c_star = 0.0;  // midpoint of the final bracket
    double c_low = 0.0;   // succeeded at cfg.delta
    double c_high = 0.0;  // failed at cfg.delta
    double tol = 0.0;
    ode::OdeConfig cfg;
    std::vector<Probe> probes;  // in the order they were run
};

/// lo does not succeed, or hi does not fail.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A success above a failure at the same step size.
class MonotonicityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs one probe. The default integrates the trajectory.
using ProbeFn = std::function<Probe(double c, const ode::OdeConfig& cfg)>;

struct BisectOptions {
    /// Step size for the coarse bisection. When it is larger than cfg.delta
    /// the search bisects at coarse_delta first, then re-establishes and
    /// narrows the bracket at cfg.delta. Zero disables the coarse phase.
    double coarse_delta = 1e-5;
    /// Keep each probe's trajectory CSV under this directory.
    std::optional<std::filesystem::path> run_dir;
    /// Replaces the trajectory probe (run_dir is then ignored).
    ProbeFn probe;
};

bool trajectory_succeeds(double c, const ode::OdeConfig& cfg, SelectionRule rule, PolarityRule polarity);

/// 64-bit digest of every OdeConfig field, used to key retained probe files.
std::uint64_t config_hash(const ode::OdeConfig& cfg);

/// Bisection on density until c_high - c_low <= tol. Every probe is logged.
/// Throws BracketError on an invalid bracket, MonotonicityError when the
/// probes contradict monotonicity.
ThresholdResult bisect_threshold(SelectionRule rule, PolarityRule polarity, const ode::OdeConfig& cfg, double lo,
                                 double hi, double tol, const BisectOptions& opts = {});

/// bisect_threshold for each of the four rules with the same settings,
/// probes fanned out over `threads` OpenMP threads (0: runtime default).
/// Sorted by c_star, highest first.
std::vector<ThresholdResult> compare_rules(PolarityRule polarity, const ode::OdeConfig& cfg, double lo, double hi,
                                           double tol, const BisectOptions& opts = {}, int threads = 0);

struct ScanResult {
    std::vector<Probe> probes;             // ascending c
    std::vector<std::pair<double, double>> violations;  // (failed c, succeeded c'), c < c'
};

/// Probes every density of `grid` and reports pairs that break monotonicity.
ScanResult monotonicity_scan(SelectionRule rule, PolarityRule polarity, const ode::OdeConfig& cfg,
                             std::vector<double> grid, int threads = 0);

nlohmann::json to_json(const ThresholdResult& r);
std::string format_table(const std::vector<ThresholdResult>& results);

}  // namespace dsat::search
