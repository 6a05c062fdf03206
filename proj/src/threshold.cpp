#include "dsat/threshold.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dsat/io.hpp"
#include "dsat/parallel.hpp"
#include "dsat/rng.hpp"

namespace dsat::search {

namespace {

std::uint64_t fold(std::uint64_t h, std::uint64_t x) { return mix64(h ^ mix64(x)); }
std::uint64_t fold(std::uint64_t h, double x) { return fold(h, std::bit_cast<std::uint64_t>(x)); }

class Prober {
public:
    Prober(SelectionRule rule, PolarityRule polarity, const BisectOptions& opts)
        : rule_{rule}, polarity_{polarity}, opts_{opts} {}

    bool run(double c, const ode::OdeConfig& cfg, std::vector<Probe>& log) {
        Probe p;
        if (opts_.probe) {
            p = opts_.probe(c, cfg);
        } else {
            const ode::Trajectory traj = ode::run_trajectory(c, cfg, rule_, polarity_);
            p = {c, cfg.delta, traj.termination, traj.termination == ode::Termination::EndgameReached, traj.rounds,
                 traj.max_rho};
            if (opts_.run_dir) retain(traj, cfg);
        }
        for (const Probe& q : log) {
            if (q.delta != p.delta || q.success == p.success) continue;
            const Probe& ok = p.success ? p : q;
            const Probe& bad = p.success ? q : p;
            if (ok.c > bad.c) {
                char buf[200];
                std::snprintf(buf, sizeof buf, "%s: success at c=%.6g but failure (%s) at c=%.6g, delta=%g",
                              std::string(to_string(rule_)).c_str(), ok.c,
                              std::string(ode::to_string(bad.termination)).c_str(), bad.c, p.delta);
                log.push_back(p);
                throw MonotonicityError(buf);
            }
        }
        log.push_back(p);
        return p.success;
    }

private:
    void retain(const ode::Trajectory& traj, const ode::OdeConfig& cfg) const {
        char name[160];
        std::snprintf(name, sizeof name, "%s_c%.6f_%016llx.csv", std::string(to_string(rule_)).c_str(),
                      traj.density, static_cast<unsigned long long>(config_hash(cfg)));
        std::filesystem::create_directories(*opts_.run_dir);
        io::write_file_atomic(*opts_.run_dir / name, io::trajectory_csv(traj));
    }

    SelectionRule rule_;
    PolarityRule polarity_;
    const BisectOptions& opts_;
};

void bisect(Prober& prober, const ode::OdeConfig& cfg, double& lo, double& hi, double tol, std::vector<Probe>& log) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (prober.run(mid, cfg, log) ? lo : hi) = mid;
    }
}

}  // namespace

bool trajectory_succeeds(double c, const ode::OdeConfig& cfg, SelectionRule rule, PolarityRule polarity) {
    return ode::run_trajectory(c, cfg, rule, polarity).termination == ode::Termination::EndgameReached;
}

std::uint64_t config_hash(const ode::OdeConfig& cfg) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    h = fold(h, static_cast<std::uint64_t>(cfg.h));
    for (const double x : {cfg.delta, cfg.clamp_eps, cfg.rho_guard, cfg.end_mass, cfg.mass_floor, cfg.balance_tol0,
                           cfg.balance_kappa, cfg.max_round_fraction})
        h = fold(h, x);
    h = fold(h, cfg.max_rounds);
    h = fold(h, static_cast<std::uint64_t>(cfg.pure));
    h = fold(h, static_cast<std::uint64_t>(cfg.fill_rounds));
    return h;
}

ThresholdResult bisect_threshold(SelectionRule rule, PolarityRule polarity, const ode::OdeConfig& cfg, double lo,
                                 double hi, double tol, const BisectOptions& opts) {
    cfg.validate();
    if (!(lo < hi)) throw std::invalid_argument("bisect_threshold: need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("bisect_threshold: tol must be positive");

    ThresholdResult r;
    r.rule = rule;
    r.polarity = polarity;
    r.tol = tol;
    r.cfg = cfg;
    Prober prober(rule, polarity, opts);

    ode::OdeConfig probe_cfg = cfg;
    const bool two_tier = opts.coarse_delta > cfg.delta;
    if (two_tier) probe_cfg.delta = opts.coarse_delta;

    const bool lo_ok = prober.run(lo, probe_cfg, r.probes);
    const bool hi_ok = prober.run(hi, probe_cfg, r.probes);
    if (!lo_ok || hi_ok) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "bisect_threshold: invalid bracket [%g, %g] (%s at lo, %s at hi)", lo, hi,
                      lo_ok ? "success" : "failure", hi_ok ? "success" : "failure");
        throw BracketError(buf);
    }
    bisect(prober, probe_cfg, lo, hi, tol, r.probes);

    if (two_tier) {
        // Re-establish the bracket at the fine step size, widening by tol
        // until it holds, then narrow it again.
        const double coarse_lo = lo, coarse_hi = hi;
        bool hi_known = false;
        while (!prober.run(lo, cfg, r.probes)) {
            hi = lo;
            hi_known = true;
            lo -= tol;
            if (lo < coarse_lo - 20 * tol) throw BracketError("bisect_threshold: fine-step bracket not found below");
        }
        if (!hi_known) {
            while (prober.run(hi, cfg, r.probes)) {
                lo = hi;
                hi += tol;
                if (hi > coarse_hi + 20 * tol)
                    throw BracketError("bisect_threshold: fine-step bracket not found above");
            }
        }
        bisect(prober, cfg, lo, hi, tol, r.probes);
    }
    r.c_low = lo;
    r.c_high = hi;
    r.c_star = 0.5 * (lo + hi);
    return r;
}

std::vector<ThresholdResult> compare_rules(PolarityRule polarity, const ode::OdeConfig& cfg, double lo, double hi,
                                           double tol, const BisectOptions& opts, int threads) {
    constexpr int kRules = static_cast<int>(std::size(kAllRules));
    std::vector<std::optional<ThresholdResult>> slots(kRules);
    std::vector<std::string> errors(kRules);
    if (threads <= 0) threads = omp_default_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (int k = 0; k < kRules; ++k) {
        try {
            slots[k] = bisect_threshold(kAllRules[k], polarity, cfg, lo, hi, tol, opts);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }
    std::vector<ThresholdResult> out;
    for (int k = 0; k < kRules; ++k) {
        if (!errors[k].empty()) throw std::runtime_error(errors[k]);
        out.push_back(std::move(*slots[k]));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ThresholdResult& a, const ThresholdResult& b) { return a.c_star > b.c_star; });
    return out;
}

ScanResult monotonicity_scan(SelectionRule rule, PolarityRule polarity, const ode::OdeConfig& cfg,
                             std::vector<double> grid, int threads) {
    std::sort(grid.begin(), grid.end());
    ScanResult out;
    out.probes.resize(grid.size());
    if (threads <= 0) threads = omp_default_threads();
    const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const ode::Trajectory traj = ode::run_trajectory(grid[k], cfg, rule, polarity);
        out.probes[k] = {grid[k], cfg.delta, traj.termination,
                         traj.termination == ode::Termination::EndgameReached, traj.rounds, traj.max_rho};
    }
    for (std::size_t a = 0; a < out.probes.size(); ++a)
        for (std::size_t b = a + 1; b < out.probes.size(); ++b)
            if (!out.probes[a].success && out.probes[b].success)
                out.violations.emplace_back(out.probes[a].c, out.probes[b].c);
    return out;
}

nlohmann::json to_json(const ThresholdResult& r) {
    nlohmann::json probes = nlohmann::json::array();
    for (const Probe& p : r.probes)
        probes.push_back({{"c", p.c},
                          {"delta", p.delta},
                          {"termination", ode::to_string(p.termination)},
                          {"success", p.success},
                          {"rounds", p.rounds},
                          {"max_rho", p.max_rho}});
    return {{"rule", to_string(r.rule)},
            {"polarity", to_string(r.polarity)},
            {"c_star", r.c_star},
            {"bracket", {r.c_low, r.c_high}},
            {"tolerance", r.tol},
            {"config", io::config_to_json(r.cfg)},
            {"probes", std::move(probes)}};
}

std::string format_table(const std::vector<ThresholdResult>& results) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-9s %8s %10s %10s %7s\n", "rule", "polarity", "c_star", "c_low",
                  "c_high", "probes");
    os << line;
    for (const ThresholdResult& r : results) {
        std::snprintf(line, sizeof line, "%-16s %-9s %8.4f %10.5f %10.5f %7zu\n", std::string(to_string(r.rule)).c_str(),
                      std::string(to_string(r.polarity)).c_str(), r.c_star, r.c_low, r.c_high, r.probes.size());
        os << line;
    }
    return os.str();
}

}  // namespace dsat::search
