#include "dsat/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "dsat/generator.hpp"
#include "dsat/io.hpp"
#include "dsat/parallel.hpp"
#include "dsat/rng.hpp"

namespace dsat::harness {

std::uint64_t trial_seed(std::uint64_t base, double c, std::uint64_t trial) {
    return base ^ mix64(mix64(std::bit_cast<std::uint64_t>(c)) ^ trial);
}

namespace {

struct TrialResult {
    bool success = false;
    std::size_t free_moves = 0;
    std::size_t forced_moves = 0;
};

void check_sweep(const SweepConfig& cfg) {
    if (cfg.trials == 0) throw std::invalid_argument("mc_sweep: trials must be at least 1");
    if (cfg.n < 3) throw std::invalid_argument("mc_sweep: n must be at least 3");
    for (const double c : cfg.densities)
        if (!(c > 0.0)) throw std::invalid_argument("mc_sweep: densities must be positive");
}

TrialResult run_trial(const SweepConfig& cfg, double c, std::size_t trial) {
    const std::uint64_t seed = trial_seed(cfg.base_seed, c, trial);
    const Cnf cnf = generate_random(cfg.n, c, seed);
    SolverConfig solver = cfg.solver;
    solver.seed = mix64(seed);
    const RunOutcome out = run_algorithm_a(cnf, solver);
    return {out.status == RunStatus::Success, out.free_moves, out.forced_moves};
}

std::vector<SweepRecord> sweep(const SweepConfig& cfg, bool parallel) {
    check_sweep(cfg);
    std::vector<double> densities = cfg.densities;
    std::sort(densities.begin(), densities.end());
    const int threads = cfg.threads > 0 ? cfg.threads : omp_default_threads();

    std::vector<SweepRecord> rows;
    for (const double c : densities) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<TrialResult> results(cfg.trials);
        const auto count = static_cast<std::ptrdiff_t>(cfg.trials);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1) if (parallel)
        for (std::ptrdiff_t k = 0; k < count; ++k) results[k] = run_trial(cfg, c, static_cast<std::size_t>(k));

        SweepRecord r;
        r.c = c;
        r.n = cfg.n;
        r.trials = cfg.trials;
        double free_sum = 0.0, forced_sum = 0.0;
        for (const TrialResult& t : results) {
            r.successes += t.success;
            free_sum += double(t.free_moves);
            forced_sum += double(t.forced_moves);
        }
        r.success_rate = double(r.successes) / double(r.trials);
        r.mean_free_moves = free_sum / double(r.trials);
        r.mean_forced_moves = forced_sum / double(r.trials);
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

std::vector<SweepRecord> mc_sweep(const SweepConfig& cfg) { return sweep(cfg, true); }
std::vector<SweepRecord> mc_sweep_serial(const SweepConfig& cfg) { return sweep(cfg, false); }

std::string sweep_csv(const std::vector<SweepRecord>& rows, bool with_wall_time) {
    std::ostringstream os;
    os << "c,n,trials,successes,success_rate,mean_free_moves,mean_forced_moves";
    if (with_wall_time) os << ",wall_seconds";
    os << '\n';
    for (const SweepRecord& r : rows) {
        os << io::fmt(r.c) << ',' << r.n << ',' << r.trials << ',' << r.successes << ',' << io::fmt(r.success_rate)
           << ',' << io::fmt(r.mean_free_moves) << ',' << io::fmt(r.mean_forced_moves);
        if (with_wall_time) os << ',' << io::fmt(r.wall_seconds);
        os << '\n';
    }
    return os.str();
}

std::vector<ode::SpectrumState> ode_spectra_at(double c, const ode::OdeConfig& cfg, SelectionRule rule,
                                               PolarityRule polarity, const std::vector<double>& times) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0)) throw std::invalid_argument("checkpoint times must be non-negative");
        order.emplace_back(times[k], k);
    }
    std::sort(order.begin(), order.end());

    std::vector<std::optional<ode::SpectrumState>> found(times.size());
    std::size_t next = 0;
    ode::SpectrumState prev = ode::init_spectrum(c, cfg.h);
    while (next < order.size() && order[next].first <= 0.0) found[order[next++].second] = prev;

    auto interpolate = [](const ode::SpectrumState& a, const ode::SpectrumState& b, double t) {
        const double w = b.t > a.t ? (t - a.t) / (b.t - a.t) : 1.0;
        ode::SpectrumState s = a;
        for (std::size_t i = 0; i < s.cells().size(); ++i) s.cells()[i] = a.cells()[i] + w * (b.cells()[i] - a.cells()[i]);
        s.m2 = a.m2 + w * (b.m2 - a.m2);
        s.m3 = a.m3 + w * (b.m3 - a.m3);
        s.m1 = 0.0;
        s.t = t;
        return s;
    };
    ode::OdeConfig quiet = cfg;
    quiet.sample_stride = 0;
    if (next < order.size()) {
        ode::run_trajectory(c, quiet, rule, polarity, ode::default_endgame,
                            [&](const ode::SpectrumState& s, const ode::RoundReport&, std::uint64_t) {
                                while (next < order.size() && s.t >= order[next].first) {
                                    found[order[next].second] = interpolate(prev, s, order[next].first);
                                    ++next;
                                }
                                if (next < order.size()) prev = s;
                            });
    }
    std::vector<ode::SpectrumState> out;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!found[k]) throw std::invalid_argument("checkpoint t=" + io::fmt(times[k]) + " lies beyond the trajectory end");
        out.push_back(std::move(*found[k]));
    }
    return out;
}

ode::SpectrumState empirical_spectrum(const Formula& f, int h) {
    ode::SpectrumState s(h);
    const double scale = 1.0 / double(f.num_vars());
    f.degree_table().for_each_nonempty([&](Cell cell, std::size_t count) {
        const int i = std::min<int>(static_cast<int>(cell.pos), h);
        const int j = std::min<int>(static_cast<int>(cell.neg), h);
        s.n(i, j) += double(count) * scale;
    });
    s.m2 = double(f.live_clauses_of_length(2)) * scale;
    s.m3 = double(f.live_clauses_of_length(3)) * scale;
    s.m1 = double(f.live_clauses_of_length(1)) * scale;
    s.t = double(f.num_assigned()) * scale;
    return s;
}

namespace {

std::pair<double, double> distances(const ode::SpectrumState& a, const ode::SpectrumState& b) {
    double linf = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < a.cells().size(); ++i) {
        const double d = std::abs(a.cells()[i] - b.cells()[i]);
        linf = std::max(linf, d);
        l1 += d;
    }
    return {linf, l1};
}

}  // namespace

XvalReport cross_validate(const XvalConfig& cfg) {
    if (cfg.trials == 0) throw std::invalid_argument("xval: trials must be at least 1");
    if (cfg.n < 3) throw std::invalid_argument("xval: n must be at least 3");
    if (cfg.checkpoints.empty()) throw std::invalid_argument("xval: no checkpoints");
    cfg.ode.validate();

    XvalReport report;
    report.small_n = cfg.n < kXvalRecommendedN;
    report.tolerance = 0.01 * std::max(1.0, std::sqrt(double(kXvalRecommendedN) / double(cfg.n)));

    std::vector<double> times = cfg.checkpoints;
    std::sort(times.begin(), times.end());
    const std::vector<ode::SpectrumState> reference =
        ode_spectra_at(cfg.c, cfg.ode, cfg.solver.selection, cfg.solver.polarity, times);

    const std::size_t batch = std::max<std::size_t>(1, static_cast<std::size_t>(cfg.ode.delta * double(cfg.n)));
    const std::size_t points = times.size();
    // linf/l1 per (trial, checkpoint); NaN marks a checkpoint not reached.
    std::vector<double> linf(cfg.trials * points, std::nan("")), l1(cfg.trials * points, std::nan(""));
    const int threads = cfg.threads > 0 ? cfg.threads : omp_default_threads();
    const auto count = static_cast<std::ptrdiff_t>(cfg.trials);

#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const std::uint64_t seed = trial_seed(cfg.base_seed, cfg.c, static_cast<std::uint64_t>(k));
        Formula f(generate_random(cfg.n, cfg.c, seed));
        SolverConfig solver = cfg.solver;
        solver.seed = mix64(seed);
        std::size_t next = 0;
        auto snapshot = [&](const Formula& g) {
            const double t = double(g.num_assigned()) / double(cfg.n);
            while (next < points && t >= times[next]) {
                const auto [a, b] = distances(empirical_spectrum(g, cfg.ode.h), reference[next]);
                linf[static_cast<std::size_t>(k) * points + next] = a;
                l1[static_cast<std::size_t>(k) * points + next] = b;
                ++next;
            }
            return next < points;
        };
        if (snapshot(f)) run_cell_batched(f, solver, batch, snapshot);
    }

    for (std::size_t p = 0; p < points; ++p) {
        XvalPoint pt;
        pt.t = times[p];
        double sum_inf = 0.0, sum_l1 = 0.0;
        for (std::size_t k = 0; k < cfg.trials; ++k) {
            const double a = linf[k * points + p];
            if (std::isnan(a)) continue;
            ++pt.trials_reached;
            sum_inf += a;
            sum_l1 += l1[k * points + p];
            pt.max_linf = std::max(pt.max_linf, a);
        }
        if (pt.trials_reached > 0) {
            pt.mean_linf = sum_inf / double(pt.trials_reached);
            pt.mean_l1 = sum_l1 / double(pt.trials_reached);
        } else {
            pt.mean_linf = pt.mean_l1 = pt.max_linf = std::nan("");
        }
        report.points.push_back(pt);
    }
    return report;
}

std::string xval_csv(const XvalConfig& cfg, const XvalReport& report) {
    std::ostringstream os;
    os << "c,n,t,trials,trials_reached,mean_linf,max_linf,mean_l1,tolerance\n";
    for (const XvalPoint& p : report.points)
        os << io::fmt(cfg.c) << ',' << cfg.n << ',' << io::fmt(p.t) << ',' << cfg.trials << ',' << p.trials_reached
           << ',' << io::fmt(p.mean_linf) << ',' << io::fmt(p.max_linf) << ',' << io::fmt(p.mean_l1) << ','
           << io::fmt(report.tolerance) << '\n';
    return os.str();
}

}  // namespace dsat::harness
