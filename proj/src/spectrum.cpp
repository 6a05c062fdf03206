#include "dsat/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dsat::ode {

namespace {

// Sums over source cells for one forced move. A unit literal is a positive
// occurrence of a variable in (i,j) with probability i*n(i,j)/sigma_n (after
// which the variable has (i-1, j) other occurrences and is set True), or a
// negative occurrence with probability j*n(i,j)/sigma_n (degree (i, j-1),
// set False).
struct ForcedStats {
    double sigma_n = 0.0;
    double sigma_m = 0.0;
    double satisfied = 0.0;  // E[#clauses satisfied]
    double falsified = 0.0;  // E[#clauses shrunk]
    double rho = 0.0;
};

ForcedStats forced_stats(const SpectrumState& s) {
    ForcedStats st;
    st.sigma_m = s.sigma_m();
    st.sigma_n = s.sigma_n();
    const int h = s.h();
    double sat = 0.0, fal = 0.0;
    for (int i = 0; i <= h; ++i) {
        for (int j = 0; j <= h; ++j) {
            const double v = s.n(i, j);
            if (v == 0.0) continue;
            // True move from (i-1, j): satisfies i-1, shrinks j.
            // False move from (i, j-1): satisfies j-1, shrinks i.
            const double wt = i * v, wf = j * v;
            sat += wt * (i - 1) + wf * (j - 1);
            fal += wt * j + wf * i;
        }
    }
    if (st.sigma_n > 0.0) {
        st.satisfied = std::max(0.0, sat / st.sigma_n);
        st.falsified = fal / st.sigma_n;
    }
    if (st.sigma_m > 0.0) st.rho = st.falsified * 2.0 * s.m2 / st.sigma_m;
    return st;
}

double poisson_pmf(double lambda, int i) {
    if (lambda == 0.0) return i == 0 ? 1.0 : 0.0;
    return std::exp(-lambda + i * std::log(lambda) - std::lgamma(i + 1.0));
}

void require_positive(double sigma, const char* what) {
    if (!(sigma > 0.0)) throw OdeError(std::string(what) + " is not positive");
}

}  // namespace

double SpectrumState::sigma_n() const {
    double acc = 0.0;
    for (int i = 0; i <= h_; ++i)
        for (int j = 0; j <= h_; ++j) acc += (i + j) * n(i, j);
    return acc;
}

double SpectrumState::active_var_mass() const { return total_var_mass() - n(0, 0); }

double SpectrumState::total_var_mass() const {
    double acc = 0.0;
    for (const double v : cells_) acc += v;
    return acc;
}

double SpectrumState::mass_residual() const { return std::abs(sigma_n() - sigma_m()); }

double SpectrumState::symmetry_drift() const {
    double worst = 0.0;
    for (int i = 0; i <= h_; ++i)
        for (int j = i + 1; j <= h_; ++j) worst = std::max(worst, std::abs(n(i, j) - n(j, i)));
    return worst;
}

double SpectrumState::truncation_mass() const {
    double acc = 0.0;
    for (int k = 0; k <= h_; ++k) acc += n(h_, k) + n(k, h_);
    return acc - n(h_, h_);
}

void OdeConfig::validate() const {
    if (h < 2) throw std::invalid_argument("OdeConfig: h must be >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("OdeConfig: delta must be in (0,1)");
    if (!(rho_guard > 0.0 && rho_guard < 1.0)) throw std::invalid_argument("OdeConfig: rho_guard must be in (0,1)");
    if (!(clamp_eps >= 0.0)) throw std::invalid_argument("OdeConfig: clamp_eps must be >= 0");
    if (!(end_mass > 0.0)) throw std::invalid_argument("OdeConfig: end_mass must be positive");
    if (!(max_round_fraction > 0.0 && max_round_fraction <= 1.0))
        throw std::invalid_argument("OdeConfig: max_round_fraction must be in (0,1]");
    if (!(mass_floor >= 0.0)) throw std::invalid_argument("OdeConfig: mass_floor must be >= 0");
}

SpectrumState init_spectrum(double c, int h) {
    if (!(c > 0.0)) throw std::invalid_argument("init_spectrum: density must be positive");
    if (h < 2) throw std::invalid_argument("init_spectrum: h must be >= 2");
    const double lambda = 1.5 * c;
    std::vector<double> p(static_cast<std::size_t>(h + 1));
    for (int i = 0; i < h; ++i) p[i] = poisson_pmf(lambda, i);
    // Sum the tail directly; 1 - sum(head) would cancel catastrophically.
    double tail = 0.0;
    for (int i = h; i < h + 2000; ++i) {
        const double term = poisson_pmf(lambda, i);
        tail += term;
        if (i > lambda && term < 1e-300) break;
    }
    p[h] = tail;

    SpectrumState s(h);
    for (int i = 0; i <= h; ++i)
        for (int j = 0; j <= h; ++j) s.n(i, j) = p[i] * p[j];
    s.m3 = c;
    return s;
}

FreeMoveDelta free_move_delta(const SpectrumState& s, int k, int l, bool value) {
    const double sigma_m = s.sigma_m();
    const double sigma_n = s.sigma_n();
    require_positive(sigma_m, "sigma_m");
    require_positive(sigma_n, "sigma_n");
    const int h = s.h();
    const int sat = value ? k : l;
    const int fal = value ? l : k;

    FreeMoveDelta d;
    d.d_m3 = -(sat + fal) * 3.0 * s.m3 / sigma_m;
    d.d_m2 = -(sat + fal) * 2.0 * s.m2 / sigma_m + fal * 3.0 * s.m3 / sigma_m;
    d.d_m1 = fal * 2.0 * s.m2 / sigma_m;

    // Each satisfied clause takes its other literals with it: 1 per 2-clause,
    // 2 per 3-clause, drawn in proportion to occurrences.
    const double others = (2.0 * 1.0 * s.m2 + 3.0 * 2.0 * s.m3) / sigma_m;
    d.d_n.assign(s.cells().size(), 0.0);
    for (int i = 0; i <= h; ++i) {
        for (int j = 0; j <= h; ++j) {
            const double in_pos = i < h ? (i + 1) * s.n(i + 1, j) : 0.0;
            const double in_neg = j < h ? (j + 1) * s.n(i, j + 1) : 0.0;
            const double flow = ((i + j) * s.n(i, j) - (in_pos + in_neg)) / sigma_n;
            d.d_n[static_cast<std::size_t>(i * (h + 1) + j)] = -sat * others * flow;
        }
    }
    d.d_n[static_cast<std::size_t>(k * (h + 1) + l)] -= 1.0;
    return d;
}

double malthus_rho(const SpectrumState& s) {
    const double sigma_n = s.sigma_n();
    const double sigma_m = s.sigma_m();
    require_positive(sigma_n, "sigma_n");
    if (s.m2 == 0.0) return 0.0;
    require_positive(sigma_m, "sigma_m");
    const int h = s.h();
    const double unit_rate = 2.0 * s.m2 / sigma_m;
    double rho = 0.0;
    // True branch: source (k'+1, l'), k' in [0,h), l' in [0,h].
    // False branch: source (k', l'+1), k' in [0,h], l' in [0,h).
    for (int kp = 0; kp <= h; ++kp) {
        for (int lp = 0; lp <= h; ++lp) {
            if (kp < h) rho += (kp + 1) * s.n(kp + 1, lp) / sigma_n * lp * unit_rate;
            if (lp < h) rho += (lp + 1) * s.n(kp, lp + 1) / sigma_n * kp * unit_rate;
        }
    }
    return rho;
}

ForcedMoveDelta forced_move_delta(const SpectrumState& s) {
    const ForcedStats st = forced_stats(s);
    require_positive(st.sigma_m, "sigma_m");
    require_positive(st.sigma_n, "sigma_n");
    const int h = s.h();
    const double moved = st.satisfied + st.falsified;

    ForcedMoveDelta d;
    d.d_m3 = -moved * 3.0 * s.m3 / st.sigma_m;
    d.d_m2 = -moved * 2.0 * s.m2 / st.sigma_m + st.falsified * 3.0 * s.m3 / st.sigma_m;

    const double others = (2.0 * 1.0 * s.m2 + 3.0 * 2.0 * s.m3) / st.sigma_m;
    const double coef = st.satisfied * others;
    d.d_n.assign(s.cells().size(), 0.0);
    for (int i = 0; i <= h; ++i) {
        for (int j = 0; j <= h; ++j) {
            const double v = s.n(i, j);
            const double in_pos = i < h ? (i + 1) * s.n(i + 1, j) : 0.0;
            const double in_neg = j < h ? (j + 1) * s.n(i, j + 1) : 0.0;
            const double flow = ((i + j) * v - (in_pos + in_neg)) / st.sigma_n;
            // The forced variable leaves its own cell: absorbed via a positive
            // occurrence (True branch) or a negative one (False branch).
            const double absorb = i * v / st.sigma_n + j * v / st.sigma_n;
            d.d_n[static_cast<std::size_t>(i * (h + 1) + j)] = -coef * flow - absorb;
        }
    }
    return d;
}

ForcedMoveDelta forced_move_delta_naive(const SpectrumState& s) {
    const double sigma_m = s.sigma_m();
    const double sigma_n = s.sigma_n();
    require_positive(sigma_m, "sigma_m");
    require_positive(sigma_n, "sigma_n");
    const int h = s.h();
    const double others = (2.0 * 1.0 * s.m2 + 3.0 * 2.0 * s.m3) / sigma_m;

    auto flow = [&](int i, int j) {
        const double in_pos = i < h ? (i + 1) * s.n(i + 1, j) : 0.0;
        const double in_neg = j < h ? (j + 1) * s.n(i, j + 1) : 0.0;
        return ((i + j) * s.n(i, j) - in_pos - in_neg) / sigma_n;
    };
    // Free-move formulas for a (k,l)-variable set True; False swaps k and l.
    auto dM3_true = [&](int k, int l) { return -k * 3.0 * s.m3 / sigma_m - l * 3.0 * s.m3 / sigma_m; };
    auto dM2_true = [&](int k, int l) {
        return -k * 2.0 * s.m2 / sigma_m - l * 2.0 * s.m2 / sigma_m + l * 3.0 * s.m3 / sigma_m;
    };
    auto dN_true = [&](int i, int j, int k, int /*l*/) { return -k * others * flow(i, j); };
    auto psi = [](int x, int y) { return x == y ? 1.0 : 0.0; };

    ForcedMoveDelta d;
    d.d_n.assign(s.cells().size(), 0.0);
    for (int kp = 0; kp <= h; ++kp) {
        for (int lp = 0; lp <= h; ++lp) {
            const double p_true = kp < h ? (kp + 1) * s.n(kp + 1, lp) / sigma_n : 0.0;
            const double p_false = lp < h ? (lp + 1) * s.n(kp, lp + 1) / sigma_n : 0.0;
            d.d_m3 += p_true * dM3_true(kp, lp) + p_false * dM3_true(lp, kp);
            d.d_m2 += p_true * dM2_true(kp, lp) + p_false * dM2_true(lp, kp);
            for (int i = 0; i <= h; ++i) {
                for (int j = 0; j <= h; ++j) {
                    double& out = d.d_n[static_cast<std::size_t>(i * (h + 1) + j)];
                    out += p_true * (dN_true(i, j, kp, lp) - psi(i, kp + 1) * psi(j, lp));
                    out += p_false * (dN_true(i, j, lp, kp) - psi(i, kp) * psi(j, lp + 1));
                }
            }
        }
    }
    return d;
}

std::vector<Cell> rank_order(int h, SelectionRule rule, PurePriority pure) {
    std::vector<Cell> cells;
    for (int i = 1; i <= h; ++i)
        for (int j = 0; j <= i; ++j) cells.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    std::stable_sort(cells.begin(), cells.end(),
                     [&](Cell a, Cell b) { return outranks(a, b, rule, pure); });
    return cells;
}

namespace {

bool pair_present(const SpectrumState& s, Cell c, double floor) {
    const double a = s.n(static_cast<int>(c.pos), static_cast<int>(c.neg));
    const double b = s.n(static_cast<int>(c.neg), static_cast<int>(c.pos));
    return (a > 0.0 && a >= floor) || (b > 0.0 && b >= floor);
}

constexpr int kMaxHalvings = 30;

struct Allocation {
    int i = 0, j = 0;
    double dt = 0.0;
};

// One round: the free-move budget min(delta, available) is drawn from the
// pairs of `ranked` in order (each pair emptied before the next is touched,
// the last one split in proportion to its two cells). All deltas use the
// frozen state. A cell that is emptied also loses mass to flow and
// absorption during the round, so its allocation is the mass it would have
// left; this is a fixed point, resolved by a few passes.
RoundReport fill_round(SpectrumState& s, std::span<const Cell> ranked, const OdeConfig& cfg,
                       PolarityRule polarity, const ForcedStats& st, std::vector<double>& scratch,
                       std::vector<Allocation>& allocs) {
    if (st.rho >= 1.0 - cfg.rho_guard) throw OdeError("rho reached the guard; unit clauses go supercritical");
    require_positive(st.sigma_m, "sigma_m");
    require_positive(st.sigma_n, "sigma_n");
    const int h = s.h();
    const double sm = st.sigma_m;
    const double unit_rate = 2.0 * s.m2 / sm;
    const double others = (2.0 * 1.0 * s.m2 + 3.0 * 2.0 * s.m3) / sm;

    auto flow = [&](int i, int j) {
        const double in_pos = i < h ? (i + 1) * s.n(i + 1, j) : 0.0;
        const double in_neg = j < h ? (j + 1) * s.n(i, j + 1) : 0.0;
        return ((i + j) * s.n(i, j) - (in_pos + in_neg)) / st.sigma_n;
    };
    auto satisfied_by = [&](int i, int j) { return choose_polarity(i, j, polarity) ? i : j; };

    double flow_coef = 0.0, absorb_coef = 0.0;
    double free_sat = 0.0, free_fal = 0.0, dt = 0.0, m1 = 0.0, forced = 0.0;
    auto cell_change = [&](int i, int j) {
        const double v = s.n(i, j);
        return -flow_coef * flow(i, j) - (i * v * absorb_coef + j * v * absorb_coef);
    };
    auto available = [&](int i, int j) { return s.n(i, j) + std::min(0.0, cell_change(i, j)); };

    double budget = std::min(cfg.delta, cfg.max_round_fraction * s.active_var_mass());
    double d_m3 = 0.0, d_m2 = 0.0;
    for (int halving = 0;; ++halving) {
        for (int pass = 0; pass < 3; ++pass) {
            allocs.clear();
            double remaining = budget;
            for (const Cell c : ranked) {
                if (remaining <= 0.0) break;
                if (!pair_present(s, c, cfg.mass_floor)) continue;
                const int i = static_cast<int>(c.pos), j = static_cast<int>(c.neg);
                const bool paired = i != j;
                const double av_a = std::max(0.0, available(i, j));
                const double av_b = paired ? std::max(0.0, available(j, i)) : 0.0;
                const double pair = av_a + av_b;
                if (!(pair > 0.0)) continue;
                if (pair <= remaining) {
                    allocs.push_back({i, j, av_a});
                    if (paired) allocs.push_back({j, i, av_b});
                    remaining -= pair;
                } else {
                    // Partial pair: split by cell mass, neither side beyond what it holds.
                    const double a = s.n(i, j), b = paired ? s.n(j, i) : 0.0;
                    double take_a = std::min(av_a, remaining * (a / (a + b)));
                    const double take_b = std::min(av_b, remaining - take_a);
                    take_a = std::min(av_a, remaining - take_b);
                    allocs.push_back({i, j, take_a});
                    if (paired) allocs.push_back({j, i, take_b});
                    remaining = 0.0;
                }
            }
            free_sat = free_fal = dt = 0.0;
            for (const Allocation& al : allocs) {
                const int sat = satisfied_by(al.i, al.j);
                free_sat += al.dt * sat;
                free_fal += al.dt * (al.i + al.j - sat);
                dt += al.dt;
            }
            m1 = free_fal * unit_rate;
            forced = m1 / (1.0 - st.rho);
            flow_coef = (free_sat + forced * st.satisfied) * others;
            absorb_coef = forced / st.sigma_n;
        }
        if (allocs.empty()) throw OdeError("round has no cell mass to set");

        const double moved = st.satisfied + st.falsified;
        d_m3 = -(free_sat + free_fal) * 3.0 * s.m3 / sm - forced * moved * 3.0 * s.m3 / sm;
        d_m2 = -(free_sat + free_fal) * 2.0 * s.m2 / sm + free_fal * 3.0 * s.m3 / sm +
               forced * (-moved * 2.0 * s.m2 / sm + st.falsified * 3.0 * s.m3 / sm);

        scratch.resize(s.cells().size());
        for (int i = 0; i <= h; ++i)
            for (int j = 0; j <= h; ++j)
                scratch[static_cast<std::size_t>(i * (h + 1) + j)] = s.n(i, j) + cell_change(i, j);
        for (const Allocation& al : allocs) scratch[static_cast<std::size_t>(al.i * (h + 1) + al.j)] -= al.dt;
        // Near rho = 1 the forced flow can drain an untouched cell past zero in
        // one explicit step; the round is then redone with half the budget.
        int worst = -1;
        for (std::size_t k = 0; k < scratch.size(); ++k)
            if (scratch[k] < -cfg.clamp_eps && (worst < 0 || scratch[k] < scratch[static_cast<std::size_t>(worst)]))
                worst = static_cast<int>(k);
        if (worst < 0) break;
        if (halving >= kMaxHalvings)
            throw OdeError("spectrum entry (" + std::to_string(worst / (h + 1)) + "," + std::to_string(worst % (h + 1)) +
                           ") fell below -clamp_eps");
        budget *= 0.5;
        flow_coef = absorb_coef = 0.0;
    }
    for (double& v : scratch) v = std::max(v, 0.0);
    s.cells().swap(scratch);
    s.m3 = std::max(0.0, s.m3 + d_m3);
    s.m2 = std::max(0.0, s.m2 + d_m2);
    s.m1 = 0.0;
    s.t += dt + forced;

    RoundReport r;
    r.cell = {static_cast<std::uint32_t>(std::max(allocs.front().i, allocs.front().j)),
              static_cast<std::uint32_t>(std::min(allocs.front().i, allocs.front().j))};
    r.dt = dt;
    r.rho = st.rho;
    r.m1 = m1;
    r.forced = forced;
    r.mass_residual = s.mass_residual();
    return r;
}

}  // namespace

std::optional<Cell> select_cell(const SpectrumState& s, SelectionRule rule, const OdeConfig& cfg) {
    CellChooser chooser(rule, cfg.pure);
    const int h = s.h();
    for (int i = 0; i <= h; ++i)
        for (int j = 0; j <= h; ++j)
            if (s.n(i, j) >= cfg.mass_floor && s.n(i, j) > 0.0)
                chooser.offer({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    auto best = chooser.best();
    if (best && best->pos < best->neg) best = best->mirror();
    return best;
}

RoundReport advance_round(SpectrumState& s, Cell cell, const OdeConfig& cfg, PolarityRule polarity) {
    if (static_cast<int>(std::max(cell.pos, cell.neg)) > s.h())
        throw std::invalid_argument("advance_round: cell outside the spectrum");
    if (cell.pos < cell.neg) cell = cell.mirror();
    if (!(s.n(cell.pos, cell.neg) + s.n(cell.neg, cell.pos) > 0.0))
        throw OdeError("advance_round: selected cell pair is empty");
    OdeConfig one = cfg;
    one.mass_floor = 0.0;
    std::vector<double> scratch;
    std::vector<Allocation> allocs;
    const Cell ranked[] = {cell};
    return fill_round(s, ranked, one, polarity, forced_stats(s), scratch, allocs);
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::EndgameReached: return "EndgameReached";
        case Termination::RhoBlowup: return "RhoBlowup";
        case Termination::MassExhausted: return "MassExhausted";
        case Termination::MaxRounds: return "MaxRounds";
    }
    return "?";
}

bool default_endgame(const SpectrumState& s, const OdeConfig& cfg) {
    const double active = s.active_var_mass();
    if (active >= cfg.end_mass) return false;
    return active <= 0.0 ? s.m2 <= 0.0 : s.m2 / active < 1.0;
}

Trajectory run_trajectory(double c, const OdeConfig& cfg, SelectionRule rule, PolarityRule polarity,
                          const EndgamePredicate& endgame, const RoundObserver& observer) {
    cfg.validate();
    Trajectory traj;
    traj.density = c;
    traj.rule = rule;
    traj.polarity = polarity;
    SpectrumState s = init_spectrum(c, cfg.h);
    std::vector<double> scratch;
    std::vector<Allocation> allocs;
    const std::vector<Cell> ranked = rank_order(cfg.h, rule, cfg.pure);
    traj.max_balance_excess = -std::numeric_limits<double>::infinity();

    for (;;) {
        if (endgame(s, cfg)) {
            traj.termination = Termination::EndgameReached;
            break;
        }
        const ForcedStats st = forced_stats(s);
        traj.max_rho = std::max(traj.max_rho, st.rho);
        if (st.rho >= 1.0 - cfg.rho_guard) {
            traj.termination = Termination::RhoBlowup;
            break;
        }
        std::optional<Cell> cell;
        for (const Cell c : ranked) {
            if (pair_present(s, c, cfg.mass_floor)) {
                cell = c;
                break;
            }
        }
        if (!cell) {
            traj.termination = Termination::MassExhausted;
            break;
        }
        if (traj.rounds >= cfg.max_rounds) {
            traj.termination = Termination::MaxRounds;
            break;
        }
        const std::span<const Cell> order =
            cfg.fill_rounds ? std::span<const Cell>(ranked) : std::span<const Cell>(&*cell, 1);
        const RoundReport r = fill_round(s, order, cfg, polarity, st, scratch, allocs);
        ++traj.rounds;

        const double bound = cfg.balance_tol0 + cfg.balance_kappa * s.truncation_mass();
        traj.max_balance_excess = std::max(traj.max_balance_excess, r.mass_residual - bound);
        if (r.mass_residual > bound)
            throw OdeError("mass balance violated: residual " + std::to_string(r.mass_residual));

        if (cfg.sample_stride > 0 && (traj.rounds - 1) % cfg.sample_stride == 0) {
            traj.max_symmetry_drift = std::max(traj.max_symmetry_drift, s.symmetry_drift());
            traj.rows.push_back({traj.rounds, s.t, r, s.m2, s.m3, s.total_var_mass()});
        }
        if (observer) observer(s, r, traj.rounds);
    }
    traj.max_symmetry_drift = std::max(traj.max_symmetry_drift, s.symmetry_drift());
    traj.final_state = std::move(s);
    return traj;
}

}  // namespace dsat::ode
