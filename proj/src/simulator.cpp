#include "drk/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "drk/chain.hpp"
#include "drk/errors.hpp"
#include "drk/kinetics.hpp"
#include "drk/rng.hpp"

namespace drk::sim {

namespace {

struct RepTotals {
    // event counts over measured frames
    std::uint64_t block_event[3] = {0, 0, 0};
    std::uint64_t collide_event[3] = {0, 0, 0};
    std::uint64_t busy = 0;            // sum of end-of-frame occupancies
    std::uint64_t blocked_count[3] = {0, 0, 0}; // denied successes
    std::uint64_t success_count[3] = {0, 0, 0}; // RACH successes offered
    std::vector<std::uint64_t> visits; // dense over the state bounding box
};

struct BoxIndex {
    int dim_b, dim_c, dim_d;
    int max_a, max_b, max_c, max_d;

    explicit BoxIndex(const scenario::ScenarioConfig& cfg) {
        max_a = cfg.n_1;
        max_b = std::min(cfg.n_3, cfg.m_1);
        max_c = std::min({cfg.n_3, cfg.m_2, cfg.k});
        max_d = cfg.n_2;
        dim_b = max_b + 1;
        dim_c = max_c + 1;
        dim_d = max_d + 1;
    }

    std::size_t size() const {
        return static_cast<std::size_t>(max_a + 1) * dim_b * dim_c * dim_d;
    }

    std::size_t at(const SystemState& s) const {
        if (s.a < 0 || s.a > max_a || s.b < 0 || s.b > max_b || s.c < 0 ||
            s.c > max_c || s.d < 0 || s.d > max_d) {
            std::ostringstream msg;
            msg << "simulated frame left the state bounding box at (" << s.a
                << "," << s.b << "," << s.c << "," << s.d << ")";
            throw IntegrityError(msg.str());
        }
        return ((static_cast<std::size_t>(s.a) * dim_b + s.b) * dim_c + s.c) *
                   dim_d + s.d;
    }

    SystemState state_of(std::size_t idx) const {
        SystemState s;
        s.d = static_cast<int>(idx % dim_d);
        idx /= dim_d;
        s.c = static_cast<int>(idx % dim_c);
        idx /= dim_c;
        s.b = static_cast<int>(idx % dim_b);
        idx /= dim_b;
        s.a = static_cast<int>(idx);
        return s;
    }
};

struct GroupDraw {
    int successes = 0;
    bool collision = false;
};

GroupDraw draw_group(rng::Engine& rng, int idle, double w_up, double p,
                     int slots, std::vector<int>& slot_count) {
    GroupDraw out;
    if (!rng.bernoulli(w_up)) return out; // bad uplink, nothing gets through
    int requesters = 0;
    for (int u = 0; u < idle; ++u)
        if (rng.bernoulli(p)) ++requesters;
    if (requesters == 0) return out;
    std::fill(slot_count.begin(), slot_count.begin() + slots, 0);
    for (int r = 0; r < requesters; ++r)
        ++slot_count[rng.below(static_cast<std::uint32_t>(slots))];
    int singles = 0;
    for (int sl = 0; sl < slots; ++sl)
        if (slot_count[sl] == 1) ++singles;
    out.successes = singles;
    out.collision = requesters - singles >= 1;
    return out;
}

int draw_terminations(rng::Engine& rng, int active, double leave) {
    int gone = 0;
    for (int u = 0; u < active; ++u)
        if (rng.bernoulli(leave)) ++gone;
    return gone;
}

RepTotals run_replication(const scenario::ScenarioConfig& cfg,
                          const BoxIndex& box, rng::Engine rng, long warmup,
                          long measure) {
    RepTotals tot;
    tot.visits.assign(box.size(), 0);

    const double l11 = kinetics::termination_rate(cfg.w_1_1.w_down, cfg.q);
    const double l31 = kinetics::termination_rate(cfg.w_3_1.w_down, cfg.q);
    const double l32 = kinetics::termination_rate(cfg.w_3_2.w_down, cfg.q);
    const double l22 = kinetics::termination_rate(cfg.w_2_2.w_down, cfg.q);

    std::vector<int> slot_count(
        static_cast<std::size_t>(std::max({cfg.l_1, cfg.l_2, cfg.l_3})), 0);

    SystemState s{0, 0, 0, 0};
    for (long frame = 0; frame < warmup + measure; ++frame) {
        FrameOutcome o;
        o.term_a = draw_terminations(rng, s.a, l11);
        o.term_b = draw_terminations(rng, s.b, l31);
        o.term_c = draw_terminations(rng, s.c, l32);
        o.term_d = draw_terminations(rng, s.d, l22);

        GroupDraw g1 = draw_group(rng, cfg.n_1 - s.a, cfg.w_1_1.w_up, cfg.p_1,
                                  cfg.l_1, slot_count);
        GroupDraw g2 = draw_group(rng, cfg.n_2 - s.d, cfg.w_2_2.w_up, cfg.p_2,
                                  cfg.l_2, slot_count);
        GroupDraw g3 = draw_group(rng, cfg.n_3 - s.b - s.c, cfg.w_3_1.w_up,
                                  cfg.p_3, cfg.l_3, slot_count);
        o.arr_1 = g1.successes;
        o.arr_2 = g2.successes;
        o.arr_3 = g3.successes;

        FrameResult fr = apply_frame(s, o, cfg.m_1, cfg.m_2, cfg.k);
        s = fr.next;
        assert(state_feasible(s, cfg));

        if (frame < warmup) continue;

        ++tot.visits[box.at(s)];
        tot.busy += static_cast<std::uint64_t>(s.a + s.b + s.c + s.d);
        if (fr.blocked_1 > 0) ++tot.block_event[0];
        if (fr.blocked_2 > 0) ++tot.block_event[1];
        if (fr.blocked_3 > 0) ++tot.block_event[2];
        if (g1.collision) ++tot.collide_event[0];
        if (g2.collision) ++tot.collide_event[1];
        if (g3.collision) ++tot.collide_event[2];
        tot.blocked_count[0] += static_cast<std::uint64_t>(fr.blocked_1);
        tot.blocked_count[1] += static_cast<std::uint64_t>(fr.blocked_2);
        tot.blocked_count[2] += static_cast<std::uint64_t>(fr.blocked_3);
        tot.success_count[0] += static_cast<std::uint64_t>(o.arr_1);
        tot.success_count[1] += static_cast<std::uint64_t>(o.arr_2);
        tot.success_count[2] += static_cast<std::uint64_t>(o.arr_3);
    }
    return tot;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe summarise(const std::vector<double>& rep_means) {
    MeanSe out;
    const auto n = static_cast<double>(rep_means.size());
    for (double v : rep_means) out.mean += v;
    out.mean /= n;
    if (rep_means.size() < 2) return out;
    double ss = 0.0;
    for (double v : rep_means) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

} // namespace

SimEstimate simulate(const SimRun& run) {
    scenario::validate(run.cfg);
    if (run.replications < 1)
        throw ValidationError("simulate: needs at least one replication");
    if (run.measure_frames < 1)
        throw ValidationError("simulate: needs at least one measured frame");
    if (run.warmup_frames < 0)
        throw ValidationError("simulate: warmup frame count is negative");

    const BoxIndex box(run.cfg);

    std::vector<rng::Engine> engines;
    engines.reserve(static_cast<std::size_t>(run.replications));
    rng::Engine master(run.seed);
    for (int r = 0; r < run.replications; ++r) {
        engines.push_back(master);
        master.jump();
    }

    std::vector<RepTotals> totals(static_cast<std::size_t>(run.replications));
    unsigned workers = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()),
        static_cast<unsigned>(run.replications));
    if (workers <= 1) {
        for (int r = 0; r < run.replications; ++r)
            totals[static_cast<std::size_t>(r)] =
                run_replication(run.cfg, box, engines[static_cast<std::size_t>(r)],
                                run.warmup_frames, run.measure_frames);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex fail_mx;
        for (unsigned wid = 0; wid < workers; ++wid)
            pool.emplace_back([&, wid] {
                try {
                    for (int r = static_cast<int>(wid); r < run.replications;
                         r += static_cast<int>(workers))
                        totals[static_cast<std::size_t>(r)] = run_replication(
                            run.cfg, box, engines[static_cast<std::size_t>(r)],
                            run.warmup_frames, run.measure_frames);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(fail_mx);
                    if (!failure) failure = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    const auto frames = static_cast<double>(run.measure_frames);
    std::vector<double> rep(static_cast<std::size_t>(run.replications));
    auto collect = [&](auto&& per_rep) {
        for (int r = 0; r < run.replications; ++r)
            rep[static_cast<std::size_t>(r)] =
                per_rep(totals[static_cast<std::size_t>(r)]);
        return summarise(rep);
    };

    SimEstimate est;
    est.report.source = "monte-carlo";
    for (int g = 0; g < 3; ++g) {
        MeanSe b = collect([&](const RepTotals& t) {
            return static_cast<double>(t.block_event[g]) / frames;
        });
        est.report.blocking[static_cast<std::size_t>(g)] = b.mean;
        est.report.blocking_se[static_cast<std::size_t>(g)] = b.se;
        MeanSe d = collect([&](const RepTotals& t) {
            return static_cast<double>(t.collide_event[g]) / frames;
        });
        est.report.collision[static_cast<std::size_t>(g)] = d.mean;
        est.report.collision_se[static_cast<std::size_t>(g)] = d.se;
    }
    MeanSe u = collect([&](const RepTotals& t) {
        return static_cast<double>(t.busy) / frames /
               (run.cfg.m_1 + run.cfg.m_2);
    });
    est.report.utilization = u.mean;
    est.report.utilization_se = u.se;
    est.report.throughput = run.cfg.h > 0.0
                                ? u.mean * run.cfg.h * (run.cfg.m_1 + run.cfg.m_2)
                                : 0.0;
    for (int g = 0; g < 3; ++g) {
        double denied = 0.0, offered = 0.0;
        for (const auto& t : totals) {
            denied += static_cast<double>(t.blocked_count[g]);
            offered += static_cast<double>(t.success_count[g]);
        }
        est.report.per_request_blocking[static_cast<std::size_t>(g)] =
            offered > 0.0 ? denied / offered : 0.0;
    }

    std::map<SystemState, std::uint64_t> hist;
    for (const auto& t : totals)
        for (std::size_t i = 0; i < t.visits.size(); ++i)
            if (t.visits[i] > 0) hist[box.state_of(i)] += t.visits[i];
    est.states = chain::enumerate_states(run.cfg);
    est.occupancy = occupancy_to_pi(run.cfg, hist);
    est.measured_frames = static_cast<std::uint64_t>(run.measure_frames) *
                          static_cast<std::uint64_t>(run.replications);
    return est;
}

std::vector<double> occupancy_to_pi(
    const scenario::ScenarioConfig& cfg,
    const std::map<SystemState, std::uint64_t>& hist) {
    auto states = chain::enumerate_states(cfg);
    std::vector<double> pi(states.size(), 0.0);
    std::uint64_t total = 0;
    for (const auto& [s, n] : hist) total += n;
    if (total == 0) throw ValidationError("occupancy_to_pi: empty histogram");
    for (const auto& [s, n] : hist) {
        auto it = std::lower_bound(states.begin(), states.end(), s);
        if (it == states.end() || !(*it == s)) {
            std::ostringstream msg;
            msg << "occupancy histogram contains the infeasible state (" << s.a
                << "," << s.b << "," << s.c << "," << s.d << ")";
            throw IntegrityError(msg.str());
        }
        pi[static_cast<std::size_t>(it - states.begin())] =
            static_cast<double>(n) / static_cast<double>(total);
    }
    return pi;
}

} // namespace drk::sim
