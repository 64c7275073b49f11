#include "drk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "drk/errors.hpp"
#include "drk/process_tables.hpp"
#include "drk/rach.hpp"

namespace drk::metrics {

namespace {

void check_pi(const scenario::ScenarioConfig& cfg,
              const chain::SteadyStateDistribution& pi) {
    auto states = chain::enumerate_states(cfg);
    if (states.size() != pi.states.size())
        throw DomainError("metrics: distribution does not match the scenario's state space");
}

std::vector<double> binomial_pmf(int n, double prob) {
    std::vector<double> row(static_cast<size_t>(n) + 1, 0.0);
    if (prob <= 0.0) { row[0] = 1.0; return row; }
    if (prob >= 1.0) { row[static_cast<size_t>(n)] = 1.0; return row; }
    double v = std::pow(1.0 - prob, n);
    for (int r = 0; r <= n; ++r) {
        row[static_cast<size_t>(r)] = v;
        if (r < n)
            v *= (static_cast<double>(n - r) / (r + 1)) * (prob / (1.0 - prob));
    }
    return row;
}

// Blocking event probability for one home group in one state.
double home_block_state(const process::Tables& tb, bool group1, int own, int other) {
    const auto& grid = group1 ? tb.g1 : tb.g2;
    const auto& term_other = group1 ? tb.t31.terminate[static_cast<size_t>(other)]
                                    : tb.t32.terminate[static_cast<size_t>(other)];
    double sum = 0.0;
    for (int o1 = 0; o1 <= other; ++o1) {
        double w = term_other[static_cast<size_t>(other - o1)];
        if (w == 0.0) continue;
        sum += w * grid[static_cast<size_t>(own)][static_cast<size_t>(o1)].block_event;
    }
    return sum;
}

struct TtrPerState {
    double block_event = 0.0;
    double blocked_mean = 0.0;
};

// Group-3 blocking in one state: enumerate the post-termination occupancies
// and the two home groups' final occupancies, then take the arrival tail
// above the total room left for group 3 (spare cell-1 channels plus the
// open part of the K-channel pool).
TtrPerState ttr_block_state(const scenario::ScenarioConfig& cfg,
                            const process::Tables& tb, const SystemState& s) {
    TtrPerState out;
    int active3 = s.b + s.c;
    const auto& term_b = tb.t31.terminate[static_cast<size_t>(s.b)];
    const auto& term_c = tb.t32.terminate[static_cast<size_t>(s.c)];
    const auto& tail3 = tb.t31.arrive_tail[static_cast<size_t>(active3)];
    const auto& excess3 = tb.t31.arrive_excess[static_cast<size_t>(active3)];
    int idle3 = static_cast<int>(tb.t31.arrive[static_cast<size_t>(active3)].size()) - 1;

    for (int b1 = 0; b1 <= s.b; ++b1) {
        double wb = term_b[static_cast<size_t>(s.b - b1)];
        if (wb == 0.0) continue;
        const auto& adm1 = tb.g1[static_cast<size_t>(s.a)][static_cast<size_t>(b1)];
        for (int c1 = 0; c1 <= s.c; ++c1) {
            double wbc = wb * term_c[static_cast<size_t>(s.c - c1)];
            if (wbc == 0.0) continue;
            const auto& adm2 = tb.g2[static_cast<size_t>(s.d)][static_cast<size_t>(c1)];
            for (int a2 = 0; a2 < static_cast<int>(adm1.dest.size()); ++a2) {
                double wa = adm1.dest[static_cast<size_t>(a2)];
                if (wa == 0.0) continue;
                int spare_1 = cfg.m_1 - a2 - b1;
                for (int d2 = 0; d2 < static_cast<int>(adm2.dest.size()); ++d2) {
                    double wad = wbc * wa * adm2.dest[static_cast<size_t>(d2)];
                    if (wad == 0.0) continue;
                    int spare_2 = std::min(cfg.m_2 - d2 - c1, cfg.k - c1);
                    int cap = spare_1 + spare_2;
                    if (cap + 1 <= idle3) {
                        out.block_event += wad * tail3[static_cast<size_t>(cap + 1)];
                        out.blocked_mean += wad * excess3[static_cast<size_t>(cap + 1)];
                    }
                }
            }
        }
    }
    return out;
}

double collision_state(const scenario::ScenarioConfig& cfg, int group, int active) {
    int n, slots;
    double p, w_up;
    switch (group) {
        case 1: n = cfg.n_1; slots = cfg.l_1; p = cfg.p_1; w_up = cfg.w_1_1.w_up; break;
        case 2: n = cfg.n_2; slots = cfg.l_2; p = cfg.p_2; w_up = cfg.w_2_2.w_up; break;
        case 3: n = cfg.n_3; slots = cfg.l_3; p = cfg.p_3; w_up = cfg.w_3_1.w_up; break;
        default: throw DomainError("metrics: group must be 1, 2 or 3");
    }
    int idle = n - active;
    auto req = binomial_pmf(idle, p);
    double sum = 0.0;
    for (int k = 2; k <= idle; ++k) {
        double pk = req[static_cast<size_t>(k)];
        if (pk == 0.0) continue;
        const auto& succ = rach::success_dist(k, slots);
        sum += pk * (1.0 - succ.probs[static_cast<size_t>(k)]);
    }
    return w_up * sum;
}

} // namespace

double blocking_home(const scenario::ScenarioConfig& cfg,
                     const chain::SteadyStateDistribution& pi, int group) {
    if (group != 1 && group != 2)
        throw DomainError("blocking_home: group must be 1 or 2");
    check_pi(cfg, pi);
    process::Tables tb = process::build_tables(cfg);
    double sum = 0.0;
    for (size_t i = 0; i < pi.pi.size(); ++i) {
        const SystemState& s = pi.states[i];
        double w = pi.pi[i];
        if (w == 0.0) continue;
        sum += w * (group == 1 ? home_block_state(tb, true, s.a, s.b)
                               : home_block_state(tb, false, s.d, s.c));
    }
    return sum;
}

double blocking_ttr(const scenario::ScenarioConfig& cfg,
                    const chain::SteadyStateDistribution& pi) {
    check_pi(cfg, pi);
    process::Tables tb = process::build_tables(cfg);
    double sum = 0.0;
    for (size_t i = 0; i < pi.pi.size(); ++i) {
        if (pi.pi[i] == 0.0) continue;
        sum += pi.pi[i] * ttr_block_state(cfg, tb, pi.states[i]).block_event;
    }
    return sum;
}

double collision_probability(const scenario::ScenarioConfig& cfg,
                             const chain::SteadyStateDistribution& pi, int group) {
    check_pi(cfg, pi);
    double sum = 0.0;
    for (size_t i = 0; i < pi.pi.size(); ++i) {
        const SystemState& s = pi.states[i];
        double w = pi.pi[i];
        if (w == 0.0) continue;
        int active = group == 1 ? s.a : group == 2 ? s.d : s.b + s.c;
        sum += w * collision_state(cfg, group, active);
    }
    return sum;
}

double utilization(const scenario::ScenarioConfig& cfg,
                   const chain::SteadyStateDistribution& pi) {
    check_pi(cfg, pi);
    double sum = 0.0;
    for (size_t i = 0; i < pi.pi.size(); ++i) {
        const SystemState& s = pi.states[i];
        sum += pi.pi[i] * (s.a + s.b + s.c + s.d);
    }
    return sum / (cfg.m_1 + cfg.m_2);
}

MetricsReport compute_metrics(const scenario::ScenarioConfig& cfg,
                              const chain::SteadyStateDistribution& pi) {
    check_pi(cfg, pi);
    process::Tables tb = process::build_tables(cfg);

    MetricsReport r;
    r.source = "analytical";

    double denied[3] = {0.0, 0.0, 0.0};
    double offered[3] = {0.0, 0.0, 0.0};
    double busy = 0.0;

    for (size_t i = 0; i < pi.pi.size(); ++i) {
        const SystemState& s = pi.states[i];
        double w = pi.pi[i];
        if (w == 0.0) continue;

        r.blocking[0] += w * home_block_state(tb, true, s.a, s.b);
        r.blocking[1] += w * home_block_state(tb, false, s.d, s.c);
        TtrPerState t3 = ttr_block_state(cfg, tb, s);
        r.blocking[2] += w * t3.block_event;

        r.collision[0] += w * collision_state(cfg, 1, s.a);
        r.collision[1] += w * collision_state(cfg, 2, s.d);
        r.collision[2] += w * collision_state(cfg, 3, s.b + s.c);

        busy += w * (s.a + s.b + s.c + s.d);

        // expected denied / offered successes (secondary diagnostic)
        const auto& term_b = tb.t31.terminate[static_cast<size_t>(s.b)];
        double den1 = 0.0;
        for (int b1 = 0; b1 <= s.b; ++b1)
            den1 += term_b[static_cast<size_t>(s.b - b1)] *
                    tb.g1[static_cast<size_t>(s.a)][static_cast<size_t>(b1)].blocked_mean;
        const auto& term_c = tb.t32.terminate[static_cast<size_t>(s.c)];
        double den2 = 0.0;
        for (int c1 = 0; c1 <= s.c; ++c1)
            den2 += term_c[static_cast<size_t>(s.c - c1)] *
                    tb.g2[static_cast<size_t>(s.d)][static_cast<size_t>(c1)].blocked_mean;
        denied[0] += w * den1;
        denied[1] += w * den2;
        denied[2] += w * t3.blocked_mean;
        offered[0] += w * tb.t11.arrive_mean[static_cast<size_t>(s.a)];
        offered[1] += w * tb.t22.arrive_mean[static_cast<size_t>(s.d)];
        offered[2] += w * tb.t31.arrive_mean[static_cast<size_t>(s.b + s.c)];
    }

    r.utilization = busy / (cfg.m_1 + cfg.m_2);
    r.throughput = cfg.h > 0.0 ? r.utilization * cfg.h * (cfg.m_1 + cfg.m_2) : 0.0;
    for (int g = 0; g < 3; ++g)
        r.per_request_blocking[static_cast<size_t>(g)] =
            offered[g] > 0.0 ? denied[g] / offered[g] : 0.0;
    return r;
}

nlohmann::json to_json(const MetricsReport& r) {
    return nlohmann::json{
        {"source", r.source},
        {"blocking", {{"B_1", r.blocking[0]}, {"B_2", r.blocking[1]}, {"B_3", r.blocking[2]}}},
        {"collision", {{"D_1", r.collision[0]}, {"D_2", r.collision[1]}, {"D_3", r.collision[2]}}},
        {"utilization", r.utilization},
        {"throughput", r.throughput},
        {"stderr",
         {{"B_1", r.blocking_se[0]},
          {"B_2", r.blocking_se[1]},
          {"B_3", r.blocking_se[2]},
          {"D_1", r.collision_se[0]},
          {"D_2", r.collision_se[1]},
          {"D_3", r.collision_se[2]},
          {"utilization", r.utilization_se}}},
        {"per_request_blocking",
         {{"B_1", r.per_request_blocking[0]},
          {"B_2", r.per_request_blocking[1]},
          {"B_3", r.per_request_blocking[2]}}},
    };
}

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}
} // namespace

std::string csv_header() {
    return "scenario,source,utilization,throughput,B_1,B_2,B_3,D_1,D_2,D_3,"
           "utilization_se,B_1_se,B_2_se,B_3_se,D_1_se,D_2_se,D_3_se";
}

std::string csv_row(const std::string& label, const MetricsReport& r) {
    std::ostringstream out;
    out << label << ',' << r.source << ',' << fmt(r.utilization) << ','
        << fmt(r.throughput);
    for (int g = 0; g < 3; ++g) out << ',' << fmt(r.blocking[static_cast<size_t>(g)]);
    for (int g = 0; g < 3; ++g) out << ',' << fmt(r.collision[static_cast<size_t>(g)]);
    out << ',' << fmt(r.utilization_se);
    for (int g = 0; g < 3; ++g) out << ',' << fmt(r.blocking_se[static_cast<size_t>(g)]);
    for (int g = 0; g < 3; ++g) out << ',' << fmt(r.collision_se[static_cast<size_t>(g)]);
    return out.str();
}

} // namespace drk::metrics
