#include "drk/process_tables.hpp"

#include <algorithm>

namespace drk::process {

namespace {

HomeAdmission admit_home(const kinetics::GroupTables& t, int origin, int other,
                         int capacity) {
    HomeAdmission h;
    h.dest.assign(static_cast<size_t>(capacity) + 1, 0.0);
    const auto& term = t.terminate[static_cast<size_t>(origin)];
    const auto& arr = t.arrive[static_cast<size_t>(origin)];
    const auto& tail = t.arrive_tail[static_cast<size_t>(origin)];
    int idle = static_cast<int>(arr.size()) - 1;
    for (int tm = 0; tm <= origin; ++tm) {
        double wt = term[static_cast<size_t>(tm)];
        if (wt == 0.0) continue;
        int x1 = origin - tm;
        int free = capacity - x1 - other;
        if (free < 0) continue; // unreachable for feasible queries
        int exact_max = std::min(free - 1, idle);
        for (int j = 0; j <= exact_max; ++j)
            h.dest[static_cast<size_t>(x1 + j)] += wt * arr[static_cast<size_t>(j)];
        if (free <= idle) {
            h.dest[static_cast<size_t>(x1 + free)] += wt * tail[static_cast<size_t>(free)];
            if (free + 1 <= idle) {
                h.block_event += wt * tail[static_cast<size_t>(free + 1)];
                for (int j = free + 1; j <= idle; ++j)
                    h.blocked_mean += wt * (j - free) * arr[static_cast<size_t>(j)];
            }
        }
    }
    return h;
}

} // namespace

Tables build_tables(const scenario::ScenarioConfig& cfg) {
    Tables tb;
    auto kin = scenario::kinetics_for(cfg);
    tb.t11 = kinetics::tabulate(kin.g11);
    tb.t22 = kinetics::tabulate(kin.g22);
    tb.t31 = kinetics::tabulate(kin.g31);
    tb.t32 = kinetics::tabulate(kin.g32);

    int a_max = std::min(cfg.n_1, cfg.m_1);
    int b_max = std::min(cfg.n_3, cfg.m_1);
    tb.g1.resize(static_cast<size_t>(a_max) + 1);
    for (int a = 0; a <= a_max; ++a) {
        auto& row = tb.g1[static_cast<size_t>(a)];
        int o_max = std::min(b_max, cfg.m_1 - a);
        row.resize(static_cast<size_t>(o_max) + 1);
        for (int o = 0; o <= o_max; ++o)
            row[static_cast<size_t>(o)] = admit_home(tb.t11, a, o, cfg.m_1);
    }

    int d_max = std::min(cfg.n_2, cfg.m_2);
    int c_max = std::min({cfg.n_3, cfg.m_2, cfg.k});
    tb.g2.resize(static_cast<size_t>(d_max) + 1);
    for (int d = 0; d <= d_max; ++d) {
        auto& row = tb.g2[static_cast<size_t>(d)];
        int o_max = std::min(c_max, cfg.m_2 - d);
        row.resize(static_cast<size_t>(o_max) + 1);
        for (int o = 0; o <= o_max; ++o)
            row[static_cast<size_t>(o)] = admit_home(tb.t22, d, o, cfg.m_2);
    }
    return tb;
}

} // namespace drk::process
