#include "drk/state.hpp"

#include <algorithm>

namespace drk {

bool state_feasible(const SystemState& s, const scenario::ScenarioConfig& cfg) {
    if (s.a < 0 || s.b < 0 || s.c < 0 || s.d < 0) return false;
    if (s.a > cfg.n_1 || s.d > cfg.n_2) return false;
    if (s.c > cfg.k) return false;
    if (s.a + s.b > std::min(cfg.n_1 + cfg.n_3, cfg.m_1)) return false;
    if (s.c + s.d > std::min(cfg.n_2 + cfg.n_3, cfg.m_2)) return false;
    if (s.b + s.c > std::min(cfg.n_3, cfg.m_1 + cfg.k)) return false;
    if (s.a + s.b + s.c + s.d >
        std::min(cfg.n_1 + cfg.n_2 + cfg.n_3, cfg.m_1 + cfg.m_2))
        return false;
    return true;
}

FrameResult apply_frame(const SystemState& s, const FrameOutcome& o,
                        int m_1, int m_2, int k) {
    int a1 = s.a - o.term_a;
    int b1 = s.b - o.term_b;
    int c1 = s.c - o.term_c;
    int d1 = s.d - o.term_d;

    FrameResult r;

    // Home groups first, each on its own cell.
    int free_1 = m_1 - a1 - b1;
    int adm_1 = std::min(o.arr_1, free_1);
    r.blocked_1 = o.arr_1 - adm_1;
    int a2 = a1 + adm_1;

    int free_2 = m_2 - c1 - d1;
    int adm_2 = std::min(o.arr_2, free_2);
    r.blocked_2 = o.arr_2 - adm_2;
    int d2 = d1 + adm_2;

    // Group 3: remaining cell-1 channels, then overflow onto cell 2 while
    // the offloaded total stays within the K-channel pool.
    int spare_1 = m_1 - a2 - b1;
    int on_1 = std::min(o.arr_3, spare_1);
    int spare_2 = std::min(m_2 - d2 - c1, k - c1);
    int on_2 = std::min(o.arr_3 - on_1, spare_2);
    r.blocked_3 = o.arr_3 - on_1 - on_2;

    r.next = SystemState{a2, b1 + on_1, c1 + on_2, d2};
    return r;
}

} // namespace drk
