#include "drk/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include <Eigen/Dense>

#include "drk/errors.hpp"
#include "drk/process_tables.hpp"

namespace drk::chain {

namespace {

// Dense (a, b, c, d) -> row index map over the enumeration bounding box.
struct StateIndexer {
    int da, db, dc, dd; // dimension sizes
    std::vector<int> idx;

    StateIndexer(const scenario::ScenarioConfig& cfg,
                 const std::vector<SystemState>& states) {
        da = std::min(cfg.n_1, cfg.m_1) + 1;
        db = std::min(cfg.n_3, cfg.m_1) + 1;
        dc = std::min({cfg.n_3, cfg.m_2, cfg.k}) + 1;
        dd = std::min(cfg.n_2, cfg.m_2) + 1;
        idx.assign(static_cast<size_t>(da) * db * dc * dd, -1);
        for (size_t i = 0; i < states.size(); ++i)
            idx[flat(states[i])] = static_cast<int>(i);
    }

    size_t flat(const SystemState& s) const {
        return ((static_cast<size_t>(s.a) * db + s.b) * dc + s.c) * dd + s.d;
    }

    int operator()(int a, int b, int c, int d) const {
        return idx[((static_cast<size_t>(a) * db + b) * dc + c) * dd + d];
    }
};

void check_budget(size_t n_states, int budget, const char* who) {
    if (static_cast<long long>(n_states) > budget)
        throw CapacityError(std::string(who) + ": state space has " +
                            std::to_string(n_states) + " states, budget is " +
                            std::to_string(budget));
}

std::vector<std::pair<int, double>> compress_row(const std::vector<double>& dense) {
    std::vector<std::pair<int, double>> row;
    for (size_t j = 0; j < dense.size(); ++j)
        if (dense[j] != 0.0) row.emplace_back(static_cast<int>(j), dense[j]);
    return row;
}

// ---------------------------------------------------------------------------
// Closed-form machinery.
//
// The per-pair transition probability is assembled from three ingredient
// families, mirroring the analytic decomposition of the frame:
//   alpha : a home group's termination/arrival sum, with a saturated tail
//           when the group's own admission exactly fills its cell;
//   theta : the product of the two group-3 termination terms (one per cell);
//   xi    : the group-3 arrival term, exact or tail-inclusive.
// Each (origin, destination) pair is dispatched on the destination's
// saturation pattern; the case ids below name the dispatch targets used in
// validation reports. Cases suffixed x cover pairs the piecewise listing
// leaves implicit (equal-occupancy boundaries); cases suffixed k are the
// offload-pool-saturated variants with cell 2 not full.
// ---------------------------------------------------------------------------

struct ClosedCtx {
    const scenario::ScenarioConfig& cfg;
    const process::Tables& tb;

    double s3(int active, int j) const {
        const auto& row = tb.t31.arrive[static_cast<size_t>(active)];
        if (j < 0 || j >= static_cast<int>(row.size())) return 0.0;
        return row[static_cast<size_t>(j)];
    }
    double s3_tail(int active, int j) const {
        const auto& row = tb.t31.arrive_tail[static_cast<size_t>(active)];
        if (j < 0) j = 0;
        if (j >= static_cast<int>(row.size())) return 0.0;
        return row[static_cast<size_t>(j)];
    }

    // Home-group factor: origin occupancy x -> destination x2, sharing the
    // cell with `other` post-termination foreign connections. The arrival
    // index runs over terminations t: arrivals = t + x2 - x. When the
    // destination exactly fills the capacity available to the group
    // (x2 + other == M), every surplus arrival is denied, so the arrival
    // term is the tail sum.
    double alpha(const kinetics::GroupTables& t, int x, int x2, int other,
                 int capacity) const {
        if (x2 + other > capacity) return 0.0;
        bool saturated = (x2 + other == capacity);
        const auto& term = t.terminate[static_cast<size_t>(x)];
        const auto& arr = t.arrive[static_cast<size_t>(x)];
        const auto& tail = t.arrive_tail[static_cast<size_t>(x)];
        int idle = static_cast<int>(arr.size()) - 1;
        double sum = 0.0;
        for (int tm = std::max(0, x - x2); tm <= x; ++tm) {
            int need = tm + x2 - x;
            if (need > idle && !saturated) continue;
            double f;
            if (saturated)
                f = (need <= idle) ? tail[static_cast<size_t>(need)] : 0.0;
            else
                f = arr[static_cast<size_t>(need)];
            sum += term[static_cast<size_t>(tm)] * f;
        }
        return sum;
    }

    double alpha1(int a, int a2, int b1) const {
        return alpha(tb.t11, a, a2, b1, cfg.m_1);
    }
    double alpha2(int d, int d2, int c1) const {
        return alpha(tb.t22, d, d2, c1, cfg.m_2);
    }
};

double closed_pair(const ClosedCtx& cx, const SystemState& f,
                   const SystemState& t, std::string* case_id) {
    const auto& cfg = cx.cfg;
    const auto& t31 = cx.tb.t31.terminate[static_cast<size_t>(f.b)];
    const auto& t32 = cx.tb.t32.terminate[static_cast<size_t>(f.c)];
    int active3 = f.b + f.c;

    bool full1 = (t.a + t.b == cfg.m_1);
    bool full2 = (t.c + t.d == cfg.m_2);
    bool at_k = (t.c == cfg.k);

    auto set_id = [&](const char* id) { if (case_id) *case_id = id; };

    if (!full1) {
        // Cell 1 ends with spare room, so group 3 cannot have overflowed:
        // the offloaded count can only shrink, and arrivals are exact.
        if (t.c > f.c) {
            set_id("open1-spill");
            return 0.0;
        }
        if (t.b > f.b)
            set_id(t.c == f.c ? "open1-grow-hold" : "open1-grow-drop");
        else if (t.b < f.b)
            set_id(t.c < f.c ? "open1-drop-drop" : "open1-mixed-drop");
        else
            set_id(t.c == f.c ? "open1-hold-hold" : "open1-mixed-drop");
        double a2f = cx.alpha2(f.d, t.d, t.c);
        if (a2f == 0.0) return 0.0;
        double w32 = t32[static_cast<size_t>(f.c - t.c)];
        double sum = 0.0;
        int b1_max = std::min(f.b, t.b);
        for (int b1 = 0; b1 <= b1_max; ++b1) {
            double w = t31[static_cast<size_t>(f.b - b1)] * cx.s3(active3, t.b - b1);
            if (w == 0.0) continue;
            sum += w * cx.alpha1(f.a, t.a, b1);
        }
        return sum * w32 * a2f;
    }

    bool saturated3 = full2 || at_k;
    if (!saturated3) {
        // Cell 1 full, offload pool open: arrivals are exact, overflow
        // possible, both termination counters enumerated.
        if (t.b >= f.b && t.c >= f.c)
            set_id("full1-grow-grow");
        else if (t.b < f.b && t.c > f.c)
            set_id("full1-drop-grow");
        else if (t.b > f.b && t.c < f.c)
            set_id("full1-grow-drop");
        else
            set_id("full1-drop-drop");
    } else if (full2) {
        if (t.b >= f.b && t.c >= f.c)
            set_id("edge-grow-grow");
        else if (t.b < f.b && t.c > f.c)
            set_id("edge-drop-grow");
        else if (t.b > f.b && t.c < f.c)
            set_id("edge-grow-drop");
        else
            set_id("edge-drop-drop");
    } else {
        // Pool saturated (t.c == K) with spare room on cell 2.
        if (t.b >= f.b)
            set_id("pool-grow");
        else if (t.c == f.c)
            set_id("pool-drop-hold");
        else if (t.c > f.c)
            set_id("pool-drop-grow");
        else
            throw CoverageError("closed form: offloaded count above K at (" +
                                std::to_string(t.a) + "," + std::to_string(t.b) +
                                "," + std::to_string(t.c) + "," + std::to_string(t.d) + ")");
    }

    double sum = 0.0;
    int b1_max = std::min(f.b, t.b);
    int c1_max = std::min(f.c, t.c);
    for (int b1 = 0; b1 <= b1_max; ++b1) {
        double wb = t31[static_cast<size_t>(f.b - b1)];
        if (wb == 0.0) continue;
        double wa = cx.alpha1(f.a, t.a, b1);
        if (wa == 0.0) continue;
        for (int c1 = 0; c1 <= c1_max; ++c1) {
            double wc = t32[static_cast<size_t>(f.c - c1)];
            if (wc == 0.0) continue;
            double wd = cx.alpha2(f.d, t.d, c1);
            if (wd == 0.0) continue;
            int arrivals = (t.b - b1) + (t.c - c1);
            double w3 = saturated3 ? cx.s3_tail(active3, arrivals)
                                   : cx.s3(active3, arrivals);
            sum += wb * wa * wc * wd * w3;
        }
    }
    return sum;
}

} // namespace

double TransitionMatrix::prob(int from, int to) const {
    const auto& row = rows[static_cast<size_t>(from)];
    auto it = std::lower_bound(row.begin(), row.end(), to,
                               [](const auto& e, int col) { return e.first < col; });
    if (it != row.end() && it->first == to) return it->second;
    return 0.0;
}

double TransitionMatrix::row_sum(int from) const {
    const auto& row = rows[static_cast<size_t>(from)];
    double s = 0.0;
    for (const auto& e : row) s += e.second;
    return s;
}

std::vector<SystemState> enumerate_states(const scenario::ScenarioConfig& cfg) {
    scenario::validate(cfg);
    std::vector<SystemState> states;
    int a_max = std::min(cfg.n_1, cfg.m_1);
    int b_max = std::min(cfg.n_3, cfg.m_1);
    int c_max = std::min({cfg.n_3, cfg.m_2, cfg.k});
    int d_max = std::min(cfg.n_2, cfg.m_2);
    for (int a = 0; a <= a_max; ++a)
        for (int b = 0; b <= b_max; ++b)
            for (int c = 0; c <= c_max; ++c)
                for (int d = 0; d <= d_max; ++d) {
                    SystemState s{a, b, c, d};
                    if (state_feasible(s, cfg)) states.push_back(s);
                }
    return states;
}

TransitionMatrix build_enumeration(const scenario::ScenarioConfig& cfg,
                                   int state_budget) {
    TransitionMatrix m;
    m.backend = Backend::enumeration;
    m.states = enumerate_states(cfg);
    check_budget(m.states.size(), state_budget, "build_enumeration");
    StateIndexer index(cfg, m.states);
    process::Tables tb = process::build_tables(cfg);

    size_t n = m.states.size();
    m.rows.resize(n);

    auto build_row = [&](size_t i, std::vector<double>& dense) {
        std::fill(dense.begin(), dense.end(), 0.0);
        const SystemState s = m.states[i];
        int active3 = s.b + s.c;
        const auto& term_b = tb.t31.terminate[static_cast<size_t>(s.b)];
        const auto& term_c = tb.t32.terminate[static_cast<size_t>(s.c)];
        const auto& arr3 = tb.t31.arrive[static_cast<size_t>(active3)];
        const auto& arr3_tail = tb.t31.arrive_tail[static_cast<size_t>(active3)];
        int idle3 = static_cast<int>(arr3.size()) - 1;

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
                        int exact_max = std::min(cap - 1, idle3);
                        for (int j3 = 0; j3 <= exact_max; ++j3) {
                            int on_1 = std::min(j3, spare_1);
                            dense[static_cast<size_t>(index(a2, b1 + on_1,
                                                            c1 + (j3 - on_1), d2))] +=
                                wad * arr3[static_cast<size_t>(j3)];
                        }
                        if (cap <= idle3)
                            dense[static_cast<size_t>(index(a2, b1 + spare_1,
                                                            c1 + spare_2, d2))] +=
                                wad * arr3_tail[static_cast<size_t>(cap)];
                    }
                }
            }
        }
        m.rows[i] = compress_row(dense);
    };

    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned n_threads = static_cast<unsigned>(std::min<size_t>(hw, n));
    if (n_threads <= 1) {
        std::vector<double> dense(n, 0.0);
        for (size_t i = 0; i < n; ++i) build_row(i, dense);
    } else {
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w]() {
                std::vector<double> dense(n, 0.0);
                for (size_t i = w; i < n; i += n_threads) build_row(i, dense);
            });
        }
        for (auto& th : workers) th.join();
    }
    return m;
}

TransitionMatrix build_closed_form(const scenario::ScenarioConfig& cfg,
                                   int state_budget) {
    TransitionMatrix m;
    m.backend = Backend::closed_form;
    m.states = enumerate_states(cfg);
    check_budget(m.states.size(), state_budget, "build_closed_form");
    process::Tables tb = process::build_tables(cfg);
    ClosedCtx cx{cfg, tb};

    size_t n = m.states.size();
    m.rows.resize(n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<std::pair<int, double>> row;
        double sum = 0.0;
        for (size_t j = 0; j < n; ++j) {
            double v = closed_pair(cx, m.states[i], m.states[j], nullptr);
            if (v != 0.0) {
                row.emplace_back(static_cast<int>(j), v);
                sum += v;
            }
        }
        if (std::fabs(sum - 1.0) > 1e-6) {
            const SystemState& s = m.states[i];
            throw IntegrityError("closed form: row (" + std::to_string(s.a) + "," +
                                 std::to_string(s.b) + "," + std::to_string(s.c) +
                                 "," + std::to_string(s.d) + ") sums to " +
                                 std::to_string(sum));
        }
        m.rows[i] = std::move(row);
    }
    return m;
}

std::pair<double, std::string> closed_form_entry(const scenario::ScenarioConfig& cfg,
                                                 const SystemState& from,
                                                 const SystemState& to) {
    if (!state_feasible(from, cfg) || !state_feasible(to, cfg))
        throw DomainError("closed_form_entry: infeasible state");
    process::Tables tb = process::build_tables(cfg);
    ClosedCtx cx{cfg, tb};
    std::string id;
    double v = closed_pair(cx, from, to, &id);
    return {v, id};
}

namespace {

// Iterative Tarjan SCC; returns the number of closed (no-exit) classes.
int count_closed_classes(const TransitionMatrix& m) {
    int n = static_cast<int>(m.states.size());
    std::vector<int> indexv(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0),
        comp(static_cast<size_t>(n), -1);
    std::vector<char> on_stack(static_cast<size_t>(n), 0);
    std::vector<int> stack;
    int next_index = 0, n_comp = 0;

    struct Frame { int v; size_t edge; };
    for (int root = 0; root < n; ++root) {
        if (indexv[static_cast<size_t>(root)] != -1) continue;
        std::vector<Frame> call;
        call.push_back({root, 0});
        indexv[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = next_index++;
        stack.push_back(root);
        on_stack[static_cast<size_t>(root)] = 1;
        while (!call.empty()) {
            Frame& fr = call.back();
            const auto& row = m.rows[static_cast<size_t>(fr.v)];
            if (fr.edge < row.size()) {
                int w = row[fr.edge].first;
                ++fr.edge;
                if (indexv[static_cast<size_t>(w)] == -1) {
                    indexv[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = next_index++;
                    stack.push_back(w);
                    on_stack[static_cast<size_t>(w)] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[static_cast<size_t>(w)]) {
                    low[static_cast<size_t>(fr.v)] =
                        std::min(low[static_cast<size_t>(fr.v)], indexv[static_cast<size_t>(w)]);
                }
            } else {
                int v = fr.v;
                call.pop_back();
                if (!call.empty())
                    low[static_cast<size_t>(call.back().v)] =
                        std::min(low[static_cast<size_t>(call.back().v)], low[static_cast<size_t>(v)]);
                if (low[static_cast<size_t>(v)] == indexv[static_cast<size_t>(v)]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<size_t>(w)] = 0;
                        comp[static_cast<size_t>(w)] = n_comp;
                        if (w == v) break;
                    }
                    ++n_comp;
                }
            }
        }
    }

    std::vector<char> has_exit(static_cast<size_t>(n_comp), 0);
    for (int v = 0; v < n; ++v)
        for (const auto& e : m.rows[static_cast<size_t>(v)])
            if (comp[static_cast<size_t>(v)] != comp[static_cast<size_t>(e.first)])
                has_exit[static_cast<size_t>(comp[static_cast<size_t>(v)])] = 1;
    int closed = 0;
    for (char h : has_exit)
        if (!h) ++closed;
    return closed;
}

double balance_residual(const TransitionMatrix& m, const std::vector<double>& pi) {
    size_t n = pi.size();
    std::vector<double> next(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double w = pi[i];
        if (w == 0.0) continue;
        for (const auto& e : m.rows[i]) next[static_cast<size_t>(e.first)] += w * e.second;
    }
    double r = 0.0;
    for (size_t j = 0; j < n; ++j) r = std::max(r, std::fabs(next[j] - pi[j]));
    return r;
}

void step(const TransitionMatrix& m, const std::vector<double>& pi,
          std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (size_t i = 0; i < pi.size(); ++i) {
        double w = pi[i];
        if (w == 0.0) continue;
        for (const auto& e : m.rows[i]) out[static_cast<size_t>(e.first)] += w * e.second;
    }
}

void normalize(std::vector<double>& v) {
    double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= s;
}

bool solve_direct(const TransitionMatrix& m, std::vector<double>& pi, double tol,
                  double& residual) {
    int n = static_cast<int>(m.states.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (const auto& e : m.rows[static_cast<size_t>(i)])
            A(e.first, i) += e.second; // transpose
        A(i, i) -= 1.0;
    }
    // The balance equations are rank n-1 with columns of A summing to zero,
    // so any single equation may be traded for the normalization row.
    for (int j = 0; j < n; ++j) A(n - 1, j) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd x = A.partialPivLu().solve(b);

    pi.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double v = x(i);
        if (!std::isfinite(v)) return false;
        pi[static_cast<size_t>(i)] = std::max(0.0, v);
    }
    normalize(pi);
    residual = balance_residual(m, pi);
    return residual <= std::max(tol, 1e-12);
}

} // namespace

SteadyStateDistribution steady_state(const TransitionMatrix& m, double tol,
                                     long max_iter, int direct_threshold) {
    size_t n = m.states.size();
    if (n == 0) throw StructuralError("steady_state: empty state space");
    int closed = count_closed_classes(m);
    if (closed != 1)
        throw StructuralError("steady_state: chain has " + std::to_string(closed) +
                              " closed classes; stationary distribution is not unique");

    SteadyStateDistribution out;
    out.states = m.states;

    if (static_cast<int>(n) <= direct_threshold) {
        double residual = 0.0;
        std::vector<double> pi;
        if (solve_direct(m, pi, tol, residual)) {
            out.pi = std::move(pi);
            out.residual = residual;
            out.iterations = 0;
            return out;
        }
        // fall through to power iteration
    }

    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n, 0.0);
    long it = 0;
    for (; it < max_iter; ++it) {
        step(m, pi, next);
        double r = 0.0;
        for (size_t j = 0; j < n; ++j) r = std::max(r, std::fabs(next[j] - pi[j]));
        pi.swap(next);
        normalize(pi);
        if (r <= tol) {
            out.pi = std::move(pi);
            out.residual = balance_residual(m, out.pi);
            out.iterations = it + 1;
            return out;
        }
    }

    // Cesaro averaging rescues oscillating (near-periodic) iterations.
    std::vector<double> acc(pi);
    long count = 1;
    for (long extra = 0; extra < max_iter; ++extra) {
        step(m, pi, next);
        pi.swap(next);
        normalize(pi);
        for (size_t j = 0; j < n; ++j) acc[j] += pi[j];
        ++count;
        if ((extra & 255) == 255) {
            std::vector<double> avg(n);
            for (size_t j = 0; j < n; ++j) avg[j] = acc[j] / static_cast<double>(count);
            normalize(avg);
            double r = balance_residual(m, avg);
            if (r <= tol) {
                out.pi = std::move(avg);
                out.residual = r;
                out.iterations = it + extra + 1;
                return out;
            }
        }
    }
    throw ConvergenceError("steady_state: no convergence to " + std::to_string(tol) +
                           " within " + std::to_string(2 * max_iter) + " iterations");
}

double total_variation(const SteadyStateDistribution& x,
                       const SteadyStateDistribution& y) {
    if (x.pi.size() != y.pi.size())
        throw DomainError("total_variation: dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < x.pi.size(); ++i) s += std::fabs(x.pi[i] - y.pi[i]);
    return 0.5 * s;
}

namespace {
std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

void write_matrix_csv(const TransitionMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << "a,b,c,d,a_next,b_next,c_next,d_next,prob\n";
    for (size_t i = 0; i < m.rows.size(); ++i) {
        const SystemState& s = m.states[i];
        for (const auto& e : m.rows[i]) {
            const SystemState& t = m.states[static_cast<size_t>(e.first)];
            out << s.a << ',' << s.b << ',' << s.c << ',' << s.d << ',' << t.a << ','
                << t.b << ',' << t.c << ',' << t.d << ',' << fmt_double(e.second)
                << '\n';
        }
    }
}

void write_pi_csv(const SteadyStateDistribution& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << "a,b,c,d,pi\n";
    for (size_t i = 0; i < d.pi.size(); ++i) {
        const SystemState& s = d.states[i];
        out << s.a << ',' << s.b << ',' << s.c << ',' << s.d << ','
            << fmt_double(d.pi[i]) << '\n';
    }
}

} // namespace drk::chain
