#include "drk/kinetics.hpp"

#include <cmath>
#include <string>

#include "drk/errors.hpp"
#include "drk/rach.hpp"

namespace drk::kinetics {

namespace {

void check_range(const GroupKinetics& kin, int i) {
    if (i < 0 || i > kin.population)
        throw DomainError("kinetics: active count " + std::to_string(i) +
                          " outside [0, " + std::to_string(kin.population) + "]");
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

} // namespace

double termination_rate(double w_down, double q) {
    return 1.0 - w_down + w_down * q;
}

std::vector<double> arrangement_dist(const GroupKinetics& kin, int i) {
    check_range(kin, i);
    int idle = kin.population - i;
    std::vector<double> dist(static_cast<size_t>(idle) + 1, 0.0);
    // Mix over the requester count; the bad-uplink branch contributes all of
    // its mass to zero successes.
    dist[0] = 1.0 - kin.w_up;
    std::vector<double> requesters = binomial_pmf(idle, kin.p);
    for (int k = 0; k <= idle; ++k) {
        double pk = requesters[static_cast<size_t>(k)];
        if (pk == 0.0) continue;
        const auto& succ = rach::success_dist(k, kin.slots);
        for (int j = 0; j <= k; ++j)
            dist[static_cast<size_t>(j)] += kin.w_up * pk * succ.probs[static_cast<size_t>(j)];
    }
    return dist;
}

std::vector<double> termination_dist(const GroupKinetics& kin, int i) {
    check_range(kin, i);
    return binomial_pmf(i, termination_rate(kin.w_down, kin.q));
}

GroupTables tabulate(const GroupKinetics& kin) {
    GroupTables t;
    t.kin = kin;
    int n = kin.population;
    t.arrive.resize(static_cast<size_t>(n) + 1);
    t.arrive_tail.resize(static_cast<size_t>(n) + 1);
    t.arrive_excess.resize(static_cast<size_t>(n) + 1);
    t.terminate.resize(static_cast<size_t>(n) + 1);
    t.arrive_mean.resize(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        t.arrive[static_cast<size_t>(i)] = arrangement_dist(kin, i);
        t.terminate[static_cast<size_t>(i)] = termination_dist(kin, i);
        const auto& row = t.arrive[static_cast<size_t>(i)];
        std::vector<double> tail(row.size() + 1, 0.0);
        for (int j = static_cast<int>(row.size()) - 1; j >= 0; --j)
            tail[static_cast<size_t>(j)] =
                tail[static_cast<size_t>(j) + 1] + row[static_cast<size_t>(j)];
        std::vector<double> excess(tail.size() + 1, 0.0);
        for (int j = static_cast<int>(tail.size()) - 1; j >= 0; --j)
            excess[static_cast<size_t>(j)] =
                excess[static_cast<size_t>(j) + 1] + tail[static_cast<size_t>(j)];
        double mean = 0.0;
        for (size_t j = 0; j < row.size(); ++j) mean += static_cast<double>(j) * row[j];
        t.arrive_tail[static_cast<size_t>(i)] = std::move(tail);
        t.arrive_excess[static_cast<size_t>(i)] = std::move(excess);
        t.arrive_mean[static_cast<size_t>(i)] = mean;
    }
    return t;
}

} // namespace drk::kinetics
