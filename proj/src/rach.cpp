#include "drk/rach.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "drk/errors.hpp"

namespace drk::rach {

namespace {

// Binomial pmf row: P(r successes | n trials, prob), r = 0..n.
std::vector<double> binomial_row(int n, double prob) {
    std::vector<double> row(static_cast<size_t>(n) + 1, 0.0);
    if (prob <= 0.0) { row[0] = 1.0; return row; }
    if (prob >= 1.0) { row[static_cast<size_t>(n)] = 1.0; return row; }
    // Multiplicative recurrence, numerically benign for the small n used here.
    double v = std::pow(1.0 - prob, n);
    for (int r = 0; r <= n; ++r) {
        row[static_cast<size_t>(r)] = v;
        if (r < n)
            v *= (static_cast<double>(n - r) / (r + 1)) * (prob / (1.0 - prob));
    }
    return row;
}

SuccessDistribution compute_success_dist(int k, int slots) {
    SuccessDistribution out;
    out.requesters = k;
    out.slots = slots;
    out.probs.assign(static_cast<size_t>(k) + 1, 0.0);

    // cur[m][j]: probability that after filling some slots, m requesters are
    // still unplaced and j singleton slots were produced. Fill the remaining
    // slots one at a time; the count landing in the next of s remaining slots
    // is Binomial(m, 1/s).
    std::vector<std::vector<double>> cur(
        static_cast<size_t>(k) + 1,
        std::vector<double>(static_cast<size_t>(k) + 1, 0.0));
    cur[static_cast<size_t>(k)][0] = 1.0;
    for (int s = slots; s >= 1; --s) {
        std::vector<std::vector<double>> next(
            static_cast<size_t>(k) + 1,
            std::vector<double>(static_cast<size_t>(k) + 1, 0.0));
        for (int m = 0; m <= k; ++m) {
            std::vector<double> occ = binomial_row(m, 1.0 / s);
            for (int j = 0; j <= k; ++j) {
                double w = cur[static_cast<size_t>(m)][static_cast<size_t>(j)];
                if (w == 0.0) continue;
                for (int r = 0; r <= m; ++r) {
                    int nj = j + (r == 1 ? 1 : 0);
                    next[static_cast<size_t>(m - r)][static_cast<size_t>(nj)] +=
                        w * occ[static_cast<size_t>(r)];
                }
            }
        }
        cur.swap(next);
    }
    for (int j = 0; j <= k; ++j)
        out.probs[static_cast<size_t>(j)] = cur[0][static_cast<size_t>(j)];
    return out;
}

} // namespace

const SuccessDistribution& success_dist(int k, int slots) {
    if (k < 0)
        throw DomainError("rach: requester count must be non-negative");
    if (slots < 1)
        throw DomainError("rach: slot count must be at least 1");

    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<SuccessDistribution>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(k, slots);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto value = std::make_unique<SuccessDistribution>(compute_success_dist(k, slots));
        it = cache.emplace(key, std::move(value)).first;
    }
    // Entries are never erased, so the reference stays valid after unlock.
    return *it->second;
}

SuccessDistribution success_dist_oracle(int k, int slots, long long budget) {
    if (k < 0)
        throw DomainError("rach: requester count must be non-negative");
    if (slots < 1)
        throw DomainError("rach: slot count must be at least 1");
    double total_d = std::pow(static_cast<double>(slots), k);
    if (total_d > static_cast<double>(budget))
        throw CapacityError("rach oracle: " + std::to_string(slots) + "^" +
                            std::to_string(k) + " assignments exceed budget " +
                            std::to_string(budget));

    SuccessDistribution out;
    out.requesters = k;
    out.slots = slots;
    out.probs.assign(static_cast<size_t>(k) + 1, 0.0);
    long long total = static_cast<long long>(std::llround(total_d));
    std::vector<int> choice(static_cast<size_t>(k), 0);
    std::vector<int> occ(static_cast<size_t>(slots), 0);
    for (long long n = 0; n < total; ++n) {
        for (int s = 0; s < slots; ++s) occ[static_cast<size_t>(s)] = 0;
        for (int i = 0; i < k; ++i) ++occ[static_cast<size_t>(choice[static_cast<size_t>(i)])];
        int singles = 0;
        for (int s = 0; s < slots; ++s)
            if (occ[static_cast<size_t>(s)] == 1) ++singles;
        out.probs[static_cast<size_t>(singles)] += 1.0;
        // Odometer increment over the k slot choices.
        for (int i = 0; i < k; ++i) {
            if (++choice[static_cast<size_t>(i)] < slots) break;
            choice[static_cast<size_t>(i)] = 0;
        }
    }
    for (double& p : out.probs) p /= static_cast<double>(total);
    return out;
}

double expected_successes(int k, int slots) {
    if (k <= 0) return 0.0;
    return k * std::pow(1.0 - 1.0 / slots, k - 1);
}

} // namespace drk::rach
