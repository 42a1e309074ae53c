#pragma once

// Reference computations for tests. These deliberately avoid the library's
// ranking and integration code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// The n-subset of 24 hours with the largest summed value, by full enumeration.
/// Among equal sums, the lexicographically smallest subset wins.
inline std::vector<int> best_subset(const std::array<double, 24>& values, int n)
{
    std::vector<int> best;
    double best_sum = -INFINITY;
    std::vector<int> current;
    std::function<void(int, double)> recurse = [&](int next, double sum) {
        if (static_cast<int>(current.size()) == n) {
            if (sum > best_sum) {
                best_sum = sum;
                best = current;
            }
            return;
        }
        for (int h = next; h <= 24 - (n - static_cast<int>(current.size())); ++h) {
            current.push_back(h);
            recurse(h + 1, sum + values[static_cast<std::size_t>(h)]);
            current.pop_back();
        }
    };
    recurse(0, 0.0);
    return best;
}

/// Hours of one day, most expensive first; earlier hour first on equal price.
inline std::vector<int> sorted_hours(const std::array<double, 24>& day)
{
    std::vector<std::pair<double, int>> keyed;
    for (int h = 0; h < 24; ++h)
        keyed.emplace_back(-day[static_cast<std::size_t>(h)], h);
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> out;
    for (const auto& [_, h] : keyed)
        out.push_back(h);
    return out;
}

/// Sum of the n largest values of a day.
inline double top_n_sum(const std::array<double, 24>& day, int n)
{
    auto copy = day;
    std::sort(copy.begin(), copy.end(), std::greater<>());
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += copy[static_cast<std::size_t>(i)];
    return s;
}

/// Hand-rolled generator of day-by-hour price matrices.
inline std::vector<std::array<double, 24>> random_days(std::mt19937_64& rng, int days, double lo = 0.01,
                                                       double hi = 0.10)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<std::array<double, 24>> out(static_cast<std::size_t>(days));
    for (auto& d : out)
        for (auto& p : d)
            p = u(rng);
    return out;
}

} // namespace oracle
