#pragma once

// Exhaustive re-implementations of the voting criteria, written from the
// definitions without sharing code with the library.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

using Table = std::vector<std::vector<double>>;

inline std::optional<std::size_t> bf_row_vote(const std::vector<double>& row) {
    std::set<double> distinct(row.begin(), row.end());
    if (distinct.size() <= 1) return std::nullopt;
    const double lo = *distinct.begin();
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] == lo) return j;
    }
    return std::nullopt;
}

inline std::optional<std::size_t> bf_rmv(const Table& m) {
    std::map<std::size_t, int> count;
    for (const auto& row : m) {
        if (auto v = bf_row_vote(row)) ++count[*v];
    }
    int best = 0;
    for (const auto& [col, c] : count) best = std::max(best, c);
    std::vector<std::size_t> winners;
    for (const auto& [col, c] : count) {
        if (c == best) winners.push_back(col);
    }
    if (best == 0 || winners.size() != 1) return std::nullopt;
    return winners.front();
}

inline std::optional<std::size_t> bf_armv(const Table& m) {
    if (m.empty()) return std::nullopt;
    std::vector<double> mean(m.front().size(), 0.0);
    for (std::size_t j = 0; j < mean.size(); ++j) {
        for (const auto& row : m) mean[j] += row[j];
        mean[j] /= static_cast<double>(m.size());
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < mean.size(); ++j) {
        if (mean[j] < mean[best]) best = j;
    }
    return best;
}

inline std::optional<std::size_t> bf_ormv(const Table& m) {
    std::set<std::size_t> votes;
    for (const auto& row : m) {
        if (auto v = bf_row_vote(row)) votes.insert(*v);
    }
    if (votes.size() != 1) return std::nullopt;
    return *votes.begin();
}

}  // namespace oracle
