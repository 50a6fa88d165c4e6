#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace spectra4 {

/// Invariant subspaces of the 2-periodic problem: periodic functions are
/// spanned by even wavenumbers e^{i pi k t}, antiperiodic ones by odd k.
enum class Sector { periodic, antiperiodic };
enum class Branch { minus, plus };

inline const char* to_string(Sector s) { return s == Sector::periodic ? "periodic" : "antiperiodic"; }
inline const char* to_string(Branch b) { return b == Branch::minus ? "-" : "+"; }

/// The sector that index n belongs to for large n.
inline Sector expected_sector(int n) { return n % 2 == 0 ? Sector::periodic : Sector::antiperiodic; }

/// Floquet multiplier tau of a sector: +1 periodic, -1 antiperiodic.
inline double multiplier(Sector s) { return s == Sector::periodic ? 1.0 : -1.0; }

struct LadderEntry {
    int n = 0;
    Branch sign = Branch::plus;
    Sector sector = Sector::periodic;
    double value = 0.0;
};

/// Ordered eigenvalues lambda_0^+ <= lambda_1^- <= lambda_1^+ <= ...
struct EigenLadder {
    std::vector<LadderEntry> entries;

    const LadderEntry* find(int n, Branch sign) const {
        for (const auto& e : entries)
            if (e.n == n && e.sign == sign) return &e;
        return nullptr;
    }

    int max_index() const { return entries.empty() ? -1 : entries.back().n; }

    bool ordered() const {
        return std::is_sorted(entries.begin(), entries.end(),
                              [](const LadderEntry& a, const LadderEntry& b) { return a.value < b.value; });
    }

    /// Indices whose sector differs from the parity of n.
    std::vector<int> parity_mismatches() const {
        std::vector<int> out;
        for (const auto& e : entries)
            if (e.sector != expected_sector(e.n) && (out.empty() || out.back() != e.n)) out.push_back(e.n);
        return out;
    }
};

/// Position i of the sorted spectrum carries label (0,+), (1,-), (1,+), (2,-), ...
inline std::pair<int, Branch> ladder_label(std::size_t position) {
    if (position == 0) return {0, Branch::plus};
    const int n = static_cast<int>((position + 1) / 2);
    return {n, position % 2 == 1 ? Branch::minus : Branch::plus};
}

/// Sorts (value, sector) pairs ascending and labels them; keeps positions 0..2*n_max.
inline EigenLadder make_ladder(std::vector<std::pair<double, Sector>> values, int n_max) {
    std::stable_sort(values.begin(), values.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    EigenLadder ladder;
    const std::size_t count = std::min(values.size(), static_cast<std::size_t>(2 * n_max + 1));
    for (std::size_t i = 0; i < count; ++i) {
        const auto [n, sign] = ladder_label(i);
        ladder.entries.push_back({n, sign, values[i].second, values[i].first});
    }
    return ladder;
}

}  // namespace spectra4
