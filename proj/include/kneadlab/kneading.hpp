#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kneadlab/families.hpp"

namespace kneadlab {

/// Symbolic itinerary relative to the family's turning point or
/// discontinuity: -1 / +1 for the two sides, 0 for a hit within delta_hit.
struct KneadingSequence {
    std::vector<int> symbols;
    std::optional<int> period;  // set when a hit closes a superstable cycle
    bool truncated = false;     // ran out of the requested length without a hit
    bool lorenz = false;        // render symbols as L/R instead of -/+

    int length() const { return int(symbols.size()); }
    std::string str() const;
    static KneadingSequence parse(const std::string& word);
};

/// Pair of one-sided itineraries for maps with a discontinuity.
struct LorenzKneading {
    KneadingSequence minus;
    KneadingSequence plus;
};

enum class MTOrder { Less, Equal, Greater, UndecidedPrefix };

/// Itinerary of x0: symbol k is the side of f^k(x0) relative to the turning
/// point, with |f^k(x0) - center| <= delta_hit recorded as 0. Stops at the
/// first 0; the period is set when x0 itself is the turning point.
KneadingSequence itinerary(const Family& family, const Params& params,
                           SidedPoint x0, int n, double delta_hit = 1e-9);

/// Kneading data: itinerary of the critical point (pair of one-sided
/// itineraries for Lorenz kinds).
KneadingSequence kneading(const Family& family, const Params& params, int n,
                          double delta_hit = 1e-9);
LorenzKneading lorenz_kneading(const Family& family, const Params& params,
                               int n, double delta_hit = 1e-9);

/// Signed-lexicographic order on kneading words: at the first differing
/// index n, compare the running products of the first n symbols.
MTOrder mt_compare(const KneadingSequence& a, const KneadingSequence& b);

/// Topological entropy of a constant-slope map: log s.
double constant_slope_entropy(double s);

struct ScanRow {
    double param = 0.0;
    KneadingSequence word;
    std::optional<MTOrder> compare_to_prev;
};

/// Kneading words over a parameter grid with consecutive MT comparisons.
/// `threads` > 1 splits the grid; merge order is deterministic.
std::vector<ScanRow> kneading_scan(const Family& family, double from,
                                   double to, int steps, int prefix,
                                   double delta_hit = 1e-9, int threads = 1);

}  // namespace kneadlab
