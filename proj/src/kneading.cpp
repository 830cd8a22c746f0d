#include "kneadlab/kneading.hpp"

#include <cmath>
#include <future>
#include <limits>

namespace kneadlab {

std::string KneadingSequence::str() const {
    std::string out;
    out.reserve(symbols.size());
    for (int s : symbols) {
        if (s == 0)
            out += '0';
        else if (lorenz)
            out += (s < 0 ? 'L' : 'R');
        else
            out += (s < 0 ? '-' : '+');
    }
    return out;
}

KneadingSequence KneadingSequence::parse(const std::string& word) {
    KneadingSequence k;
    for (size_t i = 0; i < word.size(); ++i) {
        char ch = word[i];
        if (ch == '-' || ch == 'L') {
            k.symbols.push_back(-1);
            k.lorenz = k.lorenz || ch == 'L';
        } else if (ch == '+' || ch == 'R') {
            k.symbols.push_back(+1);
            k.lorenz = k.lorenz || ch == 'R';
        } else if (ch == '0') {
            k.symbols.push_back(0);
        } else if ((unsigned char)ch == 0xe2 && i + 2 < word.size()) {
            k.symbols.push_back(-1);  // UTF-8 minus sign
            i += 2;
        } else {
            fail(ErrorCode::InvalidArgument,
                 std::string("bad kneading symbol '") + ch + "'");
        }
    }
    if (!k.symbols.empty() && k.symbols.back() == 0)
        k.period = int(k.symbols.size());
    return k;
}

KneadingSequence itinerary(const Family& family, const Params& params,
                           SidedPoint x0, int n, double delta_hit) {
    require(n >= 1 && n <= 4096, ErrorCode::InvalidArgument,
            "itinerary length must be in [1, 4096]");
    require(delta_hit >= 0, ErrorCode::InvalidArgument, "delta_hit >= 0");
    auto center_opt = family.symbolic_center(params);
    require(center_opt.has_value(), ErrorCode::Unsupported,
            "family has no single symbolic turning point");
    double center = *center_opt;
    auto [dom_lo, dom_hi] = family.domain_bounds();

    KneadingSequence k;
    k.lorenz =
        family.kind() == Kind::LorenzAffine || family.kind() == Kind::LorenzFlat;
    bool from_center = std::abs(x0.x - center) <= delta_hit;

    SidedPoint p = x0;
    for (int i = 1; i <= n; ++i) {
        double y = family.eval(params, p);
        require(!std::isnan(y) && y >= dom_lo && y <= dom_hi,
                ErrorCode::OrbitEscaped, "orbit left the invariant interval");
        double rel = y - center;
        if (std::abs(rel) <= delta_hit) {
            k.symbols.push_back(0);
            if (from_center) k.period = i;
            return k;
        }
        k.symbols.push_back(rel < 0 ? -1 : +1);
        p = at(y);
    }
    k.truncated = true;
    return k;
}

KneadingSequence kneading(const Family& family, const Params& params, int n,
                          double delta_hit) {
    auto crit = family.critical_data(params);
    require(!crit.empty(), ErrorCode::Unsupported, "family has no marked point");
    if (family.kind() == Kind::LorenzAffine || family.kind() == Kind::LorenzFlat)
        fail(ErrorCode::Unsupported,
             "Lorenz kinds carry a pair of words; use lorenz_kneading");
    require(crit.size() == 1, ErrorCode::Unsupported,
            "kneading needs a single turning point");
    return itinerary(family, params, crit[0].point, n, delta_hit);
}

LorenzKneading lorenz_kneading(const Family& family, const Params& params,
                               int n, double delta_hit) {
    auto crit = family.critical_data(params);
    require(crit.size() == 2, ErrorCode::Unsupported,
            "pair kneading needs a two-sided marked point");
    return {itinerary(family, params, crit[0].point, n, delta_hit),
            itinerary(family, params, crit[1].point, n, delta_hit)};
}

MTOrder mt_compare(const KneadingSequence& a, const KneadingSequence& b) {
    require(!a.symbols.empty() && !b.symbols.empty(),
            ErrorCode::InvalidArgument, "cannot compare empty words");
    size_t n = std::min(a.symbols.size(), b.symbols.size());
    int prod_a = 1, prod_b = 1;
    for (size_t i = 0; i < n; ++i) {
        prod_a *= a.symbols[i];
        prod_b *= b.symbols[i];
        if (a.symbols[i] != b.symbols[i]) {
            if (prod_a < prod_b) return MTOrder::Less;
            if (prod_a > prod_b) return MTOrder::Greater;
            return MTOrder::Equal;  // a 0 in the shared prefix kills both products
        }
    }
    if (a.symbols.size() == b.symbols.size()) return MTOrder::Equal;
    return MTOrder::UndecidedPrefix;
}

double constant_slope_entropy(double s) {
    require(s >= 1.0, ErrorCode::InvalidArgument, "slope must be >= 1");
    return std::log(s);
}

std::vector<ScanRow> kneading_scan(const Family& family, double from,
                                   double to, int steps, int prefix,
                                   double delta_hit, int threads) {
    require(steps >= 2, ErrorCode::InvalidArgument, "need at least two steps");
    std::vector<double> grid(steps);
    for (int i = 0; i < steps; ++i)
        grid[i] = from + (to - from) * double(i) / double(steps - 1);

    std::vector<ScanRow> rows(steps);
    auto work = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            rows[i].param = grid[i];
            rows[i].word = kneading(family, {grid[i]}, prefix, delta_hit);
        }
    };
    threads = std::max(1, threads);
    if (threads == 1) {
        work(0, steps);
    } else {
        int chunk = (steps + threads - 1) / threads;
        std::vector<std::future<void>> futs;
        for (int t = 0; t < threads; ++t) {
            int lo = t * chunk, hi = std::min(steps, lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, work, lo, hi));
        }
        for (auto& f : futs) f.get();
    }
    for (int i = 1; i < steps; ++i)
        rows[i].compare_to_prev = mt_compare(rows[i - 1].word, rows[i].word);
    return rows;
}

}  // namespace kneadlab
