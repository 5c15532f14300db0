#include "multinorm/journe.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace multinorm {

DyadicModel::DyadicModel(std::vector<int> depths) : depths_(std::move(depths)) {
    cells_ = 1;
    strides_.assign(depths_.size(), 1);
    for (int r = factors() - 1; r >= 0; --r) {
        strides_[r] = cells_;
        cells_ *= cells_per_factor(r);
    }
    // strides currently reversed: recompute row-major (factor 0 slowest).
    std::size_t s = 1;
    for (int r = factors() - 1; r >= 0; --r) {
        strides_[r] = s;
        s *= cells_per_factor(r);
    }
}

Rational DyadicModel::rect_measure(const Rect& r) const {
    Rational m(1);
    for (int f = 0; f < factors(); ++f) m *= Rational(1, 1LL << r.level[f]);
    return m;
}

void DyadicModel::cell_range(const Rect& r, int factor, long long& lo, long long& hi) const {
    const int shift = depths_[factor] - r.level[factor];
    lo = r.offset[factor] << shift;
    hi = (r.offset[factor] + 1) << shift;
}

bool DyadicModel::rect_contains(const Rect& outer, const Rect& inner) const {
    for (int f = 0; f < factors(); ++f) {
        if (outer.level[f] > inner.level[f]) return false;
        if ((inner.offset[f] >> (inner.level[f] - outer.level[f])) != outer.offset[f]) return false;
    }
    return true;
}

DyadicModel::Rect DyadicModel::parent_in(const Rect& r, int factor, int steps) const {
    Rect out = r;
    const int target = std::max(0, r.level[factor] - steps);
    out.offset[factor] = r.offset[factor] >> (r.level[factor] - target);
    out.level[factor] = target;
    return out;
}

void DyadicModel::paint(CellSet& set, const Rect& r) const {
    std::vector<long long> lo(factors()), hi(factors());
    for (int f = 0; f < factors(); ++f) cell_range(r, f, lo[f], hi[f]);
    std::vector<long long> idx = lo;
    while (true) {
        std::size_t flat = 0;
        for (int f = 0; f < factors(); ++f) flat += strides_[f] * (std::size_t)idx[f];
        set[flat] = 1;
        int f = factors() - 1;
        while (f >= 0) {
            if (++idx[f] < hi[f]) break;
            idx[f] = lo[f];
            --f;
        }
        if (f < 0) break;
    }
}

Rational DyadicModel::measure(const CellSet& set) const {
    long long count = 0;
    for (char c : set) count += c;
    long long total_depth = 0;
    for (int f = 0; f < factors(); ++f) total_depth += depths_[f];
    return Rational(count, 1LL << total_depth);
}

long long DyadicModel::count_inside(const CellSet& set, const Rect& r) const {
    std::vector<long long> lo(factors()), hi(factors());
    for (int f = 0; f < factors(); ++f) cell_range(r, f, lo[f], hi[f]);
    long long count = 0;
    std::vector<long long> idx = lo;
    while (true) {
        std::size_t flat = 0;
        for (int f = 0; f < factors(); ++f) flat += strides_[f] * (std::size_t)idx[f];
        count += set[flat];
        int f = factors() - 1;
        while (f >= 0) {
            if (++idx[f] < hi[f]) break;
            idx[f] = lo[f];
            --f;
        }
        if (f < 0) break;
    }
    return count;
}

long long DyadicModel::rect_cells(const Rect& r) const {
    long long c = 1;
    for (int f = 0; f < factors(); ++f) c <<= depths_[f] - r.level[f];
    return c;
}

std::vector<DyadicModel::Rect> DyadicModel::all_rects() const {
    std::vector<Rect> out;
    std::vector<int> level(factors(), 0);
    while (true) {
        // All offsets for this level vector.
        Rect r;
        r.level = level;
        r.offset.assign(factors(), 0);
        while (true) {
            out.push_back(r);
            int f = factors() - 1;
            while (f >= 0) {
                if (++r.offset[f] < (1LL << level[f])) break;
                r.offset[f] = 0;
                --f;
            }
            if (f < 0) break;
        }
        int f = factors() - 1;
        while (f >= 0) {
            if (++level[f] <= depths_[f]) break;
            level[f] = 0;
            --f;
        }
        if (f < 0) break;
    }
    return out;
}

OpenSetModel standard_enlarge(const DyadicModel& m, const OpenSetModel& omega) {
    OpenSetModel out;
    out.cells = omega.cells;
    for (const auto& r : m.all_rects()) {
        const long long inside = m.count_inside(omega.cells, r);
        if (2 * inside > m.rect_cells(r)) m.paint(out.cells, r);
    }
    out.measure = m.measure(out.cells);
    return out;
}

OpenSetModel standard_enlarge(const DyadicModel& m, const OpenSetModel& omega, int j) {
    OpenSetModel cur = omega;
    for (int k = 0; k < j; ++k) cur = standard_enlarge(m, cur);
    return cur;
}

Embeddedness embeddedness(const DyadicModel& m, const OpenSetModel& omega,
                          const DyadicModel::Rect& rect, int factor) {
    if (m.count_inside(omega.cells, rect) != m.rect_cells(rect))
        throw std::invalid_argument("embeddedness: rectangle not contained in the open set");
    Embeddedness out;
    const int level = rect.level[factor];
    for (int k = 0; k <= level; ++k) {
        auto enlarged = m.parent_in(rect, factor, k);
        if (2 * m.count_inside(omega.cells, enlarged) > m.rect_cells(enlarged)) {
            out.mu = k;
            if (k == level) out.capped = true;
        }
    }
    return out;
}

EnlargementState string_enlarge(const DyadicModel& m, const OpenSetModel& omega,
                                const std::vector<DyadicModel::Rect>& family,
                                const std::vector<int>& string) {
    for (int r : string)
        if (r < 0 || r >= m.factors())
            throw std::invalid_argument("string_enlarge: string entry out of range");
    EnlargementState st;
    st.string = string;
    st.rects = family;
    const int N = (int)string.size();
    st.omega_steps.push_back(omega);
    for (int j = 1; j <= N + 1; ++j)
        st.omega_steps.push_back(standard_enlarge(m, st.omega_steps.back()));

    st.m_final.resize(family.size());
    st.m_history.resize(family.size());
    for (std::size_t q = 0; q < family.size(); ++q) {
        std::vector<long long> mm(m.factors(), 0);
        DyadicModel::Rect cur = family[q];
        st.m_history[q].push_back(mm);
        for (int j = 1; j <= N; ++j) {
            const int rj = string[j - 1];
            auto emb = embeddedness(m, st.omega_steps[j], cur, rj);
            mm[rj] += emb.mu;
            cur = m.parent_in(cur, rj, (int)emb.mu);
            st.m_history[q].push_back(mm);
        }
        st.m_final[q] = mm;
    }

    // Measures of the dyadically and rescaling-enlarged unions.
    auto bar = m.empty_set();
    for (std::size_t q = 0; q < family.size(); ++q) {
        DyadicModel::Rect cur = family[q];
        for (int f = 0; f < m.factors(); ++f) cur = m.parent_in(cur, f, (int)st.m_final[q][f]);
        m.paint(bar, cur);
    }
    st.omega_bar_measure = m.measure(bar);

    auto hat = m.empty_set();
    for (std::size_t q = 0; q < family.size(); ++q) {
        // Center-rescaled enlargement: per factor, the interval with the same
        // center and radius 2^{m} * side, clipped to [0,1).
        std::vector<long long> lo(m.factors()), hi(m.factors());
        for (int f = 0; f < m.factors(); ++f) {
            const int level = family[q].level[f];
            const long long off = family[q].offset[f];
            const int D = m.depth(f);
            // Work at cell resolution: center*2^D = (2 off + 1) << (D-level-1).
            const long long side_cells = 1LL << (D - level);
            const long long centre2 = (2 * off + 1) << (D - level);  // in half-cells
            const long long radius2 = (1LL << st.m_final[q][f]) * side_cells * 2;
            long long l2 = centre2 - radius2, h2 = centre2 + radius2;
            lo[f] = std::max(0LL, l2 / 2);
            hi[f] = std::min((long long)m.cells_per_factor(f), (h2 + 1) / 2);
        }
        std::vector<long long> idx = lo;
        if ([&] {
                for (int f = 0; f < m.factors(); ++f)
                    if (lo[f] >= hi[f]) return false;
                return true;
            }())
            while (true) {
                std::size_t flat = 0;
                for (int f = 0; f < m.factors(); ++f) {
                    std::size_t stride = 1;
                    for (int ff = f + 1; ff < m.factors(); ++ff) stride *= m.cells_per_factor(ff);
                    flat += stride * (std::size_t)idx[f];
                }
                hat[flat] = 1;
                int f = m.factors() - 1;
                while (f >= 0) {
                    if (++idx[f] < hi[f]) break;
                    idx[f] = lo[f];
                    --f;
                }
                if (f < 0) break;
            }
    }
    st.omega_hat_measure = m.measure(hat);
    return st;
}

bool string_contains(const std::vector<int>& string, const std::vector<int>& subset) {
    const std::size_t b = subset.size();
    if (b == 0 || b > string.size()) return false;
    std::set<int> want(subset.begin(), subset.end());
    for (std::size_t k = 0; k + b <= string.size(); ++k) {
        std::set<int> seg(string.begin() + k, string.begin() + k + b);
        if (seg == want && seg.size() == b) return true;
    }
    return false;
}

bool string_complete(const std::vector<int>& string, int s) {
    for (int mask = 1; mask < (1 << s); ++mask) {
        std::vector<int> subset;
        for (int r = 0; r < s; ++r)
            if (mask & (1 << r)) subset.push_back(r);
        if (!string_contains(string, subset)) return false;
    }
    return true;
}

std::vector<int> default_complete_string(int s) {
    if (s == 1) return {0};
    if (s == 2) return {0, 1, 0};
    if (s == 3) return {0, 1, 2, 0};  // the classical three-factor string
    // Fallback: concatenate one listing per subset; each appears as its own
    // contiguous segment.
    std::vector<int> out;
    for (int mask = 1; mask < (1 << s); ++mask)
        for (int r = 0; r < s; ++r)
            if (mask & (1 << r)) out.push_back(r);
    return out;
}

namespace {

// Reduced model over a subset of factors, for shadow measures.
Rational shadow_measure_cells(const DyadicModel& m, const std::vector<int>& proj_factors,
                              const std::vector<DyadicModel::Rect>& rects) {
    // Paint at finest resolution over the projected factors.
    std::size_t cells = 1;
    for (int f : proj_factors) cells *= m.cells_per_factor(f);
    std::vector<char> set(cells, 0);
    for (const auto& r : rects) {
        std::vector<long long> lo(proj_factors.size()), hi(proj_factors.size());
        for (std::size_t k = 0; k < proj_factors.size(); ++k) {
            const int f = proj_factors[k];
            const int shift = m.depth(f) - r.level[f];
            lo[k] = r.offset[f] << shift;
            hi[k] = (r.offset[f] + 1) << shift;
        }
        std::vector<long long> idx = lo;
        while (true) {
            std::size_t flat = 0;
            for (std::size_t k = 0; k < proj_factors.size(); ++k)
                flat = flat * m.cells_per_factor(proj_factors[k]) + (std::size_t)idx[k];
            set[flat] = 1;
            int k = (int)proj_factors.size() - 1;
            while (k >= 0) {
                if (++idx[k] < hi[k]) break;
                idx[k] = lo[k];
                --k;
            }
            if (k < 0) break;
        }
    }
    long long count = 0;
    for (char c : set) count += c;
    long long total_depth = 0;
    for (int f : proj_factors) total_depth += m.depth(f);
    return Rational(count, 1LL << total_depth);
}

Rational shadow_measure_ie(const std::vector<int>& proj_factors,
                           std::vector<DyadicModel::Rect> rects, bool& computed) {
    // Drop rectangles contained in another (projection containment).
    auto contains = [&](const DyadicModel::Rect& a, const DyadicModel::Rect& b) {
        for (int f : proj_factors) {
            if (a.level[f] > b.level[f]) return false;
            if ((b.offset[f] >> (b.level[f] - a.level[f])) != a.offset[f]) return false;
        }
        return true;
    };
    std::vector<DyadicModel::Rect> maximal;
    for (std::size_t a = 0; a < rects.size(); ++a) {
        bool keep = true;
        for (std::size_t b = 0; b < rects.size(); ++b)
            if (a != b && contains(rects[b], rects[a]) && !(contains(rects[a], rects[b]) && a < b))
                keep = false;
        if (keep) maximal.push_back(rects[a]);
    }
    if (maximal.size() > 14) {
        computed = false;
        return Rational(0);
    }
    computed = true;
    // Intersection of dyadic rectangles is a dyadic rectangle or empty.
    auto intersect = [&](const DyadicModel::Rect& a, const DyadicModel::Rect& b,
                         DyadicModel::Rect& out) {
        out = a;
        for (int f : proj_factors) {
            const auto &fa = a, &fb = b;
            const int la = fa.level[f], lb = fb.level[f];
            if (la >= lb) {
                if ((fa.offset[f] >> (la - lb)) != fb.offset[f]) return false;
                out.level[f] = la;
                out.offset[f] = fa.offset[f];
            } else {
                if ((fb.offset[f] >> (lb - la)) != fa.offset[f]) return false;
                out.level[f] = lb;
                out.offset[f] = fb.offset[f];
            }
        }
        return true;
    };
    auto proj_measure = [&](const DyadicModel::Rect& r) {
        Rational v(1);
        for (int f : proj_factors) v *= Rational(1, 1LL << r.level[f]);
        return v;
    };
    Rational total(0);
    const std::size_t n = maximal.size();
    for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
        DyadicModel::Rect cur;
        bool ok = false, nonempty = true;
        int bits = 0;
        for (std::size_t j = 0; j < n && nonempty; ++j) {
            if (!(mask & (std::size_t(1) << j))) continue;
            ++bits;
            if (!ok) {
                cur = maximal[j];
                ok = true;
            } else {
                DyadicModel::Rect next;
                if (!intersect(cur, maximal[j], next)) {
                    nonempty = false;
                    break;
                }
                cur = next;
            }
        }
        if (!nonempty) continue;
        total += (bits % 2 ? Rational(1) : Rational(-1)) * proj_measure(cur);
    }
    return total;
}

}  // namespace

CarberySeegerReport carbery_seeger_check(const DyadicModel& m, const EnlargementState& state,
                                         const std::vector<int>& B, long long mprime_cap) {
    if (!string_contains(state.string, B))
        throw std::invalid_argument("carbery_seeger_check: string does not contain B");
    CarberySeegerReport rep;
    std::vector<int> Bc;
    for (int f = 0; f < m.factors(); ++f)
        if (std::find(B.begin(), B.end(), f) == B.end()) Bc.push_back(f);

    const Rational omega_measure = state.omega_steps.front().measure;

    std::vector<long long> mp(B.size(), 0);
    while (true) {
        // Ubar: rectangles with m_B^{(N)} <= m', grouped by their B-side.
        struct Key {
            std::vector<int> level;
            std::vector<long long> offset;
            bool operator<(const Key& o) const {
                return std::tie(level, offset) < std::tie(o.level, o.offset);
            }
        };
        std::map<Key, std::vector<DyadicModel::Rect>> groups;
        for (std::size_t q = 0; q < state.rects.size(); ++q) {
            bool ok = true;
            for (std::size_t bi = 0; bi < B.size(); ++bi)
                if (state.m_final[q][B[bi]] > mp[bi]) ok = false;
            if (!ok) continue;
            Key key;
            for (int f : B) {
                key.level.push_back(state.rects[q].level[f]);
                key.offset.push_back(state.rects[q].offset[f]);
            }
            groups[key].push_back(state.rects[q]);
        }
        CarberySeegerPoint pt;
        pt.mprime = mp;
        pt.lhs = Rational(0);
        for (const auto& [key, rects] : groups) {
            Rational rb(1);
            for (std::size_t bi = 0; bi < B.size(); ++bi) rb *= Rational(1, 1LL << key.level[bi]);
            Rational sh =
                Bc.empty() ? Rational(1) : shadow_measure_cells(m, Bc, rects);
            if (!Bc.empty()) {
                bool computed = false;
                Rational ie = shadow_measure_ie(Bc, rects, computed);
                if (computed && !(ie == sh)) rep.shadows_agree = false;
            }
            pt.lhs += rb * sh;
        }
        pt.ratio = omega_measure > Rational(0) ? (pt.lhs / omega_measure).to_double() : 0.0;
        rep.points.push_back(std::move(pt));

        int bi = (int)B.size() - 1;
        while (bi >= 0 && mp[bi] == mprime_cap) mp[bi--] = 0;
        if (bi < 0) break;
        ++mp[bi];
    }

    // Growth is measured on the upper envelope per |m'| level (the quantity
    // the polynomial bound controls); the sum is monotone and saturates, so a
    // raw point regression would overweight near-empty small-|m'| levels.
    std::map<long long, double> envelope;
    for (const auto& pt : rep.points) {
        long long msum = 0;
        for (long long v : pt.mprime) msum += v;
        auto it = envelope.find(msum);
        if (it == envelope.end())
            envelope[msum] = pt.ratio;
        else
            it->second = std::max(it->second, pt.ratio);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npts = 0;
    for (const auto& [msum, ratio] : envelope) {
        if (ratio <= 0) continue;
        const double x = std::log(1.0 + (double)msum);
        const double y = std::log(ratio);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++npts;
    }
    if (npts >= 2 && sxx * npts - sx * sx > 1e-12)
        rep.fitted_p = std::max(0.0, (npts * sxy - sx * sy) / (npts * sxx - sx * sx));
    for (const auto& [msum, ratio] : envelope) {
        rep.least_C = std::max(rep.least_C, ratio / std::pow(1.0 + (double)msum, rep.fitted_p));
        rep.least_C_p2 = std::max(rep.least_C_p2, ratio / std::pow(1.0 + (double)msum, 2.0));
    }
    return rep;
}

RandomModelInstance random_instance(const DyadicModel& m, std::uint64_t seed, int rect_count) {
    std::mt19937_64 rng(seed);
    RandomModelInstance inst;
    inst.omega.cells = m.empty_set();
    // Build Omega as a union of random rectangles of moderate size.
    for (int k = 0; k < rect_count; ++k) {
        DyadicModel::Rect r;
        r.level.resize(m.factors());
        r.offset.resize(m.factors());
        for (int f = 0; f < m.factors(); ++f) {
            r.level[f] = 1 + (int)(rng() % std::max(1, m.depth(f) - 1));
            r.offset[f] = (long long)(rng() % (std::size_t(1) << r.level[f]));
        }
        m.paint(inst.omega.cells, r);
    }
    inst.omega.measure = m.measure(inst.omega.cells);
    // Family: rectangles of D(Omega), sampled.
    std::vector<DyadicModel::Rect> inside;
    for (const auto& r : m.all_rects())
        if (m.count_inside(inst.omega.cells, r) == m.rect_cells(r)) inside.push_back(r);
    std::shuffle(inside.begin(), inside.end(), rng);
    const std::size_t want = std::min<std::size_t>(inside.size(), (std::size_t)rect_count * 2);
    inst.family.assign(inside.begin(), inside.begin() + want);
    return inst;
}

}  // namespace multinorm
