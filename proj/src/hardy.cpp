#include "multinorm/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace multinorm {

namespace {

// Axis-aligned tiling of the periodic grid by the dyadic rectangles at one
// multi-scale: along axis h the side holds block[h] samples and storage-order
// grouping idx/block matches the geometric tiling because block | N.
struct RectTiling {
    std::vector<long long> block;
    std::vector<std::size_t> count;
    std::size_t total = 1;
    std::size_t samples_per_rect = 1;
};

RectTiling make_tiling(const HardyContext& ctx, const Lattice& L) {
    const auto& g = ctx.analysis->grid();
    const Structure& s = ctx.structure();
    RectTiling t;
    t.block.resize(g.rank());
    t.count.resize(g.rank());
    for (int h = 0; h < g.rank(); ++h) {
        const long long mu = ctx.dy->sequence().mu(L[s.factor_of(h)], h);
        // Samples per rectangle side: side length 2^-mu over spacing
        // 2^{P - log2n}.
        const long long log2block = (long long)g.log2n[h] - (g.period_log2[h] + mu);
        if (log2block < 0)
            throw std::invalid_argument("hardy: grid cannot resolve the window scales");
        t.block[h] = 1LL << log2block;
        t.count[h] = g.n(h) >> log2block;
        t.total *= t.count[h];
        t.samples_per_rect *= (std::size_t)t.block[h];
    }
    return t;
}

std::size_t rect_of(const RectTiling& t, const std::vector<std::size_t>& idx) {
    std::size_t rid = 0;
    for (std::size_t h = 0; h < t.count.size(); ++h)
        rid = rid * t.count[h] + idx[h] / (std::size_t)t.block[h];
    return rid;
}

DyadicRectangle rect_geometry(const HardyContext& ctx, const Lattice& L, const RectTiling& t,
                              std::size_t rid) {
    const auto& g = ctx.analysis->grid();
    const Structure& s = ctx.structure();
    // Per-axis rectangle index in storage order; physical corner mantissa is
    // signed like sample coordinates.
    std::vector<std::size_t> axis(g.rank());
    for (int h = g.rank() - 1; h >= 0; --h) {
        axis[h] = rid % t.count[h];
        rid /= t.count[h];
    }
    DyadicRectangle r;
    r.L = L;
    for (int i = 0; i < s.n(); ++i) {
        DyadicCube c;
        c.factor = i;
        c.ell = L[i];
        for (int h : s.exponents().blocks[i]) {
            DyadicInterval iv;
            iv.mu = ctx.dy->sequence().mu(L[i], h);
            const long long half = (long long)t.count[h] / 2;
            iv.p = (long long)axis[h] < half ? (long long)axis[h] : (long long)axis[h] -
                                                                        (long long)t.count[h];
            c.sides.push_back(iv);
        }
        r.cubes.push_back(std::move(c));
    }
    return r;
}

std::vector<double> abs_values(const SampledFunction& f) {
    std::vector<double> v(f.samples().size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::abs(f.samples()[k]);
    return v;
}

}  // namespace

double h1_norm(const HardyContext& ctx, const SampledFunction& f) {
    return s_tensor(f, *ctx.norm).norm_l1();
}

std::vector<char> dyadic_half_enlarge(const HardyContext& ctx, const std::vector<char>& ind) {
    const auto& g = ctx.analysis->grid();
    std::vector<char> out = ind;
    for (const auto& sc : ctx.analysis->scales()) {
        RectTiling t = make_tiling(ctx, sc.L);
        std::vector<std::size_t> cnt(t.total, 0);
        for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
            if (ind[flat]) ++cnt[rect_of(t, idx)];
        });
        for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
            if (2 * cnt[rect_of(t, idx)] > t.samples_per_rect) out[flat] = 1;
        });
    }
    return out;
}

AtomValidation validate_atom(const HardyContext& ctx, const Atom& a, double tol,
                             std::uint64_t partition_seed, int random_partitions) {
    AtomValidation v;
    const auto& g = ctx.analysis->grid();
    const Structure& s = ctx.structure();
    if (a.kind() == 1) {
        auto sc = ctx.lat->admit(a.rect.L);
        if (!sc || !(sc->S == a.S))
            throw std::invalid_argument(
                "validate_atom: carrying rectangle is not in the partition's scale class");
    }
    const double l1 = a.payload.norm_l1();
    const double l2 = a.payload.norm_l2();
    const double scale_ref = a.payload.max_abs();

    // Support: payload mass outside the allowed box, relative to the max.
    Box allowed;
    if (a.kind() == 0) {
        allowed.lo.resize(g.rank());
        allowed.hi.resize(g.rank());
        for (int h = 0; h < g.rank(); ++h) {
            const double lam = s.exponents().lambda[h].to_double();
            const double centre = (double)a.unit_corner[h] + 0.5;
            const double half = std::pow(2.0, a.tau * lam);
            allowed.lo[h] = centre - half;
            allowed.hi[h] = centre + half;
        }
    } else if (a.kind() == 1) {
        std::vector<double> rho(s.n(), a.tau);
        allowed = ctx.dy->rescale_enlarge(a.rect, rho);
    }
    auto support_excess = [&](const SampledFunction& payload, const Box& box) {
        double worst = 0;
        for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
            std::vector<double> x(g.rank());
            for (int h = 0; h < g.rank(); ++h) x[h] = g.coord(h, idx[h]);
            if (!box.contains_point(x, 1e-12))
                worst = std::max(worst, std::abs(payload.samples()[flat]));
        });
        return scale_ref > 0 ? worst / scale_ref : 0.0;
    };
    if (a.kind() <= 1) v.support_excess = support_excess(a.payload, allowed);

    if (a.kind() == 0) {
        v.l2_excess = std::max(0.0, l2 - 1.0);
    } else if (a.kind() == 1) {
        const double bound = 1.0 / std::sqrt(a.rect.measure());
        v.l2_excess = std::max(0.0, (l2 - bound) / bound);
        const int k = a.S.blocks[0].dotted;
        v.cancellation_residual =
            l1 > 0 ? block_moment(s, a.payload, k, std::vector<int>(g.rank(), 0)) / l1 : 0.0;
    } else {
        // Pre-atom supports and cancellations.
        for (const auto& [rect, pre] : a.preatoms) {
            std::vector<double> rho(s.n(), a.tau);
            Box box = ctx.dy->rescale_enlarge(rect, rho);
            v.support_excess = std::max(v.support_excess, support_excess(pre, box));
            const double prel1 = pre.norm_l1();
            for (const auto& b : a.S.blocks)
                if (prel1 > 0)
                    v.cancellation_residual = std::max(
                        v.cancellation_residual,
                        block_moment(s, pre, b.dotted, std::vector<int>(g.rank(), 0)) / prel1);
        }
        // Partition bound over singletons, the whole set, and K random splits.
        const std::size_t np = a.preatoms.size();
        std::vector<std::vector<std::size_t>> partitions;
        {
            std::vector<std::size_t> singleton(np);
            for (std::size_t j = 0; j < np; ++j) singleton[j] = j;
            partitions.push_back(singleton);                        // all singletons
            partitions.push_back(std::vector<std::size_t>(np, 0));  // one group
            std::mt19937_64 rng(partition_seed);
            for (int k = 0; k < random_partitions; ++k) {
                std::vector<std::size_t> p(np);
                const std::size_t groups = 1 + rng() % std::max<std::size_t>(1, np);
                for (std::size_t j = 0; j < np; ++j) p[j] = rng() % groups;
                partitions.push_back(std::move(p));
            }
        }
        for (const auto& part : partitions) {
            std::map<std::size_t, SampledFunction> groups;
            for (std::size_t j = 0; j < np; ++j) {
                auto it = groups.find(part[j]);
                if (it == groups.end())
                    groups.emplace(part[j], a.preatoms[j].second);
                else
                    it->second += a.preatoms[j].second;
            }
            double sum = 0;
            for (const auto& [key, fn] : groups) sum += fn.norm_l2() * fn.norm_l2();
            if (a.omega_measure > 0)
                v.partition_excess =
                    std::max(v.partition_excess, sum * a.omega_measure - 1.0);
        }
    }

    auto judge = [&](double value, double cap, const std::string& what) {
        if (value <= cap) return;
        if (value <= 10 * cap)
            v.borderline = true;
        else
            v.failures.push_back(what);
    };
    judge(v.support_excess, tol, "support");
    judge(v.l2_excess, tol, "l2 bound");
    judge(v.cancellation_residual, tol, "cancellation");
    judge(v.partition_excess, tol, "partition bound");
    v.pass = v.failures.empty();
    return v;
}

Decomposition atomic_decompose(const HardyContext& ctx, const SampledFunction& f,
                               const DecomposeOptions& opt) {
    const auto& fam = *ctx.analysis;
    const auto& g = fam.grid();
    Decomposition out;
    out.h1 = h1_norm(ctx, f);
    out.residual = SampledFunction::zeros(g);

    // Support calibration: record the largest coordinate reached by f and
    // reject inputs whose support cannot fit inside the atom boxes after the
    // convolution spread (such inputs must be pre-split with a unit partition
    // of unity).
    double maxcoord = 0;
    const double significant = 1e-13 * f.max_abs();
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        if (std::abs(f.samples()[flat]) <= significant) return;
        for (int h = 0; h < g.rank(); ++h)
            maxcoord = std::max(maxcoord, std::abs(g.coord(h, idx[h])));
    });
    out.eps_used = maxcoord > 1 ? std::log2(maxcoord) : 0.0;
    {
        // Per-atom support is enforced exactly by validate_atom; here only
        // inputs that would wrap the periodic grid are rejected.
        double halfperiod = 1e300;
        for (int h = 0; h < g.rank(); ++h)
            halfperiod = std::min(halfperiod, std::ldexp(1.0, g.period_log2[h] - 1));
        if (maxcoord > halfperiod - 0.5 + 1e-9)
            throw std::invalid_argument(
                "atomic_decompose: support reaches " + std::to_string(maxcoord) +
                " and would wrap the period; pre-split the input with a unit partition "
                "of unity");
    }

    // Per-scale convolution fields and the Plancherel-Polya majorant.
    std::vector<SampledFunction> conv;
    for (std::size_t sidx = 0; sidx < fam.scales().size(); ++sidx)
        conv.push_back(fam.convolve_member(f, sidx, false));
    double gmax = 0;
    for (const auto& c : conv) gmax = std::max(gmax, c.max_abs());
    std::vector<SampledFunction> sup_fields;
    for (std::size_t sidx = 0; sidx < fam.scales().size(); ++sidx)
        sup_fields.push_back(rectangle_sup(conv[sidx], *ctx.dy, fam.scales()[sidx].L));
    std::vector<double> spp(g.total(), 0.0);
    for (const auto& fld : sup_fields)
        for (std::size_t k = 0; k < spp.size(); ++k) spp[k] += std::norm(fld.samples()[k]);
    for (auto& vv : spp) vv = std::sqrt(vv);

    double smax = 0, smin_pos = 0;
    for (double vv : spp) {
        smax = std::max(smax, vv);
        if (vv > 0 && (smin_pos == 0 || vv < smin_pos)) smin_pos = vv;
    }
    SampledFunction recon = SampledFunction::zeros(g);

    if (smax > 0) {
        const int i_max = (int)std::ceil(std::log2(smax));
        int i_min = (int)std::floor(std::log2(smin_pos)) - 1;
        i_min = std::max(i_min, i_max - opt.levels_cap);
        const int levels = i_max - i_min + 1;

        // Level sets and their dyadic enlargements.
        std::vector<std::vector<char>> omega(levels), omega_s(levels);
        std::vector<double> omega_s_measure(levels, 0.0);
        for (int li = 0; li < levels; ++li) {
            const double thresh = std::pow(2.0, i_min + li);
            omega[li].assign(g.total(), 0);
            for (std::size_t k = 0; k < spp.size(); ++k) omega[li][k] = spp[k] > thresh;
            omega_s[li] = dyadic_half_enlarge(ctx, omega[li]);
            std::size_t cnt = 0;
            for (char c : omega_s[li]) cnt += c;
            omega_s_measure[li] = (double)cnt * g.cell_volume();
            std::size_t cnt0 = 0;
            for (char c : omega[li]) cnt0 += c;
            out.levels.push_back({i_min + li, (double)cnt0 * g.cell_volume(), omega_s_measure[li]});
        }

        // Group the window scales by assigned partition.
        std::map<std::string, std::vector<std::size_t>> classes;
        std::size_t origin_index = fam.scales().size();
        for (std::size_t sidx = 0; sidx < fam.scales().size(); ++sidx) {
            if (fam.scales()[sidx].is_origin())
                origin_index = sidx;
            else
                classes[fam.scales()[sidx].S.to_string()].push_back(sidx);
        }

        // The unit atom: f_0 = PsiTilde_0 * Psi_0 * f.
        if (origin_index < fam.scales().size()) {
            SampledFunction f0 = fam.convolve_member(conv[origin_index], origin_index, true);
            const double l2 = f0.norm_l2();
            if (l2 > 0) {
                Atom a;
                a.tau = opt.tau;
                a.payload = f0;
                a.payload *= 1.0 / l2;
                // Carrying unit cube: centered on the payload's support box.
                a.unit_corner.assign(g.rank(), 0);
                std::vector<double> los(g.rank(), 1e300), his(g.rank(), -1e300);
                for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
                    if (std::abs(f0.samples()[flat]) < 1e-14 * l2) return;
                    for (int h = 0; h < g.rank(); ++h) {
                        los[h] = std::min(los[h], g.coord(h, idx[h]));
                        his[h] = std::max(his[h], g.coord(h, idx[h]));
                    }
                });
                for (int h = 0; h < g.rank(); ++h)
                    a.unit_corner[h] = (long long)std::floor(0.5 * (los[h] + his[h]));
                recon += l2 * a.payload;
                out.coeffs.push_back(l2);
                out.atoms.push_back(std::move(a));
            }
        }

        // Per-scale tilings, masses and level assignments.
        struct ScaleData {
            RectTiling tiling;
            std::vector<double> mass2;   // cell * sum |g|^2 per rectangle
            std::vector<int> level;      // level index or -1
        };
        std::map<std::size_t, ScaleData> data;
        for (const auto& [cls, sidxs] : classes)
            for (std::size_t sidx : sidxs) {
                ScaleData d;
                d.tiling = make_tiling(ctx, fam.scales()[sidx].L);
                d.mass2.assign(d.tiling.total, 0.0);
                d.level.assign(d.tiling.total, -1);
                std::vector<std::vector<std::size_t>> cnt(levels,
                                                          std::vector<std::size_t>(d.tiling.total, 0));
                for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
                    const std::size_t rid = rect_of(d.tiling, idx);
                    d.mass2[rid] += std::norm(conv[sidx].samples()[flat]);
                    for (int li = 0; li < levels; ++li)
                        if (omega[li][flat]) ++cnt[li][rid];
                });
                for (auto& m : d.mass2) m *= g.cell_volume();
                for (std::size_t rid = 0; rid < d.tiling.total; ++rid)
                    for (int li = levels - 1; li >= 0; --li)
                        if (2 * cnt[li][rid] > d.tiling.samples_per_rect) {
                            d.level[rid] = li;
                            break;
                        }
                data.emplace(sidx, std::move(d));
            }

        // Emit atoms class by class.
        for (const auto& [cls, sidxs] : classes) {
            const MarkedPartition S = fam.scales()[sidxs.front()].S;
            const int scount = S.size();
            for (int li = 0; li < levels; ++li) {
                // Qualifying rectangles of this class and level.
                struct Qual {
                    std::size_t sidx;
                    std::size_t rid;
                    DyadicRectangle geo;
                };
                std::vector<Qual> quals;
                for (std::size_t sidx : sidxs) {
                    const auto& d = data.at(sidx);
                    // Transform roundoff leaves ~1e-16 relative noise across
                    // the whole grid; rectangles carrying only that noise are
                    // dropped (their mass stays in the residual).
                    const double floor2 = 1e-24 * gmax * gmax *
                                          (double)d.tiling.samples_per_rect * g.cell_volume();
                    for (std::size_t rid = 0; rid < d.tiling.total; ++rid)
                        if (d.level[rid] == li && d.mass2[rid] > floor2)
                            quals.push_back(
                                {sidx, rid, rect_geometry(ctx, fam.scales()[sidx].L, d.tiling, rid)});
                }
                if (quals.empty()) continue;

                if (scount == 1) {
                    // Maximal qualifying rectangles: cubes for the block
                    // dilations, so maximal elements are pairwise disjoint.
                    std::vector<std::size_t> container(quals.size());
                    std::vector<std::size_t> maximal;
                    for (std::size_t a = 0; a < quals.size(); ++a) {
                        bool is_max = true;
                        for (std::size_t b = 0; b < quals.size(); ++b)
                            if (b != a && quals[b].geo.contains(quals[a].geo) &&
                                !(quals[a].geo == quals[b].geo))
                                is_max = false;
                        if (is_max) maximal.push_back(a);
                    }
                    for (std::size_t a = 0; a < quals.size(); ++a) {
                        container[a] = a;
                        for (std::size_t m : maximal)
                            if (quals[m].geo.contains(quals[a].geo)) {
                                container[a] = m;
                                break;
                            }
                    }
                    for (std::size_t m : maximal) {
                        // lambda per the maximal-cube grouping, payload from
                        // the masked convolution fields.
                        double mass = 0;
                        std::map<std::size_t, std::vector<char>> masks;
                        for (std::size_t a = 0; a < quals.size(); ++a) {
                            if (container[a] != m) continue;
                            mass += data.at(quals[a].sidx).mass2[quals[a].rid];
                            auto& mask = masks[quals[a].sidx];
                            if (mask.empty()) mask.assign(g.total(), 0);
                            const auto& t = data.at(quals[a].sidx).tiling;
                            for_each_index(g,
                                           [&](std::size_t flat, const std::vector<std::size_t>& idx) {
                                               if (rect_of(t, idx) == quals[a].rid) mask[flat] = 1;
                                           });
                        }
                        if (mass <= 0) continue;
                        const double rect_measure = quals[m].geo.measure();
                        double lambda = std::sqrt(rect_measure) * std::sqrt(mass);
                        SampledFunction raw = SampledFunction::zeros(g);
                        for (const auto& [sidx, mask] : masks) {
                            auto masked = conv[sidx];
                            auto& ms = masked.mutable_samples();
                            for (std::size_t k = 0; k < ms.size(); ++k)
                                if (!mask[k]) ms[k] = cplx(0);
                            raw += fam.convolve_member(masked, sidx, true);
                        }
                        Atom a;
                        a.S = S;
                        a.tau = opt.tau;
                        a.rect = quals[m].geo;
                        a.payload = raw;
                        a.payload *= 1.0 / lambda;
                        // Enforce the atom normalization exactly, shifting any
                        // surplus into the coefficient.
                        const double bound = 1.0 / std::sqrt(rect_measure);
                        const double l2 = a.payload.norm_l2();
                        if (l2 > bound) {
                            const double c = l2 / bound;
                            a.payload *= 1.0 / c;
                            lambda *= c;
                        }
                        recon += lambda * a.payload;
                        out.coeffs.push_back(lambda);
                        out.atoms.push_back(std::move(a));
                    }
                } else {
                    // One atom for the whole level: pre-atoms grouped by the
                    // maximal rectangles of the enlarged level set.
                    std::vector<Qual> inside;
                    for (std::size_t sidx : sidxs) {
                        const auto& d = data.at(sidx);
                        std::vector<std::size_t> incount(d.tiling.total, 0);
                        for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
                            if (omega_s[li][flat]) ++incount[rect_of(d.tiling, idx)];
                        });
                        for (std::size_t rid = 0; rid < d.tiling.total; ++rid)
                            if (incount[rid] == d.tiling.samples_per_rect)
                                inside.push_back(
                                    {sidx, rid, rect_geometry(ctx, fam.scales()[sidx].L, d.tiling, rid)});
                    }
                    if (inside.empty()) continue;
                    std::vector<std::size_t> maximal;
                    for (std::size_t a = 0; a < inside.size(); ++a) {
                        bool is_max = true;
                        for (std::size_t b = 0; b < inside.size(); ++b)
                            if (b != a && inside[b].geo.contains(inside[a].geo) &&
                                !(inside[a].geo == inside[b].geo))
                                is_max = false;
                        if (is_max) maximal.push_back(a);
                    }
                    // Assign each qualifying rectangle to the first maximal
                    // container in canonical order.
                    double mass = 0;
                    std::map<std::size_t, std::map<std::size_t, std::vector<char>>> masks_by_max;
                    bool assigned_all = true;
                    for (const auto& q : quals) {
                        std::size_t owner = maximal.size();
                        for (std::size_t mi = 0; mi < maximal.size(); ++mi)
                            if (inside[maximal[mi]].geo.contains(q.geo)) {
                                owner = mi;
                                break;
                            }
                        if (owner == maximal.size()) {
                            assigned_all = false;
                            continue;
                        }
                        mass += data.at(q.sidx).mass2[q.rid];
                        auto& mask = masks_by_max[owner][q.sidx];
                        if (mask.empty()) mask.assign(g.total(), 0);
                        const auto& t = data.at(q.sidx).tiling;
                        for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
                            if (rect_of(t, idx) == q.rid) mask[flat] = 1;
                        });
                    }
                    if (!assigned_all)
                        throw std::logic_error(
                            "atomic_decompose: qualifying rectangle escapes the enlarged level set");
                    if (mass <= 0) continue;
                    double lambda = std::sqrt(omega_s_measure[li]) * std::sqrt(mass);
                    Atom a;
                    a.S = S;
                    a.tau = opt.tau;
                    a.omega_measure = omega_s_measure[li];
                    a.payload = SampledFunction::zeros(g);
                    for (const auto& [mi, masks] : masks_by_max) {
                        SampledFunction pre = SampledFunction::zeros(g);
                        for (const auto& [sidx, mask] : masks) {
                            auto masked = conv[sidx];
                            auto& ms = masked.mutable_samples();
                            for (std::size_t k = 0; k < ms.size(); ++k)
                                if (!mask[k]) ms[k] = cplx(0);
                            pre += fam.convolve_member(masked, sidx, true);
                        }
                        pre *= 1.0 / lambda;
                        a.payload += pre;
                        a.omega.push_back(inside[maximal[mi]].geo);
                        a.preatoms.emplace_back(inside[maximal[mi]].geo, std::move(pre));
                    }
                    // Enforce the partition bound by rescaling when the duality
                    // constant exceeds 1 on the tested partitions.
                    double worst = 0;
                    {
                        double singles = 0;
                        SampledFunction whole = SampledFunction::zeros(g);
                        for (const auto& [rect, pre] : a.preatoms) {
                            singles += pre.norm_l2() * pre.norm_l2();
                            whole += pre;
                        }
                        worst = std::max(singles, whole.norm_l2() * whole.norm_l2());
                        std::mt19937_64 rng(opt.partition_seed);
                        for (int k = 0; k < 8; ++k) {
                            const std::size_t groups =
                                1 + rng() % std::max<std::size_t>(1, a.preatoms.size());
                            std::map<std::size_t, SampledFunction> parts;
                            for (std::size_t j = 0; j < a.preatoms.size(); ++j) {
                                const std::size_t key = rng() % groups;
                                auto it = parts.find(key);
                                if (it == parts.end())
                                    parts.emplace(key, a.preatoms[j].second);
                                else
                                    it->second += a.preatoms[j].second;
                            }
                            double sum = 0;
                            for (const auto& [key, fn] : parts) sum += fn.norm_l2() * fn.norm_l2();
                            worst = std::max(worst, sum);
                        }
                    }
                    const double cap = 1.0 / omega_s_measure[li];
                    if (worst > cap) {
                        const double c = std::sqrt(worst / cap);
                        a.payload *= 1.0 / c;
                        for (auto& [rect, pre] : a.preatoms) pre *= 1.0 / c;
                        lambda *= c;
                    }
                    recon += lambda * a.payload;
                    out.coeffs.push_back(lambda);
                    out.atoms.push_back(std::move(a));
                }
            }
        }
    }

    for (double l : out.coeffs) out.coeff_sum += std::abs(l);
    out.residual = f;
    out.residual -= recon;
    out.residual_l2 = out.residual.norm_l2();
    // The grid identity sum lambda a + residual = f holds by construction;
    // report its defect as the accumulation error.
    SampledFunction check = recon;
    check += out.residual;
    check -= f;
    out.recon_error_l2 = check.norm_l2();
    for (const auto& a : out.atoms) {
        auto v = validate_atom(ctx, a, opt.tol, opt.partition_seed);
        if (v.borderline) ++out.borderline_atoms;
    }
    return out;
}

Atom make_unit_atom(const HardyContext& ctx, std::uint64_t seed, double tau) {
    const auto& g = ctx.analysis->grid();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const double cx = unif(rng), cy = unif(rng);
    Atom a;
    a.tau = tau;
    a.unit_corner.assign(g.rank(), 0);
    std::vector<double> centre = {cx, cy};
    centre.resize(g.rank(), 0.0);
    a.payload = SampledFunction::from_space(g, [&](const std::vector<double>& x) {
        double v = 1.0;
        for (int h = 0; h < g.rank(); ++h) v *= unit_bump((x[h] - centre[h]) / 0.4);
        return cplx(v);
    });
    const double l2 = a.payload.norm_l2();
    if (l2 > 0) a.payload *= 1.0 / l2;
    for (int h = 0; h < g.rank(); ++h) a.unit_corner[h] = (long long)std::floor(centre[h]);
    return a;
}

Atom make_single_dotted_atom(const HardyContext& ctx, const MarkedPartition& S,
                             std::uint64_t seed, double tau) {
    if (S.size() != 1) throw std::invalid_argument("make_single_dotted_atom: need one block");
    const auto& g = ctx.analysis->grid();
    const Structure& s = ctx.structure();
    std::mt19937_64 rng(seed);
    // Pick a rectangle of the class within the window.
    std::vector<Scale> classScales;
    for (const auto& sc : ctx.analysis->scales())
        if (!sc.is_origin() && sc.S == S) classScales.push_back(sc);
    if (classScales.empty()) throw std::invalid_argument("no scales in class");
    const Scale sc = classScales[rng() % classScales.size()];
    std::uniform_real_distribution<double> unif(-0.4, 0.4);
    std::vector<double> point(g.rank());
    for (int h = 0; h < g.rank(); ++h) point[h] = unif(rng);
    DyadicRectangle rect = ctx.dy->rectangle_at(point, sc.L);
    // Haar-type difference: a smooth profile with its in-block slice mean
    // removed, which gives exact discrete cancellation in the dotted block.
    const int k = S.blocks[0].dotted;
    Box geo = ctx.dy->rectangle_box(rect);
    Atom a;
    a.S = S;
    a.tau = tau;
    a.rect = rect;
    auto profile = SampledFunction::from_space(g, [&](const std::vector<double>& x) {
        double v = 1.0;
        for (int h = 0; h < g.rank(); ++h) {
            const double mid = 0.5 * (geo.lo[h] + geo.hi[h]);
            const double half = 0.5 * (geo.hi[h] - geo.lo[h]);
            const double t = (x[h] - mid) / half;
            if (t < -1 || t >= 1) return cplx(0);
            v *= 0.5 + 0.5 * t + 0.1;  // asymmetric profile inside the rectangle
        }
        return cplx(v);
    });
    // Remove the dotted-block slice means over the rectangle.
    const auto& kcoords = s.exponents().blocks[k];
    std::map<std::size_t, std::pair<cplx, std::size_t>> slices;
    std::vector<char> inside(g.total(), 0);
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        std::vector<double> x(g.rank());
        for (int h = 0; h < g.rank(); ++h) x[h] = g.coord(h, idx[h]);
        for (int h = 0; h < g.rank(); ++h)
            if (!(x[h] >= geo.lo[h] - 1e-12 && x[h] < geo.hi[h] - 1e-12)) return;
        inside[flat] = 1;
        std::size_t key = 0;
        for (int h = 0; h < g.rank(); ++h)
            if (std::find(kcoords.begin(), kcoords.end(), h) == kcoords.end())
                key = key * g.n(h) + idx[h];
        auto& cell = slices[key];
        cell.first += profile.samples()[flat];
        cell.second += 1;
    });
    auto payload = SampledFunction::zeros(g);
    for_each_index(g, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
        if (!inside[flat]) return;
        std::size_t key = 0;
        for (int h = 0; h < g.rank(); ++h)
            if (std::find(kcoords.begin(), kcoords.end(), h) == kcoords.end())
                key = key * g.n(h) + idx[h];
        const auto& cell = slices.at(key);
        payload.mutable_samples()[flat] =
            profile.samples()[flat] - cell.first / (double)cell.second;
    });
    a.payload = std::move(payload);
    const double l2 = a.payload.norm_l2();
    const double bound = 1.0 / std::sqrt(rect.measure());
    if (l2 > 0) a.payload *= bound / l2 * 0.999;
    return a;
}

}  // namespace multinorm
