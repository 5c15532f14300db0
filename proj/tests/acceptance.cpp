// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances and golden bounds are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "multinorm/corpus.hpp"
#include "multinorm/hardy.hpp"
#include "multinorm/journe.hpp"
#include "multinorm/kernels.hpp"

using namespace multinorm;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <typename F>
void criterion(int number, const std::string& name, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(number, name, pass, detail, secs);
}

StandardMatrix make_matrix(const std::vector<std::vector<Rational>>& rows) {
    return std::get<StandardMatrix>(StandardMatrix::validate(rows));
}

}  // namespace

int main() {
    // ------------------------------------------------------------ criterion 1
    criterion(1, "matrix and partition census", [&](std::string& detail) {
        auto v = StandardMatrix::validate({{1, 1}, {2, 1}});
        if (!std::holds_alternative<StandardMatrix>(v)) {
            detail = "reference matrix rejected";
            return false;
        }
        if (MarkedPartition::enumerate(2).size() != 3 ||
            MarkedPartition::enumerate(3).size() != 10) {
            detail = "marked partition counts wrong";
            return false;
        }
        auto ident = StandardMatrix::validate({{1, 1}, {1, 1}});
        if (!std::holds_alternative<MatrixViolation>(ident) ||
            std::get<MatrixViolation>(ident).kind != MatrixViolation::Reducible) {
            detail = "identity product e(1,2)e(2,1)=1 not flagged reducible";
            return false;
        }
        detail = "2 -> 3 partitions, 3 -> 10, reducible matrix rejected";
        return true;
    });

    // ------------------------------------------------------------ criterion 2
    criterion(2, "scale lattice and tube cover", [&](std::string& detail) {
        Structure s(make_matrix({{1, 1}, {2, 1}}), Exponents::isotropic(2));
        PartitionTable table(s);
        ScaleLattice lat(s, table);
        std::set<Lattice> got;
        for (const auto& sc : lat.enumerate(4)) got.insert(sc.L);
        const std::set<Lattice> want = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {2, 3},
                                        {3, 4}, {0, 1}, {1, 2}, {1, 3}, {2, 4}};
        if (got != want) {
            detail = "window-4 lattice differs from the frozen set";
            return false;
        }
        for (long long a = 0; a <= 4; ++a)
            for (long long b = 0; b <= 4; ++b)
                if (lat.admit({a, b}).has_value() != lat.maximal_by_definition({a, b})) {
                    detail = "admissibility disagrees with the definitional oracle";
                    return false;
                }
        auto cover = lat.tube_cover_check(12);
        if (!cover.ok()) {
            detail = "tube cover violated";
            return false;
        }
        detail = "11 scales; oracle agreement; cover of " + std::to_string(cover.checked) +
                 " cubes exact";
        return true;
    });

    // ------------------------------------------------------------ criterion 3
    criterion(3, "kappa diagnostics stabilize", [&](std::string& detail) {
        for (auto rows : {std::vector<std::vector<Rational>>{{1, 1}, {2, 1}},
                          std::vector<std::vector<Rational>>{{1, Rational(1, 2)}, {3, 1}}}) {
            Structure s(make_matrix(rows), Exponents::isotropic(2));
            PartitionTable table(s);
            ScaleLattice lat(s, table);
            auto r8 = lat.kappa_diagnostics(8);
            auto r16 = lat.kappa_diagnostics(16);
            if (!(r8.kappa1 == r16.kappa1 && r8.kappa2 == r16.kappa2 &&
                  r8.kappa3 == r16.kappa3 && r8.kappa4 == r16.kappa4)) {
                detail = "kappa values differ between bounds 8 and 16";
                return false;
            }
            detail += "[" + r8.kappa1.to_string() + "," + r8.kappa2.to_string() + "," +
                      r8.kappa3.to_string() + "," + r8.kappa4.to_string() + "] ";
        }
        detail = "stable at bounds 8 and 16: " + detail;
        return true;
    });

    // ------------------------------------------------------------ criterion 4
    criterion(4, "reproducing formulas", [&](std::string& detail) {
        Structure s(make_matrix({{1, 1}, {2, 1}}), Exponents::isotropic(2));
        PartitionTable table(s);
        ScaleLattice lat(s, table);
        FamilyOptions opt;  // frequency-localized tensor family, m = 4
        FamilyRealization fam(lat, GridGeometry::uniform(2, 9, 0), 6, opt);
        auto rep = verify_reproducing(fam);
        if (rep.probes < 1000) {
            detail = "fewer than 1000 mid-band probes";
            return false;
        }
        if (rep.max_residual > 1e-10 || rep.max_residual_lp > 1e-10) {
            detail = "partial sums deviate from 1 beyond 1e-10";
            return false;
        }
        // One-parameter telescoping at 1e-12.
        Structure s1(make_matrix({{1}}), Exponents::isotropic(1));
        PartitionTable t1(s1);
        ScaleLattice l1(s1, t1);
        FamilyRealization one(l1, GridGeometry::uniform(1, 9, 0), 6, FamilyOptions{});
        const double tele = telescoping_residual(one.factor_algebra(0), 6);
        if (tele > 1e-12) {
            detail = "telescoping residual " + std::to_string(tele);
            return false;
        }
        // Tilded moments through order m-1 on the space-localized family.
        FamilyOptions sopt;
        sopt.mode = ProfileMode::SpaceLocalized;
        FamilyRealization space(l1, GridGeometry::uniform(1, 9, 2), 5, sopt);
        const auto& alg = space.factor_algebra(0);
        double worst = 0;
        GridGeometry g1 = GridGeometry::uniform(1, 9, 2);
        for (long long ell = 1; ell <= 5; ++ell) {
            auto member = SampledFunction::from_spectrum(g1, alg.mu_tilde(ell));
            const double l1n = member.norm_l1();
            if (l1n == 0) continue;
            const double arm =
                (2 * alg.order() + 1) * sopt.space_halfwidth * std::pow(2.0, -(double)ell + 1);
            for (int order = 0; order < sopt.cancellation; ++order)
                worst = std::max(worst, block_moment(s1, member, 0, {order}) /
                                            (l1n * std::pow(arm, order)));
        }
        if (worst > 1e-10) {
            detail = "tilded moment residual " + std::to_string(worst);
            return false;
        }
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "probes %zu, residual %.1e (lp %.1e), telescoping %.1e, moments %.1e",
                      rep.probes, rep.max_residual, rep.max_residual_lp, tele, worst);
        detail = buf;
        return true;
    });

    // Shared fixtures for criteria 5-7.
    Structure s2(make_matrix({{1, 1}, {2, 1}}), Exponents::isotropic(2));
    PartitionTable table2(s2);
    ScaleLattice lat2(s2, table2);
    DyadicSystem dy2(s2);

    // ------------------------------------------------------------ criterion 5
    criterion(5, "square functions at window 6", [&](std::string& detail) {
        GridGeometry g = GridGeometry::uniform(2, 9, 1);
        const long long W = 6;
        FamilyOptions ta;
        FamilyRealization tensor_a(lat2, g, W, ta);
        FamilyOptions tb;
        tb.freq_plateau = 0.4;
        tb.freq_support = 1.6;
        FamilyRealization tensor_b(lat2, g, W, tb);
        FamilyOptions co;
        co.kind = FamilyKind::Convolution;
        FamilyRealization conv(lat2, g, W, co);
        auto corpus = make_corpus(s2, lat2, dy2, g, W, 20240817, 5);
        if (corpus.functions.size() != 20) {
            detail = "corpus size is not 20";
            return false;
        }
        // Pointwise domination of the Plancherel-Polya variant, exact.
        for (std::size_t c = 0; c < 3; ++c) {
            auto st = s_tensor(corpus.functions[c], tensor_a);
            auto sp = s_pp(corpus.functions[c], tensor_a, dy2);
            for (std::size_t k = 0; k < st.samples().size(); ++k)
                if (sp.samples()[k].real() < st.samples()[k].real()) {
                    detail = "PP variant fails pointwise domination";
                    return false;
                }
        }
        // Strong maximal operator equals the brute-force oracle exactly on
        // 8-per-axis grids with dyadic-rational data.
        GridGeometry g8 = GridGeometry::uniform(2, 3, 1);
        StrongMaximalOptions mopt;
        mopt.max_depth = 3;
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<cplx> vals(g8.total());
            for (auto& v : vals) v = cplx((double)(rng() % 1024) / 256.0);
            SampledFunction fd(g8, vals);
            auto fast = strong_maximal(s2, fd, mopt);
            auto ref = strong_maximal_reference(s2, fd, mopt);
            for (std::size_t k = 0; k < fast.samples().size(); ++k)
                if (fast.samples()[k] != ref.samples()[k]) {
                    detail = "strong maximal differs from the oracle";
                    return false;
                }
        }
        auto rep = equivalence_report(corpus.functions, corpus.names, tensor_a, tensor_b, conv,
                                      dy2, 20240817);
        // Golden bounds frozen from the audited run (observed 1.15 / 1.17 /
        // 1.07 / 7.89).
        if (rep.degenerate != 0 || rep.tensor_ratio_spread > 1.5 ||
            rep.conv_tensor_spread > 1.5 || rep.grid_conv_spread > 1.5 ||
            rep.pp_tensor_spread > 10.0) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "spreads %.3f/%.3f/%.3f/%.3f exceed the golden bounds",
                          rep.tensor_ratio_spread, rep.conv_tensor_spread, rep.grid_conv_spread,
                          rep.pp_tensor_spread);
            detail = buf;
            return false;
        }
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "PP>=tensor exact; maximal = oracle; spreads %.3f/%.3f/%.3f/%.3f within "
                      "golden 1.5/1.5/1.5/10",
                      rep.tensor_ratio_spread, rep.conv_tensor_spread, rep.grid_conv_spread,
                      rep.pp_tensor_spread);
        detail = buf;
        return true;
    });

    // ------------------------------------------------------------ criterion 6
    criterion(6, "Hardy space and atomic decomposition", [&](std::string& detail) {
        GridGeometry g = GridGeometry::uniform(2, 7, 2);
        const long long W = 4;
        FamilyOptions so;
        so.mode = ProfileMode::SpaceLocalized;
        so.cancellation = 1;
        so.space_halfwidth = 0.25;
        FamilyRealization analysis(lat2, g, W, so);
        FamilyOptions no;
        FamilyRealization norm(lat2, g, W, no);
        HardyContext ctx{&lat2, &dy2, &analysis, &norm};
        auto corpus = make_corpus(s2, lat2, dy2, g, W, 20240817, 5);
        double worst_l1_ratio = 0, worst_coeff_ratio = 0;
        DecomposeOptions opt;
        for (std::size_t c = 0; c < corpus.functions.size(); ++c) {
            const auto& f = corpus.functions[c];
            const double h1 = h1_norm(ctx, f);
            if (h1 <= 0) continue;
            worst_l1_ratio = std::max(worst_l1_ratio, f.norm_l1() / h1);
            auto dec = atomic_decompose(ctx, f, opt);
            if (dec.recon_error_l2 > 1e-9 * std::max(1e-30, f.norm_l2())) {
                detail = "reconstruction identity fails on " + corpus.names[c];
                return false;
            }
            for (const auto& a : dec.atoms) {
                auto va = validate_atom(ctx, a, opt.tol, opt.partition_seed);
                if (!va.pass) {
                    detail = "atom fails validation on " + corpus.names[c];
                    return false;
                }
            }
            worst_coeff_ratio = std::max(worst_coeff_ratio, dec.coeff_sum / h1);
        }
        // Converse evidence: h1 norms of 100 generated atoms stay bounded.
        double cprime = 0;
        for (int k = 0; k < 40; ++k)
            cprime = std::max(cprime, h1_norm(ctx, make_unit_atom(ctx, 1000 + k, 1.0).payload));
        for (int k = 0; k < 30; ++k) {
            auto a = make_single_dotted_atom(ctx, MarkedPartition::parse("{1.,2}"), 2000 + k, 1.0);
            cprime = std::max(cprime, h1_norm(ctx, a.payload));
        }
        for (int k = 0; k < 30; ++k) {
            auto a = make_single_dotted_atom(ctx, MarkedPartition::parse("{1,2.}"), 3000 + k, 1.0);
            cprime = std::max(cprime, h1_norm(ctx, a.payload));
        }
        // Golden constants frozen from the audited run.
        if (worst_l1_ratio > 20.0 || worst_coeff_ratio > 10.0 || cprime > 20.0) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "constants C=%.2f, Ccoeff=%.2f, C'=%.2f exceed golden",
                          worst_l1_ratio, worst_coeff_ratio, cprime);
            detail = buf;
            return false;
        }
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "reconstruction 1e-9; all atoms pass 1e-8; ||f||_1 <= %.2f h1; sum|lambda| "
                      "<= %.2f h1; h1(atom) <= %.2f over 100 atoms",
                      worst_l1_ratio, worst_coeff_ratio, cprime);
        detail = buf;
        return true;
    });

    // ------------------------------------------------------------ criterion 7
    criterion(7, "kernels and multipliers", [&](std::string& detail) {
        auto m1 = local_mihlin_symbol(s2, 0);
        auto m2 = local_mihlin_symbol(s2, 1);
        Multiplier prod;
        prod.name = "mihlin product";
        prod.m = [m1, m2](const std::vector<double>& xi) { return m1.m(xi) * m2.m(xi); };
        auto vrep = validate_multiplier(s2, prod, 3);
        if (!vrep.passed) {
            detail = "Mihlin-Hormander product fails the derivative validator";
            return false;
        }
        GridGeometry g = GridGeometry::uniform(2, 8, 0);
        FamilyOptions opt;
        FamilyRealization fam(lat2, g, 5, opt);
        auto riesz = riesz_product(s2, {0, 1});
        DyadicKernel ker(fam, riesz);
        auto fdata = SampledFunction::from_symbol(g, [](const std::vector<double>& xi) {
            const double r = std::hypot(xi[0] / 6.0, xi[1] / 6.0);
            return cplx(std::exp(-r * r) *
                        (std::abs(xi[0]) < 8 && std::abs(xi[1]) < 8 ? 1.0 : 0.0));
        });
        auto a = ker.apply(fdata);
        auto b = ker.apply_direct(fdata);
        double worst = 0;
        for (std::size_t k = 0; k < a.samples().size(); ++k)
            worst = std::max(worst, std::abs(a.samples()[k] - b.samples()[k]));
        if (worst > 1e-9) {
            detail = "synthesized/direct disagreement " + std::to_string(worst);
            return false;
        }
        // h1-boundedness evidence across the corpus.
        GridGeometry gc = GridGeometry::uniform(2, 7, 2);
        FamilyOptions nopt;
        FamilyRealization normfam(lat2, gc, 4, nopt);
        DyadicKernel kerc(normfam, riesz);
        auto corpus = make_corpus(s2, lat2, dy2, gc, 4, 20240817, 3);
        double ratio = 0;
        for (const auto& f : corpus.functions) {
            const double before = s_tensor(f, normfam).norm_l1();
            if (before <= 0) continue;
            const double after = s_tensor(kerc.apply(f), normfam).norm_l1();
            ratio = std::max(ratio, after / before);
        }
        if (!(ratio > 0) || ratio > 10.0) {
            detail = "transform norm ratio " + std::to_string(ratio) + " out of golden range";
            return false;
        }
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "validator passed |alpha|<=3; two-path agreement %.1e; ||S(Tf)||/||Sf|| <= "
                      "%.2f",
                      worst, ratio);
        detail = buf;
        return true;
    });

    // ------------------------------------------------------------ criterion 8
    criterion(8, "Journe covering model", [&](std::string& detail) {
        double worst_c2 = 0, worst_bar = 0, worst_hat = 0;
        // s = 2 at depth 5, twenty instances.
        {
            DyadicModel m({5, 5});
            auto str = default_complete_string(2);
            int done = 0;
            for (std::uint64_t seed = 1; done < 20 && seed < 200; ++seed) {
                auto inst = random_instance(m, seed * 31, 4);
                if (inst.omega.measure == Rational(0) || inst.family.empty()) continue;
                ++done;
                auto st = string_enlarge(m, inst.omega, inst.family, str);
                worst_bar =
                    std::max(worst_bar, (st.omega_bar_measure / inst.omega.measure).to_double());
                worst_hat =
                    std::max(worst_hat, (st.omega_hat_measure / inst.omega.measure).to_double());
                for (const std::vector<int>& B :
                     {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{0, 1}}) {
                    auto rep = carbery_seeger_check(m, st, B, 3);
                    if (!rep.shadows_agree) {
                        detail = "shadow measures disagree (s=2)";
                        return false;
                    }
                    worst_c2 = std::max(worst_c2, rep.least_C_p2);
                }
            }
            if (done < 20) {
                detail = "could not build 20 nontrivial s=2 instances";
                return false;
            }
        }
        // s = 3 at depth 5, ten instances.
        {
            DyadicModel m({5, 5, 5});
            auto str = default_complete_string(3);
            int done = 0;
            for (std::uint64_t seed = 1; done < 10 && seed < 200; ++seed) {
                auto inst = random_instance(m, seed * 7 + 1, 3);
                if (inst.omega.measure == Rational(0) || inst.family.empty()) continue;
                ++done;
                auto st = string_enlarge(m, inst.omega, inst.family, str);
                worst_bar =
                    std::max(worst_bar, (st.omega_bar_measure / inst.omega.measure).to_double());
                worst_hat =
                    std::max(worst_hat, (st.omega_hat_measure / inst.omega.measure).to_double());
                for (const std::vector<int>& B : {std::vector<int>{0}, std::vector<int>{0, 2},
                                                  std::vector<int>{0, 1, 2}}) {
                    auto rep = carbery_seeger_check(m, st, B, 2);
                    if (!rep.shadows_agree) {
                        detail = "shadow measures disagree (s=3)";
                        return false;
                    }
                    worst_c2 = std::max(worst_c2, rep.least_C_p2);
                }
            }
            if (done < 10) {
                detail = "could not build 10 nontrivial s=3 instances";
                return false;
            }
        }
        // Golden constants: C(p=2) bound 32 from the module example; one
        // measure-comparability constant per depth.
        if (worst_c2 > 32.0 || worst_bar > 64.0 || worst_hat > 64.0) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "constants C2=%.2f bar=%.2f hat=%.2f exceed golden",
                          worst_c2, worst_bar, worst_hat);
            detail = buf;
            return false;
        }
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "exact sums: least C(p=2) = %.3f; |bar|/|Omega| <= %.2f, |hat|/|Omega| <= "
                      "%.2f; shadows exact",
                      worst_c2, worst_bar, worst_hat);
        detail = buf;
        return true;
    });

    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all 8 criteria passed\n");
    return failures ? 1 : 0;
}
