#include "bessellab/shintani.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bessellab::shintani {

using matgrp::Family;
using matgrp::Perm;
using matgrp::Selector;
using matgrp::Side;

NormTable norm_map(const GaloisDatum& d, const TwistedClasses& tcls, const ConjClasses& gop_cls,
                   const ConjClasses& ge_cls) {
    if (d.family == Family::SL)
        throw std::invalid_argument(
            "norm_map: family SL is excluded (possibly disconnected centralizers)");
    if (tcls.reps.size() != gop_cls.reps.size())
        throw std::logic_error("norm_map: sigma-class and fixed-point class counts differ");

    // ambient class index of every G^op(F) representative
    std::vector<uint32_t> gop_ambient(gop_cls.reps.size());
    for (size_t j = 0; j < gop_cls.reps.size(); ++j)
        gop_ambient[j] = ge_cls.index_of(gop_cls.reps[j]);

    NormTable out;
    out.map.resize(tcls.reps.size());
    for (size_t k = 0; k < tcls.reps.size(); ++k) {
        const Mat& g = tcls.reps[k];
        Mat norm = d.mmul(g, d.sigma(g));
        uint32_t amb = ge_cls.index_of(norm);
        uint32_t hit = UINT32_MAX;
        for (size_t j = 0; j < gop_ambient.size(); ++j) {
            if (gop_ambient[j] != amb) continue;
            if (hit != UINT32_MAX)
                throw std::runtime_error("norm_map: several fixed-point classes match");
            hit = static_cast<uint32_t>(j);
        }
        if (hit == UINT32_MAX) throw std::runtime_error("norm_map: no fixed-point class matches");
        out.map[k] = hit;
        out.witnesses.push_back({g, norm, gop_cls.reps[hit]});
    }
    std::set<uint32_t> image(out.map.begin(), out.map.end());
    if (image.size() != out.map.size()) throw std::runtime_error("norm_map: map is not injective");
    return out;
}

std::pair<Mat, Mat> x_sigma_decompose(const GaloisDatum& d, const Mat& g) {
    if (!(d.sigma(g) == d.minv(g)))
        throw std::invalid_argument("x_sigma_decompose: element is not in X_sigma");
    const uint32_t n = d.n;

    auto parts = matgrp::bruhat_decompose(d, g, Side::E);
    Mat nrep = d.mmul(parts.t, parts.w.rep);
    if (!(d.sigma(nrep) == d.minv(nrep)))
        throw std::logic_error("x_sigma_decompose: monomial part fails sigma(n) = n^{-1}");

    // positions with n^{-1} E_{ij} n lower resp. upper triangular
    Perm winv = matgrp::perm_inv(parts.w.perm);
    std::vector<std::vector<bool>> in_a(n, std::vector<bool>(n, false));
    std::vector<std::vector<bool>> in_b(n, std::vector<bool>(n, false));
    std::vector<std::pair<uint32_t, uint32_t>> b_slots;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j) {
            if (winv[i] > winv[j]) {
                in_a[i][j] = true;
            } else {
                in_b[i][j] = true;
                b_slots.emplace_back(i, j);
            }
        }

    auto structured = [&]() -> std::optional<Mat> {
        // g = r n u2' with n^{-1} r n lower unipotent
        auto [r, p] = matgrp::split_unipotent(d, parts.u1, in_a);
        Mat u2p = d.mmul(d.mmul(d.mmul(d.minv(nrep), p), nrep), parts.u2);
        if (!d.is_upper_unitri(u2p)) return std::nullopt;
        // v1 v2 = sigma(u2')^{-1}; the proof forces v1 = r
        auto [v1, v2] = matgrp::split_unipotent(d, d.sigma(d.minv(u2p)), in_a);
        if (!(v1 == r)) return std::nullopt;
        // Lang solve y n sigma(y)^{-1} n^{-1} = v2 over the small unipotent
        // group supported on the n-stable positions
        const auto& t = d.tower;
        uint64_t count = 1;
        for (size_t s = 0; s < b_slots.size(); ++s) count *= t.qq;
        for (uint64_t idx = 0; idx < count; ++idx) {
            Mat y = d.ident();
            uint64_t rem = idx;
            for (auto [i, j] : b_slots) {
                y.set(n, i, j, static_cast<uint8_t>(rem % t.qq));
                rem /= t.qq;
            }
            Mat lhs = d.mmul(d.mmul(d.mmul(y, nrep), d.minv(d.sigma(y))), d.minv(nrep));
            if (lhs == v2) return d.mmul(r, y);
        }
        return std::nullopt;
    };

    std::optional<Mat> u = structured();
    if (!u) {
        // fallback: scan U(E) directly
        for (const Mat& cand : matgrp::enumerate(d, Selector::UE))
            if (d.mmul(d.mmul(cand, nrep), d.minv(d.sigma(cand))) == g) {
                u = cand;
                break;
            }
    }
    if (!u) throw std::runtime_error("x_sigma_decompose: no unipotent solves the Lang equation");
    if (!(d.mmul(d.mmul(*u, nrep), d.minv(d.sigma(*u))) == g))
        throw std::logic_error("x_sigma_decompose: recomposition failed");
    return {*u, nrep};
}

std::vector<cplx> twisted_character(const GaloisDatum& d, const ConjClasses& ge_cls,
                                    const NondegenChar& psi, const WhittakerModel& model,
                                    const TwistedClasses& tcls, double tol) {
    std::vector<cplx> out(tcls.reps.size());
    const uint64_t N = ge_cls.order();
    for (size_t k = 0; k < tcls.reps.size(); ++k) {
        const Mat& g = tcls.reps[k];
        out[k] = (model.act(d, ge_cls, psi, g) * model.intertwiner).trace();
        // constancy across the sigma-class, sampled deterministically
        for (uint64_t s = 1; s <= 3; ++s) {
            const Mat& x = ge_cls.elements[(s * N) / 4 % N];
            Mat member = d.mmul(d.mmul(x, g), d.minv(d.sigma(x)));
            cplx v = (model.act(d, ge_cls, psi, member) * model.intertwiner).trace();
            if (std::abs(v - out[k]) > tol)
                throw std::runtime_error("twisted_character: not constant on a sigma-class");
        }
    }
    return out;
}

BaseChangeResult base_change_match(const GaloisDatum& d, const ConjClasses& ge_cls,
                                   const CharacterTable& ge_table, const ConjClasses& gop_cls,
                                   const CharacterTable& gop_table, const TwistedClasses& tcls,
                                   const NormTable& norm, const NondegenChar& psi, double tol,
                                   uint32_t model_cap) {
    auto generic = whittaker::generic_irreps(d, ge_cls, ge_table, psi, tol);
    auto siginv = classchar::sigma_invariant_irreps(d, ge_cls, ge_table, tol);
    std::set<uint32_t> siginv_set(siginv.begin(), siginv.end());
    const double match_tol = 10 * tol;

    BaseChangeResult r;
    for (uint32_t pi : generic) {
        if (!siginv_set.count(pi)) continue;
        auto model = whittaker::whittaker_model(d, ge_cls, ge_table, pi, psi, model_cap, tol);
        auto tw = twisted_character(d, ge_cls, psi, model, tcls, tol);

        uint32_t best = UINT32_MAX;
        int best_eps = 0;
        double best_res = 0;
        for (uint32_t rho = 0; rho < gop_table.nrows(); ++rho) {
            for (int eps : {+1, -1}) {
                double res = 0;
                for (size_t k = 0; k < tcls.reps.size(); ++k)
                    res = std::max(res, std::abs(tw[k] - static_cast<double>(eps) *
                                                             gop_table.chars[rho][norm.map[k]]));
                if (res <= match_tol) {
                    if (best != UINT32_MAX && best != rho)
                        throw std::runtime_error("base_change_match: ambiguous match");
                    best = rho;
                    best_eps = eps;
                    best_res = res;
                }
            }
        }
        if (best == UINT32_MAX) {
            r.unmatched.push_back(pi);
        } else {
            r.pairs.push_back({pi, best, best_eps, best_res});
            r.max_residual = std::max(r.max_residual, best_res);
        }
    }
    return r;
}

std::string base_change_export(const GaloisDatum& d, const CharacterTable& ge_table,
                               const CharacterTable& gop_table, const BaseChangeResult& r,
                               const NormTable& norm) {
    std::ostringstream os;
    os << "bessellab basechange v1\n";
    os << "family " << matgrp::family_str(d.family) << " n " << d.n << " q " << d.q << "\n";
    os << "pairs " << r.pairs.size() << " unmatched " << r.unmatched.size() << "\n";
    os << "pi,dim_pi,rho,dim_rho,eps,residual\n";
    for (const auto& p : r.pairs) {
        char buf[96];
        snprintf(buf, sizeof buf, "%u,%llu,%u,%llu,%+d,%.3e\n", p.pi,
                 static_cast<unsigned long long>(ge_table.degrees[p.pi]), p.rho,
                 static_cast<unsigned long long>(gop_table.degrees[p.rho]), p.eps, p.residual);
        os << buf;
    }
    for (uint32_t pi : r.unmatched) os << "unmatched pi " << pi << "\n";
    os << "norm witnesses\n";
    for (const auto& w : norm.witnesses)
        os << matgrp::encode_hex(w.g, d.n) << " -> " << matgrp::encode_hex(w.norm, d.n) << " ~ "
           << matgrp::encode_hex(w.matched, d.n) << "\n";
    return os.str();
}

std::optional<uint32_t> lang_norm_consistency(const GaloisDatum& d, const TwistedClasses& tcls,
                                              const NormTable& norm, const ConjClasses& ge_cls,
                                              const ConjClasses& gop_cls, uint64_t quartic_cap) {
    if (d.family == Family::SL) return std::nullopt;
    if (d.q * d.q > 16) return std::nullopt;
    {
        // |GL_n(q^4)| against the cap, before building anything
        __int128 Q4 = 1;
        for (int i = 0; i < 4; ++i) Q4 *= d.q;
        __int128 ord = 1, qn = 1, qi = 1;
        for (uint32_t i = 0; i < d.n; ++i) qn *= Q4;
        for (uint32_t i = 0; i < d.n; ++i) {
            ord *= (qn - qi);
            qi *= Q4;
        }
        if (ord > static_cast<__int128>(quartic_cap)) return std::nullopt;
    }
    // arithmetic over F_{q^4}: the quartic tower's base field coincides with
    // E by the deterministic modulus choice
    GaloisDatum d4 = matgrp::datum_build(Family::GL, d.n, d.q * d.q, quartic_cap);
    if (d4.tower.f.modulus != d.tower.e.modulus)
        throw std::logic_error("lang_norm_consistency: tower mismatch");

    const auto& t4 = d4.tower;
    const uint32_t n = d.n;
    auto drop = [&](const Mat& m) -> std::optional<Mat> {
        Mat out;
        for (uint32_t i = 0; i < n * n; ++i) {
            int16_t v = t4.unembed_t[m.a[i]];
            if (v < 0) return std::nullopt;
            out.a[i] = static_cast<uint8_t>(v);
        }
        return out;
    };
    // entrywise q-power inside F_{q^4}
    uint32_t k = d.tower.k;
    auto pow_q = [&](const Mat& m) {
        Mat out = m;
        for (uint32_t rep = 0; rep < k; ++rep)
            for (uint32_t i = 0; i < n * n; ++i) out.a[i] = t4.frob_p[out.a[i]];
        return out;
    };
    auto sigma4 = [&](const Mat& m) {
        return d.family == Family::U ? pow_q(m) : d4.iota(pow_q(m));
    };

    std::vector<bool> seen(tcls.reps.size(), false);
    uint32_t checked = 0;
    for (const Mat& h : matgrp::enumerate(d4, Selector::GE)) {
        Mat w4 = d4.mmul(h, d4.minv(sigma4(h)));
        auto w = drop(w4);
        if (!w) continue;
        auto it = tcls.pos.find(*w);
        if (it == tcls.pos.end()) continue;
        uint32_t cls_idx = tcls.class_of[it->second];
        if (seen[cls_idx]) continue;
        seen[cls_idx] = true;
        // sigma^2 is the entrywise q^2-power on the quartic points
        Mat h2;
        for (uint32_t i = 0; i < n * n; ++i) h2.a[i] = t4.frob_q[h.a[i]];
        Mat value4 = d4.mmul(d4.minv(h2), h);
        auto value = drop(value4);
        if (!value) throw std::logic_error("lang_norm_consistency: norm value left G(E)");
        if (ge_cls.index_of(*value) != ge_cls.index_of(gop_cls.reps[norm.map[cls_idx]]))
            throw std::runtime_error("lang_norm_consistency: class mismatch");
        ++checked;
        if (checked == tcls.reps.size()) break;
    }
    return checked;
}

}  // namespace bessellab::shintani
