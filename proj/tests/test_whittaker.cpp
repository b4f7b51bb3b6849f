#include <algorithm>
#include <map>

#include "bessellab/whittaker.hpp"
#include "doctest.h"

using namespace bessellab;
using namespace bessellab::matgrp;
using namespace bessellab::classchar;
using namespace bessellab::whittaker;

namespace {

struct Ctx {
    GaloisDatum d;
    ConjClasses cls;
    CharacterTable table;
    NondegenChar psi;
};

Ctx make_ctx(Family f, uint32_t n, uint32_t q, Side side, uint64_t cap = 100000) {
    GaloisDatum d = datum_build(f, n, q);
    auto cls = conj_classes(d, enumerate(d, side == Side::E ? Selector::GE : Selector::GF));
    auto table = character_table(d, cls, 11, cap);
    auto psi = psi_build(d, default_beta(d, side), side);
    return Ctx{std::move(d), std::move(cls), std::move(table), std::move(psi)};
}

}  // namespace

TEST_CASE("psi basics over E") {
    auto d = datum_build(Family::GL, 2, 2);
    auto psi = psi_build(d, default_beta(d, Side::E), Side::E);
    CHECK(std::abs(psi.eval(d, d.ident()) - cplx{1, 0}) < 1e-12);

    // psi(x_i(u)) = psi0(u)
    auto psi0 = gf::additive_char(d.tower, psi.beta);
    for (uint32_t u = 0; u < d.tower.qq; ++u)
        CHECK(std::abs(psi.eval(d, root_elt(d, 1, static_cast<uint8_t>(u))) -
                       psi0(static_cast<uint8_t>(u))) < 1e-12);

    // invariance under sigma and triviality on U(F), exhaustively
    for (const Mat& u : enumerate(d, Selector::UE))
        CHECK(std::abs(psi.eval(d, sigma_apply(d, u)) - psi.eval(d, u)) < 1e-12);
    for (const Mat& u : enumerate(d, Selector::UF))
        CHECK(std::abs(psi.eval(d, u) - cplx{1, 0}) < 1e-12);

    CHECK_THROWS_AS(psi_build(d, 0, Side::E), std::invalid_argument);
    auto d3 = datum_build(Family::GL, 2, 3);
    CHECK_THROWS_AS(psi_build(d3, 1, Side::E), std::invalid_argument);  // trace(1) != 0 over F_3
}

TEST_CASE("psi for family U needs an F_q-rational beta") {
    auto d = datum_build(Family::U, 2, 3);
    uint8_t beta = default_beta(d, Side::E);
    CHECK(d.tower.in_f(beta));
    auto psi = psi_build(d, beta, Side::E);
    for (const Mat& u : enumerate(d, Selector::UF))
        CHECK(std::abs(psi.eval(d, u) - cplx{1, 0}) < 1e-12);
    for (const Mat& u : enumerate(d, Selector::UE))
        CHECK(std::abs(psi.eval(d, sigma_apply(d, u)) - psi.eval(d, u)) < 1e-12);
    // a trace-zero beta outside F_q fails the family-U postconditions
    uint8_t bad = 0;
    for (uint32_t b = 1; b < d.tower.qq; ++b)
        if (d.tower.rel_trace_e(static_cast<uint8_t>(b)) == 0 && !d.tower.in_f(static_cast<uint8_t>(b)))
            bad = static_cast<uint8_t>(b);
    REQUIRE(bad != 0);
    CHECK_THROWS_AS(psi_build(d, bad, Side::E), std::invalid_argument);
}

TEST_CASE("weyl representatives are compatible with psi on U_I") {
    // psi(u) = psi(n_w u n_w^{-1}) whenever u in U_I(F) and w(I) stays simple
    for (uint32_t n : {2u, 3u}) {
        auto d = datum_build(Family::GL, n, 2);
        auto psi = psi_build(d, 1, Side::F);
        auto uf = enumerate(d, Selector::UF);
        for (const auto& w : weyl_all(d)) {
            for (uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
                std::vector<bool> in_i(n, false);
                bool maps_simple = true;
                for (uint32_t i = 1; i < n; ++i)
                    if (mask & (1u << (i - 1))) {
                        in_i[i] = true;
                        if (!(w.perm[i - 1] < w.perm[i] && w.perm[i] == w.perm[i - 1] + 1))
                            maps_simple = false;
                    }
                if (!maps_simple) continue;
                for (const Mat& u : uf) {
                    // restrict to U_I: entries allowed only where all simples in range lie in I
                    bool in_ui = true;
                    for (uint32_t i = 0; i < n && in_ui; ++i)
                        for (uint32_t j = i + 1; j < n; ++j) {
                            if (u.at(n, i, j) == 0) continue;
                            for (uint32_t s = i + 1; s <= j; ++s)
                                if (!in_i[s]) in_ui = false;
                        }
                    if (!in_ui) continue;
                    Mat conj = d.mmul(d.mmul(w.rep, u), d.minv(w.rep));
                    CHECK(std::abs(psi.eval(d, u) - psi.eval(d, conj)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("generic multiplicities") {
    for (auto side : {Side::F, Side::E}) {
        auto c = make_ctx(Family::GL, 2, 2, side);
        auto mult = generic_multiplicities(c.d, c.cls, c.table, c.psi);
        uint64_t dimsum = 0;
        for (uint32_t i = 0; i < mult.size(); ++i) dimsum += mult[i] * c.table.degrees[i];
        uint64_t usize = enumerate(c.d, side == Side::E ? Selector::UE : Selector::UF).size();
        CHECK(dimsum == c.cls.order() / usize);
    }
    // the degree-2 character of GL_2(F_2) is generic
    auto c = make_ctx(Family::GL, 2, 2, Side::F);
    auto gen = generic_irreps(c.d, c.cls, c.table, c.psi);
    bool deg2_generic = false;
    for (uint32_t i : gen)
        if (c.table.degrees[i] == 2) deg2_generic = true;
    CHECK(deg2_generic);
}

TEST_CASE("bessel: normalization and transformation rule") {
    // exhaustive on the F-side of (GL,2,2): 6-element group
    auto c = make_ctx(Family::GL, 2, 2, Side::F);
    auto gen = generic_irreps(c.d, c.cls, c.table, c.psi);
    auto B = bessel(c.d, c.cls, c.table, gen[0], c.psi);
    CHECK(std::abs(B.at(c.cls, c.d.ident()) - cplx{1, 0}) < 1e-12);
    auto uf = enumerate(c.d, Selector::UF);
    for (const Mat& u1 : uf)
        for (const Mat& g : c.cls.elements)
            for (const Mat& u2 : uf) {
                cplx lhs = B.at(c.cls, c.d.mmul(c.d.mmul(u1, g), u2));
                cplx rhs = c.psi.eval(c.d, u1) * c.psi.eval(c.d, u2) * B.at(c.cls, g);
                CHECK(std::abs(lhs - rhs) < 1e-9);
            }

    // non-generic pi is rejected
    auto mult = generic_multiplicities(c.d, c.cls, c.table, c.psi);
    for (uint32_t i = 0; i < mult.size(); ++i)
        if (!mult[i]) CHECK_THROWS(bessel(c.d, c.cls, c.table, i, c.psi));
}

TEST_CASE("bessel transformation rule over E, sampled") {
    auto c = make_ctx(Family::GL, 2, 2, Side::E);
    auto gen = generic_irreps(c.d, c.cls, c.table, c.psi);
    auto ue = enumerate(c.d, Selector::UE);
    for (uint32_t pi : gen) {
        auto B = bessel(c.d, c.cls, c.table, pi, c.psi);
        for (size_t s = 0; s < c.cls.order(); s += 17) {
            const Mat& g = c.cls.elements[s];
            for (const Mat& u1 : ue) {
                cplx lhs = B.at(c.cls, c.d.mmul(u1, g));
                CHECK(std::abs(lhs - c.psi.eval(c.d, u1) * B.at(c.cls, g)) < 1e-9);
            }
        }
    }
}

TEST_CASE("bessel support: vanishing outside relevant cells and their A_w cosets") {
    struct Cfg { Family f; uint32_t n, q; };
    for (auto cfg : {Cfg{Family::GL, 2, 2}, Cfg{Family::GL, 3, 2}, Cfg{Family::SL, 2, 3}}) {
        CAPTURE(family_str(cfg.f));
        CAPTURE(cfg.n);
        auto c = make_ctx(cfg.f, cfg.n, cfg.q, Side::F);
        auto cells = bessel_relevant(c.d);
        std::map<Perm, const RelevantCell*> by_perm;
        for (const auto& cell : cells) by_perm[cell.w.perm] = &cell;

        auto gen = generic_irreps(c.d, c.cls, c.table, c.psi);
        // every relevant cell must be hit by some generic pi
        std::map<Perm, bool> cell_hit;
        for (const auto& cell : cells) cell_hit[cell.w.perm] = false;

        for (uint32_t pi : gen) {
            auto B = bessel(c.d, c.cls, c.table, pi, c.psi);
            for (uint64_t x = 0; x < c.cls.order(); ++x) {
                auto parts = bruhat_decompose(c.d, c.cls.elements[x], Side::F);
                auto it = by_perm.find(parts.w.perm);
                bool on_support = false;
                if (it != by_perm.end()) {
                    const auto& aw = it->second->a_w;
                    on_support = std::find(aw.begin(), aw.end(), parts.t) != aw.end();
                }
                if (!on_support)
                    CHECK(std::abs(B.values[x]) < 1e-8);
                else if (std::abs(B.values[x]) > 1e-8)
                    cell_hit[parts.w.perm] = true;
            }
        }
        for (auto& [w, hit] : cell_hit) CHECK(hit);
    }
}

TEST_CASE("nonzero bessel values on N(T)(F) force iota(n) = n^{-1}") {
    auto c = make_ctx(Family::GL, 3, 2, Side::F);
    auto gen = generic_irreps(c.d, c.cls, c.table, c.psi);
    auto tf = enumerate(c.d, Selector::TF);
    for (uint32_t pi : gen) {
        auto B = bessel(c.d, c.cls, c.table, pi, c.psi);
        for (const auto& w : weyl_all(c.d))
            for (const Mat& t : tf) {
                Mat nmat = c.d.mmul(t, w.rep);
                if (std::abs(B.at(c.cls, nmat)) > 1e-8)
                    CHECK(duality_involution(c.d, nmat) == c.d.minv(nmat));
            }
    }
}

TEST_CASE("whittaker model invariants and the oracle route") {
    struct Cfg { Family f; uint32_t q; };
    for (auto cfg : {Cfg{Family::GL, 2}, Cfg{Family::SL, 2}}) {
        CAPTURE(family_str(cfg.f));
        auto c = make_ctx(cfg.f, 2, cfg.q, Side::E);
        auto gen = generic_irreps(c.d, c.cls, c.table, c.psi);
        auto siginv = sigma_invariant_irreps(c.d, c.cls, c.table);
        for (uint32_t pi : gen) {
            if (std::find(siginv.begin(), siginv.end(), pi) == siginv.end()) continue;
            auto m = whittaker_model(c.d, c.cls, c.table, pi, c.psi);
            CHECK(m.basis.cols() == static_cast<long>(c.table.degrees[pi]));

            // act(1) = identity
            auto a1 = m.act(c.d, c.cls, c.psi, c.d.ident());
            CHECK((a1 - Eigen::MatrixXcd::Identity(a1.rows(), a1.cols())).cwiseAbs().maxCoeff() < 1e-9);

            // homomorphism on a sample
            for (size_t i = 0; i < c.cls.order(); i += 37)
                for (size_t j = 0; j < c.cls.order(); j += 41) {
                    const Mat &g = c.cls.elements[i], &h = c.cls.elements[j];
                    Eigen::MatrixXcd prod = m.act(c.d, c.cls, c.psi, c.d.mmul(g, h));
                    Eigen::MatrixXcd comp =
                        m.act(c.d, c.cls, c.psi, g) * m.act(c.d, c.cls, c.psi, h);
                    CHECK((prod - comp).cwiseAbs().maxCoeff() < 1e-8);
                }

            // the closed form agrees with the model evaluation everywhere
            auto B = bessel(c.d, c.cls, c.table, pi, c.psi);
            auto oracle = model_bessel_values(c.d, c.cls, c.psi, m);
            for (uint64_t x = 0; x < c.cls.order(); ++x)
                CHECK(std::abs(B.values[x] - oracle[x]) < 1e-8);

            // the bessel vector is fixed by the intertwiner
            Eigen::VectorXcd bvec(m.coset_reps.size());
            for (size_t cidx = 0; cidx < m.coset_reps.size(); ++cidx)
                bvec(cidx) = B.at(c.cls, m.coset_reps[cidx]);
            Eigen::VectorXcd coords = m.project(bvec);
            CHECK((m.basis * coords - bvec).cwiseAbs().maxCoeff() < 1e-8);  // lies in the subspace
            CHECK((m.intertwiner * coords - coords).cwiseAbs().maxCoeff() < 1e-8);
        }
        // non-sigma-invariant generic pi are rejected by the model builder
        for (uint32_t pi : gen)
            if (std::find(siginv.begin(), siginv.end(), pi) == siginv.end())
                CHECK_THROWS_AS(whittaker_model(c.d, c.cls, c.table, pi, c.psi),
                                std::invalid_argument);
    }
}

TEST_CASE("bessel export shape") {
    auto c = make_ctx(Family::GL, 2, 2, Side::F);
    auto gen = generic_irreps(c.d, c.cls, c.table, c.psi);
    auto B = bessel(c.d, c.cls, c.table, gen[0], c.psi);
    auto text = bessel_export(c.d, c.cls, B);
    CHECK(text.find("element,cell,re,im") == 0);
    CHECK(text.find("support") != std::string::npos);
    // one line per element plus header and support block
    CHECK(std::count(text.begin(), text.end(), '\n') >= c.cls.order() + 2);
}
