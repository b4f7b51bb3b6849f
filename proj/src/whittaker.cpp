#include "bessellab/whittaker.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bessellab::whittaker {

using matgrp::Family;
using matgrp::Selector;

cplx NondegenChar::eval(const GaloisDatum& d, const Mat& u) const {
    const auto& t = d.tower;
    uint8_t s = 0;
    for (uint32_t i = 0; i + 1 < d.n; ++i) s = t.add(s, u.at(d.n, i, i + 1));
    if (side == Side::E) return chi(s);
    int16_t sf = t.unembed_t[s];
    if (sf < 0) throw std::invalid_argument("psi over F evaluated off the F-points");
    return chi(static_cast<uint8_t>(sf));
}

uint8_t default_beta(const GaloisDatum& d, Side side) {
    const auto& t = d.tower;
    if (side == Side::F) return 1;
    for (uint32_t b = 1; b < t.qq; ++b) {
        bool ok = d.family == Family::U ? t.in_f(static_cast<uint8_t>(b))
                                        : t.rel_trace_e(static_cast<uint8_t>(b)) == 0;
        if (ok) return static_cast<uint8_t>(b);
    }
    throw std::logic_error("default_beta: no admissible beta");
}

NondegenChar psi_build(const GaloisDatum& d, uint8_t beta, Side side) {
    const auto& t = d.tower;
    NondegenChar psi;
    psi.side = side;
    psi.beta = beta;
    if (side == Side::F) {
        if (d.family == Family::U)
            throw std::invalid_argument("psi_build: F-side characters are realized for split families only");
        if (beta == 0 || beta >= t.q) throw std::invalid_argument("psi_build: beta must be a nonzero F_q element");
        psi.chi = gf::additive_char_of_f(t, beta);
        return psi;
    }
    if (beta == 0) throw std::invalid_argument("psi_build: beta must be nonzero");
    if (d.family == Family::U) {
        // sigma here is the plain q-power Frobenius; invariance and triviality
        // on U(F) both require beta inside the embedded F_q
        if (!t.in_f(beta))
            throw std::invalid_argument("psi_build: family U needs beta in the embedded F_q");
        psi.chi = gf::additive_char_of_e(t, beta);
    } else {
        if (t.rel_trace_e(beta) != 0)
            throw std::invalid_argument("psi_build: beta must have relative trace zero");
        psi.chi = gf::additive_char(t, beta);
    }

    // verify: trivial on U(F), invariant under sigma; exhaustive while U(E)
    // stays small, deterministic sample beyond that
    auto ue = enumerate(d, Selector::UE);
    const size_t stride = ue.size() <= 1000000 ? 1 : ue.size() / 100000;
    for (size_t i = 0; i < ue.size(); i += stride) {
        const Mat& u = ue[i];
        cplx v = psi.eval(d, u);
        if (std::abs(psi.eval(d, d.sigma(u)) - v) > 1e-9)
            throw std::logic_error("psi_build: character is not sigma-invariant");
        if (d.sigma0(u) == u && std::abs(v - cplx{1, 0}) > 1e-9)
            throw std::logic_error("psi_build: character is not trivial on U(F)");
    }
    return psi;
}

std::vector<int> generic_multiplicities(const GaloisDatum& d, const ConjClasses& cls,
                                        const CharacterTable& table, const NondegenChar& psi,
                                        double tol) {
    auto uu = enumerate(d, psi.side == Side::E ? Selector::UE : Selector::UF);
    const uint32_t r = static_cast<uint32_t>(cls.reps.size());
    std::vector<cplx> per_class(r, 0);
    for (const Mat& u : uu) per_class[cls.index_of(u)] += std::conj(psi.eval(d, u));
    std::vector<int> mult(table.nrows());
    for (uint32_t i = 0; i < table.nrows(); ++i) {
        cplx acc = 0;
        for (uint32_t k = 0; k < r; ++k) acc += table.chars[i][k] * per_class[k];
        acc /= static_cast<double>(uu.size());
        long m = std::lround(acc.real());
        if (std::abs(acc - cplx{static_cast<double>(m), 0}) > tol || m < 0 || m > 1)
            throw std::runtime_error("generic_multiplicities: multiplicity not in {0,1}");
        mult[i] = static_cast<int>(m);
    }
    return mult;
}

std::vector<uint32_t> generic_irreps(const GaloisDatum& d, const ConjClasses& cls,
                                     const CharacterTable& table, const NondegenChar& psi,
                                     double tol) {
    auto mult = generic_multiplicities(d, cls, table, psi, tol);
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < mult.size(); ++i)
        if (mult[i] == 1) out.push_back(i);
    return out;
}

BesselTable bessel(const GaloisDatum& d, const ConjClasses& cls, const CharacterTable& table,
                   uint32_t pi_index, const NondegenChar& psi, double tol) {
    if (pi_index >= table.nrows()) throw std::out_of_range("bessel: bad representation index");
    auto uu = enumerate(d, psi.side == Side::E ? Selector::UE : Selector::UF);
    std::vector<cplx> uvals(uu.size());
    for (size_t i = 0; i < uu.size(); ++i) uvals[i] = std::conj(psi.eval(d, uu[i]));

    const auto& chi = table.chars[pi_index];
    const uint64_t N = cls.order();
    BesselTable B;
    B.pi_index = pi_index;
    B.side = psi.side;
    B.values.resize(N);
    for (uint64_t x = 0; x < N; ++x) {
        cplx acc = 0;
        for (size_t i = 0; i < uu.size(); ++i)
            acc += uvals[i] * chi[cls.index_of(d.mmul(cls.elements[x], uu[i]))];
        B.values[x] = acc / static_cast<double>(uu.size());
    }
    cplx b1 = B.values[cls.position_of(d.ident())];
    if (std::abs(b1 - cplx{1, 0}) > tol)
        throw std::runtime_error("bessel: representation is not generic for this psi (B(1) != 1)");
    for (cplx& v : B.values) v /= b1;
    return B;
}

std::vector<SupportEntry> bessel_support(const GaloisDatum& d, const ConjClasses& cls,
                                         const BesselTable& B, double tol) {
    auto cells = matgrp::bessel_relevant(d);
    auto torus = enumerate(d, B.side == Side::E ? Selector::TE : Selector::TF);
    std::vector<SupportEntry> out;
    for (const auto& cell : cells) {
        SupportEntry e;
        e.w = cell.w.perm;
        for (const Mat& t : torus) {
            bool in_aw = true;
            for (uint8_t i : cell.simple_subset)
                if (t.at(d.n, cell.w.perm[i - 1], cell.w.perm[i - 1]) !=
                    t.at(d.n, cell.w.perm[i], cell.w.perm[i]))
                    in_aw = false;
            if (!in_aw) continue;
            Mat tn = d.mmul(t, cell.w.rep);
            auto it = cls.pos.find(tn);
            if (it == cls.pos.end()) continue;  // off the enumerated group (e.g. SL det)
            if (std::abs(B.values[it->second]) > tol) e.torus_hits.push_back(t);
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::string bessel_export(const GaloisDatum& d, const ConjClasses& cls, const BesselTable& B,
                          double tol) {
    std::ostringstream os;
    os << "element,cell,re,im\n";
    Side side = B.side;
    for (uint64_t x = 0; x < cls.order(); ++x) {
        auto parts = matgrp::bruhat_decompose(d, cls.elements[x], side);
        os << matgrp::encode_hex(cls.elements[x], d.n) << ",w=[";
        for (size_t i = 0; i < parts.w.perm.size(); ++i)
            os << (i ? " " : "") << static_cast<int>(parts.w.perm[i]) + 1;
        char buf[64];
        snprintf(buf, sizeof buf, "],%.12g,%.12g\n", B.values[x].real(), B.values[x].imag());
        os << buf;
    }
    os << "support\n";
    for (const auto& e : bessel_support(d, cls, B, tol)) {
        os << "w=[";
        for (size_t i = 0; i < e.w.size(); ++i) os << (i ? " " : "") << static_cast<int>(e.w[i]) + 1;
        os << "] hits " << e.torus_hits.size() << ":";
        for (const Mat& t : e.torus_hits) os << " " << matgrp::encode_hex(t, d.n);
        os << "\n";
    }
    return os.str();
}

Eigen::MatrixXcd WhittakerModel::act(const GaloisDatum& d, const ConjClasses& cls,
                                     const NondegenChar& psi, const Mat& g) const {
    const size_t dim = coset_reps.size();
    Eigen::MatrixXcd rg_basis(dim, basis.cols());
    for (size_t c = 0; c < dim; ++c) {
        Mat x = d.mmul(coset_reps[c], g);
        uint32_t c2 = coset_of_element[cls.position_of(x)];
        Mat u = d.mmul(x, d.minv(coset_reps[c2]));
        rg_basis.row(c) = psi.eval(d, u) * basis.row(c2);
    }
    return basis.adjoint() * rg_basis;
}

WhittakerModel whittaker_model(const GaloisDatum& d, const ConjClasses& cls,
                               const CharacterTable& table, uint32_t pi_index,
                               const NondegenChar& psi, uint32_t dim_cap, double tol) {
    if (psi.side != Side::E) throw std::invalid_argument("whittaker_model: psi must live over E");
    const uint64_t N = cls.order();
    auto ue = enumerate(d, Selector::UE);
    if (N % ue.size() != 0) throw std::logic_error("whittaker_model: |U| does not divide |G|");
    const uint64_t dim = N / ue.size();
    if (dim > dim_cap) throw std::length_error("whittaker_model: induced dimension exceeds the cap");

    // sigma-invariance of pi, at the character level
    for (size_t k = 0; k < cls.reps.size(); ++k)
        if (std::abs(table.chars[pi_index][cls.index_of(d.sigma(cls.reps[k]))] -
                     table.chars[pi_index][k]) > tol)
            throw std::invalid_argument("whittaker_model: representation is not sigma-invariant");

    WhittakerModel m;
    m.pi_index = pi_index;
    m.coset_of_element.assign(N, UINT32_MAX);
    for (uint64_t x = 0; x < N; ++x) {
        if (m.coset_of_element[x] != UINT32_MAX) continue;
        uint32_t idx = static_cast<uint32_t>(m.coset_reps.size());
        // elements are sorted, so the first unassigned member is the least of
        // its coset
        m.coset_reps.push_back(cls.elements[x]);
        for (const Mat& u : ue)
            m.coset_of_element[cls.position_of(d.mmul(u, cls.elements[x]))] = idx;
    }
    if (m.coset_reps.size() != dim) throw std::logic_error("whittaker_model: coset count mismatch");
    for (uint32_t c = 0; c < dim; ++c) m.coset_index.emplace(m.coset_reps[c], c);

    const uint64_t deg = table.degrees[pi_index];
    const auto& chi = table.chars[pi_index];

    // isotypic projector P = (deg/|G|) sum_g conj(chi(g)) R(g)
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(dim, dim);
    for (uint64_t x = 0; x < N; ++x) {
        const Mat& g = cls.elements[x];
        cplx coef = std::conj(chi[cls.class_of[x]]) * (static_cast<double>(deg) / static_cast<double>(N));
        if (std::abs(coef) < 1e-15) continue;
        for (uint32_t c = 0; c < dim; ++c) {
            Mat y = d.mmul(m.coset_reps[c], g);
            uint32_t c2 = m.coset_of_element[cls.position_of(y)];
            Mat u = d.mmul(y, d.minv(m.coset_reps[c2]));
            P(c, c2) += coef * psi.eval(d, u);
        }
    }
    if ((P - P.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::logic_error("whittaker_model: projector is not hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P);
    uint32_t rank = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double ev = es.eigenvalues()(i);
        if (std::abs(ev) > 1e-6 && std::abs(ev - 1.0) > 1e-6)
            throw std::logic_error("whittaker_model: projector eigenvalue off {0,1}");
        if (ev > 0.5) ++rank;
    }
    if (rank != deg)
        throw std::runtime_error("whittaker_model: projector rank differs from the degree");
    m.basis.resize(dim, deg);
    uint32_t col = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 0.5) m.basis.col(col++) = es.eigenvectors().col(i);

    // intertwiner f -> f . sigma restricted to the subspace
    Eigen::MatrixXcd isig(dim, deg);
    for (uint32_t c = 0; c < dim; ++c) {
        Mat sc = d.sigma(m.coset_reps[c]);
        uint32_t c2 = m.coset_of_element[cls.position_of(sc)];
        Mat u = d.mmul(sc, d.minv(m.coset_reps[c2]));
        isig.row(c) = psi.eval(d, u) * m.basis.row(c2);
    }
    m.intertwiner = m.basis.adjoint() * isig;

    if ((m.intertwiner * m.intertwiner - Eigen::MatrixXcd::Identity(deg, deg)).cwiseAbs().maxCoeff() > 1e-8)
        throw std::logic_error("whittaker_model: intertwiner does not square to one");
    // sampled equivariance: I act(g) I = act(sigma(g))
    for (uint64_t x = 0; x < N; x += std::max<uint64_t>(1, N / 8)) {
        const Mat& g = cls.elements[x];
        Eigen::MatrixXcd lhs = m.intertwiner * m.act(d, cls, psi, g) * m.intertwiner;
        Eigen::MatrixXcd rhs = m.act(d, cls, psi, d.sigma(g));
        if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-8)
            throw std::logic_error("whittaker_model: intertwiner equivariance failed");
    }
    return m;
}

std::vector<cplx> model_bessel_values(const GaloisDatum& d, const ConjClasses& cls,
                                      const NondegenChar& psi, const WhittakerModel& m) {
    auto ue = enumerate(d, Selector::UE);
    const auto deg = m.basis.cols();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(deg, deg);
    for (const Mat& u : ue) A += std::conj(psi.eval(d, u)) * m.act(d, cls, psi, u);
    A /= static_cast<double>(ue.size());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    uint32_t hits = 0;
    Eigen::VectorXcd b;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 0.5) {
            ++hits;
            b = es.eigenvectors().col(i);
        }
    if (hits != 1) throw std::runtime_error("model_bessel_values: psi-eigenspace is not a line");

    Eigen::VectorXcd f = m.basis * b;  // coordinates over coset reps
    // value at any x: psi(u) f(c) for x = u c
    uint32_t c0 = m.coset_of_element[cls.position_of(d.ident())];
    cplx f1 = f(c0);
    if (std::abs(f1) < 1e-12)
        throw std::runtime_error("model_bessel_values: vector vanishes at the identity");
    std::vector<cplx> out(cls.order());
    for (uint64_t x = 0; x < cls.order(); ++x) {
        uint32_t c = m.coset_of_element[x];
        Mat u = d.mmul(cls.elements[x], d.minv(m.coset_reps[c]));
        out[x] = psi.eval(d, u) * f(c) / f1;
    }
    return out;
}

}  // namespace bessellab::whittaker
