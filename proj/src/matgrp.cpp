#include "bessellab/matgrp.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace bessellab::matgrp {

Family family_parse(const std::string& s) {
    if (s == "gl" || s == "GL") return Family::GL;
    if (s == "sl" || s == "SL") return Family::SL;
    if (s == "u" || s == "U") return Family::U;
    throw std::invalid_argument("unknown family: " + s);
}

std::string family_str(Family f) {
    switch (f) {
        case Family::GL: return "gl";
        case Family::SL: return "sl";
        default: return "u";
    }
}

Selector selector_parse(const std::string& s) {
    static const std::unordered_map<std::string, Selector> m = {
        {"ge", Selector::GE}, {"gf", Selector::GF}, {"gop", Selector::GopF},
        {"ue", Selector::UE}, {"uf", Selector::UF}, {"te", Selector::TE},
        {"tf", Selector::TF}, {"be", Selector::BE}, {"bf", Selector::BF},
        {"xsigma", Selector::Xsigma}};
    auto it = m.find(s);
    if (it == m.end()) throw std::invalid_argument("unknown selector: " + s);
    return it->second;
}

std::string encode_hex(const Mat& m, uint32_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * n * n);
    for (uint32_t i = 0; i < n * n; ++i) {
        out.push_back(digits[m.a[i] >> 4]);
        out.push_back(digits[m.a[i] & 0xf]);
    }
    return out;
}

uint64_t GaloisDatum::order_ge() const {
    const __int128 Q = static_cast<__int128>(q) * q;
    __int128 ord = 1;
    __int128 qn = 1;
    for (uint32_t i = 0; i < n; ++i) qn *= Q;
    __int128 qi = 1;
    for (uint32_t i = 0; i < n; ++i) {
        ord *= (qn - qi);
        qi *= Q;
        if (ord > static_cast<__int128>(1) << 100) return UINT64_MAX;
    }
    if (family == Family::SL) ord /= (Q - 1);
    if (ord > static_cast<__int128>(UINT64_MAX)) return UINT64_MAX;
    return static_cast<uint64_t>(ord);
}

Mat GaloisDatum::ident() const {
    Mat m;
    for (uint32_t i = 0; i < n; ++i) m.set(n, i, i, 1);
    return m;
}

Mat GaloisDatum::mmul(const Mat& x, const Mat& y) const {
    const auto& t = tower;
    Mat r;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j) {
            uint8_t acc = 0;
            for (uint32_t k = 0; k < n; ++k) acc = t.add(acc, t.mul(x.at(n, i, k), y.at(n, k, j)));
            r.set(n, i, j, acc);
        }
    return r;
}

Mat GaloisDatum::mtrans(const Mat& x) const {
    Mat r;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j) r.set(n, i, j, x.at(n, j, i));
    return r;
}

uint8_t GaloisDatum::det(const Mat& x) const {
    const auto& t = tower;
    Mat m = x;
    uint8_t d = 1;
    for (uint32_t c = 0; c < n; ++c) {
        uint32_t piv = n;
        for (uint32_t r = c; r < n; ++r)
            if (m.at(n, r, c) != 0) {
                piv = r;
                break;
            }
        if (piv == n) return 0;
        if (piv != c) {
            for (uint32_t j = 0; j < n; ++j) {
                uint8_t tmp = m.at(n, c, j);
                m.set(n, c, j, m.at(n, piv, j));
                m.set(n, piv, j, tmp);
            }
            d = t.neg(d);
        }
        d = t.mul(d, m.at(n, c, c));
        uint8_t pinv = t.inv(m.at(n, c, c));
        for (uint32_t r = c + 1; r < n; ++r) {
            uint8_t f = t.mul(m.at(n, r, c), pinv);
            if (!f) continue;
            for (uint32_t j = c; j < n; ++j)
                m.set(n, r, j, t.sub(m.at(n, r, j), t.mul(f, m.at(n, c, j))));
        }
    }
    return d;
}

Mat GaloisDatum::minv(const Mat& x) const {
    const auto& t = tower;
    Mat m = x, inv = ident();
    for (uint32_t c = 0; c < n; ++c) {
        uint32_t piv = n;
        for (uint32_t r = c; r < n; ++r)
            if (m.at(n, r, c) != 0) {
                piv = r;
                break;
            }
        if (piv == n) throw std::domain_error("minv: singular matrix");
        if (piv != c)
            for (uint32_t j = 0; j < n; ++j) {
                std::swap(m.a[c * n + j], m.a[piv * n + j]);
                std::swap(inv.a[c * n + j], inv.a[piv * n + j]);
            }
        uint8_t pinv = t.inv(m.at(n, c, c));
        for (uint32_t j = 0; j < n; ++j) {
            m.set(n, c, j, t.mul(m.at(n, c, j), pinv));
            inv.set(n, c, j, t.mul(inv.at(n, c, j), pinv));
        }
        for (uint32_t r = 0; r < n; ++r) {
            if (r == c) continue;
            uint8_t f = m.at(n, r, c);
            if (!f) continue;
            for (uint32_t j = 0; j < n; ++j) {
                m.set(n, r, j, t.sub(m.at(n, r, j), t.mul(f, m.at(n, c, j))));
                inv.set(n, r, j, t.sub(inv.at(n, r, j), t.mul(f, inv.at(n, c, j))));
            }
        }
    }
    return inv;
}

Mat GaloisDatum::frob_entrywise(const Mat& x) const {
    Mat r;
    for (uint32_t i = 0; i < n * n; ++i) r.a[i] = tower.frob_q[x.a[i]];
    return r;
}

Mat GaloisDatum::iota(const Mat& g) const { return mmul(mmul(K, mtrans(minv(g))), Kinv); }

Mat GaloisDatum::sigma0(const Mat& g) const {
    return family == Family::U ? iota(frob_entrywise(g)) : frob_entrywise(g);
}

Mat GaloisDatum::sigma(const Mat& g) const {
    return family == Family::U ? frob_entrywise(g) : iota(frob_entrywise(g));
}

bool GaloisDatum::is_upper_unitri(const Mat& g) const {
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j <= i; ++j)
            if (g.at(n, i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

bool GaloisDatum::is_diagonal(const Mat& g) const {
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j)
            if (i != j && g.at(n, i, j) != 0) return false;
    return true;
}

bool GaloisDatum::is_upper(const Mat& g) const {
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < i; ++j)
            if (g.at(n, i, j) != 0) return false;
    return true;
}

bool GaloisDatum::in_ge(const Mat& g) const {
    uint8_t d = det(g);
    if (family == Family::SL) return d == 1;
    return d != 0;
}

bool GaloisDatum::is_member(const Mat& g, Selector which) const {
    switch (which) {
        case Selector::GE: return in_ge(g);
        case Selector::GF: return in_ge(g) && sigma0(g) == g;
        case Selector::GopF: return in_ge(g) && sigma(g) == g;
        case Selector::UE: return is_upper_unitri(g);
        case Selector::UF: return is_upper_unitri(g) && sigma0(g) == g;
        case Selector::TE: return is_diagonal(g) && in_ge(g);
        case Selector::TF: return is_diagonal(g) && in_ge(g) && sigma0(g) == g;
        case Selector::BE: return is_upper(g) && in_ge(g);
        case Selector::BF: return is_upper(g) && in_ge(g) && sigma0(g) == g;
        case Selector::Xsigma: return in_ge(g) && sigma(g) == minv(g);
    }
    return false;
}

Mat root_elt(const GaloisDatum& d, uint32_t i, uint8_t u) {
    if (i < 1 || i >= d.n) throw std::out_of_range("root_elt: simple root index out of range");
    Mat m = d.ident();
    m.set(d.n, i - 1, i, u);
    return m;
}

Mat root_elt_neg(const GaloisDatum& d, uint32_t i, uint8_t u) {
    if (i < 1 || i >= d.n) throw std::out_of_range("root_elt_neg: simple root index out of range");
    Mat m = d.ident();
    m.set(d.n, i, i - 1, u);
    return m;
}

uint32_t inversions(const Perm& p) {
    uint32_t c = 0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++c;
    return c;
}

Perm perm_mul(const Perm& a, const Perm& b) {
    Perm r(a.size());
    for (size_t j = 0; j < a.size(); ++j) r[j] = a[b[j]];
    return r;
}

Perm perm_inv(const Perm& a) {
    Perm r(a.size());
    for (size_t j = 0; j < a.size(); ++j) r[a[j]] = static_cast<uint8_t>(j);
    return r;
}

Perm perm_of_word(uint32_t n, const Word& w) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    for (uint8_t letter : w) {
        if (letter < 1 || letter >= n) throw std::out_of_range("word letter out of range");
        Perm s(n);
        std::iota(s.begin(), s.end(), 0);
        std::swap(s[letter - 1], s[letter]);
        p = perm_mul(p, s);
    }
    return p;
}

namespace {
Word reduced_word_impl(Perm p, bool leftmost) {
    std::vector<uint8_t> steps;
    const size_t n = p.size();
    while (inversions(p) > 0) {
        size_t pick = n;
        for (size_t i = 0; i + 1 < n; ++i)
            if (p[i] > p[i + 1]) {
                pick = i;
                if (leftmost) break;
            }
        std::swap(p[pick], p[pick + 1]);
        steps.push_back(static_cast<uint8_t>(pick + 1));
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}
}  // namespace

Word reduced_word(const Perm& p) { return reduced_word_impl(p, true); }
Word reduced_word_alt(const Perm& p) { return reduced_word_impl(p, false); }

Perm longest_perm(uint32_t n) {
    Perm p(n);
    for (uint32_t j = 0; j < n; ++j) p[j] = static_cast<uint8_t>(n - 1 - j);
    return p;
}

Perm longest_perm_of_subset(uint32_t n, const std::vector<uint8_t>& simples) {
    std::vector<bool> in(n + 1, false);
    for (uint8_t s : simples) in.at(s) = true;
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    // reverse each maximal run of consecutive simple roots
    uint32_t i = 1;
    while (i < n) {
        if (!in[i]) {
            ++i;
            continue;
        }
        uint32_t j = i;
        while (j < n && in[j]) ++j;  // run i..j-1 moves positions i-1..j-1
        std::reverse(p.begin() + (i - 1), p.begin() + j);
        i = j;
    }
    return p;
}

namespace {
// n_{w_a} = x_a(1) x_{-a}(1) x_a(1), where x_{-a}(u) carries matrix 1 - u E_{i+1,i}
Mat rep_of_word(const GaloisDatum& d, const Word& word) {
    Mat r = d.ident();
    for (uint8_t i : word) {
        Mat ni = d.mmul(d.mmul(root_elt(d, i, 1), root_elt_neg(d, i, d.tower.neg(1))), root_elt(d, i, 1));
        r = d.mmul(r, ni);
    }
    return r;
}
}  // namespace

WeylElement weyl_rep(const GaloisDatum& d, const Word& word) {
    Perm p = perm_of_word(d.n, word);
    if (inversions(p) != word.size()) throw std::invalid_argument("weyl_rep: word is not reduced");
    WeylElement w;
    w.perm = p;
    w.word = word;
    w.rep = rep_of_word(d, word);
    return w;
}

WeylElement weyl_from_perm(const GaloisDatum& d, const Perm& p) {
    Word w1 = reduced_word(p), w2 = reduced_word_alt(p);
    Mat r1 = rep_of_word(d, w1), r2 = rep_of_word(d, w2);
    if (!(r1 == r2)) throw std::logic_error("weyl representative depends on reduced word");
    WeylElement w;
    w.perm = p;
    w.word = w1;
    w.rep = r1;
    return w;
}

std::vector<WeylElement> weyl_all(const GaloisDatum& d) {
    Perm p(d.n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<WeylElement> out;
    do {
        out.push_back(weyl_from_perm(d, p));
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

Mat duality_involution(const GaloisDatum& d, const Mat& g) { return d.iota(g); }
Mat sigma_apply(const GaloisDatum& d, const Mat& g) { return d.sigma(g); }

GaloisDatum datum_build(Family fam, uint32_t n, uint32_t q, uint64_t group_cap) {
    if (n < 2 || n > kMaxN) throw std::invalid_argument("datum_build: n must be in [2,4]");
    if (q > 4)
        std::cerr << "[bessellab] warning: q = " << q << " is beyond the tested range {2,3,4}\n";
    GaloisDatum d;
    d.family = fam;
    d.n = n;
    d.q = q;
    d.tower = gf::tower_make(q);
    d.group_cap = group_cap;

    const auto& t = d.tower;
    uint8_t minus1 = t.neg(1);
    for (uint32_t i = 0; i < n; ++i) {
        d.J.set(n, i, n - 1 - i, i % 2 == 0 ? 1 : minus1);
        d.t_minus.set(n, i, i, i % 2 == 0 ? 1 : minus1);
    }
    d.K = d.mmul(d.t_minus, d.J);
    d.Kinv = d.minv(d.K);

    // Chevalley involution must fix the pinning: c(x_i(u)) = x_{n-i}(u)
    auto chev = [&](const Mat& g) { return d.mmul(d.mmul(d.J, d.mtrans(d.minv(g))), d.minv(d.J)); };
    for (uint32_t i = 1; i < n; ++i)
        for (uint32_t u = 0; u < t.qq; ++u)
            if (!(chev(root_elt(d, i, static_cast<uint8_t>(u))) ==
                  root_elt(d, n - i, static_cast<uint8_t>(u))))
                throw std::logic_error("datum_build: Chevalley involution does not fix the pinning");

    // and act on the torus by t -> w0 t^{-1} w0
    Mat nw0 = weyl_from_perm(d, longest_perm(n)).rep;
    for (uint32_t pos = 0; pos < n; ++pos)
        for (uint32_t a = 1; a < t.qq; ++a) {
            Mat tt = d.ident();
            tt.set(n, pos, pos, static_cast<uint8_t>(a));
            Mat lhs = chev(tt);
            Mat rhs = d.mmul(d.mmul(nw0, d.minv(tt)), d.minv(nw0));
            if (!(lhs == rhs)) throw std::logic_error("datum_build: torus action check failed");
        }

    // alpha_i(t_minus) = -1 for every simple root
    for (uint32_t i = 0; i + 1 < n; ++i)
        if (t.div(d.t_minus.at(n, i, i), d.t_minus.at(n, i + 1, i + 1)) != minus1)
            throw std::logic_error("datum_build: t_minus is not the -1 torus element");

    return d;
}

namespace {

// enumerate all matrices with rows drawn from `rowvals` (element indices)
// that are invertible, in lexicographic row-major order
void enum_invertible(const GaloisDatum& d, const std::vector<uint8_t>& rowvals,
                     std::vector<Mat>& out) {
    const uint32_t n = d.n;
    const auto& t = d.tower;
    const size_t nv = rowvals.size();
    std::vector<uint64_t> stack_idx(n, 0);
    // echelon basis of chosen rows, with pivot columns
    std::vector<std::array<uint8_t, kMaxN>> basis;
    std::vector<uint32_t> pivots;
    std::vector<std::array<uint8_t, kMaxN>> rows;

    uint64_t total = 1;
    for (uint32_t i = 0; i < n; ++i) total *= nv;

    std::array<uint8_t, kMaxN> cand{};
    auto reduce = [&](std::array<uint8_t, kMaxN>& v) -> int {
        for (size_t b = 0; b < basis.size(); ++b) {
            uint8_t c = v[pivots[b]];
            if (!c) continue;
            uint8_t f = t.div(c, basis[b][pivots[b]]);
            for (uint32_t j = 0; j < n; ++j) v[j] = t.sub(v[j], t.mul(f, basis[b][j]));
        }
        for (uint32_t j = 0; j < n; ++j)
            if (v[j]) return static_cast<int>(j);
        return -1;
    };

    std::function<void(uint32_t)> rec = [&](uint32_t level) {
        if (level == n) {
            Mat m;
            for (uint32_t i = 0; i < n; ++i)
                for (uint32_t j = 0; j < n; ++j) m.set(n, i, j, rows[i][j]);
            if (d.family != Family::SL || d.det(m) == 1) out.push_back(m);
            return;
        }
        for (uint64_t idx = 0; idx < total; ++idx) {
            uint64_t rem = idx;
            for (int j = static_cast<int>(n) - 1; j >= 0; --j) {
                cand[j] = rowvals[rem % nv];
                rem /= nv;
            }
            std::array<uint8_t, kMaxN> red = cand;
            int piv = reduce(red);
            if (piv < 0) continue;
            rows.push_back(cand);
            basis.push_back(red);
            pivots.push_back(static_cast<uint32_t>(piv));
            rec(level + 1);
            rows.pop_back();
            basis.pop_back();
            pivots.pop_back();
        }
    };
    rec(0);
}

std::vector<Mat> enum_upper_unitri(const GaloisDatum& d, const std::vector<uint8_t>& vals) {
    const uint32_t n = d.n;
    std::vector<std::pair<uint32_t, uint32_t>> slots;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j) slots.emplace_back(i, j);
    std::vector<Mat> out;
    uint64_t total = 1;
    for (size_t s = 0; s < slots.size(); ++s) total *= vals.size();
    for (uint64_t idx = 0; idx < total; ++idx) {
        Mat m = d.ident();
        uint64_t rem = idx;
        for (auto [i, j] : slots) {
            m.set(n, i, j, vals[rem % vals.size()]);
            rem /= vals.size();
        }
        out.push_back(m);
    }
    return out;
}

std::vector<Mat> enum_diagonal(const GaloisDatum& d, const std::vector<uint8_t>& vals) {
    const uint32_t n = d.n;
    std::vector<Mat> out;
    uint64_t total = 1;
    for (uint32_t i = 0; i < n; ++i) total *= vals.size();
    for (uint64_t idx = 0; idx < total; ++idx) {
        Mat m;
        uint64_t rem = idx;
        bool ok = true;
        for (uint32_t i = 0; i < n; ++i) {
            uint8_t v = vals[rem % vals.size()];
            rem /= vals.size();
            if (v == 0) {
                ok = false;
                break;
            }
            m.set(n, i, i, v);
        }
        if (!ok) continue;
        if (d.family == Family::SL && d.det(m) != 1) continue;
        out.push_back(m);
    }
    return out;
}

}  // namespace

std::vector<Mat> enumerate(const GaloisDatum& d, Selector sel) {
    const auto& t = d.tower;
    std::vector<uint8_t> all_e(t.qq);
    std::iota(all_e.begin(), all_e.end(), 0);
    std::vector<uint8_t> sub_f(t.q);
    for (uint32_t a = 0; a < t.q; ++a) sub_f[a] = t.embed_t[a];

    auto need_ge = [&]() {
        if (d.order_ge() > d.group_cap)
            throw std::length_error("enumerate: |G(E)| exceeds the configured cap");
    };

    std::vector<Mat> out;
    switch (sel) {
        case Selector::GE: {
            need_ge();
            enum_invertible(d, all_e, out);
            break;
        }
        case Selector::GF: {
            bool plain_frob = d.family != Family::U;
            if (plain_frob) {
                enum_invertible(d, sub_f, out);
            } else {
                need_ge();
                std::vector<Mat> ge;
                enum_invertible(d, all_e, ge);
                for (const Mat& g : ge)
                    if (d.sigma0(g) == g) out.push_back(g);
            }
            break;
        }
        case Selector::GopF: {
            bool plain_frob = d.family == Family::U;
            if (plain_frob) {
                enum_invertible(d, sub_f, out);
            } else {
                need_ge();
                std::vector<Mat> ge;
                enum_invertible(d, all_e, ge);
                for (const Mat& g : ge)
                    if (d.sigma(g) == g) out.push_back(g);
            }
            break;
        }
        case Selector::UE: out = enum_upper_unitri(d, all_e); break;
        case Selector::UF: {
            for (const Mat& u : enum_upper_unitri(d, all_e))
                if (d.sigma0(u) == u) out.push_back(u);
            break;
        }
        case Selector::TE: out = enum_diagonal(d, all_e); break;
        case Selector::TF: {
            for (const Mat& x : enum_diagonal(d, all_e))
                if (d.sigma0(x) == x) out.push_back(x);
            break;
        }
        case Selector::BE:
        case Selector::BF: {
            for (const Mat& x : enum_diagonal(d, all_e))
                for (const Mat& u : enum_upper_unitri(d, all_e)) {
                    Mat b = d.mmul(x, u);
                    if (sel == Selector::BF && !(d.sigma0(b) == b)) continue;
                    out.push_back(b);
                }
            break;
        }
        case Selector::Xsigma: {
            need_ge();
            std::vector<Mat> ge;
            enum_invertible(d, all_e, ge);
            for (const Mat& g : ge)
                if (d.sigma(g) == d.minv(g)) out.push_back(g);
            break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

BruhatParts bruhat_decompose(const GaloisDatum& d, const Mat& g, Side side) {
    if (side == Side::F && d.family == Family::U)
        throw std::invalid_argument("bruhat_decompose: F-side only for split families");
    if (!d.is_member(g, side == Side::F ? Selector::GF : Selector::GE))
        throw std::invalid_argument("bruhat_decompose: element not in the selected group");

    const auto& t = d.tower;
    const uint32_t n = d.n;
    Mat M = g, u1 = d.ident(), u2 = d.ident();
    std::vector<bool> marked(n, false);
    std::vector<uint32_t> col_of(n, n);  // pivot column of a marked row
    Perm perm(n, 0);

    for (uint32_t j = 0; j < n; ++j) {
        // peel off marked rows below the eventual pivot with column ops;
        // every position (j2, j) used here has perm[j2] > perm[j], so u2
        // stays inside U cap w^{-1} U^- w
        uint32_t i0 = n;
        for (;;) {
            uint32_t low = n;
            for (uint32_t i = 0; i < n; ++i)
                if (M.at(n, i, j) != 0) low = i;
            if (low == n) throw std::logic_error("bruhat_decompose: no pivot (singular?)");
            if (!marked[low]) {
                i0 = low;
                break;
            }
            uint32_t j2 = col_of[low];
            uint8_t f = t.div(M.at(n, low, j), M.at(n, low, j2));
            for (uint32_t i = 0; i < n; ++i)
                M.set(n, i, j, t.sub(M.at(n, i, j), t.mul(f, M.at(n, i, j2))));
            Mat R = d.ident();
            R.set(n, j2, j, f);
            u2 = d.mmul(R, u2);
        }
        // clear everything above the pivot (marked rows above are safe: their
        // pivot columns are zero in row i0) with row operations
        for (uint32_t k = 0; k < i0; ++k) {
            uint8_t c = M.at(n, k, j);
            if (!c) continue;
            uint8_t f = t.div(c, M.at(n, i0, j));
            for (uint32_t jj = 0; jj < n; ++jj)
                M.set(n, k, jj, t.sub(M.at(n, k, jj), t.mul(f, M.at(n, i0, jj))));
            Mat L = d.ident();
            L.set(n, k, i0, f);
            u1 = d.mmul(u1, L);
        }
        perm[j] = static_cast<uint8_t>(i0);
        marked[i0] = true;
        col_of[i0] = j;
    }

    BruhatParts parts;
    parts.w = weyl_from_perm(d, perm);
    parts.u1 = u1;
    parts.u2 = u2;
    parts.t = d.mmul(M, d.minv(parts.w.rep));
    if (!d.is_diagonal(parts.t)) throw std::logic_error("bruhat_decompose: torus part not diagonal");
    Mat recomposed = d.mmul(d.mmul(d.mmul(parts.u1, parts.t), parts.w.rep), parts.u2);
    if (!(recomposed == g)) throw std::logic_error("bruhat_decompose: recomposition failed");
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j)
            if (u2.at(n, i, j) != 0 && perm[i] <= perm[j])
                throw std::logic_error("bruhat_decompose: u2 outside U_w^-");
    return parts;
}

std::pair<Mat, Mat> split_unipotent(const GaloisDatum& d, const Mat& u,
                                    const std::vector<std::vector<bool>>& in_s) {
    if (!d.is_upper_unitri(u)) throw std::invalid_argument("split_unipotent: not upper unitriangular");
    const uint32_t n = d.n;
    const auto& t = d.tower;
    Mat x = d.ident(), y = u;
    for (uint32_t len = 1; len < n; ++len)
        for (uint32_t i = 0; i + len < n; ++i) {
            uint32_t j = i + len;
            if (!in_s[i][j]) continue;
            uint8_t c = y.at(n, i, j);
            if (!c) continue;
            Mat xe = d.ident();
            xe.set(n, i, j, c);
            x = d.mmul(x, xe);
            Mat xi = d.ident();
            xi.set(n, i, j, t.neg(c));
            y = d.mmul(xi, y);
        }
    if (!(d.mmul(x, y) == u)) throw std::logic_error("split_unipotent: recomposition failed");
    return {x, y};
}

std::vector<RelevantCell> bessel_relevant(const GaloisDatum& d) {
    if (d.family == Family::U)
        throw std::invalid_argument("bessel_relevant: realized for split families only");
    const uint32_t n = d.n;
    // route (a): definition scan over the whole Weyl group
    std::vector<Perm> by_scan;
    {
        Perm p(n);
        std::iota(p.begin(), p.end(), 0);
        do {
            bool rel = true;
            for (uint32_t i = 0; i + 1 < n && rel; ++i)
                if (p[i] < p[i + 1] && p[i + 1] != p[i] + 1) rel = false;
            if (rel) by_scan.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    // route (b): w0 * w_I over all subsets of simple roots
    std::vector<std::pair<Perm, std::vector<uint8_t>>> by_subsets;
    const uint32_t nsimple = n - 1;
    for (uint32_t mask = 0; mask < (1u << nsimple); ++mask) {
        std::vector<uint8_t> subset;
        for (uint32_t i = 0; i < nsimple; ++i)
            if (mask & (1u << i)) subset.push_back(static_cast<uint8_t>(i + 1));
        Perm w = perm_mul(longest_perm(n), longest_perm_of_subset(n, subset));
        by_subsets.emplace_back(w, subset);
    }

    std::vector<Perm> sorted_a = by_scan, sorted_b;
    for (auto& [w, s] : by_subsets) sorted_b.push_back(w);
    std::sort(sorted_a.begin(), sorted_a.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    if (sorted_a != sorted_b)
        throw std::logic_error("bessel_relevant: definition scan and subset enumeration disagree");

    std::vector<RelevantCell> cells;
    for (auto& [w, subset] : by_subsets) {
        RelevantCell cell;
        cell.w = weyl_from_perm(d, w);
        // I_w = {i : w(alpha_i) > 0}; must reproduce the generating subset
        std::vector<uint8_t> iw;
        for (uint32_t i = 0; i + 1 < n; ++i)
            if (w[i] < w[i + 1]) iw.push_back(static_cast<uint8_t>(i + 1));
        if (iw != subset) throw std::logic_error("bessel_relevant: I_w mismatch");
        cell.simple_subset = iw;
        cell.a_w = a_w_subgroup(d, cell);
        cells.push_back(std::move(cell));
    }
    std::sort(cells.begin(), cells.end(),
              [](const RelevantCell& a, const RelevantCell& b) { return a.w.perm < b.w.perm; });
    return cells;
}

std::vector<Mat> a_w_subgroup(const GaloisDatum& d, const RelevantCell& cell) {
    if (d.family == Family::U)
        throw std::invalid_argument("a_w_subgroup: realized for split families only");
    const uint32_t n = d.n;
    const Perm& w = cell.w.perm;
    std::vector<Mat> tf = enumerate(d, Selector::TF);

    std::vector<Mat> direct;
    for (const Mat& t : tf) {
        bool ok = true;
        for (uint8_t i : cell.simple_subset)
            if (t.at(n, w[i - 1], w[i - 1]) != t.at(n, w[i], w[i])) ok = false;
        if (ok) direct.push_back(t);
    }

    // cross-check: center of the conjugated Levi n_w L_I n_w^{-1}
    std::vector<uint32_t> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    for (uint8_t i : cell.simple_subset) {
        uint32_t a = comp[i - 1];
        for (uint32_t j = 0; j < n; ++j)
            if (comp[j] == a) comp[j] = comp[i];
    }
    std::vector<Mat> levi;
    for (const Mat& t : tf) {
        bool blocky = true;
        for (uint32_t i = 0; i + 1 < n && blocky; ++i)
            for (uint32_t j = i + 1; j < n; ++j)
                if (comp[i] == comp[j] && t.at(n, i, i) != t.at(n, j, j)) blocky = false;
        if (!blocky) continue;
        Mat conj = d.mmul(d.mmul(cell.w.rep, t), d.minv(cell.w.rep));
        levi.push_back(conj);
    }
    std::sort(levi.begin(), levi.end());
    std::vector<Mat> sorted_direct = direct;
    std::sort(sorted_direct.begin(), sorted_direct.end());
    if (levi != sorted_direct)
        throw std::logic_error("a_w_subgroup: direct and Levi-center routes disagree");
    return sorted_direct;
}

}  // namespace bessellab::matgrp
