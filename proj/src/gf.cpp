#include "bessellab/gf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace bessellab::gf {

bool is_prime(uint32_t n) {
    if (n < 2) return false;
    for (uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

uint32_t FieldSpec::size() const {
    uint32_t s = 1;
    for (uint32_t i = 0; i < k; ++i) s *= p;
    return s;
}

std::string FieldSpec::str() const {
    std::string out = "F_" + std::to_string(size()) + " (p=" + std::to_string(p) + ", modulus=";
    for (size_t i = 0; i < modulus.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(modulus[i]);
    }
    return out + ")";
}

namespace {

// plain polynomial helpers over Z/p, low-degree-first coefficient lists

Poly poly_trim(Poly a) {
    while (a.size() > 1 && a.back() == 0) a.pop_back();
    return a;
}

Poly poly_mul(uint32_t p, const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = static_cast<uint8_t>((c[i + j] + a[i] * b[j]) % p);
    return poly_trim(c);
}

// a mod m, m monic
Poly poly_mod(uint32_t p, Poly a, const Poly& m) {
    a = poly_trim(a);
    const size_t dm = m.size() - 1;
    while (a.size() > dm) {
        uint32_t lead = a.back();
        size_t shift = a.size() - 1 - dm;
        if (lead) {
            for (size_t i = 0; i <= dm; ++i) {
                uint32_t sub = (lead * m[i]) % p;
                a[i + shift] = static_cast<uint8_t>((a[i + shift] + p - sub) % p);
            }
        }
        a.pop_back();
        while (a.size() > std::max<size_t>(1, dm) && a.back() == 0) a.pop_back();
        a = poly_trim(a);
    }
    a.resize(dm == 0 ? 1 : dm, 0);
    return a;
}

bool poly_is_zero(const Poly& a) {
    return std::all_of(a.begin(), a.end(), [](uint8_t c) { return c == 0; });
}

// trial division by all monic polynomials of degree 1..deg/2
bool poly_irreducible(uint32_t p, const Poly& m) {
    const size_t deg = m.size() - 1;
    if (deg == 0) return false;
    if (deg == 1) return true;
    for (size_t d = 1; 2 * d <= deg; ++d) {
        uint64_t count = 1;
        for (size_t i = 0; i < d; ++i) count *= p;
        for (uint64_t idx = 0; idx < count; ++idx) {
            Poly div(d + 1, 0);
            uint64_t t = idx;
            for (size_t i = 0; i < d; ++i) {
                div[i] = static_cast<uint8_t>(t % p);
                t /= p;
            }
            div[d] = 1;
            if (poly_is_zero(poly_mod(p, m, div))) return false;
        }
    }
    return true;
}

Poly index_to_poly(uint32_t p, uint32_t k, uint32_t idx) {
    Poly c(std::max<uint32_t>(k, 1), 0);
    for (uint32_t i = 0; i < k; ++i) {
        c[i] = static_cast<uint8_t>(idx % p);
        idx /= p;
    }
    return c;
}

}  // namespace

FieldSpec field_make(uint32_t p, uint32_t k, const std::optional<Poly>& modulus) {
    if (!is_prime(p)) throw std::invalid_argument("field_make: p must be prime, got " + std::to_string(p));
    if (k < 1) throw std::invalid_argument("field_make: degree must be >= 1");
    FieldSpec s;
    s.p = p;
    s.k = k;
    if (modulus) {
        if (modulus->size() != k + 1 || modulus->back() != 1)
            throw std::invalid_argument("field_make: modulus must be monic of degree k");
        for (uint8_t c : *modulus)
            if (c >= p) throw std::invalid_argument("field_make: modulus coefficient out of range");
        if (!poly_irreducible(p, *modulus))
            throw std::invalid_argument("field_make: modulus is reducible");
        s.modulus = *modulus;
        return s;
    }
    // scan monic degree-k polynomials in index order: x^k + sum c_i x^i,
    // index digits give c_0..c_{k-1} base p
    uint64_t count = 1;
    for (uint32_t i = 0; i < k; ++i) count *= p;
    for (uint64_t idx = 0; idx < count; ++idx) {
        Poly m = index_to_poly(p, k, static_cast<uint32_t>(idx));
        m.resize(k + 1, 0);
        m[k] = 1;
        if (poly_irreducible(p, m)) {
            s.modulus = m;
            return s;
        }
    }
    throw std::logic_error("field_make: no irreducible polynomial found");  // unreachable
}

uint32_t elem_to_index(const FieldSpec& s, const FieldElem& x) {
    uint32_t idx = 0, pw = 1;
    for (uint32_t i = 0; i < s.k; ++i) {
        idx += x.coeffs[i] * pw;
        pw *= s.p;
    }
    return idx;
}

FieldElem elem_from_index(const FieldSpec& s, uint32_t idx) {
    if (idx >= s.size()) throw std::invalid_argument("elem_from_index: out of range");
    return FieldElem{index_to_poly(s.p, s.k, idx)};
}

FieldElem elem_add(const FieldSpec& s, const FieldElem& a, const FieldElem& b) {
    FieldElem c;
    c.coeffs.resize(s.k);
    for (uint32_t i = 0; i < s.k; ++i) c.coeffs[i] = static_cast<uint8_t>((a.coeffs[i] + b.coeffs[i]) % s.p);
    return c;
}

FieldElem elem_neg(const FieldSpec& s, const FieldElem& a) {
    FieldElem c;
    c.coeffs.resize(s.k);
    for (uint32_t i = 0; i < s.k; ++i) c.coeffs[i] = static_cast<uint8_t>((s.p - a.coeffs[i]) % s.p);
    return c;
}

FieldElem elem_mul(const FieldSpec& s, const FieldElem& a, const FieldElem& b) {
    Poly c = poly_mod(s.p, poly_mul(s.p, a.coeffs, b.coeffs), s.modulus);
    c.resize(s.k, 0);
    return FieldElem{c};
}

FieldElem elem_pow(const FieldSpec& s, const FieldElem& a, uint64_t e) {
    FieldElem r = elem_from_index(s, 1 % s.size());
    if (s.size() == 1) return r;
    FieldElem base = a;
    while (e) {
        if (e & 1) r = elem_mul(s, r, base);
        base = elem_mul(s, base, base);
        e >>= 1;
    }
    return r;
}

FieldElem elem_inv(const FieldSpec& s, const FieldElem& a) {
    if (elem_to_index(s, a) == 0) throw std::domain_error("elem_inv: zero");
    return elem_pow(s, a, s.size() - 2);
}

FieldElem frobenius(const FieldSpec& s, const FieldElem& x, uint32_t m) {
    FieldElem r = x;
    for (uint32_t i = 0; i < m; ++i) r = elem_pow(s, r, s.p);
    return r;
}

std::pair<uint32_t, uint32_t> split_prime_power(uint32_t q) {
    for (uint32_t p = 2; p <= q; ++p) {
        if (!is_prime(p) || q % p != 0) continue;
        uint32_t k = 0, t = q;
        while (t % p == 0) {
            t /= p;
            ++k;
        }
        if (t == 1) return {p, k};
        break;
    }
    throw std::invalid_argument("q must be a prime power, got " + std::to_string(q));
}

uint8_t Tower::inv(uint8_t x) const {
    if (x == 0) throw std::domain_error("division by zero in E");
    return inv_t[x];
}

uint8_t Tower::rel_trace_f(uint8_t x) const {
    int16_t r = unembed_t[rel_tr_t[x]];
    if (r < 0) throw std::logic_error("relative trace left the base field");
    return static_cast<uint8_t>(r);
}

Tower tower_make(uint32_t q) {
    auto [p, k] = split_prime_power(q);
    if (q > 16) throw std::invalid_argument("fields with q > 16 are unsupported");
    Tower t;
    t.p = p;
    t.k = k;
    t.q = q;
    t.qq = q * q;
    t.f = field_make(p, k);
    t.e = field_make(p, 2 * k);

    const uint32_t Q2 = t.qq;
    t.add_t.resize(Q2 * Q2);
    t.mul_t.resize(Q2 * Q2);
    t.neg_t.resize(Q2);
    t.inv_t.assign(Q2, 0);
    t.frob_p.resize(Q2);
    t.frob_q.resize(Q2);
    t.unembed_t.assign(Q2, -1);
    t.embed_t.resize(q);
    t.rel_tr_t.resize(Q2);
    t.abs_tr_e.resize(Q2);
    t.abs_tr_f.resize(q);

    std::vector<FieldElem> els(Q2);
    for (uint32_t i = 0; i < Q2; ++i) els[i] = elem_from_index(t.e, i);
    for (uint32_t i = 0; i < Q2; ++i) {
        for (uint32_t j = 0; j < Q2; ++j) {
            t.add_t[i * Q2 + j] = static_cast<uint8_t>(elem_to_index(t.e, elem_add(t.e, els[i], els[j])));
            t.mul_t[i * Q2 + j] = static_cast<uint8_t>(elem_to_index(t.e, elem_mul(t.e, els[i], els[j])));
        }
        t.neg_t[i] = static_cast<uint8_t>(elem_to_index(t.e, elem_neg(t.e, els[i])));
        t.frob_p[i] = static_cast<uint8_t>(elem_to_index(t.e, frobenius(t.e, els[i], 1)));
        t.frob_q[i] = static_cast<uint8_t>(elem_to_index(t.e, frobenius(t.e, els[i], k)));
    }
    for (uint32_t i = 1; i < Q2; ++i)
        for (uint32_t j = 1; j < Q2; ++j)
            if (t.mul_t[i * Q2 + j] == 1) {
                t.inv_t[i] = static_cast<uint8_t>(j);
                break;
            }

    // embedding F_q -> E: send the power-basis generator of F_q to the least
    // root of the F_q modulus inside E, extended as a ring map
    uint32_t root = Q2;
    for (uint32_t c = 0; c < Q2; ++c) {
        FieldElem x = els[c];
        FieldElem acc = elem_from_index(t.e, 0);
        FieldElem xp = elem_from_index(t.e, 1);
        for (uint32_t d = 0; d < t.f.modulus.size(); ++d) {
            for (uint32_t rep = 0; rep < t.f.modulus[d]; ++rep) acc = elem_add(t.e, acc, xp);
            xp = elem_mul(t.e, xp, x);
        }
        if (elem_to_index(t.e, acc) == 0) {
            root = c;
            break;
        }
    }
    if (root == Q2) throw std::logic_error("tower_make: no root of base modulus in E");
    for (uint32_t a = 0; a < q; ++a) {
        FieldElem xf = elem_from_index(t.f, a);
        FieldElem acc = elem_from_index(t.e, 0);
        FieldElem rp = elem_from_index(t.e, 1);
        for (uint32_t d = 0; d < k; ++d) {
            for (uint32_t rep = 0; rep < xf.coeffs[d]; ++rep) acc = elem_add(t.e, acc, rp);
            rp = elem_mul(t.e, rp, els[root]);
        }
        uint8_t img = static_cast<uint8_t>(elem_to_index(t.e, acc));
        t.embed_t[a] = img;
        t.unembed_t[img] = static_cast<int16_t>(a);
    }
    // embedding must be an injective ring map; checked on all q elements
    for (uint32_t a = 0; a < q; ++a)
        for (uint32_t b = 0; b < q; ++b) {
            uint32_t ab_f = elem_to_index(t.f, elem_mul(t.f, elem_from_index(t.f, a), elem_from_index(t.f, b)));
            uint32_t sum_f = elem_to_index(t.f, elem_add(t.f, elem_from_index(t.f, a), elem_from_index(t.f, b)));
            if (t.mul_t[t.embed_t[a] * Q2 + t.embed_t[b]] != t.embed_t[ab_f] ||
                t.add_t[t.embed_t[a] * Q2 + t.embed_t[b]] != t.embed_t[sum_f])
                throw std::logic_error("tower_make: embedding is not a ring map");
        }

    for (uint32_t i = 0; i < Q2; ++i) {
        t.rel_tr_t[i] = t.add_t[i * Q2 + t.frob_q[i]];
        if (t.unembed_t[t.rel_tr_t[i]] < 0) throw std::logic_error("tower_make: trace not in F_q");
        // absolute trace E -> Z/p: sum of p-power conjugates, lands in constants
        uint8_t acc = 0, y = static_cast<uint8_t>(i);
        for (uint32_t j = 0; j < 2 * k; ++j) {
            acc = t.add_t[acc * Q2 + y];
            y = t.frob_p[y];
        }
        if (acc >= p) throw std::logic_error("tower_make: absolute trace not in prime field");
        t.abs_tr_e[i] = acc;
    }
    for (uint32_t a = 0; a < q; ++a) {
        FieldElem x = elem_from_index(t.f, a);
        FieldElem acc = elem_from_index(t.f, 0);
        FieldElem y = x;
        for (uint32_t j = 0; j < k; ++j) {
            acc = elem_add(t.f, acc, y);
            y = frobenius(t.f, y, 1);
        }
        uint32_t v = elem_to_index(t.f, acc);
        if (v >= p) throw std::logic_error("tower_make: absolute trace not in prime field");
        t.abs_tr_f[a] = static_cast<uint8_t>(v);
    }
    return t;
}

namespace {
AdditiveChar build_char(uint32_t p, uint32_t n, uint8_t beta, bool over_e,
                        const std::function<uint8_t(uint8_t, uint8_t)>& mul,
                        const std::function<uint8_t(uint8_t)>& abs_tr) {
    AdditiveChar c;
    c.over_e = over_e;
    c.beta = beta;
    c.values.resize(n);
    for (uint32_t x = 0; x < n; ++x) {
        double arg = 2.0 * std::numbers::pi * abs_tr(mul(beta, static_cast<uint8_t>(x))) / p;
        c.values[x] = {std::cos(arg), std::sin(arg)};
    }
    return c;
}
}  // namespace

AdditiveChar additive_char_of_e(const Tower& t, uint8_t beta) {
    if (beta == 0) throw std::invalid_argument("additive_char: beta must be nonzero");
    return build_char(
        t.p, t.qq, beta, true, [&](uint8_t a, uint8_t b) { return t.mul(a, b); },
        [&](uint8_t x) { return t.abs_tr_e[x]; });
}

AdditiveChar additive_char(const Tower& t, uint8_t beta) {
    if (beta == 0) throw std::invalid_argument("additive_char: beta must be nonzero");
    if (t.rel_trace_e(beta) != 0)
        throw std::invalid_argument("additive_char: beta must have relative trace zero");
    return additive_char_of_e(t, beta);
}

AdditiveChar additive_char_of_f(const Tower& t, uint8_t beta) {
    if (beta == 0 || beta >= t.q) throw std::invalid_argument("additive_char_of_f: bad beta");
    return build_char(
        t.p, t.q, beta, false,
        [&](uint8_t a, uint8_t b) {
            return static_cast<uint8_t>(elem_to_index(
                t.f, elem_mul(t.f, elem_from_index(t.f, a), elem_from_index(t.f, b))));
        },
        [&](uint8_t x) { return t.abs_tr_f[x]; });
}

}  // namespace bessellab::gf
