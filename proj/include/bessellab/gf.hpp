#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Exact arithmetic in the tower F_p < F_q < F_{q^2}, with Frobenius,
// relative trace and additive characters. Fields are tiny (q <= 16), so
// extension arithmetic is table-driven after a polynomial bootstrap.
namespace bessellab::gf {

// Polynomial over Z/p, coefficient list c0..cd (low degree first).
using Poly = std::vector<uint8_t>;

bool is_prime(uint32_t n);

struct FieldSpec {
    uint32_t p = 0;  // characteristic, prime
    uint32_t k = 0;  // extension degree over F_p
    Poly modulus;    // monic irreducible of degree k, size k+1

    uint32_t size() const;  // p^k
    std::string str() const;
};

// Validates p prime, modulus monic irreducible of degree k. When no modulus
// is given, picks the lexicographically least monic irreducible of degree k
// (constant coefficient = least significant digit), so every downstream
// artifact is reproducible.
FieldSpec field_make(uint32_t p, uint32_t k,
                     const std::optional<Poly>& modulus = std::nullopt);

// Element of F_{p^k} in the power basis of the modulus, length-k coeff vector.
struct FieldElem {
    Poly coeffs;
};

// index encoding: sum coeffs[i] * p^i, a canonical integer in [0, p^k)
uint32_t elem_to_index(const FieldSpec& s, const FieldElem& x);
FieldElem elem_from_index(const FieldSpec& s, uint32_t idx);

FieldElem elem_add(const FieldSpec& s, const FieldElem& a, const FieldElem& b);
FieldElem elem_neg(const FieldSpec& s, const FieldElem& a);
FieldElem elem_mul(const FieldSpec& s, const FieldElem& a, const FieldElem& b);
FieldElem elem_pow(const FieldSpec& s, const FieldElem& a, uint64_t e);
FieldElem elem_inv(const FieldSpec& s, const FieldElem& a);

// x^(p^m)
FieldElem frobenius(const FieldSpec& s, const FieldElem& x, uint32_t m);

// Compatible pair of specs for F_q = F_{p^k} and E = F_{q^2} = F_{p^{2k}},
// with the embedding F_q -> E fixed at construction (least root of the F_q
// modulus inside E) and all arithmetic over E compiled to lookup tables.
// Element handles are plain uint8_t indices into E (or F where noted).
struct Tower {
    FieldSpec f;  // F_q
    FieldSpec e;  // F_{q^2}
    uint32_t p = 0, k = 0, q = 0, qq = 0;

    std::vector<uint8_t> add_t, mul_t;       // qq*qq
    std::vector<uint8_t> neg_t, inv_t;       // qq (inv_t[0] unused)
    std::vector<uint8_t> frob_p;             // x -> x^p
    std::vector<uint8_t> frob_q;             // x -> x^q
    std::vector<uint8_t> embed_t;            // F index -> E index
    std::vector<int16_t> unembed_t;          // E index -> F index or -1
    std::vector<uint8_t> rel_tr_t;           // x -> x + x^q (as E index)
    std::vector<uint8_t> abs_tr_e;           // E -> Z/p
    std::vector<uint8_t> abs_tr_f;           // F -> Z/p

    uint8_t add(uint8_t x, uint8_t y) const { return add_t[x * qq + y]; }
    uint8_t sub(uint8_t x, uint8_t y) const { return add_t[x * qq + neg_t[y]]; }
    uint8_t mul(uint8_t x, uint8_t y) const { return mul_t[x * qq + y]; }
    uint8_t neg(uint8_t x) const { return neg_t[x]; }
    uint8_t inv(uint8_t x) const;  // throws on 0
    uint8_t div(uint8_t x, uint8_t y) const { return mul(x, inv(y)); }
    uint8_t pow_q(uint8_t x) const { return frob_q[x]; }
    bool in_f(uint8_t x) const { return unembed_t[x] >= 0; }
    uint8_t one_minus() const { return neg_t[1]; }  // -1 in E

    // relative trace Tr_{E/F}, result as an element of F_q
    uint8_t rel_trace_f(uint8_t x) const;
    // same, left inside E
    uint8_t rel_trace_e(uint8_t x) const { return rel_tr_t[x]; }
};

Tower tower_make(uint32_t q);

// q below must be a prime power <= 16; returns (p, k)
std::pair<uint32_t, uint32_t> split_prime_power(uint32_t q);

// Additive character x -> exp(2*pi*i * AbsTr(beta*x) / p) of (E,+) or (F,+).
struct AdditiveChar {
    bool over_e = true;
    uint8_t beta = 0;
    std::vector<std::complex<double>> values;  // indexed by element

    const std::complex<double>& operator()(uint8_t x) const { return values[x]; }
};

// Character of E/F: requires beta != 0 and rel_trace(beta) = 0, which is
// exactly the condition making it trivial on the embedded F_q.
AdditiveChar additive_char(const Tower& t, uint8_t beta);
// Character of E with no trace condition (beta != 0 only).
AdditiveChar additive_char_of_e(const Tower& t, uint8_t beta);
// Character of F_q itself (beta is an F index).
AdditiveChar additive_char_of_f(const Tower& t, uint8_t beta);

}  // namespace bessellab::gf
