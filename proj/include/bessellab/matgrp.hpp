#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bessellab/gf.hpp"

// Matrix realizations of GL_n, SL_n, U_n inside GL_n(F_{q^2}) with the
// pinned Borel (upper triangular), canonical Weyl representatives, Bruhat
// decomposition, the duality involution and the twisted Frobenius.
namespace bessellab::matgrp {

enum class Family { GL, SL, U };
enum class Side { F, E };

Family family_parse(const std::string& s);
std::string family_str(Family f);

constexpr uint32_t kMaxN = 4;

// n x n matrix over E, entries as Tower element indices, row-major,
// unused slots kept zero so the array doubles as a hash key.
struct Mat {
    std::array<uint8_t, kMaxN * kMaxN> a{};

    uint8_t at(uint32_t n, uint32_t i, uint32_t j) const { return a[i * n + j]; }
    void set(uint32_t n, uint32_t i, uint32_t j, uint8_t v) { a[i * n + j] = v; }
    bool operator==(const Mat& o) const { return a == o.a; }
    bool operator<(const Mat& o) const { return a < o.a; }
};

struct MatHash {
    size_t operator()(const Mat& m) const {
        uint64_t h1, h2;
        __builtin_memcpy(&h1, m.a.data(), 8);
        __builtin_memcpy(&h2, m.a.data() + 8, 8);
        uint64_t h = h1 * 0x9e3779b97f4a7c15ULL ^ (h2 + 0x517cc1b727220a95ULL + (h1 << 6));
        h ^= h >> 29;
        h *= 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 32;
        return static_cast<size_t>(h);
    }
};

using MatIndex = std::unordered_map<Mat, uint32_t, MatHash>;

std::string encode_hex(const Mat& m, uint32_t n);

enum class Selector { GE, GF, GopF, UE, UF, TE, TF, BE, BF, Xsigma };
Selector selector_parse(const std::string& s);

// A configured pair G(F) < G(E) with the duality involution and both
// Frobenii. For family GL/SL the base Frobenius is the entrywise q-power
// and sigma = sigma0 . iota; for family U the roles swap: the ambient
// E-points are again GL_n(F_{q^2}), the base Frobenius is the unitary one
// (q-power composed with iota) and sigma is the plain q-power, so that the
// sigma-fixed points G^op(F) come out as GL_n(F_q).
struct GaloisDatum {
    Family family = Family::GL;
    uint32_t n = 0, q = 0;
    gf::Tower tower;
    Mat J;        // antidiagonal with alternating signs
    Mat t_minus;  // diag(1,-1,1,...)
    Mat K, Kinv;  // K = t_minus * J; iota(g) = K g^{-T} K^{-1}
    uint64_t group_cap = 10'000'000;

    uint32_t dim() const { return n * n; }
    uint64_t order_ge() const;  // |G(E)| by formula

    Mat ident() const;
    Mat mmul(const Mat& x, const Mat& y) const;
    Mat minv(const Mat& x) const;
    Mat mtrans(const Mat& x) const;
    uint8_t det(const Mat& x) const;
    bool invertible(const Mat& x) const { return det(x) != 0; }
    Mat frob_entrywise(const Mat& x) const;  // entrywise q-power

    Mat iota(const Mat& g) const;    // duality involution
    Mat sigma0(const Mat& g) const;  // Frobenius of the F-structure
    Mat sigma(const Mat& g) const;   // sigma0 . iota

    bool is_upper_unitri(const Mat& g) const;
    bool is_diagonal(const Mat& g) const;
    bool is_upper(const Mat& g) const;
    bool in_ge(const Mat& g) const;  // det condition per family
    bool is_member(const Mat& g, Selector which) const;
};

// Builds the datum and verifies the pinning conditions: the Chevalley
// involution c(g) = J g^{-T} J^{-1} fixes the pinning and acts on the torus
// by t -> w0 t^{-1} w0; a failure aborts construction.
GaloisDatum datum_build(Family fam, uint32_t n, uint32_t q,
                        uint64_t group_cap = 10'000'000);

// Complete duplicate-free enumeration in lexicographic encoding order.
std::vector<Mat> enumerate(const GaloisDatum& d, Selector sel);

// x_{alpha_i}(u) = 1 + u E_{i,i+1}, i in [1, n-1]
Mat root_elt(const GaloisDatum& d, uint32_t i, uint8_t u);
// opposite root element 1 + u E_{i+1,i}
Mat root_elt_neg(const GaloisDatum& d, uint32_t i, uint8_t u);

using Word = std::vector<uint8_t>;  // simple reflection indices, 1-based
using Perm = std::vector<uint8_t>;  // w as column->row map, 0-based

struct WeylElement {
    Perm perm;
    Word word;  // a reduced word
    Mat rep;    // canonical pinned representative n_w
};

uint32_t inversions(const Perm& p);
Perm perm_of_word(uint32_t n, const Word& w);
Word reduced_word(const Perm& p);               // leftmost-descent strategy
Word reduced_word_alt(const Perm& p);           // rightmost-descent strategy
Perm perm_mul(const Perm& a, const Perm& b);    // a after b
Perm perm_inv(const Perm& a);
Perm longest_perm(uint32_t n);
Perm longest_perm_of_subset(uint32_t n, const std::vector<uint8_t>& simples);

// rep from a reduced word; throws if the word is not reduced
WeylElement weyl_rep(const GaloisDatum& d, const Word& word);
WeylElement weyl_from_perm(const GaloisDatum& d, const Perm& p);
std::vector<WeylElement> weyl_all(const GaloisDatum& d);

Mat duality_involution(const GaloisDatum& d, const Mat& g);
Mat sigma_apply(const GaloisDatum& d, const Mat& g);

struct BruhatParts {
    Mat u1, t, u2;  // g = u1 * t * n_w * u2, u2 in U cap w^{-1} U^- w
    WeylElement w;
};
// F-rational Bruhat decomposition (field = F only for split families).
BruhatParts bruhat_decompose(const GaloisDatum& d, const Mat& g, Side side);

// Splits u in U as u = x * y with x supported on S and y on its complement,
// where S is a closed set of positive-root positions given as a mask over
// (i,j) pairs; mask(i,j) = truthy means (i,j) in S.
std::pair<Mat, Mat> split_unipotent(const GaloisDatum& d, const Mat& u,
                                    const std::vector<std::vector<bool>>& in_s);

struct RelevantCell {
    WeylElement w;
    std::vector<uint8_t> simple_subset;  // I_w as 1-based simple root indices
    std::vector<Mat> a_w;                // torus subgroup A_w over F
};

// Bessel-relevant Weyl elements computed two independent ways (definition
// scan and subset enumeration); disagreement is a hard failure.
std::vector<RelevantCell> bessel_relevant(const GaloisDatum& d);

// A_w = {t in T(F) : (w alpha)(t) = 1 for all alpha in I_w}, cross-checked
// against the center of the conjugated Levi as block-scalar matrices.
std::vector<Mat> a_w_subgroup(const GaloisDatum& d, const RelevantCell& cell);

}  // namespace bessellab::matgrp
