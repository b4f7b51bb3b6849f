#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bessellab/classchar.hpp"
#include "bessellab/whittaker.hpp"

// The Shintani norm map, X_sigma decomposition, twisted characters, and
// base-change matching with the sign epsilon(pi).
namespace bessellab::shintani {

using classchar::CharacterTable;
using classchar::ConjClasses;
using classchar::cplx;
using classchar::TwistedClasses;
using matgrp::GaloisDatum;
using matgrp::Mat;
using whittaker::NondegenChar;
using whittaker::WhittakerModel;

struct NormTable {
    std::vector<uint32_t> map;  // sigma-class index -> G^op(F)-class index
    struct Witness {
        Mat g;        // sigma-class representative
        Mat norm;     // g * sigma(g)
        Mat matched;  // representative of the matched fixed-point class
    };
    std::vector<Witness> witnesses;
};

// Norm g -> g sigma(g), matched into G^op(F)-classes through conjugacy in
// the ambient GL_n(F_{q^2}) (the class partition of G(E) doubles as the
// rational-canonical-form test there). Families GL and U only; bijectivity
// is verified.
NormTable norm_map(const GaloisDatum& d, const TwistedClasses& tcls, const ConjClasses& gop_cls,
                   const ConjClasses& ge_cls);

// g in X_sigma -> (u, n) with g = u n sigma(u)^{-1}, n monomial and
// sigma(n) = n^{-1}. Follows the Bruhat-guided reduction with a brute-force
// Lang solve over the small unipotent group, then a full scan fallback.
std::pair<Mat, Mat> x_sigma_decompose(const GaloisDatum& d, const Mat& g);

// Twisted character on sigma-classes: value at the class of g is
// trace(act(g) . I_sigma), verified constant across sampled orbit members.
std::vector<cplx> twisted_character(const GaloisDatum& d, const ConjClasses& ge_cls,
                                    const NondegenChar& psi, const WhittakerModel& model,
                                    const TwistedClasses& tcls, double tol = 1e-6);

struct BaseChangeResult {
    struct Pair {
        uint32_t pi;   // row in the G(E) table
        uint32_t rho;  // row in the G^op(F) table
        int eps;       // +1 or -1
        double residual;
    };
    std::vector<Pair> pairs;
    std::vector<uint32_t> unmatched;  // sigma-invariant generic pi without a partner
    double max_residual = 0;
};

// For every sigma-invariant generic pi of G(E): build its model, compute the
// twisted character, and search rho with T_pi = eps * chi_rho . N. Ambiguous
// matches are a hard failure; unmatched pi are reported without failing.
BaseChangeResult base_change_match(const GaloisDatum& d, const ConjClasses& ge_cls,
                                   const CharacterTable& ge_table, const ConjClasses& gop_cls,
                                   const CharacterTable& gop_table, const TwistedClasses& tcls,
                                   const NormTable& norm, const NondegenChar& psi,
                                   double tol = 1e-6, uint32_t model_cap = 4096);

std::string base_change_export(const GaloisDatum& d, const CharacterTable& ge_table,
                               const CharacterTable& gop_table, const BaseChangeResult& r,
                               const NormTable& norm);

// Consistency of the product norm with the Lang-equation form: solve
// g = h sigma(h)^{-1} with h over the degree-4 extension, then check that
// sigma^2(h)^{-1} h lands in the matched fixed-point class. Returns the
// number of sigma-classes checked, or nullopt when the quartic group
// exceeds the cap (callers log the skip).
std::optional<uint32_t> lang_norm_consistency(const GaloisDatum& d, const TwistedClasses& tcls,
                                              const NormTable& norm, const ConjClasses& ge_cls,
                                              const ConjClasses& gop_cls,
                                              uint64_t quartic_cap = 100000);

}  // namespace bessellab::shintani
