#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bessellab/matgrp.hpp"

// Conjugacy classes, sigma-twisted classes, and numerically computed
// character tables with class functions.
namespace bessellab::classchar {

using matgrp::GaloisDatum;
using matgrp::Mat;
using matgrp::MatIndex;
using cplx = std::complex<double>;

struct ConjClasses {
    std::vector<Mat> elements;  // the group, sorted by canonical encoding
    MatIndex pos;               // element -> position in `elements`
    std::vector<uint32_t> class_of;  // position -> class index
    std::vector<Mat> reps;           // least element of each class
    std::vector<uint64_t> sizes;
    std::vector<uint32_t> inv_pos;   // position of g^{-1}

    uint64_t order() const { return elements.size(); }
    uint32_t index_of(const Mat& g) const;
    uint32_t position_of(const Mat& g) const;
};

// Orbit partition under conjugation by the listed elements. Spot-checks
// closure on a deterministic sample.
ConjClasses conj_classes(const GaloisDatum& d, std::vector<Mat> elements);

// Orbit partition of G(E) under g . x = g x sigma(g)^{-1}.
struct TwistedClasses {
    std::vector<Mat> elements;
    MatIndex pos;
    std::vector<uint32_t> class_of;
    std::vector<Mat> reps;
    std::vector<uint64_t> sizes;

    uint32_t index_of(const Mat& g) const;
};
TwistedClasses twisted_classes(const GaloisDatum& d, std::vector<Mat> ge);

struct CharacterTable {
    std::vector<uint64_t> degrees;           // row degrees, ascending
    std::vector<std::vector<cplx>> chars;    // rows x classes
    uint64_t seed = 0;
    double row_residual = 0, col_residual = 0;

    uint32_t nrows() const { return degrees.size(); }
};

// Full complex character table via simultaneous diagonalization of the
// class-multiplication matrices: a seeded random real combination is
// diagonalized, eigenvectors give the central characters, and degrees come
// from row orthogonality. Deterministic given the seed.
CharacterTable character_table(const GaloisDatum& d, const ConjClasses& cls,
                               uint64_t seed, uint64_t cap = 100000);

// Indices i with chi_i(sigma(g)) = chi_i(g) on all class representatives.
std::vector<uint32_t> sigma_invariant_irreps(const GaloisDatum& d, const ConjClasses& cls,
                                             const CharacterTable& table, double tol = 1e-6);

cplx inner_product(std::span<const cplx> f, std::span<const cplx> g, const ConjClasses& cls);

// Versioned cache of a character table: class reps in canonical encoding,
// sizes, values as (re,im) pairs. Loading re-verifies orthogonality and the
// class data against a fresh recomputation.
std::string table_serialize(const GaloisDatum& d, const std::string& group,
                            const ConjClasses& cls, const CharacterTable& t);
CharacterTable table_deserialize(const std::string& text, const GaloisDatum& d,
                                 const std::string& group, const ConjClasses& cls);
std::string table_cache_key(const GaloisDatum& d, const std::string& group, uint64_t seed);

// Computes the table, consulting/filling a cache directory when given.
CharacterTable character_table_cached(const GaloisDatum& d, const ConjClasses& cls,
                                      const std::string& group, uint64_t seed,
                                      const std::string& cache_dir, uint64_t cap = 100000,
                                      std::vector<std::string>* provenance = nullptr);

}  // namespace bessellab::classchar
