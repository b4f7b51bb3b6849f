#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "bessellab/classchar.hpp"
#include "bessellab/matgrp.hpp"

// Nondegenerate characters of U, genericity detection, Bessel functions,
// and explicit Whittaker models with the normalized intertwiner.
namespace bessellab::whittaker {

using classchar::CharacterTable;
using classchar::ConjClasses;
using classchar::cplx;
using matgrp::GaloisDatum;
using matgrp::Mat;
using matgrp::Side;

// psi(u) = psi0(sum of superdiagonal entries). Over E the character is
// trivial on U(F) and sigma-invariant; the beta condition that makes this
// work depends on the family: trace zero for GL/SL, fixed by the q-power
// Frobenius (an embedded F_q element) for family U.
struct NondegenChar {
    Side side = Side::E;
    uint8_t beta = 0;  // E index (side E) or F index (side F)
    gf::AdditiveChar chi;

    cplx eval(const GaloisDatum& d, const Mat& u) const;
};

NondegenChar psi_build(const GaloisDatum& d, uint8_t beta, Side side);
// least valid beta for the family/side
uint8_t default_beta(const GaloisDatum& d, Side side);

// multiplicity of psi in the restriction of each irreducible to U; every
// value must round to 0 or 1 (multiplicity one)
std::vector<int> generic_multiplicities(const GaloisDatum& d, const ConjClasses& cls,
                                        const CharacterTable& table, const NondegenChar& psi,
                                        double tol = 1e-6);
std::vector<uint32_t> generic_irreps(const GaloisDatum& d, const ConjClasses& cls,
                                     const CharacterTable& table, const NondegenChar& psi,
                                     double tol = 1e-6);

// The normalized Bessel function as a total map on the group, evaluated via
// the rank-one projector identity B(g) = |U|^{-1} sum_u conj psi(u) chi(g u),
// renormalized exactly so that B(1) = 1.
struct BesselTable {
    uint32_t pi_index = 0;
    Side side = Side::E;
    std::vector<cplx> values;  // parallel to cls.elements

    const cplx& at(const ConjClasses& cls, const Mat& g) const {
        return values[cls.position_of(g)];
    }
};

BesselTable bessel(const GaloisDatum& d, const ConjClasses& cls, const CharacterTable& table,
                   uint32_t pi_index, const NondegenChar& psi, double tol = 1e-6);

// Support summary rows: for each Bessel-relevant cell, the torus elements
// t in A_w with B(t n_w) != 0 (split families).
struct SupportEntry {
    matgrp::Perm w;
    std::vector<Mat> torus_hits;
};
std::vector<SupportEntry> bessel_support(const GaloisDatum& d, const ConjClasses& cls,
                                         const BesselTable& B, double tol = 1e-8);

// CSV-style export: canonical encoding, Bruhat cell label, value.
std::string bessel_export(const GaloisDatum& d, const ConjClasses& cls, const BesselTable& B,
                          double tol = 1e-8);

// Explicit model of pi inside Ind_{U(E)}^{G(E)} psi: an orthonormal basis of
// the isotypic subspace, the right regular action restricted to it, and the
// intertwiner f -> f . sigma.
struct WhittakerModel {
    uint32_t pi_index = 0;
    std::vector<Mat> coset_reps;                // least element per coset
    matgrp::MatIndex coset_index;               // any group element -> coset
    std::vector<uint32_t> coset_of_element;     // position in cls -> coset
    Eigen::MatrixXcd basis;                     // dim x deg, orthonormal columns
    Eigen::MatrixXcd intertwiner;               // deg x deg, the matrix of I_sigma

    // matrix of right translation by g on the model
    Eigen::MatrixXcd act(const GaloisDatum& d, const ConjClasses& cls, const NondegenChar& psi,
                         const Mat& g) const;
    // coordinates of a function of the induced space in the model basis
    Eigen::VectorXcd project(const Eigen::VectorXcd& f) const { return basis.adjoint() * f; }
};

WhittakerModel whittaker_model(const GaloisDatum& d, const ConjClasses& cls,
                               const CharacterTable& table, uint32_t pi_index,
                               const NondegenChar& psi, uint32_t dim_cap = 4096,
                               double tol = 1e-6);

// The psi-equivariant vector of the model extended to the whole group by
// equivariance and normalized to 1 at the identity: an independent route to
// the Bessel function.
std::vector<cplx> model_bessel_values(const GaloisDatum& d, const ConjClasses& cls,
                                      const NondegenChar& psi, const WhittakerModel& m);

}  // namespace bessellab::whittaker
