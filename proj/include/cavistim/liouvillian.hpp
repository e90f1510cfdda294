#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cavistim/basis.hpp"
#include "cavistim/model.hpp"

namespace cavistim {

using Complex = std::complex<double>;
using DensityMatrix = Eigen::MatrixXcd;

struct SparseEntry {
    std::size_t row;
    std::size_t col;
    Complex value;
};

/// Hermitian matrix stored as its upper triangle (row <= col); the lower
/// triangle is the implicit conjugate mirror. Duplicates are merged and exact
/// zeros dropped on construction.
class SparseHermitian {
public:
    SparseHermitian(std::size_t dim, std::vector<SparseEntry> upper);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<SparseEntry>& entries() const noexcept { return entries_; }

    Complex at(std::size_t row, std::size_t col) const;
    Eigen::MatrixXcd to_dense() const;

private:
    std::size_t dim_;
    std::vector<SparseEntry> entries_;  // sorted by (row, col)
};

/// Photon-loss dissipator: rate * D[matrix], with matrix the lowering operator
/// of one (cavity, mode) restricted to the basis.
struct JumpOperator {
    double rate = 0.0;
    std::size_t dim = 0;
    std::vector<SparseEntry> matrix;
    std::string sink_label;
    std::size_t mode_slot = 0;

    Eigen::MatrixXcd to_dense() const;
};

SparseHermitian build_hamiltonian(const ValidatedScenario& cfg, const Basis& basis);

std::vector<JumpOperator> build_jump_operators(const ValidatedScenario& cfg, const Basis& basis);

/// Compiled master-equation generator
///   drho/dt = -i[H, rho] + sum_k rate_k (A_k rho A_k^+ - 1/2 {A_k^+ A_k, rho}),
/// evaluated as -i(Heff rho - rho Heff^+) + sum_k rate_k A_k rho A_k^+ with
/// Heff = H - i/2 sum_k rate_k A_k^+ A_k. Valid for any rho, Hermitian or not.
class MasterEquation {
public:
    MasterEquation(const SparseHermitian& h, const std::vector<JumpOperator>& jumps);

    std::size_t dim() const noexcept { return dim_; }

    /// out = L(rho). `out` is resized; it must not alias `rho`.
    void apply(const DensityMatrix& rho, DensityMatrix& out) const;
    DensityMatrix operator()(const DensityMatrix& rho) const;

    /// Largest |Heff| diagonal magnitude plus summed dissipative diagonal; feeds
    /// the explicit-step stability estimate.
    double stiffness_estimate() const noexcept { return stiffness_; }

private:
    struct Jump {
        double rate;
        std::vector<SparseEntry> entries;
    };

    std::size_t dim_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_;
    std::vector<Complex> val_;
    std::vector<Jump> jumps_;
    double stiffness_ = 0.0;
};

DensityMatrix lindblad_rhs(const SparseHermitian& h, const std::vector<JumpOperator>& jumps, const DensityMatrix& rho);

/// Observable that is diagonal in the basis.
struct DiagonalObservable {
    Eigen::VectorXd diagonal;
};

struct AtomLevelSelector {
    std::size_t atom;  // global atom index in declaration order
    int level;
};

struct ModeOccupationSelector {
    int cavity;
    std::string mode_id;
};

using PopulationSelector = std::variant<AtomLevelSelector, ModeOccupationSelector>;

class UnknownSelector : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// 0/1 projector for an atom level, or the photon-number operator of a mode.
DiagonalObservable population_operator(const ValidatedScenario& cfg, const Basis& basis,
                                       const PopulationSelector& selector);

/// Photons plus per-atom excitation count (levels counted up from the lowest one
/// linked by transitions). Conserved by H in the rotating-wave model. Throws
/// std::domain_error when an atom's transitions admit no consistent count.
DiagonalObservable excitation_operator(const ValidatedScenario& cfg, const Basis& basis);

class CorruptState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kImagTolerance = 1e-10;

/// Tr(obs * rho); throws CorruptState when the imaginary residue exceeds kImagTolerance.
double expectation(const DiagonalObservable& obs, const DensityMatrix& rho);

DensityMatrix pure_state(std::size_t dim, std::size_t index);

}  // namespace cavistim
