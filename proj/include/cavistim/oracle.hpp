#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cavistim/liouvillian.hpp"

namespace cavistim::oracle {

// Independent references for the master-equation integrator. Nothing here
// shares code with MasterEquation: the superoperator is assembled densely from
// Kronecker products of the full H and A_k matrices.

class DimensionTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxDenseDim = 64;

/// dim^2 x dim^2 generator acting on column-stacked vec(rho).
class DenseLiouvillian {
public:
    DenseLiouvillian(const SparseHermitian& h, const std::vector<JumpOperator>& jumps);

    std::size_t dim() const noexcept { return dim_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return l_; }

    DensityMatrix apply(const DensityMatrix& rho) const;

private:
    std::size_t dim_;
    Eigen::MatrixXcd l_;
};

/// rho(t) = unvec(exp(t L) vec(rho0)) by scaling and squaring.
DensityMatrix dense_propagate(const SparseHermitian& h, const std::vector<JumpOperator>& jumps,
                              const DensityMatrix& rho0, double t);

/// Excited-state survival cos^2(g sqrt(n+1) t) of a resonant two-level atom with n photons.
double jc_population(double g, int n_photons, double t);

/// Permanent by Ryser's formula with Gray-code subset updates.
Complex permanent(const Eigen::MatrixXcd& m);

/// exp(-i K t) for the star graph: site 0 coupled with strength kappa to sites 1..n.
Eigen::MatrixXcd star_single_particle_propagator(int n_donors, double kappa, double t);

/// Probability of |n,0,...,0> at time t starting from |0,1,...,1> under pure
/// hopping, from the permanent of the single-particle amplitude matrix.
double star_transfer_probability(int n_donors, double kappa, double t);

}  // namespace cavistim::oracle
