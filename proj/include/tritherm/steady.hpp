// steady.hpp — Nonequilibrium steady state of the 9x9 generator

#pragma once

#include <stdexcept>
#include <string>

#include "tritherm/liouville.hpp"

namespace tritherm {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The generator has more than one stationary state (numerical rank of L < 8).
struct DegenerateKernelError : SolverError {
    using SolverError::SolverError;
};

// The linear solve did not reach the residual/positivity tolerances.
struct NoConvergenceError : SolverError {
    using SolverError::SolverError;
};

enum class StateBasis { Local, Dressed };

// 3x3 state with an explicit basis tag. Conversion uses the orthogonal
// involution from DressedBasis::rotation(), so Local->Dressed->Local is exact
// up to rounding.
struct DensityMatrix {
    Matrix3c entries = Matrix3c::Zero();
    StateBasis basis{StateBasis::Dressed};

    DensityMatrix in_basis(StateBasis target, const DressedBasis& dressed) const {
        if (target == basis) return *this;
        const Matrix3c u = dressed.rotation();
        return DensityMatrix{u * entries * u, target};
    }

    double hermiticity_defect() const {
        return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    }

    double trace_defect() const { return std::abs(entries.trace() - Complex(1.0, 0.0)); }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix3c> es(0.5 * (entries + entries.adjoint()));
        return es.eigenvalues().minCoeff();
    }
};

struct SteadySolution {
    DensityMatrix rho;      // dressed basis
    double residual{0.0};   // max |L vec(rho)|
    double min_eigenvalue{0.0};
};

namespace detail {

constexpr double kSteadyResidualTol = 1e-10;
constexpr double kPositivityTol = 1e-9;
constexpr double kKernelRelTol = 1e-10;

} // namespace detail

// Solve L vec(rho) = 0 with Tr rho = 1. The rows of L at the three diagonal
// component indices {0,4,8} sum to zero (trace preservation), so one of them
// is redundant; the weakest of the three is replaced by the trace constraint
// and the square system is solved directly. A full SVD guards against a
// degenerate kernel before the solve.
inline SteadySolution steady_state(const Liouvillian& l) {
    Eigen::JacobiSVD<Matrix9c> svd(l.matrix);
    const auto& sv = svd.singularValues();
    const double tol = detail::kKernelRelTol * sv(0);
    int null_dim = 0;
    for (int i = 0; i < 9; ++i)
        if (sv(i) < tol) ++null_dim;
    if (null_dim > 1)
        throw DegenerateKernelError("steady state is not unique: kernel dimension " + std::to_string(null_dim));

    int replace = 0;
    double smallest = std::numeric_limits<double>::infinity();
    for (int r : {0, 4, 8}) {
        const double norm = l.matrix.row(r).cwiseAbs().maxCoeff();
        if (norm < smallest) {
            smallest = norm;
            replace = r;
        }
    }
    Matrix9c a = l.matrix;
    a.row(replace).setZero();
    a(replace, 0) = a(replace, 4) = a(replace, 8) = Complex(1.0, 0.0);
    Vector9c b = Vector9c::Zero();
    b(replace) = Complex(1.0, 0.0);

    Eigen::FullPivLU<Matrix9c> lu(a);
    if (!lu.isInvertible())
        throw DegenerateKernelError("trace-constrained system is singular");
    const Vector9c x = lu.solve(b);

    Matrix3c rho = unvec(x);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    SteadySolution sol;
    sol.rho = DensityMatrix{rho, StateBasis::Dressed};
    sol.residual = l.apply(rho).cwiseAbs().maxCoeff();
    sol.min_eigenvalue = sol.rho.min_eigenvalue();
    if (!(sol.residual < detail::kSteadyResidualTol))
        throw NoConvergenceError("steady-state residual " + std::to_string(sol.residual) + " above tolerance");
    if (sol.min_eigenvalue < -detail::kPositivityTol)
        throw NoConvergenceError("steady state not positive semidefinite: min eigenvalue "
                                 + std::to_string(sol.min_eigenvalue));
    return sol;
}

// <1|rho|2> in the local basis; its real part drives every coherence flux term.
inline Complex local_coherence(const DensityMatrix& rho, const DressedBasis& dressed) {
    return rho.in_basis(StateBasis::Local, dressed).entries(1, 2);
}

} // namespace tritherm
