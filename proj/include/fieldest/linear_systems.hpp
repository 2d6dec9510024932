/**
 * @file linear_systems.hpp
 * @brief Evaluation matrices (Vandermonde, alternant, design) and the
 *        factorizations the estimators need.
 *
 * Rows are sensor points, columns are basis functions, for all three kinds.
 * Rank, kernels and pseudo-inverses come from a singular value decomposition;
 * square solves use column-pivoted Householder QR.
 */
#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fieldest/model.hpp"
#include "fieldest/multiindex.hpp"
#include "fieldest/point_set.hpp"

namespace fieldest {

/// Estimators whose matrix condition number exceeds this carry a warning.
inline constexpr double kConditionWarning = 1e12;

enum class MatrixKind { Vandermonde, Alternant, Design };

struct SystemMatrix {
    MatrixKind kind = MatrixKind::Design;
    Eigen::MatrixXd entries;  ///< p x k, entries(i, j) = f_j(x_i)
    PointSet row_points;
    std::variant<LowerSet, ModelSpec> columns;
    std::vector<double> shift;  ///< Vandermonde expansion point, zero otherwise

    Eigen::Index rows() const { return entries.rows(); }
    Eigen::Index cols() const { return entries.cols(); }
};

struct RankReport {
    Eigen::Index numerical_rank = 0;
    std::vector<double> singular_values;  ///< descending
    double condition_number = 0.0;        ///< sigma_max / sigma_rank; infinity at rank 0
    double tolerance_used = 0.0;
};

/// Covariance of the sensor noise; either a diagonal or a full SPD matrix.
class Weights {
public:
    static Weights identity() { return Weights(); }
    static Weights diagonal(std::vector<double> d);
    static Weights full(Eigen::MatrixXd omega);

    bool is_identity() const noexcept { return !diag_ && !full_; }
    const std::optional<std::vector<double>>& diagonal_entries() const noexcept { return diag_; }
    const std::optional<Eigen::MatrixXd>& full_matrix() const noexcept { return full_; }

    /// L^{-1} M where Omega = L L^T (whitening). Throws if not SPD or sized wrong.
    Eigen::MatrixXd whiten(const Eigen::MatrixXd& m) const;
    /// L^{-T} v.
    Eigen::VectorXd unwhiten_transpose(const Eigen::VectorXd& v) const;

private:
    Weights() = default;
    std::optional<std::vector<double>> diag_;
    std::optional<Eigen::MatrixXd> full_;
    std::optional<Eigen::LLT<Eigen::MatrixXd>> llt_;
};

struct ErrorSubspaceReport {
    Eigen::MatrixXd null_basis;        ///< k x dim(N), orthonormal columns
    Eigen::MatrixXd error_free_basis;  ///< k x (k - dim(N)), orthonormal columns
    RankReport rank;
};

struct SolveResult {
    Eigen::VectorXd solution;
    double residual = 0.0;           ///< ||op(M) x - rhs||
    double relative_residual = 0.0;  ///< residual / ||rhs||, or residual when rhs = 0
};

struct PseudoInverseResult {
    Eigen::VectorXd c;                ///< over sensors
    bool error_free = true;           ///< b orthogonal to the kernel within tolerance
    Eigen::VectorXd bias_direction;   ///< projection of b onto the kernel
    double bias_norm = 0.0;
    RankReport rank;
};

SystemMatrix build_vandermonde(const PointSet& x, const LowerSet& l, std::span<const double> shift = {});
SystemMatrix build_alternant(const PointSet& x, const ModelSpec& f);
SystemMatrix build_design(const PointSet& x, const ModelSpec& f);

/// Rank with tolerance max(p, k) * eps * sigma_max unless `tolerance` is given.
RankReport rank_report(const Eigen::MatrixXd& m, std::optional<double> tolerance = std::nullopt);
inline RankReport rank_report(const SystemMatrix& m, std::optional<double> tolerance = std::nullopt) {
    return rank_report(m.entries, tolerance);
}

/// Solves M x = rhs (or M^T x = rhs). Requires a square, numerically full-rank
/// matrix; throws RankDeficient otherwise, and when the normwise backward
/// error ||r|| / (||M|| ||x|| + ||rhs||) exceeds 1e-8.
SolveResult solve(const Eigen::MatrixXd& m, bool transpose, const Eigen::VectorXd& rhs);
inline SolveResult solve(const SystemMatrix& m, bool transpose, const Eigen::VectorXd& rhs) {
    return solve(m.entries, transpose, rhs);
}

/// Relative tolerance on ||P_N b|| / ||b|| below which b counts as error free.
inline constexpr double kKernelProjectionTolerance = 1e-8;

/// c = Omega^{-1} X (X^T Omega^{-1} X)^+ b, minimum norm when rank deficient.
/// c . F = b . beta_hat for every data vector F.
PseudoInverseResult weighted_pseudo_inverse_apply(const Eigen::MatrixXd& x, const Weights& omega,
                                                  const Eigen::VectorXd& b,
                                                  std::optional<double> tolerance = std::nullopt);
inline PseudoInverseResult weighted_pseudo_inverse_apply(const SystemMatrix& m, const Weights& omega,
                                                         const Eigen::VectorXd& b,
                                                         std::optional<double> tolerance = std::nullopt) {
    return weighted_pseudo_inverse_apply(m.entries, omega, b, tolerance);
}

ErrorSubspaceReport error_subspace(const Eigen::MatrixXd& x, const Weights& omega = Weights::identity(),
                                   std::optional<double> tolerance = std::nullopt);
inline ErrorSubspaceReport error_subspace(const SystemMatrix& m, const Weights& omega = Weights::identity(),
                                          std::optional<double> tolerance = std::nullopt) {
    return error_subspace(m.entries, omega, tolerance);
}

/// Row-major CSV, 17 significant digits, no header.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace fieldest
