#include "fieldest/linear_systems.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "fieldest/error.hpp"

namespace fieldest {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSolveResidualLimit = 1e-8;

Eigen::MatrixXd evaluate(const PointSet& x, const ModelSpec& f) {
    if (x.dim() != f.dim())
        fail(ErrorKind::InvalidArgument, "points have dimension " + std::to_string(x.dim()) + ", model has " +
                                             std::to_string(f.dim()));
    Eigen::MatrixXd m(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < f.size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f[j].eval(x[i]);
        }
    }
    return m;
}

double default_tolerance(const Eigen::MatrixXd& m, double sigma_max) {
    return static_cast<double>(std::max(m.rows(), m.cols())) * kEps * sigma_max;
}

}  // namespace

SystemMatrix build_vandermonde(const PointSet& x, const LowerSet& l, std::span<const double> shift) {
    if (x.size() != l.size())
        fail(ErrorKind::InvalidArgument, "Vandermonde needs |X| = |L|, got " + std::to_string(x.size()) + " and " +
                                             std::to_string(l.size()));
    if (x.dim() != l.dim()) fail(ErrorKind::InvalidArgument, "point and lower-set dimensions differ");
    std::vector<double> s(x.dim(), 0.0);
    if (!shift.empty()) {
        if (shift.size() != x.dim()) fail(ErrorKind::InvalidArgument, "shift dimension mismatch");
        s.assign(shift.begin(), shift.end());
    }
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd v(n, n);
    std::vector<double> d(x.dim());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t a = 0; a < x.dim(); ++a) d[a] = x[i][a] - s[a];
        for (std::size_t k = 0; k < l.size(); ++k) {
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = l[k].monomial(d);
        }
    }
    return SystemMatrix{MatrixKind::Vandermonde, std::move(v), x, l, std::move(s)};
}

SystemMatrix build_alternant(const PointSet& x, const ModelSpec& f) {
    if (x.size() != f.size())
        fail(ErrorKind::InvalidArgument, "alternant needs |X| = |F|, got " + std::to_string(x.size()) + " and " +
                                             std::to_string(f.size()));
    return SystemMatrix{MatrixKind::Alternant, evaluate(x, f), x, f, std::vector<double>(x.dim(), 0.0)};
}

SystemMatrix build_design(const PointSet& x, const ModelSpec& f) {
    if (x.size() < f.size())
        fail(ErrorKind::InvalidArgument, "design matrix needs |X| >= |F|, got " + std::to_string(x.size()) +
                                             " < " + std::to_string(f.size()));
    return SystemMatrix{MatrixKind::Design, evaluate(x, f), x, f, std::vector<double>(x.dim(), 0.0)};
}

RankReport rank_report(const Eigen::MatrixXd& m, std::optional<double> tolerance) {
    RankReport r;
    if (m.size() == 0) return r;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    r.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv.size() ? sv(0) : 0.0;
    r.tolerance_used = tolerance.value_or(default_tolerance(m, smax));
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > r.tolerance_used) ++r.numerical_rank;
    }
    r.condition_number = r.numerical_rank > 0 ? smax / sv(r.numerical_rank - 1)
                                              : std::numeric_limits<double>::infinity();
    return r;
}

SolveResult solve(const Eigen::MatrixXd& m, bool transpose, const Eigen::VectorXd& rhs) {
    if (m.rows() != m.cols()) fail(ErrorKind::InvalidArgument, "solve needs a square matrix");
    if (rhs.size() != m.rows()) fail(ErrorKind::InvalidArgument, "right-hand side has the wrong length");
    const Eigen::MatrixXd op = transpose ? Eigen::MatrixXd(m.transpose()) : m;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(op);
    qr.setThreshold(static_cast<double>(op.rows()) * kEps);
    if (qr.rank() < op.rows())
        fail(ErrorKind::RankDeficient, "matrix is numerically rank deficient (rank " + std::to_string(qr.rank()) +
                                           " of " + std::to_string(op.rows()) +
                                           "); use the error-subspace analysis");
    SolveResult out;
    out.solution = qr.solve(rhs);
    out.residual = (op * out.solution - rhs).norm();
    const double scale = rhs.norm();
    out.relative_residual = scale > 0.0 ? out.residual / scale : out.residual;
    // normwise backward error; the forward residual alone grows with the condition number
    const double backward = out.residual / (op.norm() * out.solution.norm() + scale);
    if (!(backward <= kSolveResidualLimit)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "solve backward error %.3g exceeds 1e-8", backward);
        fail(ErrorKind::RankDeficient, buf);
    }
    return out;
}

Weights Weights::diagonal(std::vector<double> d) {
    for (double v : d) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::InvalidArgument, "weights must be positive and finite");
    }
    Weights w;
    w.diag_ = std::move(d);
    return w;
}

Weights Weights::full(Eigen::MatrixXd omega) {
    if (omega.rows() != omega.cols()) fail(ErrorKind::InvalidArgument, "weight matrix must be square");
    if (!omega.isApprox(omega.transpose(), 1e-12))
        fail(ErrorKind::InvalidArgument, "weight matrix must be symmetric");
    Weights w;
    w.llt_.emplace(omega);
    if (w.llt_->info() != Eigen::Success) fail(ErrorKind::InvalidArgument, "weight matrix is not positive definite");
    // LLT only reads the lower triangle; reject matrices that pass by accident
    const Eigen::MatrixXd l = w.llt_->matrixL();
    if (!(l.diagonal().array() > 0.0).all()) fail(ErrorKind::InvalidArgument, "weight matrix is not positive definite");
    w.full_ = std::move(omega);
    return w;
}

Eigen::MatrixXd Weights::whiten(const Eigen::MatrixXd& m) const {
    if (is_identity()) return m;
    if (diag_) {
        if (static_cast<Eigen::Index>(diag_->size()) != m.rows())
            fail(ErrorKind::InvalidArgument, "weight vector length does not match the sensor count");
        Eigen::MatrixXd out = m;
        for (Eigen::Index i = 0; i < m.rows(); ++i) out.row(i) /= std::sqrt((*diag_)[static_cast<std::size_t>(i)]);
        return out;
    }
    if (full_->rows() != m.rows()) fail(ErrorKind::InvalidArgument, "weight matrix size does not match the sensor count");
    return llt_->matrixL().solve(m);
}

Eigen::VectorXd Weights::unwhiten_transpose(const Eigen::VectorXd& v) const {
    if (is_identity()) return v;
    if (diag_) {
        Eigen::VectorXd out = v;
        for (Eigen::Index i = 0; i < v.size(); ++i) out(i) /= std::sqrt((*diag_)[static_cast<std::size_t>(i)]);
        return out;
    }
    return llt_->matrixU().solve(v);
}

namespace {

struct WhitenedSvd {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd;
    RankReport rank;
};

WhitenedSvd whitened_svd(const Eigen::MatrixXd& x, const Weights& omega, std::optional<double> tolerance) {
    const Eigen::MatrixXd xw = omega.whiten(x);
    WhitenedSvd out{Eigen::JacobiSVD<Eigen::MatrixXd>(xw, Eigen::ComputeFullU | Eigen::ComputeFullV), {}};
    const auto& sv = out.svd.singularValues();
    auto& r = out.rank;
    r.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv.size() ? sv(0) : 0.0;
    r.tolerance_used = tolerance.value_or(default_tolerance(xw, smax));
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > r.tolerance_used) ++r.numerical_rank;
    }
    r.condition_number = r.numerical_rank > 0 ? smax / sv(r.numerical_rank - 1)
                                              : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace

ErrorSubspaceReport error_subspace(const Eigen::MatrixXd& x, const Weights& omega, std::optional<double> tolerance) {
    auto ws = whitened_svd(x, omega, tolerance);
    const Eigen::MatrixXd& v = ws.svd.matrixV();
    const Eigen::Index k = x.cols();
    const Eigen::Index r = ws.rank.numerical_rank;
    ErrorSubspaceReport rep;
    rep.error_free_basis = v.leftCols(r);
    rep.null_basis = v.rightCols(k - r);
    rep.rank = std::move(ws.rank);
    return rep;
}

PseudoInverseResult weighted_pseudo_inverse_apply(const Eigen::MatrixXd& x, const Weights& omega,
                                                  const Eigen::VectorXd& b, std::optional<double> tolerance) {
    if (b.size() != x.cols())
        fail(ErrorKind::InvalidArgument, "target vector has length " + std::to_string(b.size()) + ", model has " +
                                             std::to_string(x.cols()) + " functions");
    auto ws = whitened_svd(x, omega, tolerance);
    const Eigen::Index r = ws.rank.numerical_rank;
    const Eigen::MatrixXd& u = ws.svd.matrixU();
    const Eigen::MatrixXd& v = ws.svd.matrixV();
    const auto& sv = ws.svd.singularValues();

    // (X_w^T)^+ b = U_r S_r^{-1} V_r^T b
    Eigen::VectorXd coeffs = v.leftCols(r).transpose() * b;
    for (Eigen::Index i = 0; i < r; ++i) coeffs(i) /= sv(i);
    const Eigen::VectorXd cw = u.leftCols(r) * coeffs;

    PseudoInverseResult out;
    out.c = omega.unwhiten_transpose(cw);
    const Eigen::MatrixXd null_basis = v.rightCols(x.cols() - r);
    out.bias_direction = null_basis * (null_basis.transpose() * b);
    out.bias_norm = out.bias_direction.norm();
    const double scale = b.norm();
    out.error_free = out.bias_norm <= kKernelProjectionTolerance * (scale > 0.0 ? scale : 1.0);
    out.rank = std::move(ws.rank);
    return out;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace fieldest
