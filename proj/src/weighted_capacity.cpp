#include "mucap/weighted_capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mucap/errors.hpp"

namespace mucap {

namespace {
constexpr double kLn2 = 0.69314718055994530941723212;
}

void WeightedInstance::require_valid() const {
    if (rows.rows() < 1) {
        throw DomainError("WeightedInstance: need at least one user row");
    }
    if (weights.size() != rows.rows()) {
        throw DomainError("WeightedInstance: weights length must equal L");
    }
    for (Eigen::Index l = 0; l + 1 < weights.size(); ++l) {
        if (weights(l) < weights(l + 1)) {
            throw DomainError("WeightedInstance: weights must be descending");
        }
    }
    if (weights.minCoeff() < 0.0 ||
        std::abs(weights.sum() - 1.0) > 1e-12) {
        throw DomainError("WeightedInstance: weights must be >= 0 and sum to 1");
    }
    if (!(rho > 0.0)) {
        throw DomainError("WeightedInstance: rho must be > 0");
    }
}

namespace {

// residual of v against the span of the (orthonormal) columns of basis,
// orthogonalized twice for stability
VectorXcd residual_against(const MatrixXcd& basis, const VectorXcd& v) {
    VectorXcd r = v;
    for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) {
            r -= basis * (basis.adjoint() * r);
        }
    }
    return r;
}

MatrixXcd orthonormal_basis_of_rows(const MatrixXcd& rows) {
    // columns of the returned matrix span the row space
    if (rows.rows() == 0) return MatrixXcd(rows.cols(), 0);
    Eigen::HouseholderQR<MatrixXcd> qr(rows.adjoint());
    MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(rows.cols(), rows.rows());
    return q;
}

} // namespace

ProjectionSet successive_projections(const MatrixXcd& rows) {
    const Eigen::Index L = rows.rows();
    const Eigen::Index M = rows.cols();
    if (L < 1 || M < L) {
        throw DomainError("successive_projections: need L independent rows, M >= L");
    }
    ProjectionSet out;
    out.f.resize(L, M);
    out.g.resize(L, M);
    out.f_norms_sq.resize(L);
    out.g_norms_sq.resize(L);

    MatrixXcd basis(M, L);  // growing orthonormal basis of h_1..h_{l-1}
    for (Eigen::Index l = 0; l < L; ++l) {
        const VectorXcd h = rows.row(l).adjoint();  // column view of h_l^H
        const VectorXcd r = residual_against(basis.leftCols(l), h);
        const double nrm = r.norm();
        if (nrm <= 1e-12 * h.norm()) {
            throw SingularMatrixError(
                "successive_projections: rows are linearly dependent", nrm);
        }
        out.f.row(l) = r.adjoint();
        out.f_norms_sq(l) = nrm * nrm;
        basis.col(l) = r / nrm;
    }
    for (Eigen::Index l = 0; l < L; ++l) {
        MatrixXcd others(L - 1, M);
        Eigen::Index r = 0;
        for (Eigen::Index j = 0; j < L; ++j) {
            if (j != l) others.row(r++) = rows.row(j);
        }
        const MatrixXcd ob = orthonormal_basis_of_rows(others);
        const VectorXcd res = residual_against(ob, rows.row(l).adjoint());
        out.g.row(l) = res.adjoint();
        out.g_norms_sq(l) = res.squaredNorm();
    }
    return out;
}

VectorXd kkt_power_allocation(const VectorXd& norms_sq, const VectorXd& weights,
                              double rho, bool full_sum) {
    const Eigen::Index L = norms_sq.size();
    if (L < 1 || weights.size() != L) {
        throw DomainError("kkt_power_allocation: size mismatch");
    }
    if (!(rho > 0.0)) {
        throw DomainError("kkt_power_allocation: rho must be > 0");
    }
    for (Eigen::Index l = 0; l < L; ++l) {
        if (!(norms_sq(l) > 0.0)) {
            throw DomainError("kkt_power_allocation: gains must be > 0");
        }
    }
    std::vector<bool> active(L, true);
    VectorXd powers = VectorXd::Zero(L);
    for (Eigen::Index round = 0; round <= L; ++round) {
        double inv_sum = 0.0;
        double weight_sum = 0.0;
        for (Eigen::Index l = 0; l < L; ++l) {
            if (!active[l]) continue;
            inv_sum += 1.0 / norms_sq(l);
            weight_sum += weights(l);
        }
        if (weight_sum <= 0.0) {
            throw DomainError("kkt_power_allocation: no positive-weight user");
        }
        powers.setZero();
        bool any_negative = false;
        for (Eigen::Index l = 0; l < L; ++l) {
            if (!active[l]) continue;
            double p;
            if (full_sum) {
                p = weights(l) * (rho + inv_sum) / weight_sum - 1.0 / norms_sq(l);
            } else {
                // as-printed variant: interior sum skips i = l
                p = weights(l) * rho +
                    weights(l) * (inv_sum - 1.0 / norms_sq(l)) - 1.0 / norms_sq(l);
            }
            powers(l) = p;
            if (p < 0.0) any_negative = true;
        }
        if (!any_negative) break;
        for (Eigen::Index l = 0; l < L; ++l) {
            if (active[l] && powers(l) < 0.0) active[l] = false;
        }
    }
    return powers.cwiseMax(0.0);
}

VectorXd asymptotic_allocation(const VectorXd& weights, double rho) {
    return weights * rho;
}

double weighted_capacity_affine(const ProjectionSet& proj, const VectorXd& weights,
                                double rho, WeightedForm which) {
    const VectorXd& n2 =
        which == WeightedForm::dpc ? proj.f_norms_sq : proj.g_norms_sq;
    double bits = 0.0;
    for (Eigen::Index l = 0; l < weights.size(); ++l) {
        bits += weights(l) * std::log1p(rho * weights(l) * n2(l)) / kLn2;
    }
    return bits;
}

double weighted_loss(const ProjectionSet& proj, const VectorXd& weights) {
    double bits = 0.0;
    for (Eigen::Index l = 0; l < weights.size(); ++l) {
        bits += weights(l) * std::log2(proj.f_norms_sq(l) / proj.g_norms_sq(l));
    }
    return bits;
}

namespace {

// per-user effective gains q_l = h_l S_{l-1}^{-1} h_l^H and, optionally, the
// cross terms c_{l,k} = h_l S_{l-1}^{-1} h_k^H needed by the gradient --
// all through the L x L Gram
struct ExactEval {
    VectorXd q;
    MatrixXcd cross;  // cross(l,k), k < l
};

ExactEval eval_effective(const MatrixXcd& gram, const VectorXd& powers,
                         bool with_cross) {
    const Eigen::Index L = gram.rows();
    ExactEval ev;
    ev.q.resize(L);
    if (with_cross) ev.cross = MatrixXcd::Zero(L, L);
    for (Eigen::Index l = 0; l < L; ++l) {
        if (l == 0) {
            ev.q(0) = gram(0, 0).real();
            if (with_cross) ev.cross.row(0) = gram.row(0);
            continue;
        }
        const auto p = powers.head(l);
        const VectorXd ps = p.cwiseMax(0.0).cwiseSqrt();
        MatrixXcd a = MatrixXcd::Identity(l, l);
        a += ps.asDiagonal() * gram.topLeftCorner(l, l) * ps.asDiagonal();
        Eigen::LLT<MatrixXcd> llt(0.5 * (a + a.adjoint().eval()));
        const VectorXcd b = ps.asDiagonal() * gram.block(0, l, l, 1);
        const VectorXcd x = llt.solve(b);
        ev.q(l) = (gram(l, l) - (b.adjoint() * x)(0, 0)).real();
        if (with_cross) {
            // row vector h_l S^{-1} h_k^H for all k
            Eigen::RowVectorXcd row = gram.row(l);
            row -= (x.adjoint() * ps.asDiagonal().toDenseMatrix()) * gram.topRows(l);
            ev.cross.row(l) = row;
        }
    }
    return ev;
}

double objective_from_eval(const ExactEval& ev, const VectorXd& weights,
                           const VectorXd& powers) {
    double bits = 0.0;
    for (Eigen::Index l = 0; l < weights.size(); ++l) {
        bits += weights(l) * std::log1p(powers(l) * ev.q(l)) / kLn2;
    }
    return bits;
}

// Euclidean projection onto {p >= 0, sum p = rho}
VectorXd project_simplex(VectorXd v, double rho) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double theta = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        css += u[i];
        const double t = (css - rho) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    return (v.array() - theta).max(0.0).matrix();
}

} // namespace

double weighted_dpc_objective(const MatrixXcd& rows, const VectorXd& weights,
                              const VectorXd& powers) {
    if (rows.rows() != weights.size() || rows.rows() != powers.size()) {
        throw DomainError("weighted_dpc_objective: size mismatch");
    }
    MatrixXcd gram = rows * rows.adjoint();
    gram = 0.5 * (gram + gram.adjoint().eval());
    return objective_from_eval(eval_effective(gram, powers, false), weights,
                               powers);
}

WeightedSolution weighted_dpc_exact(const WeightedInstance& instance,
                                    const WeightedSolveOptions& opts) {
    instance.require_valid();
    const Eigen::Index L = instance.rows.rows();
    const double rho = instance.rho;
    MatrixXcd gram = instance.rows * instance.rows.adjoint();
    gram = 0.5 * (gram + gram.adjoint().eval());

    std::vector<VectorXd> starts;
    starts.push_back(asymptotic_allocation(instance.weights, rho));
    {
        const ProjectionSet proj = successive_projections(instance.rows);
        starts.push_back(
            kkt_power_allocation(proj.f_norms_sq, instance.weights, rho));
    }
    starts.push_back(VectorXd::Constant(L, rho / static_cast<double>(L)));
    for (Eigen::Index l = 0; l < L; ++l) {
        VectorXd v = VectorXd::Constant(L, 0.1 * rho / static_cast<double>(L));
        v(l) += 0.9 * rho;
        starts.push_back(project_simplex(v, rho));
    }

    WeightedSolution best;
    best.value_bits = -1.0;
    bool any_converged = false;
    long iters_total = 0;
    for (const VectorXd& s0 : starts) {
        VectorXd p = project_simplex(s0, rho);
        ExactEval ev = eval_effective(gram, p, true);
        double f = objective_from_eval(ev, instance.weights, p);
        double step = 0.25 * rho;
        bool converged = false;
        for (long it = 0; it < opts.max_iters; ++it) {
            ++iters_total;
            // gradient of the weighted objective wrt the power split
            VectorXd grad(L);
            for (Eigen::Index k = 0; k < L; ++k) {
                double g = instance.weights(k) * ev.q(k) /
                           (kLn2 * (1.0 + p(k) * ev.q(k)));
                for (Eigen::Index l = k + 1; l < L; ++l) {
                    const double c2 = std::norm(ev.cross(l, k));
                    g -= instance.weights(l) * p(l) * c2 /
                         (kLn2 * (1.0 + p(l) * ev.q(l)));
                }
                grad(k) = g;
            }
            bool improved = false;
            while (step > 1e-16 * rho) {
                const VectorXd cand = project_simplex(p + step * grad, rho);
                ExactEval evc = eval_effective(gram, cand, true);
                const double fc = objective_from_eval(evc, instance.weights, cand);
                if (fc > f) {
                    improved = true;
                    const double gain = fc - f;
                    p = cand;
                    ev = std::move(evc);
                    f = fc;
                    step *= 2.0;
                    if (gain < opts.tol_bits) {
                        converged = true;
                    }
                    break;
                }
                step *= 0.5;
            }
            if (!improved || converged) {
                converged = true;
                break;
            }
        }
        any_converged = any_converged || converged;
        if (f > best.value_bits) {
            best.value_bits = f;
            best.powers = p;
        }
    }
    best.iterations = iters_total;
    if (!any_converged) {
        throw ConvergenceError("weighted_dpc_exact: no start converged",
                               best.value_bits, iters_total);
    }
    return best;
}

} // namespace mucap
