#include "simrec/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "simrec/norms.hpp"

namespace simrec::solvers {

using geometry::ConeKind;
using geometry::ObjectiveMode;
using geometry::ObjectiveSpec;
using measurements::MeasurementOperator;
using norms::NormKind;

namespace {

double normalized_error_vs(const Mat& x_hat, const Mat* x0) {
    if (!x0) return -1.0;
    return (x_hat - *x0).frob() / x0->frob();
}

// Projection of the (already nonnegative) eigenvalue vector onto the simplex
// slice {lam >= 0, sum lam <= radius}.
void clamp_eigs_to_trace_ball(std::vector<double>& lam, double radius) {
    double total = 0.0;
    for (double& v : lam) {
        if (v < 0.0) v = 0.0;
        total += v;
    }
    if (total <= radius) return;
    std::vector<double> sorted = lam;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cum += sorted[j];
        const double cand = (cum - radius) / static_cast<double>(j + 1);
        if (j + 1 == sorted.size() || sorted[j + 1] <= cand) {
            theta = cand;
            break;
        }
    }
    for (double& v : lam) v = std::max(v - theta, 0.0);
}

void rebuild_from_eigs(Mat& x, const Mat& q, const std::vector<double>& lam) {
    const int d = x.rows();
    std::fill(x.data(), x.data() + x.size(), 0.0);
    for (int k = 0; k < d; ++k) {
        if (lam[k] == 0.0) continue;
        for (int i = 0; i < d; ++i) {
            const double qik = q(i, k) * lam[k];
            if (qik == 0.0) continue;
            double* xi = x.row(i);
            for (int j = 0; j < d; ++j) xi[j] += qik * q(j, k);
        }
    }
}

// Cyclic-projection feasibility engine for the max-of-ratios program. One
// probe answers "is {A(x)=b, x in cone, ||x||_(i) <= t*ref_i} nonempty" and
// leaves the final iterate behind for warm starts.
class FbestEngine {
  public:
    FbestEngine(const MeasurementOperator& op, const std::vector<double>& b, const ObjectiveSpec& objective)
        : op_(op), b_(b), objective_(objective), projector_(op.a), b_norm_(vec_norm(b)) {
        for (const auto& term : objective.terms) {
            if (term.reference <= 0.0) throw SpecInvalidError("solve_fbest: references must be positive");
        }
        // the PSD + trace/nuclear pair shares one eigendecomposition per pass
        fused_nuclear_ = -1;
        if (objective.cone == ConeKind::Psd) {
            for (std::size_t i = 0; i < objective.terms.size(); ++i)
                if (objective.terms[i].kind == NormKind::Nuclear) fused_nuclear_ = static_cast<int>(i);
        }
    }

    struct Probe {
        bool feasible = false;
        double max_residual = 0.0;
        int iterations = 0;
    };

    Probe run(double t, Mat& x, int iter_budget) {
        Probe probe;
        const double tiny = 1e-300;
        double best = 1e30;
        int best_at = 0;
        std::vector<double> lam(op_.d1, 0.0);
        for (int iter = 0; iter < iter_budget; ++iter) {
            double max_res = 0.0;

            // affine
            const double aff_res = projector_.project_inplace(x, b_);
            max_res = std::max(max_res, aff_res / std::max(b_norm_, tiny));

            // cone (+ fused trace ball)
            if (objective_.cone != ConeKind::Full) {
                const double x_scale = std::max(x.frob(), tiny);
                double viol_sq = 0.0;
                Mat sym(x.rows(), x.cols());
                for (int i = 0; i < x.rows(); ++i)
                    for (int j = 0; j < x.cols(); ++j) {
                        sym(i, j) = 0.5 * (x(i, j) + x(j, i));
                        const double skew = x(i, j) - sym(i, j);
                        viol_sq += skew * skew;
                    }
                if (objective_.cone == ConeKind::Symmetric) {
                    max_res = std::max(max_res, std::sqrt(viol_sq) / x_scale);
                    x = sym;
                } else {
                    EigResult eig = has_warm_ ? sym_eig_warm(sym, q_warm_) : sym_eig(sym);
                    q_warm_ = eig.vectors;
                    has_warm_ = true;
                    for (int k = 0; k < op_.d1; ++k) {
                        lam[k] = eig.values[k];
                        if (lam[k] < 0.0) viol_sq += lam[k] * lam[k];
                    }
                    max_res = std::max(max_res, std::sqrt(viol_sq) / x_scale);
                    for (double& v : lam) v = std::max(v, 0.0);
                    if (fused_nuclear_ >= 0) {
                        const double radius = t * objective_.terms[fused_nuclear_].reference;
                        const double total = std::accumulate(lam.begin(), lam.end(), 0.0);
                        if (radius <= 0.0) {
                            std::fill(lam.begin(), lam.end(), 0.0);
                            max_res = std::max(max_res, total > 0.0 ? 1.0 : 0.0);
                        } else {
                            max_res = std::max(max_res, std::max(0.0, total / radius - 1.0));
                            clamp_eigs_to_trace_ball(lam, radius);
                        }
                    }
                    rebuild_from_eigs(x, q_warm_, lam);
                }
            }

            // remaining norm balls
            for (std::size_t i = 0; i < objective_.terms.size(); ++i) {
                if (static_cast<int>(i) == fused_nuclear_) continue;
                const auto& term = objective_.terms[i];
                const double radius = t * term.reference;
                const double value = norms::eval(term.kind, x);
                if (radius <= 0.0) {
                    max_res = std::max(max_res, value > 0.0 ? 1.0 : 0.0);
                    std::fill(x.data(), x.data() + x.size(), 0.0);
                    continue;
                }
                max_res = std::max(max_res, std::max(0.0, value / radius - 1.0));
                if (value > radius) x = norms::ball_project(term.kind, x, radius);
            }

            probe.iterations = iter + 1;
            if (max_res <= kFeasTol) {
                probe.feasible = true;
                probe.max_residual = max_res;
                return probe;
            }
            if (max_res < best * 0.99) {
                best = max_res;
                best_at = iter;
            }
            // stalled well above tolerance: treat as infeasible
            if (iter - best_at >= 60 && iter >= 120) {
                probe.max_residual = max_res;
                return probe;
            }
            probe.max_residual = max_res;
        }
        return probe;
    }

    const AffineProjector& projector() const { return projector_; }

    static constexpr double kFeasTol = 1e-6;

  private:
    const MeasurementOperator& op_;
    const std::vector<double>& b_;
    const ObjectiveSpec& objective_;
    AffineProjector projector_;
    double b_norm_ = 0.0;
    int fused_nuclear_ = -1;
    Mat q_warm_;
    bool has_warm_ = false;
};

}  // namespace

SolveResult solve_fbest(const MeasurementOperator& op, const std::vector<double>& b,
                        const ObjectiveSpec& objective, const SolveConfig& cfg, const Mat* x0) {
    if (objective.mode != ObjectiveMode::MaxRatio)
        throw SpecInvalidError("solve_fbest: objective must be MaxRatio with references");
    SolveResult result;
    FbestEngine engine(op, b, objective);

    Mat x_ls(op.d1, op.d2);
    {
        std::vector<double> flat = engine.projector().solve_min_norm(b);
        std::copy(flat.begin(), flat.end(), x_ls.data());
    }

    int total_iters = 0;
    Mat x = x_ls;
    auto top = engine.run(1.0, x, cfg.max_iters);
    total_iters += top.iterations;
    if (!top.feasible) {
        // x0 is feasible at t = 1 by construction; give it one bigger budget
        auto retry = engine.run(1.0, x, 2 * cfg.max_iters);
        total_iters += retry.iterations;
        top = retry;
    }
    Mat x_best = x;
    double t_best = 1.0;

    if (top.feasible) {
        double lo = 0.0, hi = 1.0;
        int guard = 0;
        while (hi - lo > cfg.bisection_tol && guard++ < 25) {
            const double mid = 0.5 * (lo + hi);
            auto probe = engine.run(mid, x, cfg.max_iters);
            total_iters += probe.iterations;
            if (probe.feasible) {
                hi = mid;
                x_best = x;
                t_best = mid;
            } else {
                lo = mid;
            }
        }
        // polish at the accepted level
        Mat x_polish = x_best;
        auto polish = engine.run(t_best, x_polish, 2 * cfg.max_iters);
        total_iters += polish.iterations;
        if (polish.feasible) x_best = x_polish;
        result.converged = true;
        result.status = "ok";
    } else {
        result.converged = false;
        result.status = "NotConverged: level-1 feasibility not reached; residual " +
                        std::to_string(top.max_residual);
        x_best = x;
    }

    result.x_hat = x_best;
    result.iterations = total_iters;
    result.objective_value = objective.evaluate(x_best);
    result.feasibility_residual = vec_norm([&] {
        auto r = measurements::apply(op, x_best);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
        return r;
    }()) / std::max(vec_norm(b), 1e-300);
    result.normalized_error = normalized_error_vs(x_best, x0);
    return result;
}

SolveResult solve_weighted(const MeasurementOperator& op, const std::vector<double>& b,
                           const ObjectiveSpec& objective, const SolveConfig& cfg, const Mat* x0) {
    if (objective.mode != ObjectiveMode::WeightedSum)
        throw SpecInvalidError("solve_weighted: objective must be a weighted sum");
    double weight_sum = 0.0;
    for (const auto& t : objective.terms) {
        if (t.weight < 0.0) throw SpecInvalidError("solve_weighted: negative weight");
        weight_sum += t.weight;
    }
    if (weight_sum <= 0.0) throw SpecInvalidError("solve_weighted: need at least one positive weight");

    struct Block {
        enum class Type { Prox, Affine, Cone } type;
        NormKind kind = NormKind::L1;
        double weight = 0.0;
    };
    std::vector<Block> blocks;
    for (const auto& t : objective.terms)
        if (t.weight > 0.0) blocks.push_back({Block::Type::Prox, t.kind, t.weight});
    blocks.push_back({Block::Type::Affine});
    if (objective.cone != ConeKind::Full) blocks.push_back({Block::Type::Cone});
    const int J = static_cast<int>(blocks.size());
    const int d1 = op.d1, d2 = op.d2;
    const double n_elems = static_cast<double>(d1) * d2;

    AffineProjector projector(op.a);
    Mat z(d1, d2);
    {
        std::vector<double> flat = projector.solve_min_norm(b);
        std::copy(flat.begin(), flat.end(), z.data());
        const double ls_res = [&] {
            auto r = measurements::apply(op, z);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
            return vec_norm(r);
        }() / std::max(vec_norm(b), 1e-300);
        if (ls_res > 1e-5)
            throw InfeasibleDataError("solve_weighted: affine projection residual stuck at " +
                                      std::to_string(ls_res));
    }

    std::vector<Mat> xs(J, z), us(J, Mat(d1, d2));
    double rho = cfg.admm_rho;

    SolveResult result;
    const std::vector<double>* b_ptr = &b;
    const double b_norm = std::max(vec_norm(b), 1e-300);
    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        if (cfg.record_history) {
            auto r = measurements::apply(op, z);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= (*b_ptr)[i];
            result.residual_history.push_back(vec_norm(r) / b_norm);
        }
        for (int j = 0; j < J; ++j) {
            Mat v = z - us[j];
            switch (blocks[j].type) {
                case Block::Type::Prox:
                    xs[j] = norms::prox(blocks[j].kind, v, blocks[j].weight / rho);
                    break;
                case Block::Type::Affine:
                    projector.project_inplace(v, b);
                    xs[j] = std::move(v);
                    break;
                case Block::Type::Cone:
                    xs[j] = geometry::cone_project(objective.cone, v);
                    break;
            }
        }
        Mat z_old = z;
        std::fill(z.data(), z.data() + z.size(), 0.0);
        for (int j = 0; j < J; ++j) {
            z += xs[j];
            z += us[j];
        }
        z *= 1.0 / J;
        double r_sq = 0.0, x_sq = 0.0, u_sq = 0.0;
        for (int j = 0; j < J; ++j) {
            us[j] += xs[j];
            us[j] -= z;
            r_sq += (xs[j] - z).frob_sq();
            x_sq += xs[j].frob_sq();
            u_sq += us[j].frob_sq();
        }
        const double r_norm = std::sqrt(r_sq);
        const double s_norm = rho * std::sqrt(static_cast<double>(J)) * (z - z_old).frob();
        const double eps_pri = std::sqrt(J * n_elems) * cfg.primal_tol +
                               cfg.primal_tol * std::max(std::sqrt(x_sq), std::sqrt(J * z.frob_sq()));
        const double eps_dual = std::sqrt(J * n_elems) * cfg.dual_tol + cfg.dual_tol * rho * std::sqrt(u_sq);
        if (r_norm <= eps_pri && s_norm <= eps_dual) {
            ++iter;
            break;
        }
        // residual balancing keeps rho out of per-instance tuning
        if ((iter + 1) % 25 == 0) {
            if (r_norm > 10.0 * s_norm && rho < 1e4) {
                rho *= 2.0;
                for (auto& u : us) u *= 0.5;
            } else if (s_norm > 10.0 * r_norm && rho > 1e-4) {
                rho *= 0.5;
                for (auto& u : us) u *= 2.0;
            }
        }
    }

    Mat x_hat = z;
    projector.project_inplace(x_hat, b);
    result.x_hat = std::move(x_hat);
    result.iterations = iter;
    result.objective_value = objective.evaluate(result.x_hat);
    result.feasibility_residual = [&] {
        auto r = measurements::apply(op, result.x_hat);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
        return vec_norm(r) / std::max(vec_norm(b), 1e-300);
    }();
    result.converged = (iter < cfg.max_iters) && result.feasibility_residual <= 1e-5;
    result.status = result.converged ? "ok" : "NotConverged: residuals above tolerance";
    result.normalized_error = normalized_error_vs(result.x_hat, x0);
    return result;
}

namespace {

double binomial_total(int d, int k_max) {
    double total = 0.0;
    for (int s = 1; s <= k_max; ++s) {
        double c = 1.0;
        for (int i = 0; i < s; ++i) c = c * (d - i) / (i + 1);
        total += c;
    }
    return total;
}

// Damped Gauss-Newton for min_x || sigma * A_S(x x^T) - b ||_2 over the
// restricted support; ms holds the symmetrized, support-restricted
// measurement matrices.
struct GaussNewtonFit {
    double residual = 1e300;
    std::vector<double> x;
    int iterations = 0;
};

GaussNewtonFit gauss_newton(const std::vector<Mat>& ms, const std::vector<double>& b, double sigma,
                            std::vector<double> x, int max_iters) {
    const int s = static_cast<int>(x.size());
    const int m = static_cast<int>(b.size());
    std::vector<double> r(m), jt_r(s), delta(s), x_new(s), r_new(m);
    Mat jtj(s, s);

    auto eval_residual = [&](const std::vector<double>& xv, std::vector<double>& out) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {
            const Mat& mi = ms[i];
            double q = 0.0;
            for (int p = 0; p < s; ++p) {
                const double* mp = mi.row(p);
                double row = 0.0;
                for (int qi = 0; qi < s; ++qi) row += mp[qi] * xv[qi];
                q += xv[p] * row;
            }
            out[i] = sigma * q - b[i];
            acc += out[i] * out[i];
        }
        return std::sqrt(acc);
    };

    double res = eval_residual(x, r);
    double mu = 1e-8;
    int iters_used = 0;
    for (int it = 0; it < max_iters; ++it) {
        iters_used = it + 1;
        // J_i = 2 sigma M_i x
        std::vector<std::vector<double>> jac(m, std::vector<double>(s));
        for (int i = 0; i < m; ++i) {
            const Mat& mi = ms[i];
            for (int p = 0; p < s; ++p) {
                const double* mp = mi.row(p);
                double acc = 0.0;
                for (int q = 0; q < s; ++q) acc += mp[q] * x[q];
                jac[i][p] = 2.0 * sigma * acc;
            }
        }
        for (int p = 0; p < s; ++p) {
            jt_r[p] = 0.0;
            for (int q = 0; q <= p; ++q) jtj(p, q) = 0.0;
        }
        for (int i = 0; i < m; ++i) {
            for (int p = 0; p < s; ++p) {
                jt_r[p] += jac[i][p] * r[i];
                for (int q = 0; q <= p; ++q) jtj(p, q) += jac[i][p] * jac[i][q];
            }
        }
        for (int p = 0; p < s; ++p)
            for (int q = p + 1; q < s; ++q) jtj(p, q) = jtj(q, p);

        bool accepted = false;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Mat damped = jtj;
            double trace = 0.0;
            for (int p = 0; p < s; ++p) trace += jtj(p, p);
            const double lam = mu * std::max(trace / s, 1e-12);
            for (int p = 0; p < s; ++p) damped(p, p) += lam;
            EigResult eig = sym_eig(damped);
            for (int p = 0; p < s; ++p) {
                double acc = 0.0;
                for (int q = 0; q < s; ++q) acc += eig.vectors(q, p) * jt_r[q];
                delta[p] = acc / std::max(eig.values[p], 1e-300);
            }
            for (int p = 0; p < s; ++p) {
                double acc = 0.0;
                for (int q = 0; q < s; ++q) acc += eig.vectors(p, q) * delta[q];
                x_new[p] = x[p] - acc;
            }
            const double res_new = eval_residual(x_new, r_new);
            if (res_new < res) {
                x = x_new;
                r = r_new;
                res = res_new;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if (!accepted) break;
        if (res <= 1e-12) break;
    }
    return {res, std::move(x), iters_used};
}

}  // namespace

SolveResult solve_nonconvex_rank1(const MeasurementOperator& op, const std::vector<double>& b, int d,
                                  int k_max, bool symmetric, const SolveConfig& cfg, Rng& rng,
                                  const Mat* x0) {
    if (op.d1 != d || op.d2 != d) throw ShapeMismatchError("solve_nonconvex_rank1: operator shape mismatch");
    if (binomial_total(d, k_max) > 1e6)
        throw BudgetExceededError("solve_nonconvex_rank1: support enumeration exceeds 1e6");

    const double b_norm = std::max(vec_norm(b), 1e-300);
    const double fit_tol = 1e-8 * b_norm;
    const int m = op.m;

    Mat x_adj = adjoint(op, b);
    Mat x_adj_sym(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) x_adj_sym(i, j) = 0.5 * (x_adj(i, j) + x_adj(j, i));

    SolveResult result;
    result.status = "NoFit";
    bool accepted = false;
    int accepted_size = 0;
    Mat x_hat(d, d);
    double best_residual = 1e300;
    long long gn_iterations = 0;

    std::vector<int> support;
    for (int s = 1; s <= k_max && !(accepted && s > accepted_size); ++s) {
        support.assign(s, 0);
        std::iota(support.begin(), support.end(), 0);
        bool more = true;
        while (more) {
            // restricted, symmetrized measurement blocks
            std::vector<Mat> ms(m, Mat(s, s));
            for (int i = 0; i < m; ++i) {
                const double* ai = op.a.row(i);
                for (int p = 0; p < s; ++p)
                    for (int q = 0; q < s; ++q)
                        ms[i](p, q) =
                            0.5 * (ai[support[p] * d + support[q]] + ai[support[q] * d + support[p]]);
            }

            const int sign_cases = symmetric ? 2 : 1;  // symmetric cone: both +-aa^T; else PSD side only
            for (int sign_case = 0; sign_case < sign_cases; ++sign_case) {
                const double sigma = sign_case == 0 ? 1.0 : -1.0;
                GaussNewtonFit best_fit;
                // spectral initialization from the adjoint image
                {
                    Mat block(s, s);
                    for (int p = 0; p < s; ++p)
                        for (int q = 0; q < s; ++q) block(p, q) = x_adj_sym(support[p], support[q]);
                    EigResult eig = sym_eig(block);
                    const double lam = (sigma > 0) ? eig.values.front() : eig.values.back();
                    if (sigma * lam > 0.0) {
                        std::vector<double> x_init(s);
                        const int col = (sigma > 0) ? 0 : s - 1;
                        const double scale = std::sqrt(std::fabs(lam));
                        for (int p = 0; p < s; ++p) x_init[p] = scale * eig.vectors(p, col);
                        auto fit = gauss_newton(ms, b, sigma, std::move(x_init), 60);
                        gn_iterations += fit.iterations;
                        if (fit.residual < best_fit.residual) best_fit = std::move(fit);
                    }
                }
                const double init_scale = std::sqrt(b_norm / std::max(1, m)) + 1e-6;
                for (int start = 0; start < 5 && best_fit.residual > fit_tol; ++start) {
                    std::vector<double> x_init(s);
                    for (int p = 0; p < s; ++p) x_init[p] = init_scale * rng.normal();
                    auto fit = gauss_newton(ms, b, sigma, std::move(x_init), 60);
                    gn_iterations += fit.iterations;
                    if (fit.residual < best_fit.residual) best_fit = std::move(fit);
                }

                if (best_fit.residual <= fit_tol) {
                    Mat cand(d, d);
                    for (int p = 0; p < s; ++p)
                        for (int q = 0; q < s; ++q)
                            cand(support[p], support[q]) = sigma * best_fit.x[p] * best_fit.x[q];
                    if (!accepted) {
                        accepted = true;
                        accepted_size = s;
                        x_hat = cand;
                        best_residual = best_fit.residual;
                        result.status = "ok";
                    } else if ((cand - x_hat).frob() > 1e-6) {
                        result.unique = false;
                    } else if (best_fit.residual < best_residual) {
                        x_hat = cand;
                        best_residual = best_fit.residual;
                    }
                }
            }

            // next combination
            int idx = s - 1;
            while (idx >= 0 && support[idx] == d - s + idx) --idx;
            if (idx < 0) {
                more = false;
            } else {
                ++support[idx];
                for (int j = idx + 1; j < s; ++j) support[j] = support[j - 1] + 1;
            }
        }
    }

    if (!accepted) throw NoFitError("solve_nonconvex_rank1: no support fits the measurements");

    result.x_hat = std::move(x_hat);
    result.converged = true;
    result.iterations = static_cast<int>(std::min<long long>(gn_iterations, 1ll << 30));
    result.feasibility_residual = best_residual / b_norm;
    result.objective_value = static_cast<double>(accepted_size);
    result.normalized_error = normalized_error_vs(result.x_hat, x0);
    (void)cfg;
    return result;
}

std::string result_to_json(const SolveResult& result, const std::string& config_hash) {
    std::ostringstream out;
    out.precision(12);
    out << "{\"normalized_error\":" << result.normalized_error << ",\"iterations\":" << result.iterations
        << ",\"converged\":" << (result.converged ? "true" : "false")
        << ",\"objective_value\":" << result.objective_value
        << ",\"feasibility_residual\":" << result.feasibility_residual
        << ",\"unique\":" << (result.unique ? "true" : "false") << ",\"status\":\"" << result.status << "\"";
    if (!config_hash.empty()) out << ",\"config_hash\":\"" << config_hash << "\"";
    out << "}";
    return out.str();
}

}  // namespace simrec::solvers
