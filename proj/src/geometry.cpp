#include "simrec/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace simrec::geometry {

std::string to_string(ConeKind cone) {
    switch (cone) {
        case ConeKind::Full: return "full";
        case ConeKind::Symmetric: return "symmetric";
        case ConeKind::Psd: return "psd";
    }
    return "?";
}

ConeKind cone_kind_from_string(const std::string& name) {
    if (name == "full" || name == "none") return ConeKind::Full;
    if (name == "symmetric" || name == "sym") return ConeKind::Symmetric;
    if (name == "psd") return ConeKind::Psd;
    throw ConfigError("unknown cone kind: " + name);
}

double ObjectiveSpec::evaluate(const Mat& x) const {
    if (mode == ObjectiveMode::WeightedSum) {
        double acc = 0.0;
        for (const auto& t : terms) acc += t.weight * norms::eval(t.kind, x);
        return acc;
    }
    double best = 0.0;
    for (const auto& t : terms) {
        if (t.reference <= 0.0) throw SpecInvalidError("MaxRatio objective needs positive references");
        best = std::max(best, norms::eval(t.kind, x) / t.reference);
    }
    return best;
}

ObjectiveSpec ObjectiveSpec::with_references(const Mat& x0) const {
    ObjectiveSpec out = *this;
    for (auto& t : out.terms) t.reference = norms::eval(t.kind, x0);
    return out;
}

std::string ObjectiveSpec::label() const {
    std::string s = (mode == ObjectiveMode::WeightedSum) ? "sum" : "max";
    s += ":";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) s += "+";
        s += norms::to_string(terms[i].kind);
        if (mode == ObjectiveMode::WeightedSum && terms[i].weight != 1.0)
            s += "*" + std::to_string(terms[i].weight);
    }
    if (cone != ConeKind::Full) s += "|" + to_string(cone);
    return s;
}

Mat cone_project(ConeKind cone, const Mat& x) {
    switch (cone) {
        case ConeKind::Full: return x;
        case ConeKind::Symmetric: {
            if (x.rows() != x.cols()) throw NotSquareError("cone_project: symmetric cone needs square input");
            Mat p(x.rows(), x.cols());
            for (int i = 0; i < x.rows(); ++i)
                for (int j = 0; j < x.cols(); ++j) p(i, j) = 0.5 * (x(i, j) + x(j, i));
            return p;
        }
        case ConeKind::Psd: {
            if (x.rows() != x.cols()) throw NotSquareError("cone_project: PSD cone needs square input");
            Mat s = cone_project(ConeKind::Symmetric, x);
            EigResult eig = sym_eig(s);
            const int n = x.rows();
            Mat p(n, n);
            for (int k = 0; k < n; ++k) {
                const double lam = eig.values[k];
                if (lam <= 0.0) break;  // values sorted nonincreasing
                for (int i = 0; i < n; ++i) {
                    const double qik = eig.vectors(i, k) * lam;
                    if (qik == 0.0) continue;
                    double* pi = p.row(i);
                    for (int j = 0; j < n; ++j) pi[j] += qik * eig.vectors(j, k);
                }
            }
            return p;
        }
    }
    return x;
}

Mat polar_project(ConeKind cone, const Mat& x) { return x - cone_project(cone, x); }

double cone_dbar(ConeKind cone, int d) {
    switch (cone) {
        case ConeKind::Full: return 0.0;
        case ConeKind::Symmetric: {
            const double dd = static_cast<double>(d);
            return std::sqrt(dd * (dd - 1.0) / (2.0 * dd * dd));
        }
        case ConeKind::Psd: return std::sqrt(0.75 - 0.25 / static_cast<double>(d));
    }
    return 0.0;
}

double sign_vector_correlation(const norms::SignedSupport& ss) {
    const double e_sq = ss.sign_l2_sq();
    return std::sqrt(e_sq) / std::sqrt(e_sq + ss.max_cosupport_l2_sq());
}

double correlation(const Mat& x, norms::NormKind kind) {
    const double fro = x.frob();
    if (fro == 0.0) throw ZeroSignalError("correlation: zero signal");
    const auto ss = norms::sign_support(kind, x);
    const double sup_g = std::sqrt(ss.sign_l2_sq() + ss.max_cosupport_l2_sq());
    return (norms::eval(kind, x) / fro) / sup_g;
}

double subspace_correlation(const std::vector<Mat>& basis, const ObjectiveSpec& objective, const Mat& x0,
                            int samples, Rng& rng) {
    if (basis.empty()) throw SpecInvalidError("subspace_correlation: empty basis");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = i; j < basis.size(); ++j) {
            const double ip = basis[i].dot(basis[j]);
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::fabs(ip - want) > 1e-10)
                throw SpecInvalidError("subspace_correlation: basis is not orthonormal");
        }
    }

    std::vector<norms::SignedSupport> supports;
    supports.reserve(objective.terms.size());
    for (const auto& t : objective.terms) supports.push_back(norms::sign_support(t.kind, x0));

    double best = 1.0;
    std::vector<double> w(objective.terms.size(), 1.0);
    for (int s = 0; s < samples; ++s) {
        if (objective.mode == ObjectiveMode::WeightedSum) {
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = objective.terms[i].weight;
        } else {
            // subdifferential of a max of ratios: random simplex weights over
            // the (all active at x0) terms, scaled by the reference norms
            double total = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] = -std::log(rng.uniform());
                total += w[i];
            }
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double ref = objective.terms[i].reference > 0.0 ? objective.terms[i].reference : 1.0;
                w[i] = w[i] / total / ref;
            }
        }
        Mat g(x0.rows(), x0.cols());
        for (std::size_t i = 0; i < supports.size(); ++i) {
            Mat gi = norms::subgrad_sample(supports[i], rng);
            gi *= w[i];
            g += gi;
        }
        const double g_norm = g.frob();
        if (g_norm == 0.0) continue;
        double proj_sq = 0.0;
        for (const Mat& b : basis) {
            const double c = b.dot(g);
            proj_sq += c * c;
        }
        best = std::min(best, std::sqrt(proj_sq) / g_norm);
    }
    return best;
}

McEstimate gaussian_distance(const std::function<Mat(const Mat&)>& project, int d1, int d2, int samples,
                             Rng& rng) {
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
        Mat h = gaussian(rng, d1, d2);
        Mat v = project(h);
        const double dist = (h - v).frob();
        sum += dist;
        sum_sq += dist * dist;
    }
    McEstimate est;
    est.mean = sum / samples;
    const double var = std::max(0.0, sum_sq / samples - est.mean * est.mean);
    est.stderr_of_mean = std::sqrt(var / samples);
    return est;
}

McEstimate dilated_subdiff_distance(norms::NormKind kind, const Mat& x0, double alpha, int samples,
                                    Rng& rng) {
    const auto ss = norms::sign_support(kind, x0);
    const int d1 = x0.rows(), d2 = x0.cols();
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
        Mat h = gaussian(rng, d1, d2);
        const Mat h_sup = ss.project_support(h);
        const Mat h_off = h - h_sup;
        // support part pinned at alpha*e; off-support part lands on the
        // closest point of the alpha-dual ball
        Mat e_scaled = ss.e;
        e_scaled *= alpha;
        const double sup_sq = (h_sup - e_scaled).frob_sq();
        const Mat off_proj = norms::dual_ball_project(kind, h_off, alpha);
        const double off_sq = (h_off - off_proj).frob_sq();
        const double dist = std::sqrt(sup_sq + off_sq);
        sum += dist;
        sum_sq += dist * dist;
    }
    McEstimate est;
    est.mean = sum / samples;
    const double var = std::max(0.0, sum_sq / samples - est.mean * est.mean);
    est.stderr_of_mean = std::sqrt(var / samples);
    return est;
}

namespace {

int square_dim(const Mat& x0, ConeKind cone) {
    if (cone == ConeKind::Full) return 0;
    if (x0.rows() != x0.cols()) throw NotSquareError("cone bound: signal must be square for matrix cones");
    return x0.rows();
}

}  // namespace

BoundReport lower_bound(const Mat& x0, const ObjectiveSpec& objective) {
    if (x0.frob() == 0.0) throw ZeroSignalError("lower_bound: zero signal");
    BoundReport rep;
    const double n = static_cast<double>(x0.rows()) * x0.cols();
    rep.dbar_cone = cone_dbar(objective.cone, square_dim(x0, objective.cone));

    double kappa_min = 1.0;
    double lam_l_sum = 0.0;
    for (const auto& t : objective.terms) {
        const auto prof = norms::kappa_profile(t.kind, x0);
        rep.kappa.push_back(prof.kappa);
        rep.lipschitz.push_back(prof.lipschitz);
        kappa_min = std::min(kappa_min, prof.kappa);
        lam_l_sum += t.weight * prof.lipschitz;
    }
    rep.kappa_min = kappa_min;

    const double cone_factor = 1.0 - rep.dbar_cone;
    rep.m_low = cone_factor * n * kappa_min * kappa_min / 100.0;
    rep.m_low_constant_free = cone_factor * n * kappa_min * kappa_min;

    if (objective.mode == ObjectiveMode::WeightedSum && lam_l_sum > 0.0) {
        double mix = 0.0;
        for (std::size_t i = 0; i < objective.terms.size(); ++i) {
            const double lam_bar = objective.terms[i].weight * rep.lipschitz[i] / lam_l_sum;
            rep.lambda_bar.push_back(lam_bar);
            mix += lam_bar * rep.kappa[i];
        }
        rep.m_low_weighted = n * cone_factor * mix * mix / 100.0;
    } else {
        // general scalarizations only admit the kappa_min route
        rep.m_low_weighted = rep.m_low;
    }
    return rep;
}

double default_alpha(norms::NormKind kind, const Mat& x0) {
    const double n = static_cast<double>(x0.rows()) * x0.cols();
    const auto ss = norms::sign_support(kind, x0);
    switch (kind) {
        case norms::NormKind::L1: {
            const double s = std::max(1, ss.rank);
            return std::sqrt(2.0 * std::log(n / s));
        }
        case norms::NormKind::Nuclear:
            return 2.0 * std::sqrt(static_cast<double>(std::max(x0.rows(), x0.cols())));
        case norms::NormKind::L12Cols: {
            const double s = std::max(1, ss.rank);
            return std::sqrt(std::max(1e-12, 2.0 * std::log(static_cast<double>(x0.cols()) / s)) +
                             static_cast<double>(x0.rows()));
        }
        case norms::NormKind::L12Rows: {
            const double s = std::max(1, ss.rank);
            return std::sqrt(std::max(1e-12, 2.0 * std::log(static_cast<double>(x0.rows()) / s)) +
                             static_cast<double>(x0.cols()));
        }
    }
    return 1.0;
}

BoundReport upper_bound(const Mat& x0, const ObjectiveSpec& objective, Rng& rng,
                        const std::vector<double>& alphas, int samples, bool grid_search) {
    if (objective.mode != ObjectiveMode::WeightedSum)
        throw SpecInvalidError("upper_bound: weighted-sum objectives only");
    BoundReport rep = lower_bound(x0, objective);

    const std::size_t tau = objective.terms.size();
    rep.alpha.assign(tau, 0.0);
    rep.dilated_distance.assign(tau, 0.0);

    for (std::size_t i = 0; i < tau; ++i) {
        const auto kind = objective.terms[i].kind;
        double alpha = (i < alphas.size() && alphas[i] > 0.0) ? alphas[i] : default_alpha(kind, x0);
        Rng sub = rng.derive({1000u + static_cast<std::uint64_t>(i)});
        double dist = dilated_subdiff_distance(kind, x0, alpha, samples, sub).mean;
        if (grid_search) {
            // 30 log-spaced points spanning a decade around the recipe value
            for (int g = 0; g < 30; ++g) {
                const double cand = alpha * std::pow(10.0, -0.5 + g / 29.0);
                Rng probe = rng.derive({2000u + static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(g)});
                const double cand_dist =
                    dilated_subdiff_distance(kind, x0, cand, std::max(200, samples / 4), probe).mean;
                if (cand_dist < dist) {
                    dist = cand_dist;
                    alpha = cand;
                }
            }
            Rng refine = rng.derive({3000u + static_cast<std::uint64_t>(i)});
            dist = dilated_subdiff_distance(kind, x0, alpha, samples, refine).mean;
        }
        rep.alpha[i] = alpha;
        rep.dilated_distance[i] = dist;
    }

    double denom = 0.0;
    for (std::size_t i = 0; i < tau; ++i) denom += objective.terms[i].weight / rep.alpha[i];
    double mix = 0.0;
    rep.lambda_bar.assign(tau, 0.0);
    for (std::size_t i = 0; i < tau; ++i) {
        rep.lambda_bar[i] = (objective.terms[i].weight / rep.alpha[i]) / denom;
        mix += rep.lambda_bar[i] * rep.dilated_distance[i];
    }
    rep.m_up = mix * mix;
    return rep;
}

double slr_upper_closed_form(int d, int k, int r, double beta) {
    const double dd = d, kk = k;
    const double l1_part = 2.0 * beta * kk * std::sqrt(std::log(std::exp(1.0) * dd / kk));
    const double star_part = (1.0 - beta) * std::sqrt(6.0 * dd * r + 2.0 * dd);
    const double root = l1_part + star_part;
    return root * root;
}

}  // namespace simrec::geometry
