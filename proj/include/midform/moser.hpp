#pragma once

#include "analysis.hpp"
#include "poly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace midform {

/// Vector field with polynomial components.
struct PolyVectorField {
    int dimension = 0;
    std::vector<Polynomial> components;

    explicit PolyVectorField(int d)
        : dimension(d), components(static_cast<std::size_t>(d), Polynomial(d)) {
        if (d <= 0) throw std::invalid_argument("PolyVectorField: bad dimension");
    }

    bool is_zero() const {
        for (const auto& c : components)
            if (!c.is_zero()) return false;
        return true;
    }

    Vec eval(const Vec& pt) const {
        Vec v(static_cast<std::size_t>(dimension));
        for (int i = 0; i < dimension; ++i) v[static_cast<std::size_t>(i)] = components[static_cast<std::size_t>(i)].eval(pt);
        return v;
    }
};

/// [a,b]^i = sum_j (a^j d_j b^i - b^j d_j a^i).
inline PolyVectorField lie_bracket(const PolyVectorField& a, const PolyVectorField& b) {
    if (a.dimension != b.dimension) throw std::invalid_argument("lie_bracket: dimension mismatch");
    const int d = a.dimension;
    PolyVectorField r(d);
    for (int i = 0; i < d; ++i) {
        Polynomial acc(d);
        for (int j = 1; j <= d; ++j) {
            acc = poly_add(acc, poly_mul(a.components[static_cast<std::size_t>(j - 1)],
                                         derivative(b.components[static_cast<std::size_t>(i)], j)));
            acc = poly_sub(acc, poly_mul(b.components[static_cast<std::size_t>(j - 1)],
                                         derivative(a.components[static_cast<std::size_t>(i)], j)));
        }
        r.components[static_cast<std::size_t>(i)] = acc;
    }
    return r;
}

struct InvolutiveReport {
    bool involutive = true;
    int rank = 0;
    int lhs = 0, rhs = 0;  // 1-based failing generator pair; 0 when involutive
    std::optional<PolyVectorField> bracket;
    std::optional<Vec> witness_point;  // probe where even pointwise membership fails
};

namespace detail {

inline std::string format_point(const Vec& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    return os.str();
}

inline std::string format_point(const std::vector<double>& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    return os.str();
}

/// Seeded rational probe points with nonzero coordinates of magnitude <= 1.
inline std::vector<Vec> rational_probes(int count, int dimension, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> num(1, 2), den(3, 4), coin(0, 1);
    std::vector<Vec> probes;
    for (int k = 0; k < count; ++k) {
        Vec p(static_cast<std::size_t>(dimension));
        for (int i = 0; i < dimension; ++i) {
            Rational c(num(gen), den(gen));
            if (coin(gen)) c = -c;
            p[static_cast<std::size_t>(i)] = c;
        }
        probes.push_back(std::move(p));
    }
    return probes;
}

}  // namespace detail

/// Tests whether every pairwise bracket of the generators stays inside their
/// span.  Rank constancy across the seeded probe points is a checked
/// precondition.  Membership is decided in two stages: an exact pointwise
/// solve at every probe (failure yields a point witness) and an exact
/// coefficient-matching solve requiring one rational combination valid
/// identically (failure yields the offending pair and bracket).
inline InvolutiveReport involutive(const std::vector<PolyVectorField>& dist, int probe_points,
                                   std::uint64_t seed) {
    InvolutiveReport rep;
    if (dist.empty()) return rep;
    const int d = dist[0].dimension;
    for (const auto& g : dist)
        if (g.dimension != d) throw std::invalid_argument("involutive: generators disagree on dimension");
    if (probe_points < 2) throw std::invalid_argument("involutive: need at least two probe points");
    const int K = static_cast<int>(dist.size());

    const std::vector<Vec> probes = detail::rational_probes(probe_points, d, seed);
    std::vector<RatMatrix> value_cols;  // d x K generator values per probe
    int r0 = -1;
    for (const auto& p : probes) {
        std::vector<Vec> cols;
        for (const auto& g : dist) cols.push_back(g.eval(p));
        RatMatrix m = RatMatrix::from_cols(cols);
        const int r = rank(m);
        if (r0 < 0) r0 = r;
        if (r != r0)
            throw std::runtime_error("involutive: rank drop at probe point " + detail::format_point(p));
        value_cols.push_back(std::move(m));
    }
    rep.rank = r0;

    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j) {
            PolyVectorField h = lie_bracket(dist[static_cast<std::size_t>(i)], dist[static_cast<std::size_t>(j)]);
            if (h.is_zero()) continue;

            for (std::size_t pi = 0; pi < probes.size(); ++pi) {
                if (!solve(value_cols[pi], h.eval(probes[pi]))) {
                    rep.involutive = false;
                    rep.lhs = i + 1;
                    rep.rhs = j + 1;
                    rep.bracket = std::move(h);
                    rep.witness_point = probes[pi];
                    return rep;
                }
            }

            // One coefficient vector must reproduce the bracket identically:
            // match monomial coefficients component by component.
            std::map<std::pair<int, std::vector<int>>, int> row_of;
            auto row_for = [&](int comp, const std::vector<int>& e) {
                auto it = row_of.find({comp, e});
                if (it == row_of.end()) it = row_of.emplace(std::make_pair(comp, e), static_cast<int>(row_of.size())).first;
                return it->second;
            };
            for (int comp = 0; comp < d; ++comp) {
                for (const auto& g : dist)
                    for (const auto& [e, c] : g.components[static_cast<std::size_t>(comp)].monomials())
                        row_for(comp, e);
                for (const auto& [e, c] : h.components[static_cast<std::size_t>(comp)].monomials())
                    row_for(comp, e);
            }
            RatMatrix sys(static_cast<int>(row_of.size()), K);
            Vec rhs(row_of.size());
            for (int comp = 0; comp < d; ++comp) {
                for (int k = 0; k < K; ++k)
                    for (const auto& [e, c] :
                         dist[static_cast<std::size_t>(k)].components[static_cast<std::size_t>(comp)].monomials())
                        sys.at(row_for(comp, e), k) = c;
                for (const auto& [e, c] : h.components[static_cast<std::size_t>(comp)].monomials())
                    rhs[static_cast<std::size_t>(row_for(comp, e))] = c;
            }
            if (!solve(sys, rhs)) {
                rep.involutive = false;
                rep.lhs = i + 1;
                rep.rhs = j + 1;
                rep.bracket = std::move(h);
                return rep;
            }
        }
    return rep;
}

// ---------------------------------------------------------------------------

struct FlattenParams {
    int steps = 100;
    int sample_count = 50;
    double tol = 1e-6;
    std::uint64_t seed = 7;
    int probe_count = 8;
    double sample_radius = 0.25;
    double fd_step = 1e-4;
    double residual_tol = 1e-6;
};

struct FlattenSample {
    std::vector<double> point;
    std::vector<double> image;  // time-1 flow of the point
    double error = 0.0;         // max-abs coefficient deviation of the pulled-back form
};

struct FlattenResult {
    AlternatingForm omega0;
    int steps = 0;
    double step_size = 0.0;
    std::vector<FlattenSample> samples;
    double max_error = 0.0;
    double max_residual = 0.0;
    bool within_tol = false;
};

namespace detail {

inline double small_det(std::vector<double> m, int k) {
    double det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r)
            if (std::abs(m[static_cast<std::size_t>(r) * k + c]) >
                std::abs(m[static_cast<std::size_t>(piv) * k + c]))
                piv = r;
        if (m[static_cast<std::size_t>(piv) * k + c] == 0.0) return 0.0;
        if (piv != c) {
            for (int t = 0; t < k; ++t)
                std::swap(m[static_cast<std::size_t>(piv) * k + t], m[static_cast<std::size_t>(c) * k + t]);
            det = -det;
        }
        const double p = m[static_cast<std::size_t>(c) * k + c];
        det *= p;
        for (int r = c + 1; r < k; ++r) {
            const double f = m[static_cast<std::size_t>(r) * k + c] / p;
            if (f == 0.0) continue;
            for (int t = c; t < k; ++t)
                m[static_cast<std::size_t>(r) * k + t] -= f * m[static_cast<std::size_t>(c) * k + t];
        }
    }
    return det;
}

}  // namespace detail

/// Deforms a closed polynomial form with no leaf-supported terms into the
/// constant form it takes at the origin, by integrating the vector field
/// solving i_X w_t = theta0 - theta along the straight-line interpolation
/// w_t = w0 + t (w - w0).  The field is supported on fiber directions only,
/// so leaf coordinates are fixed exactly.  Verification pulls w back through
/// the time-1 map with central-difference Jacobians and compares against w0.
inline FlattenResult moser_flatten(const PolyForm& w, const CoordinateSplit& s,
                                   const FlattenParams& params = {}) {
    s.validate(w.dimension());
    const int d = w.dimension();
    const int k = w.degree();
    if (k < 2) throw std::invalid_argument("moser_flatten: form degree must be at least 2");
    if (s.y_indices.empty()) throw std::invalid_argument("moser_flatten: fiber block is empty");
    if (params.steps < 1 || params.sample_count < 1)
        throw std::invalid_argument("moser_flatten: bad step or sample count");

    if (!exterior_derivative(w).is_zero())
        throw std::invalid_argument("moser_flatten: form is not closed");
    {
        auto [rest, leaf] = restrict_split(w, s);
        (void)rest;
        if (!leaf.is_zero())
            throw std::invalid_argument("moser_flatten: form has terms supported on the leaf");
    }

    // Exact probe checks: constant kernel dimension, and the fiber span must
    // be maximal 1-isotropic with a decomposable basis wherever we look.
    const Vec origin = zero_vec(d);
    std::vector<Vec> probes = detail::rational_probes(params.probe_count, d, params.seed);
    probes.insert(probes.begin(), origin);
    const Subspace fiber = Subspace::coordinate_span(d, s.y_indices);
    int kdim0 = -1;
    for (const auto& p : probes) {
        const AlternatingForm wp = eval_at(w, p);
        const int kdim = kernel(wp).dim();
        if (kdim0 < 0) kdim0 = kdim;
        if (kdim != kdim0)
            throw std::runtime_error("moser_flatten: kernel dimension varies at probe point " +
                                     detail::format_point(p));
        const IsotropyReport iso = classify_isotropy(fiber, wp, 1);
        if (!iso.k_isotropic || !iso.maximal)
            throw std::runtime_error("moser_flatten: fiber span is not maximal isotropic at probe point " +
                                     detail::format_point(p));
        if (!decomposable_basis_search(fiber, wp))
            throw std::runtime_error("moser_flatten: no decomposable fiber basis at probe point " +
                                     detail::format_point(p));
    }

    const AlternatingForm w_origin = eval_at(w, origin);
    const PolyForm w0 = constant_spread(w_origin);
    const PolyForm theta = poincare_homotopy(w, s);
    const PolyForm theta0 = poincare_homotopy(w0, s);
    const PolyForm alpha = pf_sub(theta0, theta);

    // Flattened term tables for the double-precision flow.
    struct Entry {
        int term, row, col;
        double sign;
    };
    const CombIndex rows(d, k - 1);
    std::vector<const Polynomial*> w_polys;
    std::vector<double> w0_coeff;
    std::vector<Entry> entries;
    std::vector<int> col_of(static_cast<std::size_t>(d) + 1, -1);
    for (std::size_t c = 0; c < s.y_indices.size(); ++c)
        col_of[static_cast<std::size_t>(s.y_indices[c])] = static_cast<int>(c);
    {
        int ti = 0;
        for (const auto& [idx, p] : w.terms()) {
            w_polys.push_back(&p);
            w0_coeff.push_back(to_double(p.eval(origin)));
            for (std::size_t a = 0; a < idx.size(); ++a) {
                const int col = col_of[static_cast<std::size_t>(idx[a])];
                if (col < 0) continue;
                IndexTuple rest_idx;
                for (std::size_t t = 0; t < idx.size(); ++t)
                    if (t != a) rest_idx.push_back(idx[t]);
                entries.push_back({ti, rows.pos.at(rest_idx), col, (a % 2) ? -1.0 : 1.0});
            }
            ++ti;
        }
    }
    std::vector<std::pair<int, const Polynomial*>> alpha_terms;
    for (const auto& [idx, p] : alpha.terms()) alpha_terms.push_back({rows.pos.at(idx), &p});

    const int ny = static_cast<int>(s.y_indices.size());
    const int nrows = static_cast<int>(rows.tuples.size());
    double max_residual = 0.0;

    Eigen::MatrixXd M(nrows, ny);
    Eigen::VectorXd rhs(nrows), sol(ny);
    std::vector<double> ct(w_polys.size());
    auto field = [&](double t, const std::vector<double>& z, std::vector<double>& out) {
        for (std::size_t i = 0; i < w_polys.size(); ++i) {
            const double cw = w_polys[i]->eval_double(z);
            ct[i] = w0_coeff[i] + t * (cw - w0_coeff[i]);
        }
        M.setZero();
        for (const auto& e : entries) M(e.row, e.col) += e.sign * ct[static_cast<std::size_t>(e.term)];
        rhs.setZero();
        for (const auto& [row, poly] : alpha_terms) rhs(row) = poly->eval_double(z);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
        sol = cod.solve(rhs);
        const double res = (M * sol - rhs).lpNorm<Eigen::Infinity>();
        max_residual = std::max(max_residual, res);
        if (res > params.residual_tol) {
            std::ostringstream os;
            os << "moser_flatten: linear system inconsistent at flow point " << detail::format_point(z)
               << " (t = " << t << ", residual = " << res << ")";
            throw std::runtime_error(os.str());
        }
        std::fill(out.begin(), out.end(), 0.0);
        for (int c = 0; c < ny; ++c) out[static_cast<std::size_t>(s.y_indices[static_cast<std::size_t>(c)] - 1)] = sol(c);
    };

    const double h = 1.0 / params.steps;
    std::vector<double> k1(static_cast<std::size_t>(d)), k2(k1), k3(k1), k4(k1), tmp(k1);
    auto flow = [&](std::vector<double> z) {
        for (int step = 0; step < params.steps; ++step) {
            const double t = step * h;
            field(t, z, k1);
            for (int i = 0; i < d; ++i) tmp[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + 0.5 * h * k1[static_cast<std::size_t>(i)];
            field(t + 0.5 * h, tmp, k2);
            for (int i = 0; i < d; ++i) tmp[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + 0.5 * h * k2[static_cast<std::size_t>(i)];
            field(t + 0.5 * h, tmp, k3);
            for (int i = 0; i < d; ++i) tmp[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + h * k3[static_cast<std::size_t>(i)];
            field(t + h, tmp, k4);
            for (int i = 0; i < d; ++i)
                z[static_cast<std::size_t>(i)] +=
                    (h / 6.0) * (k1[static_cast<std::size_t>(i)] + 2.0 * k2[static_cast<std::size_t>(i)] +
                                 2.0 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
        }
        return z;
    };

    // Sampled verification: pull w back through the time-1 map numerically.
    const CombIndex full(d, k);
    std::map<IndexTuple, double> w0_at;
    for (const auto& [idx, c] : w_origin.terms()) w0_at[idx] = to_double(c);
    std::vector<IndexTuple> w_tuples;
    for (const auto& [idx, p] : w.terms()) w_tuples.push_back(idx);

    std::mt19937_64 gen(params.seed + 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> coord(-params.sample_radius, params.sample_radius);

    FlattenResult result{w_origin, params.steps, h, {}, 0.0, 0.0, false};
    for (int m = 0; m < params.sample_count; ++m) {
        std::vector<double> p(static_cast<std::size_t>(d));
        for (auto& x : p) x = coord(gen);
        const std::vector<double> center = flow(p);
        // Central-difference Jacobian J(i, t) = d phi^i / d z^t.
        std::vector<std::vector<double>> jac_cols;
        for (int t = 0; t < d; ++t) {
            std::vector<double> zp = p, zm = p;
            zp[static_cast<std::size_t>(t)] += params.fd_step;
            zm[static_cast<std::size_t>(t)] -= params.fd_step;
            const std::vector<double> fp = flow(zp), fm = flow(zm);
            std::vector<double> col(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
                col[static_cast<std::size_t>(i)] =
                    (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * params.fd_step);
            jac_cols.push_back(std::move(col));
        }
        std::vector<double> cw(w_polys.size());
        for (std::size_t i = 0; i < w_polys.size(); ++i) cw[i] = w_polys[i]->eval_double(center);

        double err = 0.0;
        std::vector<double> minor(static_cast<std::size_t>(k) * k);
        for (const auto& T : full.tuples) {
            double pulled = 0.0;
            for (std::size_t ti = 0; ti < w_tuples.size(); ++ti) {
                const IndexTuple& I = w_tuples[ti];
                for (int a = 0; a < k; ++a)
                    for (int b = 0; b < k; ++b)
                        minor[static_cast<std::size_t>(a) * k + b] =
                            jac_cols[static_cast<std::size_t>(T[static_cast<std::size_t>(b)] - 1)]
                                    [static_cast<std::size_t>(I[static_cast<std::size_t>(a)] - 1)];
                pulled += cw[ti] * detail::small_det(minor, k);
            }
            const auto it = w0_at.find(T);
            const double target = (it == w0_at.end()) ? 0.0 : it->second;
            err = std::max(err, std::abs(pulled - target));
        }
        result.samples.push_back({std::move(p), center, err});
        result.max_error = std::max(result.max_error, err);
    }
    result.max_residual = max_residual;
    result.within_tol = result.max_error <= params.tol;
    return result;
}

}  // namespace midform
