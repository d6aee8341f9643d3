#include "lrx/analysis.hpp"

#include "lrx/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace lrx {

GrowthStats growth_stats(std::span<const std::uint64_t> layer_sizes) {
    if (layer_sizes.empty()) throw InvalidArgument("empty growth profile");
    double total = 0.0;
    for (std::uint64_t c : layer_sizes) total += static_cast<double>(c);
    if (!(total > 0.0)) throw InvalidArgument("growth profile has no mass");

    GrowthStats out;
    for (std::size_t d = 0; d < layer_sizes.size(); ++d) {
        out.mean += static_cast<double>(d) * static_cast<double>(layer_sizes[d]) / total;
        if (layer_sizes[d] > layer_sizes[static_cast<std::size_t>(out.mode)]) out.mode = static_cast<int>(d);
    }
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t d = 0; d < layer_sizes.size(); ++d) {
        const double w = static_cast<double>(layer_sizes[d]) / total;
        const double x = static_cast<double>(d) - out.mean;
        m2 += w * x * x;
        m3 += w * x * x * x;
        m4 += w * x * x * x * x;
    }
    if (!(m2 > 0.0)) throw InvalidArgument("standard deviation undefined for a single-layer profile");
    out.std = std::sqrt(m2);
    out.skewness = m3 / (m2 * out.std);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return out;
}

double gumbel_pdf(double x, const GumbelParams& p) {
    const double t = (x - p.mu) / p.beta;
    return std::exp(t - std::exp(t)) / p.beta;
}

double gumbel_cdf(double x, const GumbelParams& p) {
    return -std::expm1(-std::exp((x - p.mu) / p.beta));
}

double gumbel_mean(const GumbelParams& p) { return p.mu - kEulerGamma * p.beta; }

double gumbel_variance(const GumbelParams& p) {
    return std::numbers::pi * std::numbers::pi * p.beta * p.beta / 6.0;
}

double gumbel_quantile(const GumbelParams& p, double u) {
    if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
    return p.mu + p.beta * std::log(-std::log1p(-u));
}

GumbelParams gumbel_from_moments(double mean, double variance) {
    if (!(variance > 0.0)) throw InvalidArgument("Gumbel fit needs positive variance");
    GumbelParams p;
    p.beta = std::sqrt(6.0 * variance) / std::numbers::pi;
    p.mu = mean + kEulerGamma * p.beta;
    return p;
}

std::string to_string(FitObjective objective) {
    switch (objective) {
    case FitObjective::L2: return "l2";
    case FitObjective::Linf: return "linf";
    default: return "ks";
    }
}

FitObjective parse_fit_objective(std::string_view text) {
    if (text == "l2") return FitObjective::L2;
    if (text == "linf") return FitObjective::Linf;
    if (text == "ks") return FitObjective::KS;
    throw InvalidArgument("unknown fit objective: " + std::string(text));
}

double gumbel_objective(std::span<const double> pmf, const GumbelParams& p, FitObjective kind) {
    double acc = 0.0;
    double cum_emp = 0.0, cum_model = 0.0;
    for (std::size_t d = 0; d < pmf.size(); ++d) {
        const double model = gumbel_pdf(static_cast<double>(d), p);
        switch (kind) {
        case FitObjective::L2: acc += (pmf[d] - model) * (pmf[d] - model); break;
        case FitObjective::Linf: acc = std::max(acc, std::abs(pmf[d] - model)); break;
        default:
            cum_emp += pmf[d];
            cum_model += model;
            acc = std::max(acc, std::abs(cum_emp - cum_model));
            break;
        }
    }
    return acc;
}

GumbelFit gumbel_fit(std::span<const std::uint64_t> counts, FitObjective kind) {
    const GrowthStats stats = growth_stats(counts);
    double total = 0.0;
    for (std::uint64_t c : counts) total += static_cast<double>(c);
    std::vector<double> pmf(counts.size());
    for (std::size_t d = 0; d < counts.size(); ++d) pmf[d] = static_cast<double>(counts[d]) / total;

    GumbelFit fit;
    fit.kind = kind;
    fit.moment = gumbel_from_moments(stats.mean, stats.std * stats.std);
    fit.moment_objective = gumbel_objective(pmf, fit.moment, kind);
    fit.refined = fit.moment;
    fit.objective = fit.moment_objective;

    constexpr int kGrid = 41;
    constexpr double kSpan = 0.05;
    for (int i = 0; i < kGrid; ++i) {
        const double fm = 1.0 + kSpan * (2.0 * i / (kGrid - 1) - 1.0);
        for (int j = 0; j < kGrid; ++j) {
            const double fb = 1.0 + kSpan * (2.0 * j / (kGrid - 1) - 1.0);
            const GumbelParams p{fit.moment.mu * fm, fit.moment.beta * fb};
            const double obj = gumbel_objective(pmf, p, kind);
            if (obj < fit.objective) {
                fit.objective = obj;
                fit.refined = p;
            }
        }
    }
    return fit;
}

PolyFit poly_fit(std::span<const double> xs, std::span<const double> ys, int degree) {
    if (degree < 0) throw InvalidArgument("degree must be >= 0");
    if (xs.size() != ys.size()) throw InvalidArgument("xs and ys differ in length");
    const auto cols = static_cast<Eigen::Index>(degree) + 1;
    const auto rows = static_cast<Eigen::Index>(xs.size());
    if (rows < cols) throw InvalidArgument("poly_fit needs at least degree + 1 points");

    Eigen::MatrixXd v(rows, cols);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        double power = 1.0;
        for (Eigen::Index k = cols - 1; k >= 0; --k) {
            v(i, k) = power;
            power *= xs[static_cast<std::size_t>(i)];
        }
        y(i) = ys[static_cast<std::size_t>(i)];
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
    if (qr.rank() < cols) throw InvalidArgument("rank-deficient polynomial fit");
    const Eigen::VectorXd c = qr.solve(y);

    PolyFit fit;
    fit.coefficients.assign(c.data(), c.data() + c.size());
    fit.residual_norm = (v * c - y).norm();
    return fit;
}

double poly_eval(std::span<const double> coefficients, double x) {
    double acc = 0.0;
    for (double c : coefficients) acc = acc * x + c;
    return acc;
}

std::int64_t coset_gods_number(int n) {
    if (n < 6 || n % 2 != 0) throw InvalidArgument("coset diameter formula needs even n >= 6");
    const auto m = static_cast<std::int64_t>(n);
    return (3 * m * m - 4 * m + 32 - 2 * (m % 4)) / 16;
}

Histogram histogram(std::span<const double> values, int bins, double lo, double hi) {
    if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
    if (!(hi > lo)) throw InvalidArgument("histogram range is empty");
    Histogram h{lo, hi, std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0)};
    const double width = (hi - lo) / bins;
    for (double x : values) {
        if (x < lo || x > hi) continue;
        auto b = static_cast<std::int64_t>((x - lo) / width);
        b = std::clamp<std::int64_t>(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

} // namespace lrx
