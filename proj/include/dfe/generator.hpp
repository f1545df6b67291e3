#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dfe {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smoothness constants (C0, C0*, C1, C1*, C2, C2*) for generators that
/// satisfy the boundedness/derivative assumptions.
struct GeneratorConstants {
    double c0;
    double c0_star;
    double c1;
    double c1_star;
    double c2;
    double c2_star;
};

/// A convex divergence generator f: (0, inf) -> [0, inf) with f(1) = 0,
/// together with its boundary limits f(0+) and f*(0+) = lim t f(1/t).
/// Values are immutable once constructed.
struct DivergenceGenerator {
    std::string name;
    std::function<double(double)> eval;
    double f_at_zero = kInf;
    double fstar_at_zero = kInf;
    std::optional<GeneratorConstants> constants;
};

namespace detail {

// (t+1)/2 - t log t / (t-1), the generator of the KL frontier integral.
// Series guard around t = 1 where the closed form is 0/0.
inline double fi_kl_eval(double t) {
    const double e = t - 1.0;
    if (std::fabs(e) < 1e-6) return e * e / 6.0 - e * e * e / 12.0;
    return (t + 1.0) / 2.0 - t / (t - 1.0) * std::log(t);
}

// (t^2 - 2 t log t - 1) / (t - 1), the generator of the chi^2 frontier
// integral; identically 2 * fi_kl.
inline double fi_chi2_eval(double t) { return 2.0 * fi_kl_eval(t); }

inline double kl_eval(double t) { return t * std::log(t) - t + 1.0; }

inline double skew_js_eval(double lambda, double t) {
    const double s = lambda * t + 1.0 - lambda;
    return lambda * t * std::log(t / s) + (1.0 - lambda) * std::log(1.0 / s);
}

}  // namespace detail

/// f*(t) = t f(1/t). Swaps the boundary limits and the starred constants.
inline DivergenceGenerator conjugate(const DivergenceGenerator& f) {
    DivergenceGenerator g;
    g.name = "conj(" + f.name + ")";
    const auto base = f.eval;
    g.eval = [base](double t) { return t * base(1.0 / t); };
    g.f_at_zero = f.fstar_at_zero;
    g.fstar_at_zero = f.f_at_zero;
    if (f.constants) {
        const auto& c = *f.constants;
        g.constants = GeneratorConstants{c.c0_star, c.c0, c.c1_star, c.c1, c.c2_star, c.c2};
    }
    return g;
}

/// f_lambda(t) = (lambda t + 1 - lambda) f(t / (lambda t + 1 - lambda)),
/// the generator of D_f(P || lambda P + (1-lambda) Q).
inline DivergenceGenerator interpolate_generator(const DivergenceGenerator& f, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("interpolate_generator: lambda must be in (0, 1)");
    DivergenceGenerator g;
    g.name = f.name + "_lam";
    const auto base = f.eval;
    g.eval = [base, lambda](double t) {
        const double s = lambda * t + 1.0 - lambda;
        return s * base(t / s);
    };
    g.f_at_zero = (1.0 - lambda) * f.f_at_zero;
    // (f_lambda)*(0) = lim t f_lambda(1/t) = lambda f(1/lambda) = f*(lambda)
    g.fstar_at_zero = lambda * f.eval(1.0 / lambda);
    return g;
}

/// Factory for the named generator families. `lambda` is required exactly for
/// the lambda-parameterized families (interp_kl, skew_js, interp_chi2).
inline DivergenceGenerator make_generator(std::string_view name,
                                          std::optional<double> lambda = std::nullopt) {
    const bool parameterized =
        name == "interp_kl" || name == "skew_js" || name == "interp_chi2";
    if (parameterized && !lambda)
        throw std::invalid_argument(std::string("make_generator: ") + std::string(name) +
                                    " requires lambda");
    if (!parameterized && lambda)
        throw std::invalid_argument(std::string("make_generator: ") + std::string(name) +
                                    " does not take lambda");
    if (lambda && !(*lambda > 0.0 && *lambda < 1.0))
        throw std::invalid_argument("make_generator: lambda must be in (0, 1)");

    DivergenceGenerator g;
    g.name = std::string(name);
    if (name == "kl") {
        g.eval = detail::kl_eval;
        g.f_at_zero = 1.0;
        g.fstar_at_zero = kInf;
    } else if (name == "interp_kl") {
        const double lam = *lambda, lbar = 1.0 - lam;
        DivergenceGenerator kl = make_generator("kl");
        DivergenceGenerator inter = interpolate_generator(kl, lam);
        g.eval = inter.eval;
        g.f_at_zero = lbar;
        g.fstar_at_zero = std::log(1.0 / lam) - lbar;
        g.constants = GeneratorConstants{lbar, std::log(1.0 / lam) - lbar, 1.0,
                                         lbar * lbar / lam, 0.5, lbar / (8.0 * lam)};
    } else if (name == "js") {
        g.eval = [](double t) { return detail::skew_js_eval(0.5, t); };
        const double h = 0.5 * std::log(2.0);
        g.f_at_zero = h;
        g.fstar_at_zero = h;
        g.constants = GeneratorConstants{h, h, 0.5, 0.5, 0.25, 0.25};
    } else if (name == "skew_js") {
        const double lam = *lambda, lbar = 1.0 - lam;
        g.eval = [lam](double t) { return detail::skew_js_eval(lam, t); };
        g.f_at_zero = lbar * std::log(1.0 / lbar);
        g.fstar_at_zero = lam * std::log(1.0 / lam);
        g.constants = GeneratorConstants{lbar * std::log(1.0 / lbar), lam * std::log(1.0 / lam),
                                         lam, lbar, lam / 2.0, lbar / 2.0};
    } else if (name == "chi2") {
        g.eval = [](double t) { return (t - 1.0) * (t - 1.0); };
        g.f_at_zero = 1.0;
        g.fstar_at_zero = kInf;
    } else if (name == "interp_chi2") {
        const double lam = *lambda, lbar = 1.0 - lam;
        g.eval = [lam, lbar](double t) { return (t - 1.0) * (t - 1.0) / (lam * t + lbar); };
        g.f_at_zero = 1.0 / lbar;
        g.fstar_at_zero = 1.0 / lam;
        g.constants = GeneratorConstants{1.0 / lbar, 1.0 / lam, 2.0 / (lbar * lbar),
                                         2.0 / (lam * lam), 4.0 / (27.0 * lam * lbar * lbar),
                                         4.0 / (27.0 * lam * lam * lbar)};
    } else if (name == "lecam") {
        g.eval = [](double t) { return (t - 1.0) * (t - 1.0) / (2.0 * (t + 1.0)); };
        g.f_at_zero = 0.5;
        g.fstar_at_zero = 0.5;
        g.constants = GeneratorConstants{0.5, 0.5, 2.0, 2.0, 8.0 / 27.0, 8.0 / 27.0};
    } else if (name == "fi_kl") {
        g.eval = detail::fi_kl_eval;
        g.f_at_zero = 0.5;
        g.fstar_at_zero = 0.5;
        g.constants = GeneratorConstants{0.5, 0.5, 4.0, 4.0, 0.5, 0.5};
    } else if (name == "fi_chi2") {
        g.eval = detail::fi_chi2_eval;
        g.f_at_zero = 1.0;
        g.fstar_at_zero = 1.0;
        g.constants = GeneratorConstants{1.0, 1.0, 8.0, 8.0, 1.0, 1.0};
    } else if (name == "tv") {
        g.eval = [](double t) { return 0.5 * std::fabs(t - 1.0); };
        g.f_at_zero = 0.5;
        g.fstar_at_zero = 0.5;
    } else if (name == "sq_hellinger") {
        g.eval = [](double t) {
            const double s = std::sqrt(t) - 1.0;
            return s * s;
        };
        g.f_at_zero = 1.0;
        g.fstar_at_zero = 1.0;
    } else {
        throw std::invalid_argument("make_generator: unknown generator '" + std::string(name) +
                                    "'");
    }
    return g;
}

}  // namespace dfe
