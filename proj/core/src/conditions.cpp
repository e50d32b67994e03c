#include "mfg/conditions.hpp"

#include <cmath>
#include <limits>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Product in which a zero factor wins over an infinite one.
double mul(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

// f = 1 gives the continuous constants up to the (1 - alpha beta) / (1 - beta) choice.
ContractionConstants assemble(const DeclaredConstants& c, double beta, double f, double k1_discount,
                              double k_floor) {
    if (!(c.rho > 0.0)) throw DegenerateConstants("rho must be positive");
    if (!(k1_discount > 0.0)) throw DegenerateConstants("discount factor makes 1 - alpha beta vanish");
    const double beta_k2 = beta * c.K2 * f;
    if (!(beta_k2 < 1.0)) throw DegenerateConstants("beta * K2 must be below 1");

    const double ratio = c.K_F / c.rho;
    const double interaction = mul(ratio * f + 1.0, c.K2 * f + c.K1);

    ContractionConstants out;
    out.k1 = mul(mul(c.K_F, c.K1), f) / (c.rho * k1_discount);
    const double denom = c.L1 + beta * f * mul(c.L2, c.K1) / (1.0 - beta_k2);
    const double numer = 1.0 - interaction;
    out.k2 = denom > 0.0 ? numer / denom : (numer > 0.0 ? kInf : -kInf);
    out.k = std::max(k_floor, interaction);
    return out;
}

}  // namespace

ContractionConstants compute_constants(const DeclaredConstants& c, double beta) {
    const double ab = c.alpha * beta;
    if (!(ab < 1.0)) throw DegenerateConstants("alpha * beta must be below 1");
    return assemble(c, beta, 1.0, 1.0 - ab, ab);
}

ContractionConstants compute_constants(const ModelSpec& model) { return compute_constants(model.constants, model.beta); }

ContractionConstants compute_quantized_constants(const DeclaredConstants& c, double beta, double n) {
    if (!(n > 0.0)) throw DegenerateConstants("n must be positive");
    return assemble(c, beta, 1.0 + 2.0 / n, 1.0 - beta, beta);
}

ContractionConstants compute_quantized_constants(const ModelSpec& model, double n) {
    return compute_quantized_constants(model.constants, model.beta, n);
}

ContractionConstants quantized_limit(const DeclaredConstants& c, double beta) {
    return assemble(c, beta, 1.0, 1.0 - beta, beta);
}

double default_gamma(const ContractionConstants& c) {
    if (std::isinf(c.k2)) return c.k1 < 1.0 ? 1.0 : 2.0 * c.k1;
    return 0.5 * (c.k1 + c.k2);
}

namespace {

QuantizedRecord quantized_record(const ModelSpec& model, std::size_t n) {
    QuantizedRecord r;
    r.n = n;
    try {
        r.constants = compute_quantized_constants(model, static_cast<double>(n));
        r.holds = r.constants.holds();
    } catch (const DegenerateConstants&) {
        r.constants = {kInf, -kInf, kInf};
        r.holds = false;
    }
    return r;
}

}  // namespace

ConditionReport certify(const ModelSpec& model, std::optional<std::size_t> n, std::size_t scan_cap) {
    ConditionReport rep;
    rep.scan_cap = scan_cap;
    const DeclaredConstants& c = model.constants;

    try {
        rep.continuous = compute_constants(model);
        rep.theorem1_holds = rep.continuous.holds();
    } catch (const DegenerateConstants&) {
        rep.continuous = {kInf, -kInf, kInf};
        rep.theorem1_holds = false;
    }
    if (rep.continuous.k1 < rep.continuous.k2) rep.gamma_feasible_interval = {{rep.continuous.k1, rep.continuous.k2}};
    if (rep.theorem1_holds) rep.default_gamma = default_gamma(rep.continuous);

    try {
        rep.quantized_limit = quantized_limit(c, model.beta);
        rep.limit_holds = rep.quantized_limit.holds();
    } catch (const DegenerateConstants&) {
        rep.quantized_limit = {kInf, -kInf, kInf};
        rep.limit_holds = false;
    }
    if (c.rho > 0.0) {
        rep.k1_alpha_form = mul(c.K_F, c.K1) / (c.rho * (1.0 - c.alpha * model.beta));
        rep.k1_one_minus_beta_form = mul(c.K_F, c.K1) / (c.rho * (1.0 - model.beta));
    } else {
        rep.k1_alpha_form = rep.k1_one_minus_beta_form = kInf;
    }

    if (n) rep.quantized.push_back(quantized_record(model, *n));

    // The quantized conditions are monotone in n, so bisection finds the first n.
    if (scan_cap >= 1 && quantized_record(model, scan_cap).holds) {
        std::size_t lo = 0, hi = scan_cap;  // holds(hi), lo fails or is 0
        if (quantized_record(model, 1).holds) hi = 1;
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (quantized_record(model, mid).holds) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        rep.smallest_certified_n = hi;
        if (!n || *n != hi) rep.quantized.push_back(quantized_record(model, hi));
    }
    return rep;
}

}  // namespace mfg
