#pragma once

namespace arspi {

// Gamma distribution in shape/scale form: mean = shape * scale.
struct GammaParams {
    double shape = 1.0;
    double scale = 1.0;
};

// Throws DomainError unless both fields are finite and strictly positive.
void validate(const GammaParams& params);

double gamma_logpdf(double y, const GammaParams& params);

// Regularized lower incomplete gamma P(shape, y / scale). Series expansion
// for y/scale < shape + 1, Lentz continued fraction otherwise; both are
// iterated to machine-level convergence (well below 1e-14 relative).
double gamma_cdf(double y, const GammaParams& params);

// Density of exp(N(location, scale^2)) evaluated at y > 0.
double lognormal_logpdf(double y, double location, double scale);

double normal_logpdf(double x, double mean, double sd);

// Inverse gamma with density proportional to x^{-shape-1} exp(-scale / x).
double inv_gamma_logpdf(double x, double shape, double scale);

// Exponential with rate parameter (mean 1 / rate).
double exponential_logpdf(double x, double rate);

// Standard normal CDF via erfc; accurate in both tails.
double std_normal_cdf(double x);

// Inverse standard normal CDF: Acklam's rational approximation polished by
// one Halley step. Arguments outside (0, 1) throw DomainError; callers clamp
// probabilities before inversion when finiteness is required.
double std_normal_quantile(double u);

double logit(double p);

// Numerically stable sigmoid and log-sigmoid (the latter never overflows
// and equals -softplus(-x)).
double inv_logit(double x);
double log_inv_logit(double x);

}  // namespace arspi
