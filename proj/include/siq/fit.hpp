#pragma once

// Curve fitting helpers shared by the experiment drivers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace siq {

/// Residual function r(x) for nonlinear least squares; must fill all entries.
using ResidualFn = std::function<void(const Eigen::VectorXd &params, Eigen::VectorXd &residuals)>;

struct LeastSquaresResult {
    Eigen::VectorXd params;
    /// s^2 (J^T J)^-1 with s^2 = SSR / (n - p); zero when n == p.
    Eigen::MatrixXd covariance;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;

    double stderr_of(int i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }
};

/// Thrown when an iterative fit does not converge; carries the best point found.
class FitError : public std::runtime_error {
  public:
    FitError(const std::string &what, LeastSquaresResult best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const LeastSquaresResult &best_so_far() const { return best_; }

  private:
    LeastSquaresResult best_;
};

struct LeastSquaresOptions {
    int max_function_evals = 4000;
    double tolerance = 1e-12;
};

/// Levenberg-Marquardt with a central-difference Jacobian. Never throws on
/// non-convergence; inspect `converged`.
LeastSquaresResult least_squares(const ResidualFn &fn, const Eigen::VectorXd &x0, int n_residuals,
                                 const LeastSquaresOptions &opts = {});

struct LinearFit {
    double slope = 0, intercept = 0;
    double slope_stderr = 0, intercept_stderr = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// y = A p^N + B
struct DecayFit {
    double A = 0, B = 0, p = 0;
    double p_stderr = 0;
    double residual_norm = 0;
};
/// Fits y = A p^x + B. Throws FitError with the raw best-so-far on failure.
DecayFit fit_exponential_decay(std::span<const double> x, std::span<const double> y);

/// y = B + A exp(-(x/T)^2)
struct GaussianDecayFit {
    double A = 0, B = 0, T = 0;
    double T_stderr = 0;
};
GaussianDecayFit fit_gaussian_decay(std::span<const double> x, std::span<const double> y);

/// y = B + A cos(2 pi f x + phi)
struct SinusoidFit {
    double A = 0, B = 0, frequency = 0, phase = 0;
    double frequency_stderr = 0;
};
/// Frequency is seeded by a dense periodogram scan over (0, f_max], f_max
/// defaulting to the Nyquist rate of the (assumed uniform) grid.
SinusoidFit fit_sinusoid(std::span<const double> x, std::span<const double> y, double f_max = 0.0);

}  // namespace siq
