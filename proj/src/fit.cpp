#include "siq/fit.hpp"

#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace siq {

namespace {

struct ResidualFunctor : Eigen::DenseFunctor<double> {
    ResidualFunctor(const ResidualFn &fn, int n_params, int n_residuals)
        : Eigen::DenseFunctor<double>(n_params, n_residuals), fn_(fn) {}
    int operator()(const InputType &x, ValueType &r) const {
        fn_(x, r);
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            if (!std::isfinite(r[i])) r[i] = 1e150;
        }
        return 0;
    }
    const ResidualFn &fn_;
};

Eigen::MatrixXd jacobian_at(const ResidualFn &fn, const Eigen::VectorXd &x, int m) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd jac(m, n);
    Eigen::VectorXd rp(m), rm(m);
    for (int j = 0; j < n; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        fn(xp, rp);
        fn(xm, rm);
        jac.col(j) = (rp - rm) / (2 * h);
    }
    return jac;
}

}  // namespace

LeastSquaresResult least_squares(const ResidualFn &fn, const Eigen::VectorXd &x0, int n_residuals,
                                 const LeastSquaresOptions &opts) {
    const int n = static_cast<int>(x0.size());
    ResidualFunctor functor(fn, n, n_residuals);
    Eigen::NumericalDiff<ResidualFunctor, Eigen::Central> numdiff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ResidualFunctor, Eigen::Central>> lm(numdiff);
    lm.setMaxfev(opts.max_function_evals);
    lm.setXtol(opts.tolerance);
    lm.setFtol(opts.tolerance);

    Eigen::VectorXd x = x0;
    const auto status = lm.minimize(x);

    LeastSquaresResult out;
    out.params = x;
    out.iterations = static_cast<int>(lm.iterations());
    out.converged = status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                    status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters;

    Eigen::VectorXd r(n_residuals);
    fn(x, r);
    out.residual_norm = r.norm();
    out.converged = out.converged && std::isfinite(out.residual_norm);

    const Eigen::MatrixXd jac = jacobian_at(fn, x, n_residuals);
    const int dof = n_residuals - n;
    const double s2 = dof > 0 ? r.squaredNorm() / dof : 0.0;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    out.covariance = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    return out;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit: need at least two paired points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("linear_fit: degenerate abscissa");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ssr = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = y[i] - f.intercept - f.slope * x[i];
            ssr += e * e;
        }
        const double s2 = ssr / (n - 2);
        f.slope_stderr = std::sqrt(s2 / sxx);
        f.intercept_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    }
    return f;
}

DecayFit fit_exponential_decay(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    if (n < 3 || y.size() != x.size()) throw std::invalid_argument("fit_exponential_decay: need >= 3 points");

    // Seed: B from the tail, p from a log-linear fit of the early points.
    const double y_last = y.back();
    const double B0 = std::min(y_last, 0.5);
    std::vector<double> lx, ly;
    for (int i = 0; i < n; ++i) {
        const double d = y[i] - B0;
        if (d > 1e-9) {
            lx.push_back(x[i]);
            ly.push_back(std::log(d));
        }
    }
    double p0 = 0.99, A0 = y.front() - B0;
    if (lx.size() >= 2) {
        const auto lf = linear_fit(lx, ly);
        p0 = std::clamp(std::exp(lf.slope), 0.5, 1.0);
        A0 = std::exp(lf.intercept);
    }

    ResidualFn fn = [&](const Eigen::VectorXd &q, Eigen::VectorXd &r) {
        for (int i = 0; i < n; ++i) r[i] = q[0] * std::pow(q[2], x[i]) + q[1] - y[i];
    };
    Eigen::VectorXd q0(3);
    q0 << A0, B0, p0;
    auto res = least_squares(fn, q0, n);
    DecayFit out{res.params[0], res.params[1], res.params[2], res.stderr_of(2), res.residual_norm};
    if (!res.converged || !(out.p > 0)) {
        throw FitError("exponential decay fit did not converge", res);
    }
    return out;
}

GaussianDecayFit fit_gaussian_decay(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    if (n < 4 || y.size() != x.size()) throw std::invalid_argument("fit_gaussian_decay: need >= 4 points");
    const double B0 = y.back();
    const double A0 = y.front() - B0;
    // Seed T at the 1/e crossing.
    double T0 = x.back() / 2;
    for (int i = 0; i < n; ++i) {
        if (std::abs(y[i] - B0) < std::abs(A0) / std::exp(1.0)) {
            T0 = std::max(x[i], 1e-30);
            break;
        }
    }
    ResidualFn fn = [&](const Eigen::VectorXd &q, Eigen::VectorXd &r) {
        for (int i = 0; i < n; ++i) {
            const double u = x[i] / q[2];
            r[i] = q[1] + q[0] * std::exp(-u * u) - y[i];
        }
    };
    Eigen::VectorXd q0(3);
    q0 << A0, B0, T0;
    auto res = least_squares(fn, q0, n);
    if (!res.converged) throw FitError("gaussian decay fit did not converge", res);
    return {res.params[0], res.params[1], std::abs(res.params[2]), res.stderr_of(2)};
}

SinusoidFit fit_sinusoid(std::span<const double> x, std::span<const double> y, double f_max) {
    const int n = static_cast<int>(x.size());
    if (n < 5 || y.size() != x.size()) throw std::invalid_argument("fit_sinusoid: need >= 5 points");
    const double span = x.back() - x.front();
    if (f_max <= 0) f_max = 0.5 * (n - 1) / span;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;

    // Periodogram scan for the seed frequency.
    const int n_scan = std::max(200, 20 * n);
    double best_f = 0, best_pow = -1;
    for (int k = 1; k <= n_scan; ++k) {
        const double f = f_max * k / n_scan;
        double c = 0, s = 0;
        for (int i = 0; i < n; ++i) {
            c += (y[i] - mean) * std::cos(6.283185307179586 * f * x[i]);
            s += (y[i] - mean) * std::sin(6.283185307179586 * f * x[i]);
        }
        const double pw = c * c + s * s;
        if (pw > best_pow) {
            best_pow = pw;
            best_f = f;
        }
    }
    // Linear solve for amplitude and phase at the seed frequency.
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        design(i, 0) = std::cos(6.283185307179586 * best_f * x[i]);
        design(i, 1) = std::sin(6.283185307179586 * best_f * x[i]);
        design(i, 2) = 1.0;
        rhs[i] = y[i];
    }
    const Eigen::Vector3d lin = design.colPivHouseholderQr().solve(rhs);
    const double A0 = std::hypot(lin[0], lin[1]);
    const double phi0 = std::atan2(-lin[1], lin[0]);

    ResidualFn fn = [&](const Eigen::VectorXd &q, Eigen::VectorXd &r) {
        for (int i = 0; i < n; ++i) r[i] = q[1] + q[0] * std::cos(6.283185307179586 * q[2] * x[i] + q[3]) - y[i];
    };
    Eigen::VectorXd q0(4);
    q0 << A0, lin[2], best_f, phi0;
    auto res = least_squares(fn, q0, n);
    if (!res.converged) throw FitError("sinusoid fit did not converge", res);
    SinusoidFit out{res.params[0], res.params[1], res.params[2], res.params[3], res.stderr_of(2)};
    if (out.A < 0) {
        out.A = -out.A;
        out.phase += 3.141592653589793;
    }
    return out;
}

}  // namespace siq
