#include "kaclab/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace kaclab {

FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& sigma) {
    const std::size_t n = x.size();
    if (n != y.size() || (!sigma.empty() && sigma.size() != n))
        throw std::invalid_argument("fit_linear: size mismatch");
    if (n < 2) throw std::invalid_argument("fit_linear: need at least 2 points");

    double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (!sigma.empty() && sigma[i] > 0.0) w = 1.0 / (sigma[i] * sigma[i]);
        s += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    const double det = s * sxx - sx * sx;
    if (!(std::abs(det) > 1e-300))
        throw std::invalid_argument("fit_linear: degenerate design matrix");

    FitResult out;
    out.slope = (s * sxy - sx * sy) / det;
    out.intercept = (sxx * sy - sx * sxy) / det;
    // Covariance of the WLS estimator: (X^T W X)^{-1}.
    out.slope_stderr = std::sqrt(s / det);
    out.intercept_stderr = std::sqrt(sxx / det);
    out.cov_slope_intercept = -sx / det;
    return out;
}

FitResult fit_powerlaw(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& sigma_y) {
    const std::size_t n = x.size();
    if (n != y.size() || (!sigma_y.empty() && sigma_y.size() != n))
        throw std::invalid_argument("fit_powerlaw: size mismatch");
    if (n < 3) throw std::invalid_argument("fit_powerlaw: need at least 3 points");

    std::vector<double> lx(n), ly(n), ls;
    if (!sigma_y.empty()) ls.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_powerlaw: needs positive x and y");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        if (!sigma_y.empty()) {
            const double rel = sigma_y[i] / y[i];
            if (rel > 0.5)
                throw std::invalid_argument(
                    "fit_powerlaw: relative error above 0.5, log-space fit unreliable");
            ls[i] = rel;
        }
    }
    return fit_linear(lx, ly, ls);
}

} // namespace kaclab
