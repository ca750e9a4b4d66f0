#pragma once

#include <vector>

namespace kaclab {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double cov_slope_intercept = 0.0;
};

/// Weighted least squares y = intercept + slope * x; sigma.empty() or
/// nonpositive entries mean unit weights.
FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& sigma = {});

/// Power-law fit y = exp(intercept) * x^slope by WLS in log-log space.
/// Requires >= 3 points with x, y > 0; refuses fits where any log-y error
/// sigma_y / y exceeds 0.5.
FitResult fit_powerlaw(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& sigma_y = {});

} // namespace kaclab
