#pragma once

#include <vector>

namespace nct {

struct FitPoint {
    double N = 0.0;
    double value = 0.0;
    double stderr_ = 0.0;  // 0 means unit weight
};

struct FitResult {
    double a0 = 0.0;
    double a1 = 0.0;
    std::vector<double> residuals;
    bool o4_consistent = false;  // residual ratio test across the two largest N
};

// Weighted least squares of value ~ a0 + a1 / N^2. Requires >= 3 distinct N.
FitResult fit_inverse_square(const std::vector<FitPoint>& points);

}  // namespace nct
