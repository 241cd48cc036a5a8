#pragma once

#include <functional>
#include <vector>
#include "horolab/common.hpp"

namespace hl {

// two-sample Kolmogorov-Smirnov sup distance (unweighted)
double ks_distance(std::vector<double> a, std::vector<double> b);

// sample vs continuous CDF
double ks_distance(std::vector<double> a, const std::function<double(double)>& cdf);

// two weighted samples; weights are importance weights, self-normalized
double ks_distance_weighted(std::vector<std::pair<double, double>> a,
                            std::vector<std::pair<double, double>> b);

struct FitResult {
    double slope = 0;
    double intercept = 0;
    double slope_stderr = 0;
    double r2 = 0;
};

// ordinary least squares y = intercept + slope * x
FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// fit log y = c + p log x; requires positive data
FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

// chi-square statistic against uniform expectation over bins
double chi_square_uniform(const std::vector<std::size_t>& counts);

// mean and standard error of the mean
std::pair<double, double> mean_stderr(const std::vector<double>& v);

} // namespace hl
