#pragma once

#include "msvar/model.hpp"

namespace msvar {

/// out_t = x_t - mean(x_{t-12..t-1}); the first 12 observations are dropped.
Vec detrend_ma12(const Vec& series);

/// Rescale to sample mean 0 and standard deviation 1 (n-1 denominator).
Vec standardize(const Vec& series);

/// Column-wise detrend + standardize of every series, dropping the first 12
/// rows (dates included).
DatasetT preprocess_dataset(const DatasetT& data);

}  // namespace msvar
