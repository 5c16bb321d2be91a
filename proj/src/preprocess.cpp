#include "msvar/preprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace msvar {

Vec detrend_ma12(const Vec& series) {
  const Eigen::Index n = series.size();
  if (n <= 12)
    throw std::invalid_argument("detrend_ma12: need more than 12 observations");
  Vec out(n - 12);
  double window = series.head(12).sum();
  for (Eigen::Index t = 12; t < n; ++t) {
    out[t - 12] = series[t] - window / 12.0;
    window += series[t] - series[t - 12];
  }
  return out;
}

Vec standardize(const Vec& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw std::invalid_argument("standardize: series too short");
  const double mean = series.mean();
  const double sd =
      std::sqrt((series.array() - mean).square().sum() /
                static_cast<double>(n - 1));
  if (!(sd > 0.0))
    throw std::invalid_argument("standardize: zero variance");
  return (series.array() - mean) / sd;
}

DatasetT preprocess_dataset(const DatasetT& data) {
  DatasetT out;
  out.labels = data.labels;
  out.xlabels = data.xlabels;
  const Eigen::Index n = data.rows() - 12;
  if (n < 2) throw std::invalid_argument("preprocess: sample too short");
  out.y.resize(n, data.y.cols());
  for (Eigen::Index j = 0; j < data.y.cols(); ++j)
    out.y.col(j) = standardize(detrend_ma12(data.y.col(j)));
  if (data.x.cols() > 0) {
    out.x.resize(n, data.x.cols());
    for (Eigen::Index j = 0; j < data.x.cols(); ++j)
      out.x.col(j) = standardize(detrend_ma12(data.x.col(j)));
  }
  if (!data.dates.empty())
    out.dates.assign(data.dates.begin() + 12, data.dates.end());
  return out;
}

}  // namespace msvar
