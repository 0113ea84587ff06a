// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "gtagc/error.hpp"
#include "gtagc/model.hpp"

namespace gtagc {

Matrix scaled_dot_attention(const Matrix& q, const Matrix& k, const Matrix& v) {
  if (q.cols() == 0 || k.cols() == 0) throw Error(ErrorKind::InvalidArgument, "key width d_k must be positive");
  if (q.cols() != k.cols())
    throw Error(ErrorKind::DimensionMismatch, "query width " + std::to_string(q.cols()) +
                                                  " differs from key width " + std::to_string(k.cols()));
  if (k.rows() != v.rows())
    throw Error(ErrorKind::DimensionMismatch, "keys have " + std::to_string(k.rows()) +
                                                  " rows but values have " + std::to_string(v.rows()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(k.cols()));
  return row_softmax(scale * (q * k.transpose())) * v;
}

}  // namespace gtagc
