// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "gtagc/error.hpp"
#include "gtagc/training.hpp"

namespace gtagc {

AdamState AdamState::for_params(const EncoderParams& params) {
  AdamState s;
  s.m = params.zeros_like();
  s.v = params.zeros_like();
  return s;
}

void adam_step(EncoderParams& params, const EncoderParams& grads, AdamState& state, double lr) {
  std::vector<const Matrix*> g;
  std::vector<Matrix*> m, v;
  grads.for_each([&g](const std::string&, const Matrix& t) { g.push_back(&t); });
  state.m.for_each([&m](const std::string&, Matrix& t) { m.push_back(&t); });
  state.v.for_each([&v](const std::string&, Matrix& t) { v.push_back(&t); });

  std::size_t idx = 0;
  params.for_each([&](const std::string& name, const Matrix& t) {
    if (idx >= g.size() || idx >= m.size() || idx >= v.size() || g[idx]->rows() != t.rows() ||
        g[idx]->cols() != t.cols() || m[idx]->rows() != t.rows() || m[idx]->cols() != t.cols() ||
        v[idx]->rows() != t.rows() || v[idx]->cols() != t.cols())
      throw Error(ErrorKind::DimensionMismatch, "Adam shape mismatch at " + name);
    ++idx;
  });
  if (idx != g.size()) throw Error(ErrorKind::DimensionMismatch, "Adam tensor count mismatch");

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  idx = 0;
  params.for_each([&](const std::string& name, Matrix& t) {
    Matrix& mt = *m[idx];
    Matrix& vt = *v[idx];
    const Matrix& gt = *g[idx];
    mt = state.beta1 * mt + (1.0 - state.beta1) * gt;
    vt = state.beta2 * vt + (1.0 - state.beta2) * gt.cwiseAbs2();
    t.array() -= lr * (mt.array() / bc1) / ((vt.array() / bc2).sqrt() + state.eps);
    if (!t.allFinite()) throw Error(ErrorKind::NonFinite, "parameter " + name + " became non-finite");
    ++idx;
  });
}

}  // namespace gtagc
