#include "rosb/estimator.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace rosb {

SlidingLs::SlidingLs(int window) : window_(window) {
  if (window < 3) throw std::invalid_argument("SlidingLs: window must be >= 3");
}

void SlidingLs::push(const Measurement& m) {
  buf_.push_back(m);
  while (buf_.size() > static_cast<std::size_t>(window_)) buf_.pop_front();
}

Estimate SlidingLs::solve() const {
  const std::size_t m = buf_.size();
  if (m < 3) throw InsufficientData("SlidingLs::solve: need at least 3 measurements");

  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Measurement& mi = buf_[i];
    a(i, 0) = 2.0 * mi.p.x;
    a(i, 1) = 2.0 * mi.p.y;
    a(i, 2) = -1.0;
    b(i) = mi.p.squared_norm() - mi.range_p * mi.range_p;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();

  Estimate est;
  const double smin = sv(2);
  const double ratio = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  est.condition = ratio * ratio;  // cond of A^T A
  if (!(est.condition < kMaxCondition)) {
    est.valid = false;
    return est;
  }

  const Eigen::Vector3d x = svd.solve(b);
  est.q_hat = {x(0), x(1)};
  est.aux = x(2);
  est.valid = est.q_hat.finite();

  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = (buf_[i].p - est.q_hat).norm() - buf_[i].range_p;
    ss += r * r;
  }
  est.residual_rms = std::sqrt(ss / static_cast<double>(m));
  return est;
}

}  // namespace rosb
