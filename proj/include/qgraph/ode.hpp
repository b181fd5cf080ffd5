#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "qgraph/matrix.hpp"
#include "qgraph/potential.hpp"
#include "qgraph/spectral_point.hpp"

namespace qgraph {

// Dormand-Prince 5(4) with the classical 4th-order continuous extension,
// specialized to the first-order 2m x 2m system for the fundamental
// solutions C(x,z), S(x,z) of -Y'' + Q Y = z Y with
// C(0)=S'(0)=I, S(0)=C'(0)=0.  Optionally the two lead integrals
//   IS(x) = int_0^x e^{i t sqrt(z)} Q(t) S(t,z) dt,
//   IC(x) = int_0^x e^{i t sqrt(z)} Q(t) C(t,z) dt
// are carried along as extra quadrature state under the same error control.

namespace dp5 {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp5

struct DenseStep {
  double x0 = 0.0;
  double h = 0.0;
  // y(x0 + t*h) = r1 + t*(r2 + (1-t)*(r3 + t*(r4 + (1-t)*r5)))
  Vector r1, r2, r3, r4, r5;

  Vector eval(double x) const {
    double t = (x - x0) / h;
    return r1 + t * (r2 + (1.0 - t) * (r3 + t * (r4 + (1.0 - t) * r5)));
  }
};

struct FundamentalSample {
  double x = 0.0;
  Matrix C, S, Cp, Sp;
};

class FundamentalSystem {
public:
  int m = 0;
  SpectralPoint z;
  double achieved_tolerance = 0.0;
  bool has_lead_integrals = false;
  std::vector<FundamentalSample> samples;
  std::vector<DenseStep> steps;

  double x_end() const { return steps.empty() ? 0.0 : steps.back().x0 + steps.back().h; }

  FundamentalSample at(double x) const {
    if (steps.empty()) {
      if (x != 0.0) throw OutOfRange("empty fundamental system");
      return initial_sample();
    }
    if (x < -1e-12 || x > x_end() * (1.0 + 1e-12) + 1e-12)
      throw OutOfRange("x outside integrated range");
    x = std::clamp(x, 0.0, x_end());
    auto it = std::upper_bound(steps.begin(), steps.end(), x,
                               [](double v, const DenseStep& s) { return v < s.x0; });
    size_t idx = (it == steps.begin()) ? 0 : static_cast<size_t>(it - steps.begin()) - 1;
    return unpack(x, steps[idx].eval(x));
  }

  // quadrature state at the end of integration
  Matrix lead_integral_S() const { return block(final_state_, 4); }
  Matrix lead_integral_C() const { return block(final_state_, 5); }

  FundamentalSample initial_sample() const {
    FundamentalSample s;
    s.x = 0.0;
    s.C = Matrix::Identity(m, m);
    s.S = Matrix::Zero(m, m);
    s.Cp = Matrix::Zero(m, m);
    s.Sp = Matrix::Identity(m, m);
    return s;
  }

  Matrix block(const Vector& y, int b) const {
    return Eigen::Map<const Matrix>(y.data() + b * m * m, m, m);
  }

  FundamentalSample unpack(double x, const Vector& y) const {
    FundamentalSample s;
    s.x = x;
    s.C = block(y, 0);
    s.S = block(y, 1);
    s.Cp = block(y, 2);
    s.Sp = block(y, 3);
    return s;
  }

  Vector final_state_;
};

inline FundamentalSystem fundamental_system(const EdgePotential& potential,
                                            const SpectralPoint& z, double x_end,
                                            double rel_tol = 1e-10,
                                            bool with_lead_integrals = false) {
  if (!(x_end > 0.0)) throw OutOfRange("x_end must be positive");
  if (rel_tol < 1e-14 || rel_tol > 1e-4)
    throw OutOfRange("rel_tol outside [1e-14, 1e-4]");
  const int m = potential.dim() > 0 ? potential.dim() : 1;
  const int nblocks = with_lead_integrals ? 6 : 4;
  const int n = nblocks * m * m;
  const cd zz = z.z;
  const cd sz = sqrt_branch(z);

  FundamentalSystem fs;
  fs.m = m;
  fs.z = z;
  fs.has_lead_integrals = with_lead_integrals;
  fs.achieved_tolerance = rel_tol;

  auto blk = [m](Vector& y, int b) {
    return Eigen::Map<Matrix>(y.data() + b * m * m, m, m);
  };
  auto cblk = [m](const Vector& y, int b) {
    return Eigen::Map<const Matrix>(y.data() + b * m * m, m, m);
  };

  auto deriv = [&](double x, const Vector& y, Vector& dy) {
    dy.resize(n);
    Matrix q = potential.eval(x);
    auto C = cblk(y, 0), S = cblk(y, 1), Cp = cblk(y, 2), Sp = cblk(y, 3);
    blk(dy, 0) = Cp;
    blk(dy, 1) = Sp;
    blk(dy, 2) = q * C - zz * C;
    blk(dy, 3) = q * S - zz * S;
    if (with_lead_integrals) {
      cd phase = std::exp(cd(0, 1) * sz * x);
      blk(dy, 4) = phase * (q * S);
      blk(dy, 5) = phase * (q * C);
    }
  };

  Vector y = Vector::Zero(n);
  blk(y, 0).setIdentity();
  blk(y, 3).setIdentity();
  fs.samples.push_back(fs.unpack(0.0, y));

  // force step boundaries onto potential breakpoints to preserve order
  std::vector<double> seg{0.0, x_end};
  for (double b : potential.breakpoints())
    if (b > 1e-14 && b < x_end - 1e-14) seg.push_back(b);
  std::sort(seg.begin(), seg.end());
  seg.erase(std::unique(seg.begin(), seg.end()), seg.end());

  const double atol = rel_tol;
  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), err(n), ytmp(n);

  for (size_t si = 0; si + 1 < seg.size(); ++si) {
    double x = seg[si];
    const double xstop = seg[si + 1];
    double h = std::min(xstop - x, 0.1);
    deriv(x, y, k1);
    bool first = true;
    while (x < xstop) {
      h = std::min(h, xstop - x);
      if (h < 1e-14 * std::max(1.0, xstop))
        throw StepSizeUnderflow("step size underflow (|z| or potential too large)");
      using namespace dp5;
      ytmp = y + h * (a21 * k1);
      deriv(x + c2 * h, ytmp, k2);
      ytmp = y + h * (a31 * k1 + a32 * k2);
      deriv(x + c3 * h, ytmp, k3);
      ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      deriv(x + c4 * h, ytmp, k4);
      ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      deriv(x + c5 * h, ytmp, k5);
      ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      deriv(x + h, ytmp, k6);
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      deriv(x + h, ynew, k7);  // FSAL
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double errnorm = 0.0;
      for (int i = 0; i < n; ++i) {
        double sc = atol + rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
        double r = std::abs(err(i)) / sc;
        errnorm += r * r;
      }
      errnorm = std::sqrt(errnorm / n);

      if (errnorm <= 1.0) {
        DenseStep st;
        st.x0 = x;
        st.h = h;
        st.r1 = y;
        st.r2 = ynew - y;
        st.r3 = h * k1 - st.r2;
        st.r4 = st.r2 - h * k7 - st.r3;
        st.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        fs.steps.push_back(std::move(st));
        x += h;
        y.swap(ynew);
        k1.swap(k7);
        fs.samples.push_back(fs.unpack(x, y));
        first = false;
      }
      double fac = 0.9 * std::pow(std::max(errnorm, 1e-16), -0.2);
      fac = std::clamp(fac, 0.2, first ? 5.0 : 5.0);
      h *= fac;
    }
  }
  fs.samples.back().x = x_end;  // clamp rounding
  fs.final_state_ = y;
  return fs;
}

inline FundamentalSample endpoint_values(const FundamentalSystem& fs, double x) {
  return fs.at(x);
}

}  // namespace qgraph
