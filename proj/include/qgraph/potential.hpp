#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "qgraph/matrix.hpp"

namespace qgraph {

// Hermitian-matrix-valued potential x -> Q(x) on an edge, x >= 0 in the
// edge-local coordinate.  Closed-form kinds carry exact supports; sampled
// potentials interpolate linearly between grid points and vanish outside
// the grid.
class EdgePotential {
public:
  enum class Kind { zero, constant, piecewise_constant, gaussian_bumps, sampled };

  struct Bump {
    double center = 0.0;
    double width = 1.0;
    Matrix amplitude;
  };

  EdgePotential() = default;

  static EdgePotential zero(int m) {
    EdgePotential p;
    p.kind_ = Kind::zero;
    p.m_ = m;
    p.support_end_ = 0.0;
    return p;
  }

  // Q = value on [0, support_end), zero beyond.
  static EdgePotential constant(const Matrix& value, double support_end) {
    EdgePotential p;
    p.kind_ = Kind::constant;
    p.m_ = static_cast<int>(value.rows());
    p.require_hermitian(value);
    p.constant_ = value;
    p.support_end_ = support_end;
    return p;
  }

  // Q = values[i] on [breaks[i], breaks[i+1]); breaks has size values+1,
  // strictly increasing, breaks.front() >= 0.  Zero outside.
  static EdgePotential piecewise_constant(std::vector<double> breaks,
                                          std::vector<Matrix> values) {
    EdgePotential p;
    p.kind_ = Kind::piecewise_constant;
    if (breaks.size() != values.size() + 1 || values.empty())
      throw DimensionMismatch("piecewise_constant: breaks must have size values+1");
    for (size_t i = 0; i + 1 < breaks.size(); ++i)
      if (!(breaks[i] < breaks[i + 1]))
        throw UnsortedPoints("piecewise_constant: breaks not strictly increasing");
    p.m_ = static_cast<int>(values.front().rows());
    for (const auto& v : values) p.require_hermitian(v);
    p.breaks_ = std::move(breaks);
    p.values_ = std::move(values);
    p.support_end_ = p.breaks_.back();
    return p;
  }

  // Q(x) = sum_k A_k exp(-(x-c_k)^2 / (2 w_k^2)).
  static EdgePotential gaussian_bumps(std::vector<Bump> bumps) {
    EdgePotential p;
    p.kind_ = Kind::gaussian_bumps;
    if (bumps.empty()) throw DimensionMismatch("gaussian_bumps: no bumps");
    p.m_ = static_cast<int>(bumps.front().amplitude.rows());
    double end = 0.0;
    for (const auto& b : bumps) {
      p.require_hermitian(b.amplitude);
      if (b.width <= 0.0) throw OutOfRange("gaussian_bumps: nonpositive width");
      // 1e-14 relative cutoff of the Gaussian tail
      end = std::max(end, b.center + b.width * std::sqrt(2.0 * 14.0 * std::log(10.0)));
    }
    p.bumps_ = std::move(bumps);
    p.support_end_ = end;
    return p;
  }

  // Linear interpolation between samples; zero outside [x.front(), x.back()].
  static EdgePotential sampled(std::vector<double> x, std::vector<Matrix> values) {
    EdgePotential p;
    p.kind_ = Kind::sampled;
    if (x.size() != values.size() || x.size() < 2)
      throw DimensionMismatch("sampled: need matching grids with >= 2 points");
    for (size_t i = 0; i + 1 < x.size(); ++i)
      if (!(x[i] < x[i + 1])) throw UnsortedPoints("sampled: grid not increasing");
    p.m_ = static_cast<int>(values.front().rows());
    for (const auto& v : values) p.require_hermitian(v);
    p.sample_x_ = std::move(x);
    p.sample_v_ = std::move(values);
    p.support_end_ = p.sample_x_.back();
    return p;
  }

  Kind kind() const { return kind_; }
  int dim() const { return m_; }
  double support_end() const { return support_end_; }
  bool is_zero() const { return kind_ == Kind::zero; }
  bool is_L1() const { return is_L1_; }
  bool is_xL1() const { return is_xL1_; }
  void set_integrability(bool l1, bool xl1) { is_L1_ = l1; is_xL1_ = xl1; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  const std::vector<double>& sample_grid() const { return sample_x_; }
  const std::vector<Matrix>& sample_values() const { return sample_v_; }

  Matrix eval(double x) const {
    switch (kind_) {
      case Kind::zero:
        return Matrix::Zero(m_, m_);
      case Kind::constant:
        return (x >= 0.0 && x < support_end_) ? constant_ : Matrix::Zero(m_, m_);
      case Kind::piecewise_constant: {
        if (x < breaks_.front() || x >= breaks_.back()) return Matrix::Zero(m_, m_);
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        size_t idx = static_cast<size_t>(it - breaks_.begin()) - 1;
        idx = std::min(idx, values_.size() - 1);
        return values_[idx];
      }
      case Kind::gaussian_bumps: {
        Matrix q = Matrix::Zero(m_, m_);
        for (const auto& b : bumps_) {
          double u = (x - b.center) / b.width;
          q += std::exp(-0.5 * u * u) * b.amplitude;
        }
        return q;
      }
      case Kind::sampled: {
        if (x <= sample_x_.front()) return x == sample_x_.front() ? sample_v_.front() : Matrix::Zero(m_, m_);
        if (x >= sample_x_.back()) return x == sample_x_.back() ? sample_v_.back() : Matrix::Zero(m_, m_);
        auto it = std::upper_bound(sample_x_.begin(), sample_x_.end(), x);
        size_t i = static_cast<size_t>(it - sample_x_.begin());
        double t = (x - sample_x_[i - 1]) / (sample_x_[i] - sample_x_[i - 1]);
        return (1.0 - t) * sample_v_[i - 1] + t * sample_v_[i];
      }
    }
    return Matrix::Zero(m_, m_);
  }

  // Points where the integrand loses smoothness; adaptive steps are forced
  // onto these.
  std::vector<double> breakpoints() const {
    switch (kind_) {
      case Kind::zero:
        return {};
      case Kind::constant:
        return {0.0, support_end_};
      case Kind::piecewise_constant:
        return breaks_;
      case Kind::gaussian_bumps:
        return {};
      case Kind::sampled:
        return sample_x_;
    }
    return {};
  }

  // int_R^inf ||Q(x)|| dx (operator norm bounded by Frobenius norm here).
  double tail_norm(double r) const {
    if (kind_ != Kind::gaussian_bumps) return r >= support_end_ ? 0.0 : tail_norm_generic(r);
    double t = 0.0;
    for (const auto& b : bumps_) {
      double a = b.amplitude.norm();
      t += a * b.width * std::sqrt(M_PI / 2.0) *
           std::erfc((r - b.center) / (std::sqrt(2.0) * b.width));
    }
    return t;
  }

  // Truncation point R with int_R^inf ||Q|| <= tol (exact for compactly
  // supported kinds).
  double effective_support(double tol) const {
    if (kind_ != Kind::gaussian_bumps) return support_end_;
    double r = 0.0;
    for (const auto& b : bumps_) {
      double a = std::max(b.amplitude.norm(), 1e-300);
      double arg = a * b.width * std::sqrt(M_PI / 2.0) / std::max(tol, 1e-300);
      double s = arg > 1.0 ? std::sqrt(2.0 * std::log(arg)) + 2.0 : 1.0;
      r = std::max(r, b.center + b.width * s);
    }
    return std::min(r, support_end_);
  }

  // int_0^end ||Q|| dx by composite Simpson between breakpoints.
  double l1_norm() const {
    return integrate_norm([](double) { return 1.0; });
  }
  // int_0^end x ||Q|| dx.
  double xl1_norm() const {
    return integrate_norm([](double x) { return x; });
  }

  // t -> Q(origin + direction * t), direction in {+1,-1}; used by the line
  // construction to restrict a whole-line potential to edge coordinates.
  EdgePotential restrict_affine(double origin, int direction,
                                std::optional<double> length) const;

private:
  void require_hermitian(const Matrix& a) const {
    if (a.rows() != a.cols()) throw DimensionMismatch("potential matrix not square");
    if (m_ && static_cast<int>(a.rows()) != m_)
      throw DimensionMismatch("potential matrix dimension mismatch");
    if (!is_hermitian(a)) throw NonHermitianMatrix("potential matrix not Hermitian");
  }

  template <typename Weight>
  double integrate_norm(Weight w) const {
    if (kind_ == Kind::zero) return 0.0;
    if (kind_ == Kind::constant || kind_ == Kind::piecewise_constant) {
      // exact per-piece integral; the weight is 1 or x, so use the midpoint
      // value of the (constant) integrand times int_a^b w
      std::vector<double> br =
          kind_ == Kind::constant ? std::vector<double>{0.0, support_end_} : breaks_;
      double total = 0.0;
      for (size_t i = 0; i + 1 < br.size(); ++i) {
        double a = br[i], b = br[i + 1];
        double nrm = eval(0.5 * (a + b)).norm();
        // Simpson on w over [a,b] is exact for w in {1, x}
        total += nrm * (b - a) / 6.0 * (w(a) + 4.0 * w(0.5 * (a + b)) + w(b));
      }
      return total;
    }
    std::vector<double> nodes = breakpoints();
    if (nodes.empty()) nodes = {0.0, support_end_};
    double total = 0.0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
      double a = nodes[i], b = nodes[i + 1];
      int n = 64;
      double h = (b - a) / n, s = 0.0;
      for (int j = 0; j <= n; ++j) {
        double x = a + j * h;
        double f = eval(x).norm() * w(x);
        s += (j == 0 || j == n) ? f : (j % 2 ? 4.0 * f : 2.0 * f);
      }
      total += s * h / 3.0;
    }
    return total;
  }

  double tail_norm_generic(double r) const {
    // crude but only used for diagnostics on compact kinds
    double end = support_end_;
    if (r >= end) return 0.0;
    int n = 256;
    double h = (end - r) / n, s = 0.0;
    for (int j = 0; j <= n; ++j) {
      double f = eval(r + j * h).norm();
      s += (j == 0 || j == n) ? f : (j % 2 ? 4.0 * f : 2.0 * f);
    }
    return s * h / 3.0;
  }

  Kind kind_ = Kind::zero;
  int m_ = 0;
  double support_end_ = 0.0;
  bool is_L1_ = true;
  bool is_xL1_ = true;
  Matrix constant_;
  std::vector<double> breaks_;
  std::vector<Matrix> values_;
  std::vector<Bump> bumps_;
  std::vector<double> sample_x_;
  std::vector<Matrix> sample_v_;
};

inline EdgePotential EdgePotential::restrict_affine(double origin, int direction,
                                                    std::optional<double> length) const {
  switch (kind_) {
    case Kind::zero:
      return EdgePotential::zero(m_);
    case Kind::constant:
    case Kind::piecewise_constant: {
      std::vector<double> src_breaks =
          kind_ == Kind::constant ? std::vector<double>{0.0, support_end_} : breaks_;
      std::vector<Matrix> src_vals =
          kind_ == Kind::constant ? std::vector<Matrix>{constant_} : values_;
      // map source breakpoints into the local coordinate, clip to [0, length]
      std::vector<double> pts{0.0};
      for (double b : src_breaks) {
        double t = (b - origin) * direction;
        if (t > 0.0 && (!length || t < *length)) pts.push_back(t);
      }
      double far = length ? *length
                          : std::max({1.0, (src_breaks.back() - origin) * 1.0 * direction,
                                      (src_breaks.front() - origin) * 1.0 * direction}) + 1.0;
      pts.push_back(far);
      std::sort(pts.begin(), pts.end());
      std::vector<double> nb{pts.front()};
      std::vector<Matrix> nv;
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] - pts[i] <= 1e-15) continue;
        double mid = origin + direction * 0.5 * (pts[i] + pts[i + 1]);
        Matrix q = Matrix::Zero(m_, m_);
        if (mid >= src_breaks.front() && mid < src_breaks.back()) {
          auto it = std::upper_bound(src_breaks.begin(), src_breaks.end(), mid);
          size_t idx = static_cast<size_t>(it - src_breaks.begin()) - 1;
          q = src_vals[std::min(idx, src_vals.size() - 1)];
        }
        nv.push_back(q);
        nb.push_back(pts[i + 1]);
      }
      while (!nv.empty() && nv.back().norm() == 0.0) {
        nv.pop_back();
        nb.pop_back();
      }
      if (nv.empty()) return EdgePotential::zero(m_);
      return EdgePotential::piecewise_constant(std::move(nb), std::move(nv));
    }
    case Kind::gaussian_bumps: {
      std::vector<Bump> nb;
      for (const auto& b : bumps_) {
        Bump c = b;
        c.center = (b.center - origin) * direction;
        nb.push_back(c);
      }
      return EdgePotential::gaussian_bumps(std::move(nb));
    }
    case Kind::sampled: {
      std::vector<double> nx;
      std::vector<Matrix> nv;
      for (size_t i = 0; i < sample_x_.size(); ++i)
        nx.push_back((sample_x_[i] - origin) * direction);
      if (direction < 0) {
        std::reverse(nx.begin(), nx.end());
        nv.assign(sample_v_.rbegin(), sample_v_.rend());
      } else {
        nv = sample_v_;
      }
      return EdgePotential::sampled(std::move(nx), std::move(nv));
    }
  }
  return EdgePotential::zero(m_);
}

}  // namespace qgraph
