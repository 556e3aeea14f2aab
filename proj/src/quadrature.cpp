#include "graphfuse/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace graphfuse {

namespace {

constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> value;
  double error = 0.0;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const VectorIntegrand& f, double a, double b, std::size_t dim, std::vector<double>& buf) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::vector<double> k(dim, 0.0);
  std::vector<double> g(dim, 0.0);
  f(c, buf);
  for (std::size_t i = 0; i < dim; ++i) {
    k[i] = kWgk[7] * buf[i];
    g[i] = kWg[3] * buf[i];
  }
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    f(c - dx, buf);
    const std::vector<double> lo = buf;
    f(c + dx, buf);
    for (std::size_t i = 0; i < dim; ++i) {
      const double s = lo[i] + buf[i];
      k[i] += kWgk[j] * s;
      if (j % 2 == 1) g[i] += kWg[j / 2] * s;
    }
  }
  Segment seg{a, b, std::vector<double>(dim), 0.0};
  for (std::size_t i = 0; i < dim; ++i) {
    seg.value[i] = k[i] * h;
    seg.error = std::max(seg.error, std::abs((k[i] - g[i]) * h));
  }
  return seg;
}

}  // namespace

QuadResult integrate(const VectorIntegrand& f, double a, double b, std::size_t dim, const QuadOptions& opt) {
  std::vector<double> buf(dim);
  std::priority_queue<Segment> heap;
  heap.push(kronrod(f, a, b, dim, buf));
  QuadResult r;
  r.evaluations = 15;
  r.value = heap.top().value;
  double err = heap.top().error;
  while (true) {
    double scale = 0.0;
    for (double v : r.value) scale = std::max(scale, std::abs(v));
    r.error = err;
    if (err <= std::max(opt.abs_tol, opt.rel_tol * scale)) {
      r.converged = true;
      return r;
    }
    if (static_cast<int>(heap.size()) >= opt.max_intervals) return r;
    const Segment worst = heap.top();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) return r;
    heap.pop();
    Segment left = kronrod(f, worst.a, m, dim, buf);
    Segment right = kronrod(f, m, worst.b, dim, buf);
    for (std::size_t i = 0; i < dim; ++i) r.value[i] += left.value[i] + right.value[i] - worst.value[i];
    err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    r.evaluations += 30;
    if (heap.size() % 128 == 0) {
      // Refresh the running sums to avoid drift.
      auto copy = heap;
      std::fill(r.value.begin(), r.value.end(), 0.0);
      err = 0.0;
      while (!copy.empty()) {
        for (std::size_t i = 0; i < dim; ++i) r.value[i] += copy.top().value[i];
        err += copy.top().error;
        copy.pop();
      }
    }
  }
}

QuadResult integrate_to_infinity(const VectorIntegrand& f, double a, double scale, std::size_t dim,
                                 const QuadOptions& opt) {
  const VectorIntegrand mapped = [&](double x, std::vector<double>& out) {
    if (x >= 1.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double u = 1.0 - x;
    const double t = a + scale * x / u;
    f(t, out);
    const double jac = scale / (u * u);
    for (auto& v : out) v *= jac;
  };
  return integrate(mapped, 0.0, 1.0, dim, opt);
}

double integrate_scalar(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt) {
  const QuadResult r = integrate([&](double x, std::vector<double>& out) { out[0] = f(x); }, a, b, 1, opt);
  if (!r.converged) throw QuadratureError("scalar quadrature did not converge");
  return r.value[0];
}

}  // namespace graphfuse
