#include "adasgd/oracles/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace adasgd::oracles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Counted {
  const ScalarLoss& loss;
  int calls = 0;

  double operator()(const Eigen::VectorXd& x) {
    ++calls;
    try {
      const double v = loss(x);
      return std::isfinite(v) ? v : kInf;
    } catch (const std::domain_error&) {
      return kInf;
    }
  }
};

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> xs;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) xs.push_back(lo + static_cast<double>(i) * step);
  if (hi - xs.back() > 1e-12 * std::max(1.0, std::abs(hi))) xs.push_back(hi);
  return xs;
}

Eigen::VectorXd golden_section(Counted& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  Eigen::VectorXd x(1);
  auto eval = [&](double t) {
    x[0] = t;
    return f(x);
  };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  x[0] = 0.5 * (a + b);
  return x;
}

Eigen::VectorXd nelder_mead(Counted& f, const BoxProjection& box, const Eigen::VectorXd& start, double step,
                            double tol) {
  const Eigen::Index n = start.size();
  std::vector<Eigen::VectorXd> simplex;
  simplex.push_back(start);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = start;
    v[i] += step;
    if (v[i] > box.upper()[i]) v[i] = start[i] - step;
    simplex.push_back(box.project(v));
  }
  std::vector<double> values;
  for (const auto& v : simplex) values.push_back(f(v));

  std::vector<std::size_t> order(simplex.size());
  for (int iter = 0; iter < 20000; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& v : simplex) diameter = std::max(diameter, (v - simplex[best]).cwiseAbs().maxCoeff());
    if (diameter < tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (auto i : order) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = box.project(centroid + (centroid - simplex[worst]));
    const double fr = f(reflected);
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = box.project(centroid + 2.0 * (centroid - simplex[worst]));
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted = outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                                               : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (auto i : order) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = f(simplex[i]);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  return simplex[static_cast<std::size_t>(it - values.begin())];
}

}  // namespace

GridOptimum grid_optimum(const ScalarLoss& loss, const BoxProjection& domain, double coarse_step, double tolerance) {
  if (domain.is_unbounded()) throw std::invalid_argument("grid search needs a bounded domain");
  if (!(coarse_step > 0.0) || !(tolerance > 0.0)) throw std::invalid_argument("grid step and tolerance must be positive");
  const Eigen::Index dim = domain.dimension();
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid search supports one or two dimensions");

  Counted f{loss};
  GridOptimum out;
  Eigen::VectorXd best;
  double best_value = kInf;
  Eigen::VectorXd x(dim);

  const auto xs = axis(domain.lower()[0], domain.upper()[0], coarse_step);
  std::size_t best_i = 0;
  if (dim == 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      x[0] = xs[i];
      const double v = f(x);
      if (v < best_value) {
        best_value = v;
        best = x;
        best_i = i;
      }
    }
  } else {
    const auto ys = axis(domain.lower()[1], domain.upper()[1], coarse_step);
    for (double xv : xs) {
      for (double yv : ys) {
        x << xv, yv;
        const double v = f(x);
        if (v < best_value) {
          best_value = v;
          best = x;
        }
      }
    }
  }
  if (!std::isfinite(best_value)) throw std::domain_error("loss is not finite anywhere on the grid");

  Eigen::VectorXd refined;
  if (dim == 1) {
    const double a = xs[best_i > 0 ? best_i - 1 : 0];
    const double b = xs[std::min(best_i + 1, xs.size() - 1)];
    refined = golden_section(f, a, b, tolerance * 0.1);
  } else {
    refined = nelder_mead(f, domain, best, coarse_step, tolerance * 0.1);
  }
  const double refined_value = f(refined);
  if (refined_value <= best_value) {
    out.point = refined;
    out.value = refined_value;
  } else {
    out.point = best;
    out.value = best_value;
  }
  out.evaluations = f.calls;

  for (Eigen::Index i = 0; i < dim; ++i) {
    const double lo = domain.lower()[i];
    const double hi = domain.upper()[i];
    if (out.point[i] - lo <= tolerance || hi - out.point[i] <= tolerance) {
      out.on_boundary = true;
      char buf[160];
      std::snprintf(buf, sizeof buf, "optimum coordinate %ld = %.8g lies on the domain boundary [%.8g, %.8g]",
                    static_cast<long>(i), out.point[i], lo, hi);
      if (!out.diagnostic.empty()) out.diagnostic += "; ";
      out.diagnostic += buf;
    }
  }
  return out;
}

GridOptimum grid_optimum(const std::function<double(double)>& loss, double lower, double upper, double coarse_step,
                         double tolerance) {
  const BoxProjection box((Eigen::VectorXd(1) << lower).finished(), (Eigen::VectorXd(1) << upper).finished());
  return grid_optimum([&](const Eigen::VectorXd& x) { return loss(x[0]); }, box, coarse_step, tolerance);
}

}  // namespace adasgd::oracles
