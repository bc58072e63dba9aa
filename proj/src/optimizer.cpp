#include "rifa/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rifa/errors.hpp"

namespace rifa::opt {

std::vector<double> Box::from_unit(std::span<const double> unit) const {
  std::vector<double> x(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    x[i] = lo[i] + unit[i] * (hi[i] - lo[i]);
    x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
  return x;
}

std::vector<double> Box::to_unit(std::span<const double> x) const {
  std::vector<double> unit(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double width = hi[i] - lo[i];
    unit[i] = width > 0.0 ? std::clamp((x[i] - lo[i]) / width, 0.0, 1.0) : 0.0;
  }
  return unit;
}

namespace {

struct Vertex {
  std::vector<double> u;  // unit-cube coordinates
  double value;
};

bool inside(const std::vector<double>& u) {
  return std::all_of(u.begin(), u.end(),
                     [](double x) { return x >= 0.0 && x <= 1.0; });
}

std::vector<double> clamped(std::vector<double> u) {
  for (double& x : u) x = std::clamp(x, 0.0, 1.0);
  return u;
}

std::vector<double> mirrored(std::vector<double> u) {
  for (double& x : u) {
    if (x < 0.0) x = -x;
    if (x > 1.0) x = 2.0 - x;
    x = std::clamp(x, 0.0, 1.0);
  }
  return u;
}

}  // namespace

Result nelder_mead_max(const Objective& f, std::span<const double> start,
                       const Box& box, const NelderMeadOptions& options) {
  const std::size_t n = box.dims();
  if (start.size() != n) {
    throw ContractError("nelder_mead_max: start has wrong dimension");
  }
  auto eval = [&](const std::vector<double>& u) {
    const auto x = box.from_unit(u);
    return f(x);
  };

  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  auto origin = box.to_unit(start);
  simplex.push_back({origin, eval(origin)});
  for (std::size_t i = 0; i < n; ++i) {
    auto u = origin;
    u[i] += (u[i] + options.initial_step <= 1.0) ? options.initial_step
                                                 : -options.initial_step;
    simplex.push_back({u, eval(u)});
  }

  auto by_value = [](const Vertex& a, const Vertex& b) {
    return a.value > b.value;
  };

  Result result;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    result.iterations = iter;

    double diameter = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        diameter =
            std::max(diameter, std::abs(simplex[k].u[i] - simplex[0].u[i]));
      }
    }
    if (simplex[0].value - simplex[n].value <= options.ftol &&
        diameter <= options.xtol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].u[i] / n;
    }
    auto along = [&](double coeff) {
      std::vector<double> u(n);
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = centroid[i] + coeff * (simplex[n].u[i] - centroid[i]);
      }
      if (inside(u)) return Vertex{u, eval(u)};
      // Clamping alone maps every overshoot onto the same face point and can
      // collapse the simplex there; the mirror image keeps it moving.
      Vertex face{clamped(u), 0.0}, mirror{mirrored(u), 0.0};
      face.value = eval(face.u);
      mirror.value = eval(mirror.u);
      return face.value >= mirror.value ? face : mirror;
    };

    const Vertex reflected = along(-1.0);
    if (reflected.value > simplex[0].value) {
      Vertex expanded = along(-2.0);
      simplex[n] = expanded.value > reflected.value ? std::move(expanded)
                                                    : reflected;
      continue;
    }
    if (reflected.value > simplex[n - 1].value) {
      simplex[n] = reflected;
      continue;
    }
    const bool outside = reflected.value > simplex[n].value;
    Vertex contracted = along(outside ? -0.5 : 0.5);
    // Inside contractions must strictly improve; otherwise shrink, so flat
    // regions still collapse the simplex.
    if (outside ? contracted.value >= reflected.value
                : contracted.value > simplex[n].value) {
      simplex[n] = std::move(contracted);
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        simplex[k].u[i] =
            simplex[0].u[i] + 0.5 * (simplex[k].u[i] - simplex[0].u[i]);
      }
      simplex[k].value = eval(simplex[k].u);
    }
  }
  std::stable_sort(simplex.begin(), simplex.end(), by_value);
  result.x = box.from_unit(simplex[0].u);
  result.value = simplex[0].value;
  return result;
}

std::vector<std::vector<double>> latin_starts(int count, std::size_t dims) {
  if (count < 1) return {};
  // Coordinate j walks the strata with a stride coprime to count, so each
  // coordinate is a permutation of the strata.
  std::vector<int> strides;
  for (int s = 1; strides.size() < dims; ++s) {
    if (std::gcd(s, count) == 1) strides.push_back(s);
  }
  std::vector<std::vector<double>> starts(count, std::vector<double>(dims));
  for (int k = 0; k < count; ++k) {
    for (std::size_t j = 0; j < dims; ++j) {
      const int stratum = static_cast<int>((static_cast<long>(k) * strides[j] +
                                            static_cast<long>(j)) %
                                           count);
      starts[k][j] = (stratum + 0.5) / count;
    }
  }
  return starts;
}

Result grid_max(const Objective& f, const Box& box, int points_per_dim) {
  if (points_per_dim < 2) {
    throw ContractError("grid_max: need at least 2 points per dimension");
  }
  const std::size_t n = box.dims();
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  Result best;
  best.value = -std::numeric_limits<double>::infinity();
  best.converged = true;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = box.lo[i] +
             (box.hi[i] - box.lo[i]) * idx[i] / (points_per_dim - 1.0);
    }
    const double value = f(x);
    if (value > best.value) {
      best.value = value;
      best.x = x;
    }
    ++best.iterations;
    std::size_t d = 0;
    while (d < n && ++idx[d] == points_per_dim) {
      idx[d] = 0;
      ++d;
    }
    if (d == n) break;
  }
  return best;
}

}  // namespace rifa::opt
