#pragma once

// Derivative-free maximization over a box: bound-projected Nelder-Mead,
// deterministic Latin-pattern multistarts and a dense grid scan.

#include <functional>
#include <span>
#include <vector>

namespace rifa::opt {

using Objective = std::function<double(std::span<const double>)>;

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dims() const { return lo.size(); }
  // Maps a point of the unit cube into the box.
  std::vector<double> from_unit(std::span<const double> unit) const;
  std::vector<double> to_unit(std::span<const double> x) const;
};

struct NelderMeadOptions {
  double ftol = 1e-8;     // spread of simplex values
  double xtol = 1e-7;     // simplex diameter, in unit-cube coordinates
  int max_iters = 500;
  double initial_step = 0.1;
};

struct Result {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Maximizes f over the box from `start` (box coordinates). Trial points are
// projected onto the box.
Result nelder_mead_max(const Objective& f, std::span<const double> start,
                       const Box& box, const NelderMeadOptions& options);

// `count` points of the unit cube on a Latin pattern: every coordinate takes
// each of the values (k + 0.5) / count exactly once.
std::vector<std::vector<double>> latin_starts(int count, std::size_t dims);

// Evaluates f on a points_per_dim^dims tensor grid including the box corners
// and returns the best point. Ties keep the first point in lexicographic
// order.
Result grid_max(const Objective& f, const Box& box, int points_per_dim);

}  // namespace rifa::opt
