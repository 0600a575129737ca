#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fulldim/shift_space.hpp"

namespace fulldim {

/// A simple cycle of the transition graph together with the mean of the
/// vertex weights along it. The cycle is rotated to start at its smallest
/// symbol.
struct MeanCycle {
  double mean = 0.0;
  Word cycle;
};

/// Average of `weights` over the symbols of `cycle`.
double cycle_mean(std::span<const Symbol> cycle, const Eigen::VectorXd& weights);

/// Karp's minimum mean cycle for vertex weights, with a witness cycle taken
/// from the decomposition of the optimal n-step walk.
MeanCycle minimum_mean_cycle(const ShiftSpace& space, const Eigen::VectorXd& weights);
MeanCycle maximum_mean_cycle(const ShiftSpace& space, const Eigen::VectorXd& weights);

/// Edges (a, b) lying on at least one cycle whose mean equals `extreme_mean`
/// within `tol`; `extreme_mean` must be the maximum (maximize = true) or the
/// minimum cycle mean of `weights`.
Eigen::MatrixXi critical_edges(const ShiftSpace& space, const Eigen::VectorXd& weights,
                               double extreme_mean, bool maximize, double tol);

/// Strongly connected components of a 0/1 adjacency matrix that contain at
/// least one cycle, each sorted, ordered by smallest member.
std::vector<std::vector<Symbol>> cyclic_components(const Eigen::MatrixXi& adjacency);

}  // namespace fulldim
