#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "acofi/world.hpp"

namespace acofi {

// Discretization of the state space: nx*ny nodes over the world bounds
// (endpoints included) and ntheta nodes over [0, 2*pi) treated periodically.
struct GridSpec {
  int nx = 61;
  int ny = 61;
  int ntheta = 48;
  Rect bounds{0.0, 0.0, 1.0, 1.0};

  double x_at(int i) const {
    return bounds.min_x + i * (bounds.max_x - bounds.min_x) / (nx - 1);
  }
  double y_at(int j) const {
    return bounds.min_y + j * (bounds.max_y - bounds.min_y) / (ny - 1);
  }
  double theta_at(int k) const { return k * kTwoPi / ntheta; }

  std::size_t node_count() const {
    return static_cast<std::size_t>(nx) * ny * ntheta;
  }
  std::size_t node_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny + j) * ntheta + k;
  }
};

void validate(const GridSpec& grid);

// Discretized safety Q-function over the grid, three actions per node.
// Layout: values[node_index(i,j,k) * 3 + action_slot].
struct QTable {
  GridSpec grid;
  DynamicsConfig dyn;
  double gamma = 0.98;
  std::vector<double> values;

  double& at(int i, int j, int k, int slot) {
    return values[grid.node_index(i, j, k) * 3 + slot];
  }
  double at(int i, int j, int k, int slot) const {
    return values[grid.node_index(i, j, k) * 3 + slot];
  }
};

// Exact value iteration for the discounted safety Bellman fixed point
//   Q(y,u) = (1-gamma) l(y) + gamma min{ l(y), max_u' Q(step(y,u), u') }
// under ID dynamics, successor values evaluated by trilinear interpolation.
// Synchronous (Jacobi) sweeps, initialized at Q_0 = l. Throws NonConvergence
// if the sup-norm residual is still above tol after max_iters sweeps.
QTable solve_safety_bellman(const WorldConfig& world, const GridSpec& grid,
                            const DynamicsConfig& dyn, double gamma,
                            double tol = 1e-6, int max_iters = 100000,
                            int* iters_out = nullptr,
                            double* residual_out = nullptr);

// One synchronous backup sweep; does not modify the input.
std::vector<double> backup_sweep(const QTable& qtable,
                                 const WorldConfig& world);

// Sup-norm Bellman residual ||Q - T(Q)||_inf over all nodes and actions.
double bellman_residual(const QTable& qtable, const WorldConfig& world);

// Trilinear interpolation (theta periodic); positions outside the grid are
// clamped to the boundary. Exact at nodes.
double q_value(const QTable& qtable, const DubinsState& state, Action action);

// max over the three actions of q_value.
double v_value(const QTable& qtable, const DubinsState& state);

// argmax action; ties prefer smaller |omega|, then -omega over +omega.
Action safest_action(const QTable& qtable, const DubinsState& state);

// Versioned binary persistence (little-endian, 64-bit float body).
void save_qtable(const QTable& qtable, const std::string& path);
QTable load_qtable(const std::string& path);

// CSV export of (px, py, theta, action, Q) rows for external plotting.
void export_qtable_csv(const QTable& qtable, const std::string& path);

}  // namespace acofi
