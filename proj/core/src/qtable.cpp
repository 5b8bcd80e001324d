#include "acofi/qtable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "acofi/errors.hpp"

namespace acofi {

void validate(const GridSpec& grid) {
  if (grid.nx < 2 || grid.ny < 2 || grid.ntheta < 2)
    throw ConfigError("grid must have at least 2 cells per axis");
  if (!(grid.bounds.min_x < grid.bounds.max_x &&
        grid.bounds.min_y < grid.bounds.max_y))
    throw ConfigError("grid bounds are empty");
}

namespace {

// Fractional grid coordinate along a clamped linear axis, snapped to the
// nearest integer when within 1e-9 so that exact node states reproduce
// stored values bit-exactly.
double axis_coord(double v, double lo, double hi, int n) {
  double s = (std::clamp(v, lo, hi) - lo) / (hi - lo) * (n - 1);
  double r = std::round(s);
  if (std::abs(s - r) < 1e-9) s = r;
  return s;
}

struct AxisStencil {
  int i0;
  double w;  // weight of node i0+1
};

AxisStencil axis_stencil(double s, int n) {
  int i0 = static_cast<int>(std::floor(s));
  i0 = std::clamp(i0, 0, n - 2);
  return {i0, s - i0};
}

struct ThetaStencil {
  int k0;
  int k1;
  double w;  // weight of slab k1
};

ThetaStencil theta_stencil(double theta, int ntheta) {
  double s = wrap_angle(theta) * ntheta / kTwoPi;
  double r = std::round(s);
  if (std::abs(s - r) < 1e-9) s = r;
  int k0 = static_cast<int>(std::floor(s)) % ntheta;
  return {k0, (k0 + 1) % ntheta, s - std::floor(s)};
}

// Precomputed successor stencils for one ID backup sweep. The successor
// position depends only on (node position, heading slab); the successor
// heading only on (heading slab, action).
struct SweepContext {
  const GridSpec& grid;
  std::vector<double> l_node;           // per node
  std::vector<AxisStencil> sx;          // [i * ntheta + k]
  std::vector<AxisStencil> sy;          // [j * ntheta + k]
  std::vector<ThetaStencil> st;         // [k * 3 + action slot]

  SweepContext(const GridSpec& g, const WorldConfig& world,
               const DynamicsConfig& dyn)
      : grid(g) {
    l_node.resize(g.node_count());
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        DubinsState s{g.x_at(i), g.y_at(j), 0.0};
        double l = failure_margin(s, world);
        for (int k = 0; k < g.ntheta; ++k)
          l_node[g.node_index(i, j, k)] = l;
      }

    sx.resize(static_cast<std::size_t>(g.nx) * g.ntheta);
    sy.resize(static_cast<std::size_t>(g.ny) * g.ntheta);
    st.resize(static_cast<std::size_t>(g.ntheta) * 3);
    for (int k = 0; k < g.ntheta; ++k) {
      double th = g.theta_at(k);
      double dx = dyn.v * std::cos(th);
      double dy = dyn.v * std::sin(th);
      for (int i = 0; i < g.nx; ++i)
        sx[static_cast<std::size_t>(i) * g.ntheta + k] = axis_stencil(
            axis_coord(g.x_at(i) + dx, g.bounds.min_x, g.bounds.max_x, g.nx),
            g.nx);
      for (int j = 0; j < g.ny; ++j)
        sy[static_cast<std::size_t>(j) * g.ntheta + k] = axis_stencil(
            axis_coord(g.y_at(j) + dy, g.bounds.min_y, g.bounds.max_y, g.ny),
            g.ny);
      for (int slot = 0; slot < 3; ++slot)
        st[static_cast<std::size_t>(k) * 3 + slot] = theta_stencil(
            th + action_rate(action_from_slot(slot), dyn), g.ntheta);
    }
  }
};

void sweep_into(const SweepContext& ctx, double gamma,
                const std::vector<double>& q_in, std::vector<double>& q_out) {
  const GridSpec& g = ctx.grid;
  const double* q = q_in.data();
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) {
      for (int k = 0; k < g.ntheta; ++k) {
        const AxisStencil& ax = ctx.sx[static_cast<std::size_t>(i) * g.ntheta + k];
        const AxisStencil& ay = ctx.sy[static_cast<std::size_t>(j) * g.ntheta + k];
        double w00 = (1.0 - ax.w) * (1.0 - ay.w);
        double w01 = (1.0 - ax.w) * ay.w;
        double w10 = ax.w * (1.0 - ay.w);
        double w11 = ax.w * ay.w;
        std::size_t b00 = (static_cast<std::size_t>(ax.i0) * g.ny + ay.i0) *
                          g.ntheta;
        std::size_t b01 = b00 + g.ntheta;
        std::size_t b10 = b00 + static_cast<std::size_t>(g.ny) * g.ntheta;
        std::size_t b11 = b10 + g.ntheta;

        std::size_t node = g.node_index(i, j, k);
        double l = ctx.l_node[node];
        for (int slot = 0; slot < 3; ++slot) {
          const ThetaStencil& t = ctx.st[static_cast<std::size_t>(k) * 3 + slot];
          double v_succ = -HUGE_VAL;
          for (int s = 0; s < 3; ++s) {
            double q0 = w00 * q[(b00 + t.k0) * 3 + s] +
                        w01 * q[(b01 + t.k0) * 3 + s] +
                        w10 * q[(b10 + t.k0) * 3 + s] +
                        w11 * q[(b11 + t.k0) * 3 + s];
            double q1 = w00 * q[(b00 + t.k1) * 3 + s] +
                        w01 * q[(b01 + t.k1) * 3 + s] +
                        w10 * q[(b10 + t.k1) * 3 + s] +
                        w11 * q[(b11 + t.k1) * 3 + s];
            v_succ = std::max(v_succ, (1.0 - t.w) * q0 + t.w * q1);
          }
          q_out[node * 3 + slot] =
              (1.0 - gamma) * l + gamma * std::min(l, v_succ);
        }
      }
    }
  }
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

QTable solve_safety_bellman(const WorldConfig& world, const GridSpec& grid,
                            const DynamicsConfig& dyn, double gamma,
                            double tol, int max_iters, int* iters_out,
                            double* residual_out) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in (0,1)");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  validate(grid);
  validate(world);
  validate(dyn);

  QTable qt;
  qt.grid = grid;
  qt.dyn = dyn;
  qt.gamma = gamma;

  SweepContext ctx(grid, world, dyn);

  // Q_0(y,u) = l(y)
  qt.values.resize(grid.node_count() * 3);
  for (std::size_t n = 0; n < grid.node_count(); ++n)
    for (int slot = 0; slot < 3; ++slot)
      qt.values[n * 3 + slot] = ctx.l_node[n];

  std::vector<double> next(qt.values.size());
  double residual = HUGE_VAL;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    sweep_into(ctx, gamma, qt.values, next);
    residual = max_abs_diff(qt.values, next);
    qt.values.swap(next);
    if (residual <= tol) break;
  }
  if (iters_out) *iters_out = iter + 1;
  if (residual_out) *residual_out = residual;
  if (residual > tol) throw NonConvergence(residual);
  return qt;
}

std::vector<double> backup_sweep(const QTable& qtable,
                                 const WorldConfig& world) {
  SweepContext ctx(qtable.grid, world, qtable.dyn);
  std::vector<double> out(qtable.values.size());
  sweep_into(ctx, qtable.gamma, qtable.values, out);
  return out;
}

double bellman_residual(const QTable& qtable, const WorldConfig& world) {
  return max_abs_diff(qtable.values, backup_sweep(qtable, world));
}

double q_value(const QTable& qtable, const DubinsState& state, Action action) {
  const GridSpec& g = qtable.grid;
  AxisStencil ax = axis_stencil(
      axis_coord(state.px, g.bounds.min_x, g.bounds.max_x, g.nx), g.nx);
  AxisStencil ay = axis_stencil(
      axis_coord(state.py, g.bounds.min_y, g.bounds.max_y, g.ny), g.ny);
  ThetaStencil t = theta_stencil(state.theta, g.ntheta);
  int slot = action_slot(action);

  const double* q = qtable.values.data();
  auto corner = [&](int di, int dj, int k) {
    return q[g.node_index(ax.i0 + di, ay.i0 + dj, k) * 3 + slot];
  };
  auto plane = [&](int k) {
    return (1.0 - ax.w) * ((1.0 - ay.w) * corner(0, 0, k) +
                           ay.w * corner(0, 1, k)) +
           ax.w * ((1.0 - ay.w) * corner(1, 0, k) + ay.w * corner(1, 1, k));
  };
  return (1.0 - t.w) * plane(t.k0) + t.w * plane(t.k1);
}

double v_value(const QTable& qtable, const DubinsState& state) {
  double v = -HUGE_VAL;
  for (Action a : kAllActions) v = std::max(v, q_value(qtable, state, a));
  return v;
}

Action safest_action(const QTable& qtable, const DubinsState& state) {
  // Tie-break preference order: 0, -omega, +omega.
  const Action order[3] = {Action::Straight, Action::TurnRight,
                           Action::TurnLeft};
  Action best = order[0];
  double best_q = q_value(qtable, state, best);
  for (int idx = 1; idx < 3; ++idx) {
    double q = q_value(qtable, state, order[idx]);
    if (q > best_q) {
      best_q = q;
      best = order[idx];
    }
  }
  return best;
}

namespace {

constexpr char kMagic[8] = {'A', 'C', 'O', 'F', 'I', 'Q', 'T', 'B'};
constexpr std::uint32_t kVersion = 1;

// Serialization assumes a little-endian host (checked at load/save).
bool host_is_little_endian() {
  std::uint32_t x = 1;
  char c;
  std::memcpy(&c, &x, 1);
  return c == 1;
}

template <typename T>
void write_pod(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f) {
  T v;
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_qtable(const QTable& qtable, const std::string& path) {
  if (!host_is_little_endian())
    throw IoError("qtable serialization requires a little-endian host");
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp + " for writing");
    f.write(kMagic, sizeof(kMagic));
    write_pod(f, kVersion);
    write_pod(f, static_cast<std::uint32_t>(qtable.grid.nx));
    write_pod(f, static_cast<std::uint32_t>(qtable.grid.ny));
    write_pod(f, static_cast<std::uint32_t>(qtable.grid.ntheta));
    write_pod(f, qtable.grid.bounds.min_x);
    write_pod(f, qtable.grid.bounds.min_y);
    write_pod(f, qtable.grid.bounds.max_x);
    write_pod(f, qtable.grid.bounds.max_y);
    write_pod(f, qtable.gamma);
    write_pod(f, qtable.dyn.v);
    write_pod(f, qtable.dyn.omega);
    f.write(reinterpret_cast<const char*>(qtable.values.data()),
            static_cast<std::streamsize>(qtable.values.size() * sizeof(double)));
    if (!f) throw IoError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename " + tmp + " to " + path);
}

QTable load_qtable(const std::string& path) {
  if (!host_is_little_endian())
    throw IoError("qtable serialization requires a little-endian host");
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError(path + ": not a qtable file");
  auto version = read_pod<std::uint32_t>(f);
  if (version != kVersion)
    throw IoError(path + ": unsupported qtable version " +
                  std::to_string(version));
  QTable qt;
  qt.grid.nx = static_cast<int>(read_pod<std::uint32_t>(f));
  qt.grid.ny = static_cast<int>(read_pod<std::uint32_t>(f));
  qt.grid.ntheta = static_cast<int>(read_pod<std::uint32_t>(f));
  qt.grid.bounds.min_x = read_pod<double>(f);
  qt.grid.bounds.min_y = read_pod<double>(f);
  qt.grid.bounds.max_x = read_pod<double>(f);
  qt.grid.bounds.max_y = read_pod<double>(f);
  qt.gamma = read_pod<double>(f);
  qt.dyn.v = read_pod<double>(f);
  qt.dyn.omega = read_pod<double>(f);
  if (!f) throw IoError(path + ": truncated header");
  validate(qt.grid);
  qt.values.resize(qt.grid.node_count() * 3);
  f.read(reinterpret_cast<char*>(qt.values.data()),
         static_cast<std::streamsize>(qt.values.size() * sizeof(double)));
  if (!f) throw IoError(path + ": truncated value body");
  return qt;
}

void export_qtable_csv(const QTable& qtable, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp + " for writing");
    f << "px,py,theta,action,Q\n";
    char buf[160];
    const GridSpec& g = qtable.grid;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        for (int k = 0; k < g.ntheta; ++k)
          for (int slot = 0; slot < 3; ++slot) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g\n",
                          g.x_at(i), g.y_at(j), g.theta_at(k), slot - 1,
                          qtable.at(i, j, k, slot));
            f << buf;
          }
    if (!f) throw IoError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename " + tmp + " to " + path);
}

}  // namespace acofi
