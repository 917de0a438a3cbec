#ifndef NSASYM_SOLVER_HPP
#define NSASYM_SOLVER_HPP

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "nsasym/field.hpp"
#include "nsasym/grid.hpp"

namespace nsasym {

// Stream-Hessian initial data: omega0 = d1 d2 phi with phi = A exp(-|x-c|^2/sigma^2).
// The derivative structure kills all moments |alpha| <= 1 analytically.
struct InitialDataSpec {
    double amplitude = 1.0;
    double sigma = 1.0;
    std::array<double, 2> center{0.0, 0.0};
};

Field make_initial_vorticity(const InitialDataSpec& spec, const Grid& grid);

// 2-D Biot-Savart: u^ = (i k2, -i k1) |k|^{-2} omega^, zero mode dropped.
// Rejects input whose mean exceeds 1e-8 of ||omega||_1.
Field biot_savart(const Field& omega);

// I = omega * (-u^2, u^1); the vorticity-form nonlinearity.
Field nonlinearity_I(const Field& u, const Field& omega);

// Pseudo-spectral vorticity state; spectrum kept in r2c half-plane layout.
struct SolverState {
    Grid grid;
    double t = 0;
    std::vector<std::complex<double>> omega_hat;  // N x (N/2+1)

    static SolverState from_vorticity(const Field& omega0);
    Field vorticity() const;
    Field velocity() const;
    double max_speed() const;
    double mean_abs() const;  // |box mean of omega|
};

struct StepOptions {
    double cfl_safety = 0.5;
    bool advection = true;  // disabled in diffusion-only validation runs
};

// Stability bound for the explicit advection stage (diffusion is exact).
double stable_dt(const SolverState& state, const StepOptions& opts);

// One integrating-factor RK4 step with 2/3-rule dealiasing of the advection
// product at every stage.  Throws on CFL violation or NaN.
void step(SolverState& state, double dt, const StepOptions& opts = {});

struct SimulateOptions {
    StepOptions step;
    bool quiet = true;
};

class Trajectory;

// March to t_end, writing snapshots (omega, u, I) at the requested times into
// `outdir` along with run.json and norms.csv.  Containment rule:
// sqrt(t_end) <= L/6.
Trajectory simulate(const Field& omega0, double t_end, const std::vector<double>& snapshot_times,
                    const std::string& outdir, const InitialDataSpec& spec,
                    const SimulateOptions& opts = {});

}  // namespace nsasym

#endif
