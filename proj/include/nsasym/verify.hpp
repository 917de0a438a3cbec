#ifndef NSASYM_VERIFY_HPP
#define NSASYM_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "nsasym/profiles.hpp"
#include "nsasym/trajectory.hpp"

namespace nsasym {

// Least-squares power law ||.|| ~ c t^{-a} (log t)^b in log-log coordinates.
struct DecayFit {
    double t_a = 0, t_b = 0;   // window
    double exponent = 0;       // a
    int log_exponent = 0;      // b in {0, 1, 2}
    double amplitude = 0;      // c
    double residual_rms = 0;
    int npoints = 0;
    std::vector<double> times;
    std::vector<double> values;
};

// b < 0 selects the log exponent by residual over {0, 1, 2}.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double t_a,
                   double t_b, int fixed_log_exponent);

// ||u(t) - sum_{m<=M} U_m(t) [- log t sum K_m]||_q over the fit window.
// M = 0 fits the norm of u itself.
DecayFit remainder_decay(const Trajectory& traj, const ExpansionContext& ctx, int M, bool with_logs,
                         double q, double t_a, double t_b, bool interior = false);

// ||omega(t) - sum_{m in orders} Omega_m(t)||_q.
DecayFit vorticity_remainder_decay(const Trajectory& traj, const MomentTable& table,
                                   const std::vector<int>& orders, double q, double t_a, double t_b,
                                   bool interior = false);

// t^{(n+m)/2} (u - sum_{k<m} U_k)(t, sqrt(t) xi) against U_m(1, xi).
struct RescaledLimitReport {
    std::vector<double> times;
    std::vector<double> distances;  // L2 on the reference grid
    double profile_norm = 0;        // ||U_m(1)||_2 on the reference grid
    bool monotone = true;           // nonincreasing over the last 4 within 10%
};
RescaledLimitReport rescaled_limit(const Trajectory& traj, const MomentTable& table, int m,
                                   const Grid& reference);

// Residuals of the two mild-solution representations at snapshot time t.
struct MildSolutionResiduals {
    double vorticity_form = 0;  // velocity from the Biot-Savart/vorticity kernels
    double velocity_form = 0;   // the classical projection-kernel form
};
MildSolutionResiduals mild_solution_crosscheck(const Trajectory& traj, double t);

// Parabolic-scaling audit of every constructed profile on proportional grids.
struct ScalingRow {
    std::string profile;
    double t;
    double rel_error;
    double tolerance;
    bool pass;
};
std::vector<ScalingRow> scaling_report(const ExpansionContext& ctx, const std::vector<double>& ts,
                                       const Grid& reference, const JOptions& jopts = {});

// Scale-covariant profile evaluation helper: evaluates on the grid
// proportional to sqrt(t) and rescales back onto `reference`.
Field profile_rescaled(const std::string& name, double t, const Grid& reference,
                       const ExpansionContext& ctx, const JOptions& jopts, int* exponent_out);

}  // namespace nsasym

#endif
