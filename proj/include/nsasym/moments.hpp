#ifndef NSASYM_MOMENTS_HPP
#define NSASYM_MOMENTS_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsasym/multiindex.hpp"
#include "nsasym/trajectory.hpp"

namespace nsasym {

using Vec2 = std::array<double, 2>;

enum class CoeffKind { raw_I, renormalized, log_coeff };

struct SpacetimeCoeff {
    Vec2 value{0, 0};
    Vec2 error{0, 0};
    std::string tail_model;
};

// All scalar coefficients of the expansion: initial vorticity moments
// b_alpha = int (-y)^alpha omega0 dy, space-time moments of I[u] (raw and
// renormalized), and the profile moment constants
// c_{p,beta} = int (-y)^beta I_p(1,y) dy the log terms are built from.
struct MomentTable {
    int dim = 2;
    std::string run_id;
    std::map<MultiIndex, double> initial;
    std::map<std::pair<int, MultiIndex>, SpacetimeCoeff> raw;     // (l, beta) -> d
    std::map<std::pair<int, MultiIndex>, SpacetimeCoeff> renorm;  // (l, beta) -> Claim 3.1 constant
    std::map<std::pair<int, MultiIndex>, Vec2> profile_moment;    // (p, beta) -> c

    double initial_moment(const MultiIndex& alpha) const;
    const SpacetimeCoeff& raw_coeff(int l, const MultiIndex& beta) const;
    const SpacetimeCoeff& renorm_coeff(int l, const MultiIndex& beta) const;
    Vec2 profile_c(int p, const MultiIndex& beta) const;
    bool has_profile_c(int p) const;
};

// Per-snapshot moments of the nonlinearity, q_beta(t_i) = int (-y)^beta I dy.
struct MomentSeries {
    std::vector<double> times;
    std::map<MultiIndex, std::vector<Vec2>> q;
    std::string run_id;
};
MomentSeries extract_moment_series(const Trajectory& traj, int max_order);

// A profile approximant removed from the integrand before time integration:
// I_p evaluated at s (same_time) or at 1+s per the renormalization.
struct Subtrahend {
    int p;
    bool shifted;
};

// Time integral int_0^inf (-s)^l [q_beta(s) - subtrahend moments] ds by
// trapezoid on the log-time snapshot grid, a power-law head on (0, t_min]
// and a power-law tail on [t_max, inf) with exponents fixed by the scaling
// counts.  Throws when the combination is non-integrable.
SpacetimeCoeff spacetime_moment(const MomentSeries& series, int l, const MultiIndex& beta,
                                const std::vector<Subtrahend>& subs, const MomentTable& table);

// The renormalized integrand samples (-s)^l [q_beta - subs](s); exposed for
// the head/tail behavior diagnostics.
std::vector<Vec2> renormalized_integrand(const MomentSeries& series, int l, const MultiIndex& beta,
                                         const std::vector<Subtrahend>& subs, const MomentTable& table);

// Closed form of int_0^t s^l (1+s)^{-l-1} ds = log(1+t) + P_l((1+t)^{-1}).
double log_time_integral(int l, double t);
// P_l evaluated at z in [0,1]; P_l(0) is the constant the log terms leave in U_m.
double log_time_poly(int l, double z);

// log t coefficient of Claim 3.2: int (-1)^l (-y)^beta I_p(1,y) dy with
// 2l+|beta| = p-2 and n+3 <= p <= 2n+2.
Vec2 log_coefficient(int p, int l, const MultiIndex& beta, const MomentTable& table);

// Claim 3.1: the constant term of P plus the explicit t-dependent corrections
// as (power of t^{-1/2}, coefficient) pairs.
struct Claim31Result {
    SpacetimeCoeff constant;
    std::vector<std::pair<int, Vec2>> poly;  // power k: coefficient of t^{-k/2}
};
std::vector<Subtrahend> claim31_subtrahends(int n, int l, const MultiIndex& beta);
Claim31Result claim31_constant(const MomentSeries& series, int l, const MultiIndex& beta,
                               const MomentTable& table);

// coefficients.json and its CSV mirror.
void write_coefficients(const std::string& json_path, const std::string& csv_path,
                        const MomentTable& table, const std::string& config_hash);
MomentTable read_coefficients(const std::string& json_path);

}  // namespace nsasym

#endif
