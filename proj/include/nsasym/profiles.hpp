#ifndef NSASYM_PROFILES_HPP
#define NSASYM_PROFILES_HPP

#include <memory>
#include <string>
#include <vector>

#include "nsasym/field.hpp"
#include "nsasym/jprofile.hpp"
#include "nsasym/kernels.hpp"
#include "nsasym/moments.hpp"
#include "nsasym/trajectory.hpp"

namespace nsasym {

// One kernel summand of an expansion profile: coeff * t^{t_power} * K(t).
struct KernelTerm {
    KernelSpec spec;
    double coeff = 0;
    int out_comp = 0;
    double t_power = 0;
};

// A profile that is a finite sum of kernels (everything except I_p and the J
// tails).  Heat-family terms are evaluated pointwise from the closed form,
// nonlocal terms through one accumulated Fourier multiplier per component.
struct ProfileDescriptor {
    std::string name;
    Rank rank = Rank::scalar;
    int ncomp = 1;
    int scaling_exponent = 0;  // n + m
    std::vector<KernelTerm> terms;

    Field evaluate(double t, const Grid& g) const;
    std::string manifest() const;  // JSON text of the term list
};

// Omega_m as the 2-D scalar (the 12-component of the antisymmetric tensor).
ProfileDescriptor build_omega_profile(int m, const MomentTable& table);
// U_m for 1 <= m <= n from the absolutely convergent coefficients.
ProfileDescriptor build_u_profile_low(int m, const MomentTable& table);
// K_m for n+1 <= m <= 2n: the fields multiplying log t.
ProfileDescriptor build_k_profile(int m, const MomentTable& table);
// Kernel part of U_m for n+1 <= m <= 2n (renormalized constants, the tail and
// Q-polynomial corrections); the J tails are added by u_profile_high.
ProfileDescriptor build_u_profile_high_kernels(int m, const MomentTable& table);

Field omega_profile_scalar(int m, double t, const Grid& g, const MomentTable& table);
// Tensor form, antisymmetric in (i,j).
Field omega_profile(int m, double t, const Grid& g, const MomentTable& table);
Field u_profile_low(int m, double t, const Grid& g, const MomentTable& table);
Field k_profile(int m, double t, const Grid& g, const MomentTable& table);
// I_p = sum_{m} Omega_{p-n-m}^{*j} . U_m as pointwise products of profiles.
Field i_p_profile(int p, double t, const Grid& g, const MomentTable& table);

// Profiles plus the J machinery; shared by the high orders and the harness.
struct ExpansionContext {
    MomentTable table;
    std::shared_ptr<JContext> j;
};

struct ContextOptions {
    double pad_L = 64.0;
    int pad_N = 512;
};
ExpansionContext make_expansion_context(const MomentTable& table, const ContextOptions& = {});

Field u_profile_high(int m, double t, const Grid& g, const ExpansionContext& ctx,
                     const JOptions& = {});
Field u_profile(int m, double t, const Grid& g, const ExpansionContext& ctx, const JOptions& = {});
// sum_{m<=M} U_m (+ log t sum K_m when with_logs).
Field expansion_sum(int M, bool with_logs, double t, const Grid& g, const ExpansionContext& ctx,
                    const JOptions& = {});

// Full coefficient extraction from a finished run: initial moments, raw
// space-time coefficients, profile moment constants from I_p(1,.), and the
// renormalized constants.
struct TableBuildOptions {
    ContextOptions pad;
    int series_order = 4;  // |beta| cap of the recorded I moments
};
MomentTable build_moment_table(const Trajectory& traj, const TableBuildOptions& = {});

// Profile manifest bundle for audit.
void write_profile_manifest(const std::string& path, const MomentTable& table,
                            const std::string& config_hash);

}  // namespace nsasym

#endif
