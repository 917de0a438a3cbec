#ifndef NSASYM_TRAJECTORY_HPP
#define NSASYM_TRAJECTORY_HPP

#include <string>
#include <vector>

#include "nsasym/field.hpp"
#include "nsasym/grid.hpp"
#include "nsasym/solver.hpp"

namespace nsasym {

struct Snapshot {
    double t;
    Field omega;
    Field u;
    Field inl;  // I[u]
};

// Directory-backed run: run.json + per-snapshot NSAF1 field files + norms.csv.
class Trajectory {
  public:
    static Trajectory create(const std::string& dir, const Grid& grid, const InitialDataSpec& spec,
                             const std::vector<double>& snapshot_times, double t_end,
                             const std::string& config_hash);
    static Trajectory open(const std::string& dir);

    void append(const Snapshot& snap);
    void finalize();  // writes norms.csv and completes run.json

    int size() const { return static_cast<int>(times_.size()); }
    double time(int i) const { return times_.at(i); }
    const std::vector<double>& times() const { return times_; }
    Snapshot load(int i) const;
    Field load_omega(int i) const;
    Field load_u(int i) const;
    Field load_inl(int i) const;

    const Grid& grid() const { return grid_; }
    const InitialDataSpec& initial_spec() const { return spec_; }
    const std::string& dir() const { return dir_; }
    const std::string& config_hash() const { return config_hash_; }
    double t_end() const { return t_end_; }

  private:
    std::string dir_;
    Grid grid_;
    InitialDataSpec spec_;
    std::vector<double> times_;
    double t_end_ = 0;
    std::string config_hash_;
    int written_ = 0;
    std::vector<std::string> norm_rows_;
};

}  // namespace nsasym

#endif
