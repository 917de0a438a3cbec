#include "nsasym/trajectory.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "nsasym/field_io.hpp"
#include "nsasym/util.hpp"

namespace nsasym {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string snap_path(const std::string& dir, int i, const char* what) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%04d_%s.nsaf", i, what);
    return (fs::path(dir) / buf).string();
}

}  // namespace

Trajectory Trajectory::create(const std::string& dir, const Grid& grid, const InitialDataSpec& spec,
                              const std::vector<double>& snapshot_times, double t_end,
                              const std::string& config_hash) {
    Trajectory t;
    t.dir_ = dir;
    t.grid_ = grid;
    t.spec_ = spec;
    t.t_end_ = t_end;
    t.config_hash_ = config_hash;
    t.times_ = snapshot_times;
    fs::create_directories(dir);

    json meta;
    meta["format"] = "nsasym-run-1";
    meta["grid"] = {{"n", grid.dim}, {"N", grid.points_per_dim}, {"L", grid.half_extent}};
    meta["initial"] = {{"generator", "stream_hessian"},
                       {"amplitude", spec.amplitude},
                       {"sigma", spec.sigma},
                       {"center", {spec.center[0], spec.center[1]}}};
    meta["dt_policy"] = {{"scheme", "ifrk4"}, {"dealias", "2/3"}, {"cfl_safety", 0.5}};
    meta["snapshot_times"] = snapshot_times;
    meta["t_end"] = t_end;
    meta["config_hash"] = config_hash;
    std::ofstream os(fs::path(dir) / "run.json");
    os << meta.dump(2) << "\n";
    return t;
}

Trajectory Trajectory::open(const std::string& dir) {
    std::ifstream is(fs::path(dir) / "run.json");
    if (!is) throw std::runtime_error("trajectory: cannot open " + dir + "/run.json");
    json meta = json::parse(is);
    Trajectory t;
    t.dir_ = dir;
    t.grid_ = make_grid(meta["grid"]["n"].get<int>(), meta["grid"]["L"].get<double>(),
                        meta["grid"]["N"].get<int>());
    t.spec_.amplitude = meta["initial"]["amplitude"].get<double>();
    t.spec_.sigma = meta["initial"]["sigma"].get<double>();
    t.spec_.center[0] = meta["initial"]["center"][0].get<double>();
    t.spec_.center[1] = meta["initial"]["center"][1].get<double>();
    t.times_ = meta["snapshot_times"].get<std::vector<double>>();
    t.t_end_ = meta["t_end"].get<double>();
    t.config_hash_ = meta.value("config_hash", "");
    t.written_ = t.size();
    return t;
}

void Trajectory::append(const Snapshot& snap) {
    const int i = written_;
    if (i >= size() || std::abs(times_[i] - snap.t) > 1e-12)
        throw std::runtime_error("trajectory: snapshot out of schedule");
    write_field(snap_path(dir_, i, "omega"), snap.omega);
    write_field(snap_path(dir_, i, "u"), snap.u);
    write_field(snap_path(dir_, i, "inl"), snap.inl);

    const double inf = std::numeric_limits<double>::infinity();
    for (double q : {1.0, 2.0, inf}) {
        std::string qs = std::isinf(q) ? "inf" : format_double(q);
        norm_rows_.push_back(format_double(snap.t) + "," + qs + "," + format_double(lq_norm(snap.u, q)) +
                             "," + format_double(lq_norm(snap.omega, q)) + "," +
                             format_double(lq_norm_interior(snap.u, q)) + "," +
                             format_double(lq_norm_interior(snap.omega, q)));
    }
    ++written_;
}

void Trajectory::finalize() {
    std::ofstream os(fs::path(dir_) / "norms.csv");
    os << "t,q,u_norm,omega_norm,u_norm_interior,omega_norm_interior\n";
    for (const auto& row : norm_rows_) os << row << "\n";
}

Snapshot Trajectory::load(int i) const {
    Snapshot s;
    s.t = times_.at(i);
    s.omega = read_field(snap_path(dir_, i, "omega"));
    s.u = read_field(snap_path(dir_, i, "u"));
    s.inl = read_field(snap_path(dir_, i, "inl"));
    return s;
}

Field Trajectory::load_omega(int i) const { return read_field(snap_path(dir_, i, "omega")); }
Field Trajectory::load_u(int i) const { return read_field(snap_path(dir_, i, "u")); }
Field Trajectory::load_inl(int i) const { return read_field(snap_path(dir_, i, "inl")); }

}  // namespace nsasym
