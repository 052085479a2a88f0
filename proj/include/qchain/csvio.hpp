#pragma once

#include <string>

#include "qchain/propagator.hpp"

namespace qchain {

/// Full-precision decimal (round-trip exact) representation of a double.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Columns, in order: t, sigma_z_1..N, j_<k>_<i> per bond ascending,
/// T_<k>_<i> per bond, h_1..N.  Header row mandatory; disabled records omit
/// their columns.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Exact reload of a trajectory written by write_trajectory_csv
/// (snapshots and norms are not round-tripped through CSV).
Trajectory read_trajectory_csv(const std::string& path);

/// Auxiliary field schedule as columns t, h_1..N.
void write_fields_csv(const std::string& path, const Trajectory& traj);

} // namespace qchain
