#include "qchain/csvio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qchain/errors.hpp"

namespace qchain {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ValidationError("bad numeric field in CSV: '" + s + "'");
    return v;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);

    out << "t";
    if (traj.record.sigma_z)
        for (int q = 1; q <= traj.n_qubits; ++q) out << ",sigma_z_" << q;
    if (traj.record.currents)
        for (const auto& [k, i] : traj.bond_pairs) out << ",j_" << k << "_" << i;
    if (traj.record.kinetics)
        for (const auto& [k, i] : traj.bond_pairs) out << ",T_" << k << "_" << i;
    for (int q = 1; q <= traj.n_qubits; ++q) out << ",h_" << q;
    out << "\n";

    for (std::size_t m = 0; m < traj.n_points(); ++m) {
        out << format_double(traj.times[m]);
        if (traj.record.sigma_z)
            for (int q = 1; q <= traj.n_qubits; ++q) out << "," << format_double(traj.sigma(m, q));
        if (traj.record.currents)
            for (std::size_t b = 0; b < traj.n_bonds(); ++b)
                out << "," << format_double(traj.current(m, b));
        if (traj.record.kinetics)
            for (std::size_t b = 0; b < traj.n_bonds(); ++b)
                out << "," << format_double(traj.kinetic(m, b));
        for (int q = 1; q <= traj.n_qubits; ++q) out << "," << format_double(traj.field(m, q));
        out << "\n";
    }
    if (!out) throw ValidationError("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    return out;
}

} // namespace

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open for reading: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty CSV: " + path);
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "t")
        throw ValidationError("CSV header must start with 't': " + path);

    Trajectory traj;
    traj.record.sigma_z = traj.record.currents = traj.record.kinetics = false;
    traj.record.snapshots = false;
    int n_sigma = 0, n_fields = 0;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h.rfind("sigma_z_", 0) == 0) {
            traj.record.sigma_z = true;
            ++n_sigma;
        } else if (h.rfind("j_", 0) == 0) {
            traj.record.currents = true;
            int k = 0, i = 0;
            if (std::sscanf(h.c_str(), "j_%d_%d", &k, &i) != 2)
                throw ValidationError("bad current column '" + h + "'");
            traj.bond_pairs.emplace_back(k, i);
        } else if (h.rfind("T_", 0) == 0) {
            traj.record.kinetics = true;
        } else if (h.rfind("h_", 0) == 0) {
            ++n_fields;
        } else {
            throw ValidationError("unknown CSV column '" + h + "'");
        }
    }
    traj.n_qubits = n_fields;
    if (traj.record.sigma_z && n_sigma != n_fields)
        throw ValidationError("inconsistent sigma_z/h column counts in " + path);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw ValidationError("CSV row width mismatch in " + path);
        std::size_t c = 0;
        traj.times.push_back(parse_double(cells[c++]));
        if (traj.record.sigma_z)
            for (int q = 0; q < traj.n_qubits; ++q) traj.sigma_z.push_back(parse_double(cells[c++]));
        if (traj.record.currents)
            for (std::size_t b = 0; b < traj.bond_pairs.size(); ++b)
                traj.currents.push_back(parse_double(cells[c++]));
        if (traj.record.kinetics)
            for (std::size_t b = 0; b < traj.bond_pairs.size(); ++b)
                traj.kinetics.push_back(parse_double(cells[c++]));
        for (int q = 0; q < traj.n_qubits; ++q)
            traj.field_values.push_back(parse_double(cells[c++]));
    }
    return traj;
}

void write_fields_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "t";
    for (int q = 1; q <= traj.n_qubits; ++q) out << ",h_" << q;
    out << "\n";
    for (std::size_t m = 0; m < traj.n_points(); ++m) {
        out << format_double(traj.times[m]);
        for (int q = 1; q <= traj.n_qubits; ++q) out << "," << format_double(traj.field(m, q));
        out << "\n";
    }
    if (!out) throw ValidationError("write failed: " + path);
}

} // namespace qchain
