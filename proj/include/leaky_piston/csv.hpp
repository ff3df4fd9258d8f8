/**
 * @file csv.hpp
 * @brief CSV and manifest writers. Numbers are printed with 17 significant
 * digits in the classic locale so outputs round-trip and are reproducible.
 */
#pragma once

#include "leaky_piston/dn_coupling.hpp"
#include "leaky_piston/piston.hpp"
#include "leaky_piston/volterra.hpp"

#include <filesystem>
#include <fstream>
#include <locale>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace leaky_piston::io {

inline std::string format_number(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << x;
    return os.str();
}

inline std::ofstream open_for_writing(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.imbue(std::locale::classic());
    return out;
}

/// Writes header + rows; every row must match the header width.
inline void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
    auto out = open_for_writing(path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw std::logic_error("write_table: row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Two columns: s, value.
inline void write_grid_function(const std::filesystem::path& path, const GridFunction& f) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < f.size(); ++i) rows.push_back({format_number(f.node(i)), format_number(f[i])});
    write_table(path, {"s", "value"}, rows);
}

/// Two columns: k, ratio.
inline void write_norm_history(const std::filesystem::path& path, const std::vector<double>& ratios) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < ratios.size(); ++k) rows.push_back({std::to_string(k), format_number(ratios[k])});
    write_table(path, {"k", "ratio"}, rows);
}

/// Columns: t, d, v, p.
inline void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& s = traj.states()[i];
        rows.push_back({format_number(traj.times()[i]), format_number(s.d), format_number(s.v),
                        format_number(s.p_interface)});
    }
    write_table(path, {"t", "d", "v", "p"}, rows);
}

/// Columns: k, residual_rms (k is the 1-based iteration counter).
inline void write_trace(const std::filesystem::path& path, const IterationTrace& trace) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < trace.residuals.size(); ++k) {
        rows.push_back({std::to_string(k + 1), format_number(trace.residuals[k])});
    }
    write_table(path, {"k", "residual_rms"}, rows);
}

/// Flat `key = value` run manifest, keys sorted.
inline void write_manifest(const std::filesystem::path& path, const std::map<std::string, std::string>& entries) {
    auto out = open_for_writing(path);
    for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace leaky_piston::io
