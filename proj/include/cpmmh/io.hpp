// File formats: the returns CSV ingested for the SV study and the CSV/JSON
// artifacts every experiment writes. Doubles are printed with %.17g so a
// rerun reproduces files byte for byte and values round-trip exactly.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpmmh/diagnostics.hpp"
#include "cpmmh/peskun.hpp"
#include "cpmmh/sampler.hpp"

namespace cpmmh {

struct ReturnsSeries {
  std::vector<std::string> dates;  // empty when the file has no date column
  std::vector<double> log_returns;
};

namespace io_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace io_detail

inline ReturnsSeries load_returns(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_returns: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("load_returns: empty file " + path.string());
  }
  const auto header = io_detail::split_csv_line(line);
  std::ptrdiff_t return_col = -1, date_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "log_return") return_col = static_cast<std::ptrdiff_t>(i);
    if (header[i] == "date") date_col = static_cast<std::ptrdiff_t>(i);
  }
  if (return_col < 0) {
    throw std::invalid_argument("load_returns: no log_return column in " + path.string());
  }

  ReturnsSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = io_detail::split_csv_line(line);
    if (fields.size() <= static_cast<std::size_t>(return_col)) {
      throw std::invalid_argument("load_returns: line " + std::to_string(line_no) +
                                  ": missing log_return field");
    }
    const std::string& raw = fields[static_cast<std::size_t>(return_col)];
    double value = 0.0;
    try {
      std::size_t pos = 0;
      value = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
    } catch (...) {
      throw std::invalid_argument("load_returns: line " + std::to_string(line_no) +
                                  ": unparseable value '" + raw + "'");
    }
    if (!std::isfinite(value)) {
      throw std::invalid_argument("load_returns: line " + std::to_string(line_no) +
                                  ": non-finite log_return");
    }
    series.log_returns.push_back(value);
    if (date_col >= 0 && fields.size() > static_cast<std::size_t>(date_col)) {
      series.dates.push_back(fields[static_cast<std::size_t>(date_col)]);
    }
  }
  return series;
}

inline void write_returns_csv(const std::filesystem::path& path,
                              std::span<const double> log_returns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "log_return\n";
  for (double v : log_returns) out << io_detail::fmt(v) << "\n";
}

// Header fixed as iter,theta_1..theta_p,phi,accepted,move_kind,alpha_prob.
inline void write_trace_csv(const std::filesystem::path& path, const ChainTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iter";
  for (std::size_t j = 1; j <= trace.n_params(); ++j) out << ",theta_" << j;
  out << ",phi,accepted,move_kind,alpha_prob\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << (k + 1);
    for (double v : trace.theta(k)) out << ',' << io_detail::fmt(v);
    out << ',' << io_detail::fmt(trace.phi(k));
    out << ',' << (trace.accepted(k) ? 1 : 0);
    out << ',' << (trace.move(k) == MoveKind::global ? "global" : "local");
    out << ',' << io_detail::fmt(trace.acceptance_prob(k)) << "\n";
  }
}

inline void write_corr_scan_csv(const std::filesystem::path& path,
                                std::span<const CorrelationScanRow> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sigma_u,correlation\n";
  for (const auto& row : rows) {
    out << io_detail::fmt(row.sigma_u) << ',' << io_detail::fmt(row.correlation) << "\n";
  }
}

struct HeatmapRow {
  double sigma_u = 0.0;
  double alpha = 0.0;
  double median_iact = 0.0;  // NaN marks the frozen (0,0) cell
};

inline void write_heatmap_csv(const std::filesystem::path& path,
                              std::span<const HeatmapRow> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sigma_u,alpha,median_iact\n";
  for (const auto& row : rows) {
    out << io_detail::fmt(row.sigma_u) << ',' << io_detail::fmt(row.alpha) << ','
        << io_detail::fmt(row.median_iact) << "\n";
  }
}

inline void write_peskun_scan_csv(const std::filesystem::path& path,
                                  std::span<const PeskunScanRow> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sigma_phi,sigma_z,p_jump,nu\n";
  for (const auto& row : rows) {
    out << io_detail::fmt(row.sigma_phi) << ',' << io_detail::fmt(row.sigma_z) << ','
        << io_detail::fmt(row.p_jump) << ',' << io_detail::fmt(row.nu) << "\n";
  }
}

inline void write_peskun_optimal_csv(const std::filesystem::path& path,
                                     std::span<const PeskunOptimum> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sigma_phi,opt_sigma_z,opt_p_jump\n";
  for (const auto& row : rows) {
    out << io_detail::fmt(row.sigma_phi) << ',' << io_detail::fmt(row.opt_sigma_z) << ','
        << io_detail::fmt(row.opt_p_jump) << "\n";
  }
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

inline nlohmann::json summary_json(const PosteriorSummary& s,
                                   std::span<const std::string> names) {
  nlohmann::json j;
  j["acceptance_rate"] = s.acceptance_rate;
  for (std::size_t i = 0; i < names.size(); ++i) {
    j["posterior_mean"][names[i]] = s.mean[i];
    j["posterior_std"][names[i]] = s.stddev[i];
    j["q05"][names[i]] = s.q05[i];
    j["q50"][names[i]] = s.q50[i];
    j["q95"][names[i]] = s.q95[i];
    j["iact"][names[i]] = s.iact_per_parameter[i];
  }
  return j;
}

}  // namespace cpmmh
