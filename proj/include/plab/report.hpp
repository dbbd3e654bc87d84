#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plab/verifier.hpp"

namespace plab {

inline constexpr const char* kVersionString = "plab 0.1.0";

/// One row of a refinement or sweep series, plot-ready (x = h or ε).
struct SeriesRow {
  std::string series_id;
  int level = 0;
  double x = 0.0;
  double y = 0.0;
};

inline nlohmann::json to_json(const ReportContext& c) {
  return {{"p", c.p}, {"epsilon", c.epsilon}, {"h", c.h}, {"dt", c.dt},
          {"cutoff", c.cutoff_id}};
}

inline nlohmann::json to_json(const EstimateReport& r) {
  return {{"name", r.name},       {"lhs", r.lhs},
          {"rhs", r.rhs},         {"margin", r.margin},
          {"tolerance", r.tolerance}, {"pass", r.pass},
          {"context", to_json(r.context)}};
}

inline nlohmann::json to_json(const IdentityLedger& l) {
  return {{"term_I", l.term_I},   {"term_II", l.term_II}, {"term_III", l.term_III},
          {"term_IV", l.term_IV}, {"term_V", l.term_V},   {"residual", l.residual()},
          {"context", to_json(l.context)}};
}

namespace detail {

inline std::string csv_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace detail

inline void write_reports_json(const std::vector<EstimateReport>& reports,
                               const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  detail::write_text(path, arr.dump(2) + "\n");
}

inline void write_reports_csv(const std::vector<EstimateReport>& reports,
                              const std::filesystem::path& path) {
  std::ostringstream os;
  os << "name,p,epsilon,h,dt,cutoff,lhs,rhs,margin,tolerance,pass\n";
  for (const auto& r : reports) {
    os << r.name << ',' << detail::csv_double(r.context.p) << ','
       << detail::csv_double(r.context.epsilon) << ',' << detail::csv_double(r.context.h) << ','
       << detail::csv_double(r.context.dt) << ',' << '"' << r.context.cutoff_id << '"' << ','
       << detail::csv_double(r.lhs) << ',' << detail::csv_double(r.rhs) << ','
       << detail::csv_double(r.margin) << ',' << detail::csv_double(r.tolerance) << ','
       << (r.pass ? "true" : "false") << '\n';
  }
  detail::write_text(path, os.str());
}

inline void write_series_csv(const std::vector<SeriesRow>& rows,
                             const std::filesystem::path& path) {
  std::ostringstream os;
  os << "series,level,x,y\n";
  for (const auto& r : rows)
    os << r.series_id << ',' << r.level << ',' << detail::csv_double(r.x) << ','
       << detail::csv_double(r.y) << '\n';
  detail::write_text(path, os.str());
}

}  // namespace plab
