#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "planrl/core/error.hpp"
#include "planrl/core/text.hpp"

namespace planrl::cli {

struct CurvePoint {
  int step = 0;
  int stage = 0;
  double planner_quality = 0.0;     // plan quality / 15
  double executor_adherence = 0.0;  // adherence / 2
  double e2e = 0.0;                 // e2e / 2
  bool stage_boundary = false;
};

struct CurveData {
  std::string header_comment;
  std::vector<CurvePoint> points;
};

// Reads a training metrics.csv and normalizes the three component curves to
// [0,1], marking the first step of every new stage.
inline CurveData curves_from_metrics(const std::filesystem::path& metrics_csv) {
  std::ifstream in(metrics_csv);
  if (!in) raise(ErrorKind::Usage, "missing metrics file: " + metrics_csv.string());
  CurveData data;
  std::string line;
  int col_step = -1, col_stage = -1, col_adh = -1, col_e2e = -1, col_pq = -1;
  int prev_stage = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      data.header_comment += line + "\n";
      continue;
    }
    auto cells = split_on(line, ",");
    if (col_step < 0) {
      for (size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "step") col_step = static_cast<int>(i);
        if (cells[i] == "stage") col_stage = static_cast<int>(i);
        if (cells[i] == "adherence_mean") col_adh = static_cast<int>(i);
        if (cells[i] == "e2e_mean") col_e2e = static_cast<int>(i);
        if (cells[i] == "plan_quality_mean") col_pq = static_cast<int>(i);
      }
      if (col_step < 0 || col_stage < 0 || col_adh < 0 || col_e2e < 0 || col_pq < 0)
        raise(ErrorKind::Usage, "metrics file lacks the expected columns");
      continue;
    }
    CurvePoint p;
    p.step = std::stoi(cells[static_cast<size_t>(col_step)]);
    p.stage = std::stoi(cells[static_cast<size_t>(col_stage)]);
    p.executor_adherence = std::stod(cells[static_cast<size_t>(col_adh)]) / 2.0;
    p.e2e = std::stod(cells[static_cast<size_t>(col_e2e)]) / 2.0;
    p.planner_quality = std::stod(cells[static_cast<size_t>(col_pq)]) / 15.0;
    p.stage_boundary = prev_stage >= 0 && p.stage != prev_stage;
    prev_stage = p.stage;
    data.points.push_back(p);
  }
  if (data.points.empty()) raise(ErrorKind::Usage, "metrics file has no data rows");
  return data;
}

inline void write_curves_csv(const CurveData& data, const std::filesystem::path& out_path) {
  std::ofstream out(out_path);
  if (!out) raise(ErrorKind::Io, "cannot write " + out_path.string());
  out << data.header_comment;
  out << "step,stage,planner_quality,executor_adherence,e2e,stage_boundary\n";
  for (const auto& p : data.points) {
    out << p.step << "," << p.stage << "," << format_double(p.planner_quality) << ","
        << format_double(p.executor_adherence) << "," << format_double(p.e2e) << ","
        << (p.stage_boundary ? 1 : 0) << "\n";
  }
}

// Minimal plot: three polylines on a fixed viewport with stage boundary rules.
inline void write_curves_svg(const CurveData& data, const std::filesystem::path& out_path) {
  const double w = 720, h = 260, pad = 40;
  double x_max = static_cast<double>(data.points.back().step);
  if (x_max <= 0) x_max = 1;
  auto x_of = [&](int step) { return pad + (w - 2 * pad) * step / x_max; };
  auto y_of = [&](double v) { return h - pad - (h - 2 * pad) * v; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  if (!data.header_comment.empty()) {
    std::string note = data.header_comment;
    for (char& c : note)
      if (c == '\n') c = ' ';
    svg << "<!-- " << note << "-->\n";
  }
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\""
      << h - pad << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
      << "\" stroke=\"black\"/>\n";
  for (const auto& p : data.points)
    if (p.stage_boundary)
      svg << "<line x1=\"" << x_of(p.step) << "\" y1=\"" << pad << "\" x2=\"" << x_of(p.step)
          << "\" y2=\"" << h - pad << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  struct Series {
    const char* color;
    double (*get)(const CurvePoint&);
    const char* label;
  };
  const Series series[] = {
      {"#c0392b", [](const CurvePoint& p) { return p.planner_quality; }, "planner quality"},
      {"#2980b9", [](const CurvePoint& p) { return p.executor_adherence; }, "executor adherence"},
      {"#27ae60", [](const CurvePoint& p) { return p.e2e; }, "e2e"}};
  for (const auto& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : data.points) svg << x_of(p.step) << "," << y_of(s.get(p)) << " ";
    svg << "\"/>\n";
  }
  double ly = pad;
  for (const auto& s : series) {
    svg << "<rect x=\"" << w - pad - 150 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\""
        << s.color << "\"/>\n";
    svg << "<text x=\"" << w - pad - 135 << "\" y=\"" << ly + 1 << "\" font-size=\"11\">" << s.label
        << "</text>\n";
    ly += 16;
  }
  svg << "</svg>\n";

  std::ofstream out(out_path);
  if (!out) raise(ErrorKind::Io, "cannot write " + out_path.string());
  out << svg.str();
}

}  // namespace planrl::cli
