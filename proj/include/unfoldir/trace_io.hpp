#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "unfoldir/image_io.hpp"
#include "unfoldir/pipeline.hpp"

namespace unfoldir {

namespace detail {

// Shortest round-trippable decimal; snprintf keeps the byte stream identical
// run to run, which the reproducibility contract depends on.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Flat line-oriented record per stage. No timings, so two identical runs
// produce byte-identical documents.
inline std::string metrics_document(const PipelineResult& res) {
  std::string out;
  for (const StageTrace& t : res.traces) {
    out += "stage=" + std::to_string(t.stage_index) + "\n";
    out += "energy=" + detail::format_double(t.energy) + "\n";
    if (t.isic) out += "isic=" + detail::format_double(*t.isic) + "\n";
    std::string iters, resids;
    for (std::size_t i = 0; i < t.cg_reports.size(); ++i) {
      if (i) {
        iters += ",";
        resids += ",";
      }
      iters += std::to_string(t.cg_reports[i].iterations);
      resids += detail::format_double(t.cg_reports[i].relative_residual);
    }
    out += "cg_iterations=" + iters + "\n";
    out += "cg_residuals=" + resids + "\n";
  }
  out += "final_isic=" + detail::format_double(res.final_isic) + "\n";
  return out;
}

// One directory per run: four images per stage (both half-step intermediates
// and both refined fields) plus the metrics document.
inline void write_trace(const PipelineResult& res, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create trace directory " + dir + ": " + ec.message());
  char name[64];
  for (const StageTrace& t : res.traces) {
    std::snprintf(name, sizeof name, "stage%02d_l_hat.ppm", t.stage_index);
    write_image(Image(t.l_hat), dir + "/" + name);
    std::snprintf(name, sizeof name, "stage%02d_l.ppm", t.stage_index);
    write_image(Image(t.l), dir + "/" + name);
    std::snprintf(name, sizeof name, "stage%02d_r_hat.ppm", t.stage_index);
    write_image(t.r_hat, dir + "/" + name);
    std::snprintf(name, sizeof name, "stage%02d_r.ppm", t.stage_index);
    write_image(t.r, dir + "/" + name);
  }
  std::ofstream f(dir + "/metrics.txt", std::ios::binary);
  if (!f) throw IoError("cannot open " + dir + "/metrics.txt for writing");
  f << metrics_document(res);
  if (!f) throw IoError("write failed for " + dir + "/metrics.txt");
}

}  // namespace unfoldir
