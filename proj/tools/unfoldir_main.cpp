// Command-line front end: enhance / decompose / eval / trace / tune.
// Exit codes: 0 success, 1 usage or configuration, 2 file IO, 3 numerical.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unfoldir/unfoldir.hpp"

namespace {

using namespace unfoldir;

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ';';
  return s;
}

void fail_line(const char* category, const std::string& msg) {
  std::cerr << "error: " << category << ": " << one_line(msg) << "\n";
}

std::string pick(const std::string& flag_value, const std::string& file_value,
                 const char* what) {
  if (!flag_value.empty()) return flag_value;
  if (!file_value.empty()) return file_value;
  throw ConfigError(std::string("missing ") + what);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct EnhanceArgs {
  std::string input, output, config, output_mode, trace_dir;
  int stages = 0;
};

int do_enhance(const EnhanceArgs& a, bool trace_only) {
  CliConfigFile file;
  if (!a.config.empty()) file = load_cli_config(a.config);
  SolverConfig cfg = file.solver;
  if (a.stages > 0) cfg.stages = a.stages;
  cfg.validate();

  const std::string input = pick(a.input, file.input, "--input");
  const std::string mode_str = !a.output_mode.empty() ? a.output_mode
                               : !file.output_mode.empty() ? file.output_mode
                                                           : "reflectance";
  const OutputMode mode = output_mode_from_string(mode_str);

  Image img = read_image(input);
  PipelineResult res = run_pipeline(img, cfg, mode);

  if (trace_only) {
    const std::string dir = pick(a.trace_dir, file.trace_dir, "--trace-dir");
    write_trace(res, dir);
    std::cout << "trace_dir=" << dir << "\n";
  } else {
    const std::string output = pick(a.output, file.output, "--output");
    write_image(res.output, output);
    const std::string dir = !a.trace_dir.empty() ? a.trace_dir : file.trace_dir;
    if (!dir.empty()) write_trace(res, dir);
    std::cout << "output=" << output << "\n";
  }
  std::cout << "final_isic=" << fmt(res.final_isic) << "\n";
  return 0;
}

int do_decompose(const std::string& input, const std::string& out_r,
                 const std::string& out_l) {
  Image img = read_image(input);
  RetinexPair pair = decompose_init(img, SolverConfig{}.epsilon);
  write_image(clamp_unit(pair.reflectance), out_r);
  write_image(Image(clamp_unit(pair.illumination)), out_l);
  std::cout << "reflectance=" << out_r << "\n"
            << "illumination=" << out_l << "\n";
  return 0;
}

int do_eval(const std::string& restored_path, const std::string& reference_path) {
  Image restored = read_image(restored_path);
  Image reference = read_image(reference_path);
  const auto t0 = std::chrono::steady_clock::now();
  MetricsReport rep;
  rep.psnr = psnr(restored, reference);
  rep.ssim = ssim(restored, reference);
  rep.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  std::cout << "psnr=" << fmt(rep.psnr) << "\n"
            << "ssim=" << fmt(rep.ssim) << "\n"
            << "runtime_ms=" << fmt(rep.runtime_ms) << "\n";
  return 0;
}

int do_tune(const std::vector<std::string>& inputs, const std::string& config_in,
            const std::string& config_out, int budget) {
  SolverConfig cfg0 = load_config(config_in);
  std::vector<Image> images;
  images.reserve(inputs.size());
  for (const std::string& p : inputs) images.push_back(read_image(p));
  SolverConfig best = tune_params(images, cfg0, budget, &std::cerr);
  save_config(best, config_out);
  std::cout << "config=" << config_out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retinex-decomposition illumination restoration"};
  app.require_subcommand(1);

  EnhanceArgs ea;
  CLI::App* enhance = app.add_subcommand("enhance", "restore one image");
  enhance->add_option("--input", ea.input, "input image (ppm/pgm/png)");
  enhance->add_option("--output", ea.output, "restored image path");
  enhance->add_option("--config", ea.config, "solver config file");
  enhance->add_option("--stages", ea.stages, "override stage count");
  enhance->add_option("--output-mode", ea.output_mode, "reflectance|relit");
  enhance->add_option("--trace-dir", ea.trace_dir, "also dump per-stage trace");

  std::string d_input, d_out_r, d_out_l;
  CLI::App* decompose = app.add_subcommand("decompose", "split into reflectance and illumination");
  decompose->add_option("--input", d_input, "input image")->required();
  decompose->add_option("--out-reflectance", d_out_r, "reflectance image path")->required();
  decompose->add_option("--out-illumination", d_out_l, "illumination image path")->required();

  std::string e_restored, e_reference;
  CLI::App* eval = app.add_subcommand("eval", "quality metrics against a reference");
  eval->add_option("--restored", e_restored, "restored image")->required();
  eval->add_option("--reference", e_reference, "ground-truth image")->required();

  EnhanceArgs ta;
  CLI::App* trace = app.add_subcommand("trace", "full per-stage dump");
  trace->add_option("--input", ta.input, "input image");
  trace->add_option("--trace-dir", ta.trace_dir, "trace output directory");
  trace->add_option("--config", ta.config, "solver config file");
  trace->add_option("--stages", ta.stages, "override stage count");

  std::vector<std::string> t_inputs;
  std::string t_config_in, t_config_out;
  int t_budget = 0;
  CLI::App* tune = app.add_subcommand("tune", "training-free parameter search");
  tune->add_option("--inputs", t_inputs, "tuning images")->required();
  tune->add_option("--config-in", t_config_in, "seed config")->required();
  tune->add_option("--config-out", t_config_out, "tuned config destination")->required();
  tune->add_option("--budget", t_budget, "objective evaluations allowed")->required();

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(enhance)) return do_enhance(ea, false);
    if (app.got_subcommand(decompose)) return do_decompose(d_input, d_out_r, d_out_l);
    if (app.got_subcommand(eval)) return do_eval(e_restored, e_reference);
    if (app.got_subcommand(trace)) return do_enhance(ta, true);
    if (app.got_subcommand(tune)) return do_tune(t_inputs, t_config_in, t_config_out, t_budget);
    fail_line("usage", "no subcommand given");
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    fail_line("usage", e.what());
    return 1;
  } catch (const ConfigError& e) {
    fail_line("usage", e.what());
    return 1;
  } catch (const ShapeError& e) {
    fail_line("usage", e.what());
    return 1;
  } catch (const IoError& e) {
    fail_line("io", e.what());
    return 2;
  } catch (const NumericalError& e) {
    fail_line("numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    fail_line("internal", e.what());
    return 3;
  }
}
