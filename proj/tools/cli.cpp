#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "se2fm/eikonal.hpp"
#include "se2fm/error.hpp"
#include "se2fm/grid.hpp"
#include "se2fm/kernels.hpp"
#include "se2fm/sr_oracle.hpp"
#include "se2fm/tracer.hpp"
#include "se2fm/volume_io.hpp"

namespace se2fm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> parse_reals(const std::string& text, std::size_t expect,
                                const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("cannot parse ") + what + " \"" + text + "\"");
    }
  }
  if (expect != 0 && out.size() != expect) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " needs " + std::to_string(expect) +
                    " comma-separated values, got \"" + text + "\"");
  }
  return out;
}

GridIndex parse_seed(const std::string& text) {
  const auto v = parse_reals(text, 3, "seed i,j,k");
  for (double d : v) {
    if (d != std::floor(d)) {
      throw Error(ErrorCode::kInvalidArgument, "seed indices must be integers");
    }
  }
  return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
}

json grid_json(const GridSpec& g) {
  return {{"nx", g.nx},           {"ny", g.ny},
          {"ntheta", g.ntheta},   {"hx", g.hx},
          {"hy", g.hy},           {"htheta", g.htheta()},
          {"origin_x", g.origin_x}, {"origin_y", g.origin_y}};
}

fs::path manifest_path_for(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".manifest.json");
  return p;
}

class Manifest {
 public:
  explicit Manifest(std::string subcommand) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["outputs"] = json::array();
    doc_["errors"] = json::array();
    doc_["timings"] = json::object();
  }

  json& operator[](const char* key) { return doc_[key]; }
  void output(const fs::path& p) {
    doc_["outputs"].push_back({{"path", p.string()}, {"sha256", sha256_file(p.string())}});
  }
  void error(const json& e) { doc_["errors"].push_back(e); }
  bool has_errors() const { return !doc_["errors"].empty(); }
  void timing(const char* phase, double s) { doc_["timings"][phase] = s; }

  void write(const fs::path& path) const {
    std::ofstream f(path, std::ios::trunc);
    if (!(f << doc_.dump(2) << '\n')) {
      throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
    }
  }

 private:
  json doc_;
};

json error_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
}

CostVolume cost_source(const std::string& cost_path, bool uniform, int paper_n,
                       const GridSpec* field_grid) {
  if (!cost_path.empty() && uniform) {
    throw Error(ErrorCode::kInvalidArgument,
                "give exactly one of --cost and --uniform");
  }
  if (!cost_path.empty()) return load_cost(cost_path);
  if (!uniform) {
    throw Error(ErrorCode::kInvalidArgument,
                "a cost source is required: --cost <header> or --uniform");
  }
  if (paper_n > 0) return CostVolume::uniform(GridSpec::validation(paper_n));
  if (field_grid != nullptr) return CostVolume::uniform(*field_grid);
  throw Error(ErrorCode::kInvalidArgument, "--uniform needs --paper-n <n>");
}

fs::path numbered(const fs::path& out, std::size_t m, std::size_t total) {
  if (total <= 1) return out;
  fs::path p = out;
  const std::string ext = p.extension().string();
  p.replace_filename(p.stem().string() + "_" + std::to_string(m) + ext);
  return p;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string cost;
  bool uniform = false;
  int paper_n = 0;
  std::vector<std::string> seeds;
  double epsilon = 0.1;
  double beta = 1.0;
  std::string mode = "fm";
  double tolerance = 1e-9;
  std::string out;
  std::string dtype = "f32";
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  Manifest manifest("solve");
  const auto t_io = Clock::now();
  const CostVolume cost = cost_source(a.cost, a.uniform, a.paper_n, nullptr);
  double io_seconds = seconds_since(t_io);

  SolveConfig config;
  config.params = {a.epsilon, a.beta};
  config.params.validate();
  config.mode = a.mode == "fp" ? SolveMode::kFixedPoint : SolveMode::kFastMarching;
  config.fixed_point_tolerance = a.tolerance;
  for (const auto& s : a.seeds) config.seeds.push_back(parse_seed(s));
  if (config.seeds.empty()) config.seeds.push_back(cost.grid.center_index());

  const auto t_stencil = Clock::now();
  const StencilCache stencils(cost.grid, config.params);
  const double stencil_seconds = seconds_since(t_stencil);

  SolveStats stats;
  const DistanceField field = solve(cost, config, stencils, &stats);
  const auto t_res = Clock::now();
  const double res = residual(field, cost, stencils);
  const double residual_seconds = seconds_since(t_res);

  const auto t_write = Clock::now();
  const fs::path header = a.out;
  const fs::path data = save_field(field, header, a.dtype == "f64" ? DType::kF64 : DType::kF32);
  io_seconds += seconds_since(t_write);

  json seeds = json::array();
  for (const auto& s : config.seeds) seeds.push_back({s.i, s.j, s.k});
  manifest["config"] = {{"cost", a.cost.empty() ? "uniform" : a.cost},
                        {"paper_n", a.paper_n},
                        {"epsilon", a.epsilon},
                        {"beta", a.beta},
                        {"mode", a.mode},
                        {"tolerance", a.tolerance},
                        {"seeds", seeds},
                        {"dtype", a.dtype}};
  manifest["grid"] = grid_json(cost.grid);
  manifest["results"] = {{"max_residual", res},
                         {"accepted", stats.accepted},
                         {"sweeps", stats.sweeps},
                         {"monotone_acceptance", stats.monotone_acceptance},
                         {"max_stencil_offset", stencils.max_abs_component()},
                         {"kernel_backend", kernels::to_string(kernels::best_backend())}};
  manifest.timing("stencil_seconds", stencil_seconds);
  manifest.timing("solve_seconds", stats.seconds);
  manifest.timing("residual_seconds", residual_seconds);
  manifest.timing("io_seconds", io_seconds);
  manifest.output(header);
  manifest.output(data);
  manifest.write(manifest_path_for(header));

  out << "nodes " << cost.grid.size() << "\n"
      << "max_residual " << std::setprecision(6) << res << "\n"
      << "solve_seconds " << stats.seconds << "\n";
  return 0;
}

// --- trace -----------------------------------------------------------------

struct TraceArgs {
  std::string field;
  std::string cost;
  bool uniform = false;
  std::vector<std::string> starts;
  double step = 0.0;
  double seed_radius = 0.0;
  double epsilon = 0.1;
  double beta = 1.0;
  std::string out;
  std::string format = "csv";
};

int cmd_trace(const TraceArgs& a, std::ostream& out) {
  Manifest manifest("trace");
  const auto t_io = Clock::now();
  const DistanceField field = load_field(a.field);
  const CostVolume cost = cost_source(a.cost, a.uniform, 0, &field.grid);
  if (!(cost.grid == field.grid)) {
    throw Error(ErrorCode::kSizeMismatch, "field and cost grids differ");
  }
  manifest.timing("load_seconds", seconds_since(t_io));
  const MetricParams params{a.epsilon, a.beta};
  params.validate();
  if (a.starts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "trace needs at least one --start");
  }

  TraceOptions opts;
  opts.step = a.step;
  opts.seed_radius = a.seed_radius;
  std::vector<Pose> seeds;
  for (const auto& n : field.zero_nodes()) seeds.push_back(field.grid.pose_of(n));

  json paths = json::array();
  const auto t_trace = Clock::now();
  for (std::size_t m = 0; m < a.starts.size(); ++m) {
    json entry = {{"start", a.starts[m]}};
    try {
      const auto v = parse_reals(a.starts[m], 3, "start x,y,theta");
      const Pose start{v[0], v[1], v[2]};
      const double w0 = interpolate(field, start);
      const GeodesicPath path = trace(field, cost, params, start, seeds, opts);
      const fs::path file = numbered(a.out, m, a.starts.size());
      if (a.format == "json") {
        write_path_json(path, file);
      } else {
        write_path_csv(path, file);
      }
      manifest.output(file);
      entry["path"] = file.string();
      entry["W_start"] = w0;
      entry["length"] = path.length();
      entry["vertices"] = path.poses.size();
      out << "path " << m << " W_start " << std::setprecision(8) << w0
          << " length " << path.length() << " -> " << file.string() << "\n";
    } catch (const Error& e) {
      json err = error_json(e);
      err["start"] = a.starts[m];
      manifest.error(err);
      entry["error"] = err;
      out << "path " << m << " error " << to_string(e.code()) << ": " << e.what() << "\n";
    }
    paths.push_back(entry);
  }
  manifest.timing("trace_seconds", seconds_since(t_trace));
  manifest["config"] = {{"field", a.field},
                        {"cost", a.cost.empty() ? "uniform" : a.cost},
                        {"epsilon", a.epsilon},
                        {"beta", a.beta},
                        {"step", a.step},
                        {"seed_radius", a.seed_radius},
                        {"format", a.format}};
  manifest["grid"] = grid_json(field.grid);
  manifest["results"] = {{"paths", paths}};
  manifest.write(manifest_path_for(a.out));
  return manifest.has_errors() ? 1 : 0;
}

// --- validate --------------------------------------------------------------

struct ValidateArgs {
  std::vector<double> t = {2.0, 4.0, 6.0};
  std::vector<int> n = {25, 50, 101};
  double epsilon = 0.1;
  std::string out;
  SphereOptions sphere;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  Manifest manifest("validate");
  const MetricParams params{a.epsilon, 1.0};
  params.validate();

  std::map<double, SphereSample> samples;
  const auto t_oracle = Clock::now();
  for (double t : a.t) samples.emplace(t, sample_sphere(t, a.sphere));
  manifest.timing("oracle_seconds", seconds_since(t_oracle));

  std::ofstream csv(a.out, std::ios::trunc);
  if (!csv) throw Error(ErrorCode::kIoFailure, "cannot write " + a.out);
  csv << "n,t,E_inf,cpu_seconds\n" << std::setprecision(10);
  json rows = json::array();
  for (int n : a.n) {
    const CostVolume cost = CostVolume::uniform(GridSpec::validation(n));
    SolveConfig config;
    config.params = params;
    config.seeds = {cost.grid.center_index()};
    const std::clock_t c0 = std::clock();
    const DistanceField field = solve(cost, config);
    const double cpu = static_cast<double>(std::clock() - c0) / CLOCKS_PER_SEC;
    for (double t : a.t) {
      const SphereError e = max_relative_error(field, samples.at(t));
      csv << n << ',' << t << ',' << e.e_inf << ',' << cpu << '\n';
      rows.push_back({{"n", n}, {"t", t}, {"E_inf", e.e_inf}, {"cpu_seconds", cpu},
                      {"endpoints", e.used}, {"excluded", e.excluded}});
      out << "n " << n << " t " << t << " E_inf " << e.e_inf << " cpu_seconds "
          << cpu << "\n";
    }
  }
  csv.close();
  json sizes = json::object();
  for (const auto& [t, s] : samples) {
    sizes[std::to_string(t)] = {{"endpoints", s.endpoints.size()},
                                {"dropped", s.dropped}};
  }
  manifest["config"] = {{"t", a.t},
                        {"n", a.n},
                        {"epsilon", a.epsilon},
                        {"n_alpha", a.sphere.n_alpha},
                        {"n_c", a.sphere.n_c},
                        {"c_max", a.sphere.c_max},
                        {"dt", a.sphere.dt},
                        {"bin_size", a.sphere.bin_size}};
  manifest["results"] = {{"rows", rows}, {"spheres", sizes}};
  manifest.output(a.out);
  manifest.write(manifest_path_for(a.out));
  return 0;
}

// --- sphere ----------------------------------------------------------------

int cmd_sphere(const std::string& field_path, double t, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  Manifest manifest("sphere");
  const DistanceField field = load_field(field_path);
  const GridSpec& g = field.grid;
  const double shell = 0.5 * g.cell_diagonal();
  std::ofstream csv(out_path, std::ios::trunc);
  if (!csv) throw Error(ErrorCode::kIoFailure, "cannot write " + out_path);
  csv << "x,y,theta,W\n" << std::setprecision(10);
  std::size_t count = 0;
  for (int k = 0; k < g.ntheta; ++k) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double w = field.at(i, j, k);
        if (!std::isfinite(w) || std::abs(w - t) > shell) continue;
        csv << g.x_of(i) << ',' << g.y_of(j) << ',' << g.theta_of(k) << ',' << w << '\n';
        ++count;
      }
    }
  }
  csv.close();
  if (count == 0) {
    err << json{{"warning", "empty_shell"},
                {"message", "no node lies within half a cell of W = t"}}.dump()
        << '\n';
  }
  manifest["config"] = {{"field", field_path}, {"t", t}, {"shell_half_width", shell}};
  manifest["grid"] = grid_json(g);
  manifest["results"] = {{"nodes", count}};
  manifest.output(out_path);
  manifest.write(manifest_path_for(out_path));
  out << "shell_nodes " << count << "\n";
  return 0;
}

// --- convert ---------------------------------------------------------------

int cmd_convert(const std::string& pgm, double gamma, int ntheta, double hx,
                const std::string& out_path, std::ostream& out) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  }
  Manifest manifest("convert");
  const GrayImage img = read_pgm(pgm);
  GridSpec g;
  g.nx = img.width;
  g.ny = img.height;
  g.ntheta = ntheta;
  g.hx = hx;
  g.hy = hx;
  std::vector<double> plane(g.slice_size());
  for (int j = 0; j < img.height; ++j) {
    for (int i = 0; i < img.width; ++i) {
      plane[static_cast<std::size_t>(j) * img.width + i] =
          pixel_cost(img.pixels[static_cast<std::size_t>(j) * img.width + i], gamma);
    }
  }
  const CostVolume cost = lift_cost_2d(plane, g.nx, g.ny, g);
  const fs::path data = save_cost(cost, out_path);
  manifest["config"] = {{"pgm", pgm}, {"gamma", gamma}, {"ntheta", ntheta}, {"hx", hx}};
  manifest["grid"] = grid_json(g);
  manifest["results"] = {{"min_cost", cost.min_value()}, {"max_cost", cost.max_value()}};
  manifest.output(out_path);
  manifest.output(data);
  manifest.write(manifest_path_for(out_path));
  out << "cost volume " << g.nx << "x" << g.ny << "x" << g.ntheta << " -> " << out_path
      << "\n";
  return 0;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), in.gcount());
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int n = 0; n < len; ++n) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[n]);
  }
  return hex.str();
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  auto token = [&]() {
    std::string t;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(c);
    }
    return t;
  };
  auto number = [&](const char* what) {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size() || v < 0) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformedHeader,
                  std::string("malformed PGM ") + what + " in " + path);
    }
  };
  const std::string magic = token();
  if (magic != "P5" && magic != "P2") {
    throw Error(ErrorCode::kMalformedHeader, "not a PGM (P2/P5) file: " + path);
  }
  GrayImage img;
  img.width = number("width");
  img.height = number("height");
  const int maxval = number("maxval");
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255) {
    throw Error(ErrorCode::kMalformedHeader, "unsupported PGM geometry/maxval in " + path);
  }
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);
  if (magic == "P5") {
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
      throw Error(ErrorCode::kSizeMismatch, "truncated PGM pixel data in " + path);
    }
  } else {
    for (std::size_t n = 0; n < count; ++n) {
      const int v = number("pixel");
      if (v > maxval) throw Error(ErrorCode::kMalformedHeader, "PGM pixel above maxval");
      img.pixels[n] = static_cast<unsigned char>(v);
    }
  }
  if (maxval != 255) {
    for (auto& p : img.pixels) {
      p = static_cast<unsigned char>(std::lround(255.0 * p / maxval));
    }
  }
  return img;
}

double pixel_cost(unsigned char v, double gamma) {
  const double c = std::pow((static_cast<double>(v) + 1.0) / 256.0, gamma);
  return std::clamp(c, 1e-3, 1.0);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sub-Riemannian fast marching on SE(2)"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the eikonal equation");
  solve_cmd->add_option("--cost", solve_args.cost, "Cost volume header (JSON)");
  solve_cmd->add_flag("--uniform", solve_args.uniform, "Uniform cost 1");
  solve_cmd->add_option("--paper-n", solve_args.paper_n,
                        "Validation grid with step pi/n (with --uniform)");
  solve_cmd->add_option("--seed", solve_args.seeds, "Seed node i,j,k (repeatable)");
  solve_cmd->add_option("--epsilon", solve_args.epsilon, "Relaxation epsilon in (0,1]");
  solve_cmd->add_option("--beta", solve_args.beta, "Forward/rotation balance");
  solve_cmd->add_option("--mode", solve_args.mode, "fm | fp")
      ->check(CLI::IsMember({"fm", "fp"}));
  solve_cmd->add_option("--tolerance", solve_args.tolerance, "Fixed-point tolerance");
  solve_cmd->add_option("--dtype", solve_args.dtype, "f32 | f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  solve_cmd->add_option("--out", solve_args.out, "Output field header")->required();

  TraceArgs trace_args;
  auto* trace_cmd = app.add_subcommand("trace", "Backtrack geodesics");
  trace_cmd->add_option("--field", trace_args.field, "Distance field header")->required();
  trace_cmd->add_option("--cost", trace_args.cost, "Cost volume header");
  trace_cmd->add_flag("--uniform", trace_args.uniform, "Uniform cost 1");
  trace_cmd->add_option("--start", trace_args.starts, "Start pose x,y,theta (repeatable)");
  trace_cmd->add_option("--step", trace_args.step, "RK4 step (default 0.25 cell)");
  trace_cmd->add_option("--seed-radius", trace_args.seed_radius,
                        "Termination radius (default one cell diagonal)");
  trace_cmd->add_option("--epsilon", trace_args.epsilon, "Relaxation epsilon");
  trace_cmd->add_option("--beta", trace_args.beta, "Forward/rotation balance");
  trace_cmd->add_option("--format", trace_args.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  trace_cmd->add_option("--out", trace_args.out, "Output path file")->required();

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Accuracy against shot geodesics");
  validate_cmd->add_option("--t", validate_args.t, "Sphere radii")->delimiter(',');
  validate_cmd->add_option("--n", validate_args.n, "Grid refinements")->delimiter(',');
  validate_cmd->add_option("--epsilon", validate_args.epsilon, "Relaxation epsilon");
  validate_cmd->add_option("--n-alpha", validate_args.sphere.n_alpha);
  validate_cmd->add_option("--n-c", validate_args.sphere.n_c);
  validate_cmd->add_option("--c-max", validate_args.sphere.c_max);
  validate_cmd->add_option("--dt", validate_args.sphere.dt);
  validate_cmd->add_option("--bin-size", validate_args.sphere.bin_size);
  validate_cmd->add_option("--out", validate_args.out, "Output CSV")->required();

  std::string sphere_field, sphere_out;
  double sphere_t = 0.0;
  auto* sphere_cmd = app.add_subcommand("sphere", "Export a level-set shell");
  sphere_cmd->add_option("--field", sphere_field, "Distance field header")->required();
  sphere_cmd->add_option("--t", sphere_t, "Radius")->required();
  sphere_cmd->add_option("--out", sphere_out, "Output CSV")->required();

  std::string pgm, convert_out;
  double gamma = 2.0, pixel = 1.0;
  int ntheta = 64;
  auto* convert_cmd = app.add_subcommand("convert", "PGM image to cost volume");
  convert_cmd->add_option("--pgm", pgm, "8-bit PGM image")->required();
  convert_cmd->add_option("--gamma", gamma, "Cost exponent (default 2)");
  convert_cmd->add_option("--ntheta", ntheta, "Orientations");
  convert_cmd->add_option("--pixel-size", pixel, "Spatial step per pixel");
  convert_cmd->add_option("--out", convert_out, "Output header")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - 1);
  std::string sub = "cli";
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << json{{"error", {{"code", "invalid_argument"}, {"message", e.what()}}}}.dump()
        << '\n';
    return 2;
  }

  try {
    if (*solve_cmd) {
      sub = "solve";
      return cmd_solve(solve_args, out);
    }
    if (*trace_cmd) {
      sub = "trace";
      return cmd_trace(trace_args, out);
    }
    if (*validate_cmd) {
      sub = "validate";
      return cmd_validate(validate_args, out);
    }
    if (*sphere_cmd) {
      sub = "sphere";
      return cmd_sphere(sphere_field, sphere_t, sphere_out, out, err);
    }
    if (*convert_cmd) {
      sub = "convert";
      return cmd_convert(pgm, gamma, ntheta, pixel, convert_out, out);
    }
  } catch (const Error& e) {
    json j = {{"error", error_json(e)}};
    j["error"]["subcommand"] = sub;
    err << j.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", {{"code", "internal"}, {"message", e.what()}, {"subcommand", sub}}}}
               .dump()
        << '\n';
    return 1;
  }
  return 0;
}

}  // namespace se2fm::cli
