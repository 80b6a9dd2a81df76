// Command-line front end over the C API.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavesieve/wavesieve.h"

namespace {

struct Failure {
  int code;
  std::string status;
  std::string message;
};

[[noreturn]] void raise(const std::string& status, const std::string& message, int code = 1) {
  throw Failure{code, status, message};
}

void check(ws_status s) {
  if (s != WS_OK) raise(ws_status_name(s), ws_last_error(), static_cast<int>(s));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ws_status_name(WS_ERR_IO), "cannot read " + path, WS_ERR_IO);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) raise(ws_status_name(WS_ERR_IO), "cannot write " + path, WS_ERR_IO);
}

// "1,2,3" or repeated flags both end up as one list.
template <typename T>
std::vector<T> flatten_list(const std::vector<std::string>& items) {
  std::vector<T> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      if constexpr (std::is_same_v<T, std::string>) {
        out.push_back(part);
      } else {
        std::istringstream conv(part);
        T value{};
        if (!(conv >> value) || !conv.eof()) {
          raise(ws_status_name(WS_ERR_INVALID_ARGUMENT), "bad list entry '" + part + "'",
                WS_ERR_INVALID_ARGUMENT);
        }
        out.push_back(value);
      }
    }
  }
  return out;
}

struct GraphHandle {
  ws_graph* g = nullptr;
  ~GraphHandle() { ws_graph_free(g); }
};

struct FitHandle {
  ws_fit* f = nullptr;
  ~FitHandle() { ws_fit_free(f); }
};

void print_json(const nlohmann::json& doc) { std::cout << doc.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet sieve regression on Markov random fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ws_version()));

  // run
  auto* run = app.add_subcommand("run", "Run a replicated experiment");
  std::string config_path, out_dir, graph_source;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::vector<std::string> levels, wavelets;
  run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Root seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--reps", reps, "Replications");
  run->add_option("--graph", graph_source, "torus:RxC[+N], knn:P,K[+N] or file:PATH");
  run->add_option("--levels", levels, "Levels, e.g. 1,2,3,4");
  run->add_option("--wavelets", wavelets, "Wavelets, e.g. d4,haar");

  // graph
  auto* graph = app.add_subcommand("graph", "Describe a graph");
  std::string g_source = "torus:18x18";
  std::uint64_t g_seed = 1;
  std::string g_save;
  graph->add_option("--source", g_source, "Graph source")->capture_default_str();
  graph->add_option("--seed", g_seed, "Seed for knn points and chords")->capture_default_str();
  graph->add_option("--save", g_save, "Write the edge list here");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw one GMRF field");
  std::string s_source = "torus:18x18", s_sampler = "gibbs", s_out;
  double s_eta = 0.0;
  std::size_t s_iter = 3000, s_burn = 600;
  std::uint64_t s_seed = 1;
  sim->add_option("--graph", s_source, "Graph source")->capture_default_str();
  sim->add_option("--eta", s_eta, "Dependence parameter")->required();
  sim->add_option("--sampler", s_sampler, "gibbs or direct")
      ->check(CLI::IsMember({"gibbs", "direct"}))
      ->capture_default_str();
  sim->add_option("--iterations", s_iter, "Gibbs sweeps")->capture_default_str();
  sim->add_option("--burn-in", s_burn, "Gibbs burn-in sweeps")->capture_default_str();
  sim->add_option("--seed", s_seed, "Seed")->capture_default_str();
  sim->add_option("--out", s_out, "CSV output (node_id,value)")->required();

  // phi
  auto* phi = app.add_subcommand("phi", "Tabulate a scaling function");
  std::string p_wavelet = "d4", p_out;
  int p_res = 10;
  phi->add_option("--wavelet", p_wavelet, "haar or d4")->capture_default_str();
  phi->add_option("--resolution", p_res, "Grid step 2^-r")->capture_default_str();
  phi->add_option("--out", p_out, "CSV output (x,phi)")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a sieve estimator to a dataset CSV");
  std::string f_data, f_out, f_wavelet = "d4";
  int f_level = -1, f_res = 0;
  double f_holder = 1.0;
  std::optional<double> f_rho;
  bool f_no_truncation = false, f_no_prune = false;
  fit->add_option("--data", f_data, "CSV with columns x_1..x_d,y")->required();
  fit->add_option("--wavelet", f_wavelet, "haar or d4")->capture_default_str();
  fit->add_option("--level", f_level, "Resolution level (default: from sample size)");
  fit->add_option("--holder", f_holder, "Hoelder exponent used for the default level")
      ->capture_default_str();
  fit->add_option("--rho", f_rho, "Truncation bound (default: automatic)");
  fit->add_flag("--no-truncation", f_no_truncation, "Disable truncation");
  fit->add_flag("--no-prune", f_no_prune, "Keep translations that miss the unit cube");
  fit->add_option("--resolution", f_res, "phi table resolution");
  fit->add_option("--out", f_out, "Write the fit as JSON");

  // predict
  auto* pred = app.add_subcommand("predict", "Evaluate a saved fit");
  std::string pr_fit;
  std::vector<std::string> pr_points;
  pred->add_option("--fit", pr_fit, "Fit JSON")->required()->check(CLI::ExistingFile);
  pred->add_option("--x", pr_points, "Point as x1,x2,...; repeatable")->required();

  // rate-curve
  auto* rate = app.add_subcommand("rate-curve", "Tabulate the theoretical rate shape");
  int r_dims = 2, r_lattice = 2;
  double r_holder = 1.0;
  std::vector<std::string> r_sizes;
  std::string r_out;
  rate->add_option("--dims", r_dims, "Design dimension d")->capture_default_str();
  rate->add_option("--holder", r_holder, "Hoelder exponent r")->capture_default_str();
  rate->add_option("--lattice-dim", r_lattice, "Lattice dimension N")->capture_default_str();
  rate->add_option("--sizes", r_sizes, "Sample sizes")->required();
  rate->add_option("--out", r_out, "CSV output (size,value)");

  // covering-bound
  auto* cover = app.add_subcommand("covering-bound", "Evaluate the covering-number bound");
  int c_vc = 2;
  double c_width = 1.0, c_eps = 0.1, c_p = 2.0;
  cover->add_option("--vc", c_vc, "VC dimension V")->capture_default_str();
  cover->add_option("--width", c_width, "Range width b - a")->capture_default_str();
  cover->add_option("--eps", c_eps, "Radius")->capture_default_str();
  cover->add_option("--p", c_p, "Norm exponent")->capture_default_str();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);
      raise("usage_error", e.what(), 64);
    }

    if (*run) {
      nlohmann::json cfg = nlohmann::json::object();
      if (!config_path.empty()) {
        try {
          cfg = nlohmann::json::parse(read_file(config_path));
        } catch (const nlohmann::json::parse_error& e) {
          raise(ws_status_name(WS_ERR_PARSE), e.what(), WS_ERR_PARSE);
        }
      }
      if (seed) cfg["seed"] = *seed;
      if (reps) cfg["replications"] = *reps;
      if (!graph_source.empty()) cfg["graph"] = graph_source;
      if (!levels.empty()) cfg["levels"] = flatten_list<int>(levels);
      if (!wavelets.empty()) cfg["wavelets"] = flatten_list<std::string>(wavelets);
      if (!out_dir.empty()) cfg["output_dir"] = out_dir;
      char* summary = nullptr;
      check(ws_run_experiment(cfg.dump().c_str(), nullptr, &summary));
      const nlohmann::json doc = nlohmann::json::parse(summary);
      ws_string_free(summary);
      const std::string dir = doc["config"].value("output_dir", std::string("results"));
      std::cout << read_file(dir + "/results.txt");
      std::cout << "replications completed: " << doc["replications_completed"] << "/"
                << doc["replications_requested"] << "\n"
                << "results written to " << dir << "\n";
    } else if (*graph) {
      GraphHandle h;
      check(ws_graph_from_source(g_source.c_str(), g_seed, &h.g));
      const std::size_t n = ws_graph_node_count(h.g);
      double h0 = 0, hm = 0, lo = 0, hi = 0;
      check(ws_graph_eigen_bounds(h.g, 1e-8, &h0, &hm));
      check(ws_graph_eta_range(h.g, &lo, &hi));
      std::vector<std::size_t> labels(n);
      std::size_t classes = 0;
      check(ws_graph_concliques(h.g, labels.data(), &classes));
      if (!g_save.empty()) check(ws_graph_save(h.g, g_save.c_str()));
      print_json({{"source", g_source},
                  {"nodes", n},
                  {"edges", ws_graph_edge_count(h.g)},
                  {"h0", h0},
                  {"hm", hm},
                  {"eta_range", {lo, hi}},
                  {"concliques", classes}});
    } else if (*sim) {
      GraphHandle h;
      check(ws_graph_from_source(s_source.c_str(), s_seed, &h.g));
      std::vector<double> values(ws_graph_node_count(h.g));
      double residual = 0.0;
      const ws_sampler sampler = s_sampler == "direct" ? WS_SAMPLER_DIRECT : WS_SAMPLER_GIBBS;
      check(ws_simulate_field(h.g, s_eta, sampler, s_iter, s_burn, s_seed, values.data(),
                              &residual));
      check(ws_write_field_csv(values.data(), values.size(), s_out.c_str()));
      nlohmann::json doc = {{"nodes", values.size()}, {"out", s_out}, {"sampler", s_sampler}};
      if (sampler == WS_SAMPLER_DIRECT) doc["symmetry_residual"] = residual;
      print_json(doc);
    } else if (*phi) {
      ws_phi_table* table = nullptr;
      check(ws_phi_table_create(p_wavelet.c_str(), p_res, &table));
      const ws_status s = ws_phi_table_write_csv(table, p_out.c_str());
      ws_phi_table_free(table);
      check(s);
      print_json({{"wavelet", p_wavelet}, {"resolution", p_res}, {"out", p_out}});
    } else if (*fit) {
      ws_fit_options opts;
      ws_fit_options_init(&opts);
      opts.wavelet = f_wavelet.c_str();
      opts.level = f_level;
      opts.holder_exponent = f_holder;
      if (f_rho) opts.rho = *f_rho;
      if (f_no_truncation) opts.rho = std::numeric_limits<double>::infinity();
      opts.resolution = f_res;
      opts.prune = f_no_prune ? 0 : 1;
      FitHandle h;
      check(ws_fit_dataset_csv(f_data.c_str(), &opts, &h.f));
      char* json = nullptr;
      check(ws_fit_to_json(h.f, &json));
      nlohmann::json doc = nlohmann::json::parse(json);
      ws_string_free(json);
      if (!f_out.empty()) write_file(f_out, doc.dump(2) + "\n");
      print_json({{"level", ws_fit_level(h.f)},
                  {"dimension", ws_fit_dimension(h.f)},
                  {"coefficients", doc["coefficients"].size()},
                  {"degenerate", ws_fit_degenerate(h.f) != 0},
                  {"rank", doc["svd_report"]["rank"]},
                  {"condition_number", doc["svd_report"]["condition_number"]}});
    } else if (*pred) {
      FitHandle h;
      check(ws_fit_from_json(read_file(pr_fit).c_str(), 0, &h.f));
      nlohmann::json out = nlohmann::json::array();
      for (const auto& text : pr_points) {
        const std::vector<double> x = flatten_list<double>({text});
        double value = 0.0;
        check(ws_fit_predict(h.f, x.data(), x.size(), &value));
        out.push_back({{"x", x}, {"value", value}});
      }
      print_json(out);
    } else if (*rate) {
      const std::vector<double> sizes = flatten_list<double>(r_sizes);
      std::vector<double> values(sizes.size());
      check(ws_rate_curve(r_dims, r_holder, r_lattice, sizes.data(), sizes.size(),
                          values.data()));
      if (!r_out.empty()) {
        check(ws_write_curve_csv(sizes.data(), values.data(), sizes.size(), r_out.c_str()));
      }
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        rows.push_back({{"size", sizes[i]}, {"value", values[i]}});
      }
      print_json(rows);
    } else if (*cover) {
      double value = 0.0;
      check(ws_covering_bound(c_vc, c_width, c_eps, c_p, &value));
      print_json({{"log_covering_bound", value}});
    }
  } catch (const Failure& f) {
    nlohmann::json err = {{"error", {{"status", f.status}, {"message", f.message}}}};
    std::cerr << err.dump() << "\n";
    return f.code;
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", {{"status", "internal_error"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return WS_ERR_INTERNAL;
  }
  return 0;
}
