// Command-line front end: generate | solve | sample | spectrum | evolve | bench
//
// Exit status: 0 success, 1 usage, 2 parse, 3 capability guard.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lda/lda.hpp"

namespace fs = std::filesystem;
using namespace lda;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_parse = 2;
constexpr int exit_capability = 3;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to `path`, or stdout when empty / "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw usage_error("cannot write " + path);
  fn(out);
}

spin_state load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open state file " + path);
  return read_state(in);
}

struct sampler_options {
  std::string kind = "sa";
  std::uint64_t seed = 0;
  std::size_t sweeps = 1000;
  double beta_start = 0.1;
  double beta_end = 10.0;
  std::size_t threads = 1;
  double qa_time = 10.0;
  double qa_gamma_scale = 5.0;
  std::size_t qa_steps = 0;

  void add_to(CLI::App* app) {
    app->add_option("--sampler", kind, "sa | exact | qa-sim")
        ->check(CLI::IsMember({"sa", "exact", "qa-sim"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--sweeps", sweeps, "annealing sweeps per chain")->capture_default_str();
    app->add_option("--beta-start", beta_start)->capture_default_str();
    app->add_option("--beta-end", beta_end)->capture_default_str();
    app->add_option("--threads", threads, "worker threads for annealing chains (0 = all cores)")
        ->capture_default_str();
    app->add_option("--qa-time", qa_time, "total anneal time for qa-sim")->capture_default_str();
    app->add_option("--qa-gamma-scale", qa_gamma_scale, "initial field / max |J|, qa-sim")->capture_default_str();
    app->add_option("--qa-steps", qa_steps, "integration steps for qa-sim (0 = automatic)");
  }

  sampler_fn make(const spin_glass& instance) const {
    if (kind == "exact") {
      if (instance.n_sites() > max_enumeration_sites)
        throw capability_error("exact sampler is limited to " + std::to_string(max_enumeration_sites) + " sites");
      return exact_sampler{};
    }
    if (kind == "qa-sim") {
      if (instance.n_sites() > max_state_vector_sites)
        throw capability_error("qa-sim sampler is limited to " + std::to_string(max_state_vector_sites) + " sites");
      qa_sampler s;
      s.seed = seed;
      s.total_time = qa_time;
      s.gamma_scale = qa_gamma_scale;
      s.steps = qa_steps;
      return s;
    }
    sa_sampler s;
    s.config.sweeps = sweeps;
    s.config.beta_start = beta_start;
    s.config.beta_end = beta_end;
    s.config.seed = seed;
    s.config.threads = threads;
    s.config.validate();
    return s;
  }
};

struct schedule_options {
  std::string shape = "forward";
  double gamma = 1.0;
  double pause_start = 0.4;
  double pause_end = 0.6;
  double total_time = 10.0;
  std::vector<double> hgain;  // flattened (t, value) pairs

  void add_to(CLI::App* app) {
    app->add_option("--schedule", shape, "forward | reverse | constant")
        ->check(CLI::IsMember({"forward", "reverse", "constant"}))
        ->capture_default_str();
    app->add_option("--gamma", gamma, "initial (forward), pause (reverse) or fixed (constant) field")
        ->capture_default_str();
    app->add_option("--pause-start", pause_start)->capture_default_str();
    app->add_option("--pause-end", pause_end)->capture_default_str();
    app->add_option("--total-time", total_time)->capture_default_str();
    app->add_option("--hgain", hgain, "h-gain breakpoints t0 v0 t1 v1 ...");
  }

  qa_system make(const spin_glass& instance) const {
    qa_system sys;
    sys.instance = instance;
    sys.total_time = total_time;
    if (shape == "forward") sys.gamma = schedule_table::forward(gamma);
    else if (shape == "reverse") sys.gamma = schedule_table::reverse(gamma, pause_start, pause_end);
    else sys.gamma = schedule_table::constant(gamma);
    if (!hgain.empty()) {
      if (hgain.size() % 2 != 0) throw parameter_error("--hgain needs (t, value) pairs");
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < hgain.size(); k += 2) pts.emplace_back(hgain[k], hgain[k + 1]);
      sys.hgain = schedule_table(std::move(pts));
    }
    return sys;
  }
};

struct generate_cmd {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string topology_path;
  std::string values = "nat7";
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::string out;
  std::string out_dir;

  void add_to(CLI::App* app) {
    app->add_option("--rows", rows, "triangular lattice rows");
    app->add_option("--cols", cols, "triangular lattice columns");
    app->add_option("--topology", topology_path, "edge-list file instead of a lattice")->check(CLI::ExistingFile);
    app->add_option("--values", values, "nat7 | ferro | antiferro | pm1")
        ->check(CLI::IsMember({"nat7", "ferro", "antiferro", "pm1"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "seed of the first instance")->capture_default_str();
    app->add_option("--count", count, "number of instances (seeds seed, seed+1, ...)")->capture_default_str();
    app->add_option("--out", out, "output file (single instance, default stdout)");
    app->add_option("--out-dir", out_dir, "output directory (several instances)");
  }

  int run() const {
    generator_spec spec;
    if (values == "ferro") spec.coupler_values = {{-1, 1}};
    else if (values == "antiferro") spec.coupler_values = {{1, 1}};
    else if (values == "pm1") spec.coupler_values = {{-1, 1}, {1, 1}};
    std::optional<topology> topo;
    if (!topology_path.empty()) {
      topo = read_topology(topology_path);
      spec.kind = generator_kind::from_topology;
    } else {
      if (rows == 0 || cols == 0) throw usage_error("generate needs --rows and --cols, or --topology");
      spec.rows = rows;
      spec.cols = cols;
    }
    if (count == 0) throw usage_error("--count must be positive");
    if (count > 1 && out_dir.empty()) throw usage_error("several instances need --out-dir");
    if (!out_dir.empty()) fs::create_directories(out_dir);
    for (std::size_t k = 0; k < count; ++k) {
      spec.seed = seed + k;
      const spin_glass g = generate(spec, topo ? &*topo : nullptr);
      std::string path = out;
      if (!out_dir.empty()) {
        std::ostringstream name;
        name << "instance_" << std::setw(4) << std::setfill('0') << spec.seed << ".txt";
        path = (fs::path(out_dir) / name.str()).string();
      }
      with_output(path, [&](std::ostream& os) {
        os << "# generated: " << (topo ? "topology " + topology_path : std::to_string(rows) + "x" + std::to_string(cols) + " triangular")
           << ", values " << values << ", seed " << spec.seed << '\n';
        write_instance(os, g);
      });
    }
    return 0;
  }
};

struct solve_cmd {
  std::string instance_path;
  sampler_options sampler;
  std::size_t cycles = 4;
  std::size_t local_iters = 8;
  std::size_t global_iters = 8;
  std::size_t n_samples = 20;
  std::size_t n_select = 5;
  double q_select = 0.98;
  double q_exclude = 0.9;
  double lambda_start = 0.2;
  double lambda_end = 1.0;
  double global_lambda = 1.0;
  std::uint64_t max_budget = 0;
  std::string initial;
  std::string out;
  std::string trajectory;

  void add_to(CLI::App* app) {
    app->add_option("instance", instance_path, "instance file")->required()->check(CLI::ExistingFile);
    sampler.add_to(app);
    app->add_option("--cycles", cycles)->capture_default_str();
    app->add_option("--local-iters", local_iters)->capture_default_str();
    app->add_option("--global-iters", global_iters)->capture_default_str();
    app->add_option("--n-samples", n_samples)->capture_default_str();
    app->add_option("--n-select", n_select)->capture_default_str();
    app->add_option("--q-select", q_select)->capture_default_str();
    app->add_option("--q-exclude", q_exclude)->capture_default_str();
    app->add_option("--lambda-start", lambda_start)->capture_default_str();
    app->add_option("--lambda-end", lambda_end)->capture_default_str();
    app->add_option("--global-lambda", global_lambda)->capture_default_str();
    app->add_option("--max-budget", max_budget, "sampler budget cap, 0 = none")->capture_default_str();
    app->add_option("--initial", initial, "bit-string file with the starting state")->check(CLI::ExistingFile);
    app->add_option("--out", out, "result JSON (default stdout)");
    app->add_option("--trajectory", trajectory, "per-iteration CSV");
  }

  int run() const {
    const spin_glass g = read_instance(instance_path);
    hybrid_params p;
    p.cycles = cycles;
    p.max_budget = max_budget;
    p.local.n_samples = p.global.n_samples = n_samples;
    p.local.n_select = p.global.n_select = n_select;
    p.local.q_select = p.global.q_select = q_select;
    p.local.q_exclude = p.global.q_exclude = q_exclude;
    p.local.lambda_start = p.global.lambda_start = lambda_start;
    p.local.lambda_end = p.global.lambda_end = lambda_end;
    p.local.global_lambda = p.global.global_lambda = global_lambda;
    p.local.iterations = local_iters;
    p.global.iterations = global_iters;
    p.local.validate();
    p.global.validate();
    std::optional<spin_state> init;
    if (!initial.empty()) init = load_state(initial);
    const solve_result r = hybrid_solve(g, init, p, sampler.make(g));
    const auto j = to_json(r, g);
    with_output(out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    if (!trajectory.empty()) with_output(trajectory, [&](std::ostream& os) { write_trajectory_csv(os, r); });
    return 0;
  }
};

struct sample_cmd {
  std::string instance_path;
  sampler_options sampler;
  std::size_t n_samples = 20;
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("instance", instance_path, "instance file")->required()->check(CLI::ExistingFile);
    sampler.add_to(app);
    app->add_option("--n-samples", n_samples)->capture_default_str();
    app->add_option("--out", out, "samples JSON (default stdout)");
  }

  int run() const {
    const spin_glass g = read_instance(instance_path);
    if (n_samples == 0) throw parameter_error("--n-samples must be positive");
    sampler_fn fn = sampler.make(g);
    const sample_set s = fn(g, n_samples).rescored(g);
    with_output(out, [&](std::ostream& os) { os << to_json(s).dump(2) << '\n'; });
    return 0;
  }
};

struct spectrum_cmd {
  std::string instance_path;
  schedule_options schedule;
  std::size_t points = 11;
  std::size_t levels = 4;
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("instance", instance_path, "instance file")->required()->check(CLI::ExistingFile);
    schedule.add_to(app);
    app->add_option("--points", points, "evenly spaced time fractions in [0, 1]")->capture_default_str();
    app->add_option("--levels", levels, "lowest levels per point")->capture_default_str();
    app->add_option("--out", out, "CSV output (default stdout)");
  }

  int run() const {
    const spin_glass g = read_instance(instance_path);
    const qa_system sys = schedule.make(g);
    if (points == 0) throw parameter_error("--points must be positive");
    with_output(out, [&](std::ostream& os) {
      os << "t_fraction,level,energy,ratio\n";
      for (std::size_t k = 0; k < points; ++k) {
        const double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
        const spectrum sp = instantaneous_spectrum(sys, t, levels);
        for (std::size_t m = 0; m < levels; ++m) {
          os << format_double(t) << ',' << m << ',' << format_double(sp.energies[m]) << ',';
          if (m > 0) {
            try {
              os << format_double(adiabatic_ratio(sys, t, m));
            } catch (const degenerate_gap_error&) {
            }
          }
          os << '\n';
        }
      }
    });
    return 0;
  }
};

struct evolve_cmd {
  std::string instance_path;
  schedule_options schedule;
  std::size_t steps = 0;
  std::string initial;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("instance", instance_path, "instance file")->required()->check(CLI::ExistingFile);
    schedule.add_to(app);
    app->add_option("--steps", steps, "integration steps (0 = automatic)");
    app->add_option("--initial", initial, "bit-string file; default is the uniform superposition")
        ->check(CLI::ExistingFile);
    app->add_option("--shots", shots, "measure this many samples instead of listing probabilities");
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--out", out, "CSV output (default stdout)");
  }

  int run() const {
    const spin_glass g = read_instance(instance_path);
    const qa_system sys = schedule.make(g);
    if (g.n_sites() > max_state_vector_sites)
      throw capability_error("state-vector evolution is limited to " + std::to_string(max_state_vector_sites) +
                             " sites");
    const wave_function start = initial.empty() ? wave_function::uniform(g.n_sites())
                                                : wave_function::basis(load_state(initial));
    const wave_function final_state = evolve(sys, start, steps);
    with_output(out, [&](std::ostream& os) {
      if (shots > 0) {
        const sample_set s = measure(g, final_state, shots, seed);
        std::map<std::string, std::pair<double, std::size_t>> counts;
        for (std::size_t k = 0; k < s.size(); ++k) {
          auto& c = counts[s.state(k).to_bit_string()];
          c.first = s.energy_at(k);
          ++c.second;
        }
        os << "state,energy,count\n";
        for (const auto& [state, c] : counts) os << state << ',' << format_double(c.first) << ',' << c.second << '\n';
        return;
      }
      os << "state,energy,probability\n";
      for (std::size_t x = 0; x < final_state.dimension(); ++x) {
        const spin_state s = spin_state::from_index(x, g.n_sites());
        os << s.to_bit_string() << ',' << format_double(energy(g, s)) << ','
           << format_double(final_state.probability(x)) << '\n';
      }
    });
    return 0;
  }
};

struct bench_cmd {
  std::string dir;
  std::size_t seeds = 1;
  std::uint64_t first_seed = 0;
  std::size_t cycles = 4;
  std::size_t local_iters = 8;
  std::size_t global_iters = 8;
  std::size_t n_samples = 20;
  std::size_t n_select = 5;
  double q_select = 0.98;
  double q_exclude = 0.9;
  std::size_t sweeps = 100;
  std::size_t initial_sweeps = 10;
  bool no_long = false;
  std::string csv;
  std::string json;

  void add_to(CLI::App* app) {
    app->add_option("instances", dir, "directory of instance files (*.txt)")->required()->check(CLI::ExistingDirectory);
    app->add_option("--seeds", seeds, "seeds per instance")->capture_default_str();
    app->add_option("--first-seed", first_seed)->capture_default_str();
    app->add_option("--cycles", cycles)->capture_default_str();
    app->add_option("--local-iters", local_iters)->capture_default_str();
    app->add_option("--global-iters", global_iters)->capture_default_str();
    app->add_option("--n-samples", n_samples)->capture_default_str();
    app->add_option("--n-select", n_select)->capture_default_str();
    app->add_option("--q-select", q_select)->capture_default_str();
    app->add_option("--q-exclude", q_exclude)->capture_default_str();
    app->add_option("--sweeps", sweeps, "sweeps per annealing chain")->capture_default_str();
    app->add_option("--initial-sweeps", initial_sweeps, "sweeps of the anneal giving the shared start")
        ->capture_default_str();
    app->add_flag("--no-long-baseline", no_long, "skip the single long-anneal baseline");
    app->add_option("--csv", csv, "CSV table (default stdout)");
    app->add_option("--json", json, "JSON table");
  }

  int run() const {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw usage_error("no *.txt instances in " + dir);

    bench_config config;
    config.solver.cycles = cycles;
    config.solver.local.iterations = local_iters;
    config.solver.global.iterations = global_iters;
    for (auto* p : {&config.solver.local, &config.solver.global}) {
      p->n_samples = n_samples;
      p->n_select = n_select;
      p->q_select = q_select;
      p->q_exclude = q_exclude;
      p->validate();
    }
    config.sampler.sweeps = sweeps;
    config.sampler.threads = 1;
    config.initial_sweeps = initial_sweeps;
    config.long_baseline = !no_long;

    std::vector<bench_row> rows;
    for (const auto& f : files) {
      const spin_glass g = read_instance(f.string());
      for (std::size_t s = 0; s < seeds; ++s) {
        auto r = run_bench_case(f.filename().string(), g, config, first_seed + s);
        rows.insert(rows.end(), r.begin(), r.end());
      }
    }
    sort_rows(rows);
    with_output(csv, [&](std::ostream& os) { write_bench_csv(os, rows); });
    if (!json.empty()) with_output(json, [&](std::ostream& os) { os << bench_json(rows).dump(2) << '\n'; });
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-driven annealing toolkit"};
  app.require_subcommand(1);

  generate_cmd generate_opts;
  solve_cmd solve_opts;
  sample_cmd sample_opts;
  spectrum_cmd spectrum_opts;
  evolve_cmd evolve_opts;
  bench_cmd bench_opts;
  auto* generate_app = app.add_subcommand("generate", "write random instances");
  auto* solve_app = app.add_subcommand("solve", "run the hybrid local/global solver");
  auto* sample_app = app.add_subcommand("sample", "draw samples from one sampler");
  auto* spectrum_app = app.add_subcommand("spectrum", "instantaneous spectrum and adiabatic ratios (CSV)");
  auto* evolve_app = app.add_subcommand("evolve", "state-vector anneal (CSV)");
  auto* bench_app = app.add_subcommand("bench", "hybrid solver vs plain annealing at equal budget");
  generate_opts.add_to(generate_app);
  solve_opts.add_to(solve_app);
  sample_opts.add_to(sample_app);
  spectrum_opts.add_to(spectrum_app);
  evolve_opts.add_to(evolve_app);
  bench_opts.add_to(bench_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (generate_app->parsed()) return generate_opts.run();
    if (solve_app->parsed()) return solve_opts.run();
    if (sample_app->parsed()) return sample_opts.run();
    if (spectrum_app->parsed()) return spectrum_opts.run();
    if (evolve_app->parsed()) return evolve_opts.run();
    if (bench_app->parsed()) return bench_opts.run();
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return exit_parse;
  } catch (const capability_error& e) {
    std::cerr << "capability limit: " << e.what() << '\n';
    return exit_capability;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
