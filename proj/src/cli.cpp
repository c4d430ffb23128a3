#include "sdr/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sdr/csv.hpp"
#include "sdr/errors.hpp"
#include "sdr/oracles.hpp"
#include "sdr/realdata.hpp"
#include "sdr/report.hpp"
#include "sdr/synthetic.hpp"

namespace sdr {

namespace {

namespace fs = std::filesystem;

// Raw option text after merging defaults, config file and command line.
class Settings {
 public:
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string required(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) throw ConfigError("--" + key + " is required");
    return it->second;
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    return parse_integer(key, values_.at(key));
  }

  static long long parse_integer(const std::string& key, const std::string& s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("--" + key + ": '" + s + "' is not an integer");
    }
    return v;
  }

 private:
  std::map<std::string, std::string> values_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string json_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ',';
      joined += json_text(item);
    }
    return joined;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void load_config(const std::string& path, const std::vector<std::string>& known, Settings& s) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a flat JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("config file: unknown key '" + key + "'");
    }
    if (value.is_object()) throw ConfigError("config file: key '" + key + "' must not be nested");
    s.set(key, json_text(value));
  }
}

std::uint64_t seed_of(const Settings& s) {
  std::string text;
  if (s.has("seed")) {
    text = s.text("seed", "0");
  } else if (const char* env = std::getenv("SDR_SEED"); env != nullptr && *env != '\0') {
    text = env;
  } else {
    return 0;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("seed '" + text + "' is not a nonnegative integer");
  }
  return v;
}

std::vector<MethodSpec> methods_of(const Settings& s, std::vector<MethodSpec> fallback) {
  if (!s.has("methods")) return fallback;
  std::vector<MethodSpec> out;
  for (const auto& name : split_list(s.text("methods", ""))) out.push_back(MethodSpec::parse(name));
  if (out.empty()) throw ConfigError("method list is empty");
  return out;
}

std::vector<Gamma> grid_of(const Settings& s) {
  if (!s.has("gamma-grid")) return log_gamma_grid();
  std::vector<Gamma> grid;
  for (const auto& item : split_list(s.text("gamma-grid", ""))) {
    std::string lower = item;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "inf" || lower == "infinity") {
      grid.push_back(Gamma::infinity());
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size() || !(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("--gamma-grid: '" + item + "' is not a nonnegative number or inf");
    }
    grid.push_back(Gamma::finite(v));
  }
  if (grid.empty()) throw ConfigError("--gamma-grid is empty");
  return grid;
}

std::vector<BenchSetting> settings_of(const Settings& s) {
  std::vector<SpectrumKind> spectra{SpectrumKind::FAST_DECAY, SpectrumKind::SLOW_DECAY};
  std::vector<AlignmentKind> alignments{AlignmentKind::WELL_ALIGNED, AlignmentKind::MISALIGNED,
                                        AlignmentKind::PARTIAL};
  std::vector<Eigen::Index> sizes{150, 1500};
  if (s.has("spectrum")) {
    spectra.clear();
    for (const auto& v : split_list(s.text("spectrum", ""))) spectra.push_back(parse_spectrum(v));
  }
  if (s.has("alignment")) {
    alignments.clear();
    for (const auto& v : split_list(s.text("alignment", ""))) alignments.push_back(parse_alignment(v));
  }
  if (s.has("ntrain")) {
    sizes.clear();
    for (const auto& v : split_list(s.text("ntrain", ""))) {
      sizes.push_back(static_cast<Eigen::Index>(Settings::parse_integer("ntrain", v)));
    }
  }
  std::vector<BenchSetting> out;
  for (auto sp : spectra) {
    for (auto al : alignments) {
      for (auto n : sizes) out.push_back({sp, al, n});
    }
  }
  if (out.empty()) throw ConfigError("no benchmark settings selected");
  return out;
}

BenchConfig bench_config(const Settings& s, std::vector<MethodSpec> default_method_list) {
  BenchConfig cfg;
  cfg.settings = settings_of(s);
  cfg.methods = methods_of(s, std::move(default_method_list));
  cfg.trials = static_cast<int>(s.integer("trials", 100));
  if (cfg.trials < 1) throw ConfigError("--trials must be at least 1");
  cfg.seed = seed_of(s);
  cfg.k_learn = static_cast<Eigen::Index>(s.integer("k", 15));
  if (cfg.k_learn < 1 || cfg.k_learn > 100) throw ConfigError("--k must lie in [1, 100]");
  cfg.threads = static_cast<int>(s.integer("threads", 1));
  if (cfg.threads < 1) throw ConfigError("--threads must be at least 1");
  cfg.method_config.score = parse_score(s.text("score", "pearson"));
  return cfg;
}

fs::path output_dir(const Settings& s) {
  const fs::path dir = s.text("out", "sdr_out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output directory '" + dir.string() + "' cannot be created");
  }
  return dir;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  writer(f);
  if (!f) throw ConfigError("failed writing '" + path.string() + "'");
}

int cmd_simulate(const Settings& s, std::ostream& out) {
  const BenchConfig cfg = bench_config(s, default_methods());
  const fs::path dir = output_dir(s);
  const BenchReport r = run_benchmark(cfg);
  write_file(dir / "report.csv", [&](std::ostream& f) { write_bench_csv(f, r); });
  write_file(dir / "report.json", [&](std::ostream& f) { f << to_json(r).dump(2) << '\n'; });
  write_file(dir / "table.txt", [&](std::ostream& f) { write_bench_table(f, r); });
  write_bench_table(out, r);
  out << "wrote " << (dir / "report.csv").string() << ", report.json, table.txt\n";
  return 0;
}

int cmd_sweep(const Settings& s, std::ostream& out) {
  const BenchConfig cfg =
      bench_config(s, {MethodSpec::reducer(MethodTag::LSPCA), MethodSpec::reducer(MethodTag::BARSHAN_EXT),
                       MethodSpec::reducer(MethodTag::PLS_EXT)});
  for (const auto& m : cfg.methods) {
    if (!m.tunes_gamma()) throw ConfigError("sweep-gamma: " + m.name() + " has no gamma");
  }
  const std::vector<Gamma> grid = grid_of(s);
  const fs::path dir = output_dir(s);
  const SweepReport r = gamma_sweep(cfg, grid);
  write_file(dir / "sweep.csv", [&](std::ostream& f) { write_sweep_csv(f, r); });
  write_file(dir / "sweep_references.csv", [&](std::ostream& f) { write_sweep_references_csv(f, r); });
  write_file(dir / "sweep.json", [&](std::ostream& f) { f << to_json(r).dump(2) << '\n'; });
  write_sweep_csv(out, r);
  out << "wrote " << (dir / "sweep.csv").string() << ", sweep_references.csv, sweep.json\n";
  return 0;
}

int cmd_real_data(const Settings& s, std::ostream& out) {
  CsvOptions csv;
  const std::string delim = s.text("delimiter", ",");
  if (delim == "\\t" || delim == "tab") {
    csv.delimiter = '\t';
  } else if (delim.size() == 1) {
    csv.delimiter = delim[0];
  } else {
    throw ConfigError("--delimiter must be a single character");
  }
  csv.response = s.required("response");
  csv.exclude = split_list(s.text("exclude", ""));
  const CsvTable table = read_csv(s.required("data"), csv);
  const Eigen::Index P = table.data.variables();

  RealDataConfig cfg;
  cfg.methods = methods_of(s, default_methods());
  cfg.seed = seed_of(s);
  cfg.threads = static_cast<int>(s.integer("threads", 1));
  if (cfg.threads < 1) throw ConfigError("--threads must be at least 1");
  cfg.method_config.score = parse_score(s.text("score", "pearson"));
  if (s.has("gamma-grid")) cfg.method_config.gamma_grid = grid_of(s);
  if (s.has("train-size")) cfg.train_size = static_cast<Eigen::Index>(s.integer("train-size", 0));
  if (s.has("k")) {
    cfg.dimensions = {static_cast<Eigen::Index>(s.integer("k", 1))};
  } else {
    const auto k_max = static_cast<Eigen::Index>(s.integer("k-max", P));
    if (k_max < 1 || k_max > P) {
      throw ConfigError("--k-max must lie in [1, " + std::to_string(P) + "]");
    }
    for (Eigen::Index k = 1; k <= k_max; ++k) cfg.dimensions.push_back(k);
  }
  const fs::path dir = output_dir(s);
  const RealDataReport r = run_real_data(table.data, cfg);
  write_file(dir / "curves.csv", [&](std::ostream& f) { write_curve_csv(f, r); });
  write_file(dir / "spectrum.csv", [&](std::ostream& f) { write_spectrum_csv(f, r); });
  write_file(dir / "real_data.json", [&](std::ostream& f) {
    nlohmann::json j = to_json(r);
    j["features"] = table.features;
    j["response"] = csv.response;
    f << j.dump(2) << '\n';
  });
  out << "train " << r.n_train << ", test " << r.n_test << ", variables " << P << '\n';
  write_curve_csv(out, r);
  out << "wrote " << (dir / "curves.csv").string() << ", spectrum.csv, real_data.json\n";
  return 0;
}

int cmd_oracle_check(const Settings& s, bool inject, std::ostream& out) {
  const auto results = run_oracles(seed_of(s), inject);
  std::vector<std::string> failed;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    if (!r.passed) failed.push_back(r.name);
  }
  if (failed.empty()) {
    out << "all " << results.size() << " oracles passed\n";
    return 0;
  }
  out << "failed:";
  for (const auto& f : failed) out << ' ' << f;
  out << '\n';
  return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supervised dimensionality reduction benchmark"};
  app.require_subcommand(1);

  const std::vector<std::string> bench_keys{"methods", "trials",    "seed",  "spectrum", "alignment",
                                            "ntrain",  "k",         "out",   "score",    "threads",
                                            "gamma-grid"};
  const std::vector<std::string> real_keys{"methods", "seed",       "k",       "k-max",  "gamma-grid",
                                           "data",    "response",   "delimiter", "out",  "exclude",
                                           "train-size", "score",   "threads"};
  const std::map<std::string, std::string> help{
      {"methods", "comma-separated method names (ols, pca, bair, pv, pcps, pls, pls_ext, barshan, "
                  "barshan_ext, lspca, sppca)"},
      {"trials", "trials per setting"},
      {"seed", "master seed (falls back to SDR_SEED, then 0)"},
      {"spectrum", "fast, slow or a comma list; default both"},
      {"alignment", "well, mis, partial or a comma list; default all"},
      {"ntrain", "training size(s), e.g. 150,1500"},
      {"k", "subspace dimension"},
      {"k-max", "largest subspace dimension of the K sweep"},
      {"gamma-grid", "comma-separated dimensionless gamma values; 'inf' allowed"},
      {"data", "CSV file with a header row"},
      {"response", "name of the response column"},
      {"delimiter", "CSV delimiter character"},
      {"out", "output directory"},
      {"exclude", "comma-separated columns left out of the features"},
      {"train-size", "training rows; default ceil(0.8 N)"},
      {"score", "variable score for Bair/PV/PCPS: pearson or covariance"},
      {"threads", "worker threads"},
  };

  struct Sub {
    CLI::App* app;
    std::vector<std::string> keys;
  };
  std::map<std::string, std::string> cli_values;
  std::map<std::string, std::map<std::string, CLI::Option*>> registered;
  std::string config_path;
  bool inject = false;

  const auto add_sub = [&](const std::string& name, const std::string& description,
                           const std::vector<std::string>& keys) {
    CLI::App* sub = app.add_subcommand(name, description);
    for (const auto& key : keys) {
      registered[name][key] = sub->add_option("--" + key, cli_values[name + "/" + key], help.at(key));
    }
    sub->add_option("--config", config_path, "flat JSON file of option values");
    return Sub{sub, keys};
  };
  std::vector<Sub> subs{
      add_sub("simulate", "run the multi-trial synthetic benchmark", bench_keys),
      add_sub("sweep-gamma", "test MSE as a function of gamma on paired trials", bench_keys),
      add_sub("real-data", "K sweep of every method on a CSV dataset", real_keys),
      add_sub("oracle-check", "run the small-scale brute-force oracles", {"seed"}),
  };
  subs.back().app->add_flag("--inject-failure", inject, "perturb one oracle (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& sub : subs) {
      if (!sub.app->parsed()) continue;
      const std::string name = sub.app->get_name();
      Settings s;
      if (!config_path.empty()) load_config(config_path, sub.keys, s);
      for (const auto& key : sub.keys) {
        if (registered[name][key]->count() > 0) s.set(key, cli_values[name + "/" + key]);
      }
      if (name == "simulate") return cmd_simulate(s, out);
      if (name == "sweep-gamma") return cmd_sweep(s, out);
      if (name == "real-data") return cmd_real_data(s, out);
      return cmd_oracle_check(s, inject, out);
    }
  } catch (const IngestError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n' << app.help() << '\n';
    return 2;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace sdr
