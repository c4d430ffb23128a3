#include "sdr/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>

namespace sdr {

namespace {

void setting_cells(std::ostream& out, const BenchSetting& s) {
  out << to_string(s.spectrum) << ',' << to_string(s.alignment) << ',' << s.n_train;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json gamma_json(const std::optional<Gamma>& g) {
  if (!g) return nullptr;
  if (g->is_infinite()) return "INFINITY";
  return g->value();
}

nlohmann::json setting_json(const BenchSetting& s) {
  return {{"spectrum", to_string(s.spectrum)},
          {"alignment", to_string(s.alignment)},
          {"n_train", s.n_train}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_bench_csv(std::ostream& out, const BenchReport& r) {
  out << "spectrum,alignment,n_train,method,trials,failures,mean_train_mse,mean_test_mse\n";
  for (const auto& s : r.settings) {
    for (const auto& m : s.methods) {
      setting_cells(out, s.setting);
      out << ',' << m.method << ',' << m.trials.size() << ',' << m.failures << ','
          << format_number(m.mean_train_mse) << ',' << format_number(m.mean_test_mse) << '\n';
    }
  }
}

nlohmann::json to_json(const BenchReport& r) {
  nlohmann::json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["k"] = r.k_learn;
  j["notes"] = r.notes;
  j["settings"] = nlohmann::json::array();
  for (const auto& s : r.settings) {
    nlohmann::json js = setting_json(s.setting);
    js["methods"] = nlohmann::json::array();
    for (const auto& m : s.methods) {
      nlohmann::json jm{{"method", m.method},
                        {"failures", m.failures},
                        {"mean_train_mse", number_or_null(m.mean_train_mse)},
                        {"mean_test_mse", number_or_null(m.mean_test_mse)}};
      jm["trials"] = nlohmann::json::array();
      for (const auto& t : m.trials) {
        nlohmann::json jt{{"seed", t.seed}};
        if (t.error) {
          jt["error"] = *t.error;
        } else {
          jt["train_mse"] = t.train_mse;
          jt["test_mse"] = t.test_mse;
        }
        if (t.gamma) jt["gamma"] = gamma_json(t.gamma);
        if (t.M) jt["M"] = *t.M;
        if (!t.flags.empty()) jt["flags"] = t.flags;
        jm["trials"].push_back(std::move(jt));
      }
      js["methods"].push_back(std::move(jm));
    }
    j["settings"].push_back(std::move(js));
  }
  return j;
}

void write_bench_table(std::ostream& out, const BenchReport& r) {
  if (r.settings.empty()) return;
  constexpr int kMethodWidth = 12;
  constexpr int kCellWidth = 34;
  const auto cell = [](const MethodSummary& m) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.3f / %.3f", m.mean_train_mse, m.mean_test_mse);
    std::string s = buf;
    if (m.failures > 0) s += " (" + std::to_string(m.failures) + " failed)";
    return s;
  };
  out << "Average training / testing MSE over " << r.trials << " trials (K = " << r.k_learn
      << ")\n";
  out << std::left << std::setw(kMethodWidth) << "method";
  for (const auto& s : r.settings) out << std::setw(kCellWidth) << s.setting.label();
  out << '\n';
  for (std::size_t mi = 0; mi < r.settings.front().methods.size(); ++mi) {
    out << std::setw(kMethodWidth) << r.settings.front().methods[mi].method;
    for (const auto& s : r.settings) out << std::setw(kCellWidth) << cell(s.methods[mi]);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepReport& r) {
  out << "spectrum,alignment,n_train,method,gamma,mean_test_mse,failures\n";
  for (const auto& s : r.settings) {
    for (const auto& c : s.curves) {
      for (std::size_t gi = 0; gi < r.grid.size(); ++gi) {
        setting_cells(out, s.setting);
        out << ',' << c.method << ',' << to_string(r.grid[gi]) << ','
            << format_number(c.mean_test_mse[gi]) << ',' << c.failures[gi] << '\n';
      }
    }
  }
}

void write_sweep_references_csv(std::ostream& out, const SweepReport& r) {
  out << "spectrum,alignment,n_train,pca_test_mse,ols_test_mse\n";
  for (const auto& s : r.settings) {
    setting_cells(out, s.setting);
    out << ',' << format_number(s.pca_reference) << ',' << format_number(s.ols_reference) << '\n';
  }
}

nlohmann::json to_json(const SweepReport& r) {
  nlohmann::json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["grid"] = nlohmann::json::array();
  for (const auto& g : r.grid) j["grid"].push_back(gamma_json(g));
  j["settings"] = nlohmann::json::array();
  for (const auto& s : r.settings) {
    nlohmann::json js = setting_json(s.setting);
    js["pca_reference"] = number_or_null(s.pca_reference);
    js["ols_reference"] = number_or_null(s.ols_reference);
    js["curves"] = nlohmann::json::array();
    for (const auto& c : s.curves) {
      nlohmann::json jc{{"method", c.method}, {"failures", c.failures}};
      jc["mean_test_mse"] = nlohmann::json::array();
      for (double v : c.mean_test_mse) jc["mean_test_mse"].push_back(number_or_null(v));
      js["curves"].push_back(std::move(jc));
    }
    j["settings"].push_back(std::move(js));
  }
  return j;
}

void write_curve_csv(std::ostream& out, const RealDataReport& r) {
  out << "method,K,train_mse,test_mse\n";
  for (const auto& p : r.curve) {
    out << p.method << ',' << p.K << ',' << format_number(p.train_mse) << ','
        << format_number(p.test_mse) << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const RealDataReport& r) {
  out << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < r.spectrum.size(); ++i) {
    out << (i + 1) << ',' << format_number(r.spectrum(i)) << '\n';
  }
}

nlohmann::json to_json(const RealDataReport& r) {
  nlohmann::json j{{"n_train", r.n_train},
                   {"n_test", r.n_test},
                   {"variables", r.variables},
                   {"seed", r.seed}};
  j["spectrum"] = std::vector<double>(r.spectrum.data(), r.spectrum.data() + r.spectrum.size());
  j["curve"] = nlohmann::json::array();
  for (const auto& p : r.curve) {
    nlohmann::json jp{{"method", p.method}, {"K", p.K}};
    if (p.error) {
      jp["error"] = *p.error;
    } else {
      jp["train_mse"] = p.train_mse;
      jp["test_mse"] = p.test_mse;
    }
    if (p.gamma) jp["gamma"] = gamma_json(p.gamma);
    if (p.M) jp["M"] = *p.M;
    if (!p.flags.empty()) jp["flags"] = p.flags;
    j["curve"].push_back(std::move(jp));
  }
  return j;
}

}  // namespace sdr
