#pragma once

// Report writers. CSV uses '.' decimals and a fixed column order; JSON
// carries per-trial detail.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "sdr/realdata.hpp"
#include "sdr/synthetic.hpp"

namespace sdr {

/// Fixed-precision decimal used in every CSV cell; "nan" for NaN.
std::string format_number(double v);

/// spectrum,alignment,n_train,method,trials,failures,mean_train_mse,mean_test_mse
void write_bench_csv(std::ostream& out, const BenchReport& r);
nlohmann::json to_json(const BenchReport& r);
/// Methods down, settings across, "train / test" cells.
void write_bench_table(std::ostream& out, const BenchReport& r);

/// spectrum,alignment,n_train,method,gamma,mean_test_mse,failures
void write_sweep_csv(std::ostream& out, const SweepReport& r);
/// spectrum,alignment,n_train,pca_test_mse,ols_test_mse
void write_sweep_references_csv(std::ostream& out, const SweepReport& r);
nlohmann::json to_json(const SweepReport& r);

/// method,K,train_mse,test_mse
void write_curve_csv(std::ostream& out, const RealDataReport& r);
/// index,eigenvalue
void write_spectrum_csv(std::ostream& out, const RealDataReport& r);
nlohmann::json to_json(const RealDataReport& r);

}  // namespace sdr
