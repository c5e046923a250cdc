#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ljcm/model.hpp"
#include "ljcm/observables.hpp"

namespace ljcm::run {

// Invalid flag/file/preset input; the message names the offending field.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Thrown by parse_config on --help; carries the formatted help text.
class HelpRequested {
  public:
    explicit HelpRequested(std::string text) : text_(std::move(text)) {}
    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

enum class FKind { constant, inverse_sqrt, custom };
enum class OutFormat { csv, json };

struct ObservableSelection {
    bool entropy = false;
    bool mandel = false;
    bool squeeze1 = false;
    bool squeeze2 = false;
    bool squeeze3 = false;
    bool moments = false;

    bool any() const;
    static ObservableSelection all();
    // Comma list of names; unknown or empty selection -> ConfigError.
    static ObservableSelection parse(const std::string& csv);
    std::string to_string() const;
};

struct HusimiRequest {
    double tau = 0.0;        // snapshot time in scaled units tau = lambda t
    double range = 7.0;      // grid covers [-range, range]^2
    int resolution = 201;    // points per axis
};

struct RunConfig {
    std::string preset;             // empty = custom scenario
    FKind f_kind = FKind::constant;
    std::string f_table_path;       // custom kind only
    std::vector<double> f_table;    // mean excitations e_n = n f^2(n), n >= 1
    double alpha_sq = 10.0;
    double alpha_phase = 0.0;
    double chi_over_lambda = 0.0;
    double delta2_over_lambda = 0.0;
    double delta3_over_lambda = 0.0;
    double lambda = 1.0;            // time unit; set programmatically only
    double tau_max = 25.0;
    int tau_steps = 2500;
    ObservableSelection observables = ObservableSelection::all();
    std::optional<HusimiRequest> husimi;
    TruncationPolicy truncation{};
    bool oracle_check = false;
    std::optional<std::string> out;
    OutFormat format = OutFormat::csv;

    std::string out_path() const;  // default series.csv / series.json
    void validate() const;         // throws ConfigError
};

// One time-grid row; only the selected observables are populated, and
// oracle_gap only at the ten checked grid points.
struct ObservableRecord {
    double tau = 0.0;
    std::optional<double> entropy;
    std::optional<double> mean_n, mean_n2, mean_n3;
    std::optional<double> mandel_q;
    std::optional<double> s_x1, s_y1;
    std::optional<double> s_x2, s_y2;
    std::optional<double> s_x3, s_y3;
    std::optional<double> oracle_gap;
};

struct ScenarioResult {
    std::vector<ObservableRecord> series;
    std::optional<HusimiGrid> husimi;
    std::vector<int> nudged_sectors;
    double worst_oracle_gap = 0.0;
    bool oracle_failed = false;  // worst gap above 1e-6
};

// fig{2..6}{a,b,c}-{left,right} plus fig7{a,b,c}.
std::vector<std::string> preset_names();
RunConfig preset_config(const std::string& name);

// Layering: defaults < preset < --config file keys < explicit flags. File
// keys mirror the flag names; a null value leaves the field untouched.
RunConfig parse_config(const std::vector<std::string>& args);

// Effective config as a single-line JSON object with flag-named keys.
std::string config_json(const RunConfig& cfg);

NonlinearityFn make_nonlinearity(const RunConfig& cfg);
ModelParams make_params(const RunConfig& cfg);

ScenarioResult run_scenario(const RunConfig& cfg);

void write_series(const std::vector<ObservableRecord>& records,
                  const std::string& path, OutFormat format,
                  const RunConfig& cfg);

void write_husimi(const HusimiGrid& grid, const std::string& path,
                  OutFormat format);

// series.csv -> series.husimi.csv
std::string husimi_out_path(const std::string& series_path);

}  // namespace ljcm::run
