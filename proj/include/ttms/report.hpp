#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ttms {

/// Rows of a header-first CSV without quoted fields.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name`; throws FormatError when absent.
    std::size_t column(const std::string &name) const;
};

/// Throws FormatError when the file cannot be read or a row has the wrong width.
CsvTable read_csv(const std::filesystem::path &path);

/// Per (model, task count) aggregates of an experiment directory.
struct ExperimentDigest {
    std::map<std::string, std::map<int, double>> mean_max_reward;
    std::map<std::string, std::map<int, double>> median_decision_ns;
    /// Mean absolute prediction error over the first and last 10% of episodes, per model.
    std::map<std::string, std::pair<double, double>> prediction_error;
    std::map<std::string, std::vector<double>> mean_reward_by_episode;
    std::map<double, double> sweep_mean_max_reward;
};

ExperimentDigest digest_experiment(const std::filesystem::path &dir);

/// Markdown summary of `dir` (experiment and/or retraining outputs), also written to dir/report.md.
/// With `plot`, SVG line charts are written to dir/plots/.
std::string write_report(const std::filesystem::path &dir, bool plot);

} // namespace ttms
