#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ucplab {

inline constexpr int kSchemaVersion = 1;

/// Experiments the harness knows how to run.
const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> params;
    /// CSV destination; empty or "-" writes to the stream given to run().
    std::string output;
};

/// Flat `key = value` lines; '#' starts a comment. `experiment` and `output` are
/// recognised keys, everything else lands in params.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// `key=value` override; later overrides win.
void apply_override(ExperimentConfig& config, const std::string& assignment);

/// Checks every parameter against the preconditions of the module it feeds, before any
/// compute. Throws InvalidArgument naming the violated precondition.
void validate(const ExperimentConfig& config);

/// Worker count: the `workers` parameter, else UCPLAB_WORKERS, else hardware concurrency.
unsigned resolve_workers(const ExperimentConfig& config);

/// Validates and runs; writes versioned CSV (header comments starting '#') to `out`
/// unless config.output names a file. Row-level failures land in an `error` column.
void run(const ExperimentConfig& config, std::ostream& out);

/// run() into a string.
std::string run_to_string(const ExperimentConfig& config);

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

/// Groups sweep rows by (L, E, K): row count, min/max of ratio and lambda_min, and the
/// exponent fit of lambda_min against delta where at least four deltas are present. A
/// final `ALL` group spans every row. Missing columns are named in the error.
CsvTable report_summary(const std::vector<CsvTable>& inputs);
void write_csv(std::ostream& out, const CsvTable& table);

}  // namespace ucplab
