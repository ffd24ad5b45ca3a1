#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "nvq/newsvendor.hpp"

namespace nvq::cli {

/// 1e-9, or the value of NVQ_TOL when set. Throws Error for a malformed value.
double tolerance_from_env();

/// The forecasts (10, 20, 15) walk-through with exact uniform thirds over {-1, 0, 1}.
NewsvendorSpec demo_spec();

// Each command returns its exit code. Failures print one "error: ..." line to `err`.

int cmd_validate(const std::string& spec_path, std::ostream& out, std::ostream& err);

/// Writes quotient.txt, symmetry.txt, relabeling.txt and pullback.txt into out_dir.
int cmd_reduce(const std::string& spec_path, const std::string& out_dir, std::ostream& out, std::ostream& err);

/// Exit 2 when the pulled-back orders disagree with the brute-force oracle.
int cmd_solve(const std::string& spec_path, std::ostream& out, std::ostream& err);

struct CompareOptions {
    std::int64_t seeds = 30;
    std::optional<std::int64_t> steps;  // overrides the spec's [run] steps
    std::string csv_path;               // empty: CSV goes to `out`
};

int cmd_compare(const std::string& spec_path, const CompareOptions& options, std::ostream& out, std::ostream& err);

int cmd_demo(std::ostream& out, std::ostream& err);

}  // namespace nvq::cli
