#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "nvq/newsvendor.hpp"
#include "nvq/solver.hpp"

namespace nvq {

/// A parsed spec file: the problem plus run settings. Gamma is always 0.
struct SpecFile {
    NewsvendorSpec problem;
    std::int64_t horizon = 0;
    BanditConfig bandit;
};

/**
 * Parses the line-oriented spec format:
 *
 *     # comment
 *     [problem]
 *     forecasts = [10, 20, 15]
 *     deviation_support = [-1, 0, 1]
 *     deviation_probs = [0.25, 0.5, 0.25]      # or one list per residue class
 *     purchase_cost = 5.0
 *     selling_price = 7.0
 *     cycle_length = 1                         # optional
 *     [run]
 *     horizon = 3                              # optional, defaults to all forecasts
 *     bandit = epsilon_greedy                  # or ucb1
 *     epsilon = 0.1
 *     seed = 0
 *     steps = 10000
 *
 * Throws ParseError for malformed lines or values, SchemaError for unknown,
 * duplicate, missing or mistyped keys, and InvariantError when the decoded
 * problem or run settings are invalid. Messages start with "<source>:<line>:"
 * or "<source>:" when no single line is to blame.
 */
SpecFile parse_spec(std::string_view text, const std::string& source = "<spec>", double tol = kTolerance);

/// Reads and parses `path`; an unreadable file raises ParseError.
SpecFile load_spec(const std::string& path, double tol = kTolerance);

}  // namespace nvq
