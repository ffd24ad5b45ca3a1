#include "nvq/spec_file.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nvq/errors.hpp"

namespace nvq {

namespace {

using nlohmann::json;

const std::map<std::string, std::set<std::string>> kKeys = {
    {"problem",
     {"forecasts", "deviation_support", "deviation_probs", "purchase_cost", "selling_price", "cycle_length"}},
    {"run", {"horizon", "bandit", "epsilon", "seed", "steps"}},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    int line = 0;
    std::string raw;
    json value;
};

class Reader {
public:
    Reader(std::string source, std::map<std::string, Entry> entries)
        : source_(std::move(source)), entries_(std::move(entries)) {}

    const Entry* find(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    const Entry& require(const std::string& key) const {
        if (const Entry* e = find(key)) return *e;
        throw SchemaError(source_ + ": missing key '" + key + "'");
    }

    [[noreturn]] void type_error(const std::string& key, const char* expected) const {
        throw SchemaError(where(key) + key + " must be " + expected);
    }

    std::string where(const std::string& key) const {
        const Entry* e = find(key);
        return source_ + ":" + (e ? std::to_string(e->line) + ":" : "") + " ";
    }

    double number(const std::string& key) const {
        const auto& v = require(key).value;
        if (!v.is_number()) type_error(key, "a number");
        return v.get<double>();
    }

    std::int64_t integer(const std::string& key) const {
        const auto& v = require(key).value;
        if (!v.is_number_integer()) type_error(key, "an integer");
        return v.get<std::int64_t>();
    }

    std::vector<std::int64_t> integers(const std::string& key) const {
        const auto& v = require(key).value;
        if (!v.is_array()) type_error(key, "a list of integers");
        std::vector<std::int64_t> out;
        for (const auto& x : v) {
            if (!x.is_number_integer()) type_error(key, "a list of integers");
            out.push_back(x.get<std::int64_t>());
        }
        return out;
    }

    std::vector<double> numbers(const std::string& key, const json& v) const {
        if (!v.is_array()) type_error(key, "a list of numbers or a list of such lists");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) type_error(key, "a list of numbers or a list of such lists");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<std::vector<double>> distributions(const std::string& key) const {
        const auto& v = require(key).value;
        if (v.is_array() && !v.empty() && v.front().is_array()) {
            std::vector<std::vector<double>> rows;
            for (const auto& row : v) rows.push_back(numbers(key, row));
            return rows;
        }
        return {numbers(key, v)};
    }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
};

}  // namespace

SpecFile parse_spec(std::string_view text, const std::string& source, double tol) {
    std::map<std::string, Entry> entries;
    std::set<std::string> seen_sections;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const std::string at = source + ":" + std::to_string(line_no) + ": ";
        std::string_view body = line;
        if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;

        if (body.front() == '[' && body.back() == ']') {
            section = std::string(trim(body.substr(1, body.size() - 2)));
            if (!kKeys.count(section)) throw SchemaError(at + "unknown section [" + section + "]");
            if (!seen_sections.insert(section).second) throw SchemaError(at + "duplicate section [" + section + "]");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError(at + "expected 'key = value'");
        const std::string key(trim(body.substr(0, eq)));
        const std::string raw(trim(body.substr(eq + 1)));
        if (key.empty()) throw ParseError(at + "missing key before '='");
        if (raw.empty()) throw ParseError(at + "missing value for '" + key + "'");
        if (section.empty()) throw SchemaError(at + "key '" + key + "' appears before any section");
        if (!kKeys.at(section).count(key)) throw SchemaError(at + "unknown key '" + key + "' in [" + section + "]");
        if (entries.count(key)) throw SchemaError(at + "duplicate key '" + key + "'");

        Entry entry{line_no, raw, nullptr};
        if (key != "bandit") {
            try {
                entry.value = json::parse(raw);
            } catch (const json::parse_error&) {
                throw ParseError(at + "cannot parse value of '" + key + "': " + raw);
            }
        }
        entries.emplace(key, std::move(entry));
    }

    const Reader r(source, std::move(entries));
    SpecFile spec;
    auto& p = spec.problem;
    p.forecasts = r.integers("forecasts");
    p.deviation_support = r.integers("deviation_support");
    p.deviation_probs = r.distributions("deviation_probs");
    p.purchase_cost = r.number("purchase_cost");
    p.selling_price = r.number("selling_price");
    if (r.find("cycle_length")) p.cycle_length = r.integer("cycle_length");
    try {
        validate(p, tol);
    } catch (const SpecError& e) {
        throw InvariantError(source + ": " + e.what());
    }

    spec.horizon = r.find("horizon") ? r.integer("horizon") : static_cast<std::int64_t>(p.forecasts.size());
    if (spec.horizon < 1 || spec.horizon > static_cast<std::int64_t>(p.forecasts.size()))
        throw InvariantError(r.where("horizon") + "horizon must lie in [1, " + std::to_string(p.forecasts.size()) +
                             "]");

    if (const Entry* e = r.find("bandit")) {
        std::string name = e->raw;
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
        auto algorithm = parse_bandit_algorithm(name);
        if (!algorithm) throw SchemaError(r.where("bandit") + "bandit must be epsilon_greedy or ucb1");
        spec.bandit.algorithm = *algorithm;
    }
    if (r.find("epsilon")) spec.bandit.epsilon = r.number("epsilon");
    if (r.find("steps")) spec.bandit.horizon_steps = r.integer("steps");
    if (const Entry* e = r.find("seed")) {
        if (!e->value.is_number_unsigned()) r.type_error("seed", "a non-negative integer");
        spec.bandit.seed = e->value.get<std::uint64_t>();
    }
    try {
        validate(spec.bandit);
    } catch (const Error& e) {
        throw InvariantError(source + ": " + e.what());
    }
    return spec;
}

SpecFile load_spec(const std::string& path, double tol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot read file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_spec(text.str(), path, tol);
}

}  // namespace nvq
