#include "nvq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "nvq/errors.hpp"
#include "nvq/report.hpp"
#include "nvq/solver.hpp"
#include "nvq/spec_file.hpp"

namespace nvq::cli {

namespace {

template <typename Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot write " + path.string());
    fill(file);
    if (!file) throw Error("failed writing " + path.string());
}

std::string plural(Index n, const char* word) { return fmt::format("{} {}{}", n, word, n == 1 ? "" : "s"); }

}  // namespace

double tolerance_from_env() {
    const char* raw = std::getenv("NVQ_TOL");
    if (!raw || !*raw) return kTolerance;
    char* end = nullptr;
    const double tol = std::strtod(raw, &end);
    if (*end != '\0' || !(tol > 0.0) || !std::isfinite(tol))
        throw Error(std::string("NVQ_TOL must be a positive number, got '") + raw + "'");
    return tol;
}

NewsvendorSpec demo_spec() {
    NewsvendorSpec spec;
    spec.forecasts = {10, 20, 15};
    spec.deviation_support = {-1, 0, 1};
    spec.deviation_probs = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    spec.purchase_cost = 5.0;
    spec.selling_price = 7.0;
    return spec;
}

int cmd_validate(const std::string& spec_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double tol = tolerance_from_env();
        const auto spec = load_spec(spec_path, tol);
        const auto r = reduce(spec.problem, spec.horizon, tol);
        out << fmt::format("ok: {}, {} per day, cycle length {}\n", plural(spec.horizon, "day"),
                           plural(static_cast<Index>(spec.problem.deviation_support.size()), "order"),
                           spec.problem.cycle_length);
        return 0;
    });
}

int cmd_reduce(const std::string& spec_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double tol = tolerance_from_env();
        const auto spec = load_spec(spec_path, tol);
        const auto r = reduce(spec.problem, spec.horizon, tol);
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "quotient.txt", [&](std::ostream& f) { report::write_quotient(f, r.quotient); });
        write_file(dir / "symmetry.txt",
                   [&](std::ostream& f) { report::write_symmetry(f, r.relabeled, r.hidden_symmetry.symmetry); });
        write_file(dir / "relabeling.txt", [&](std::ostream& f) { report::write_relabeling(f, r.shaped, r.relabeling); });
        write_file(dir / "pullback.txt", [&](std::ostream& f) { report::write_pullback(f, r); });
        out << fmt::format("quotient: {}, {}\n", plural(r.quotient_states(), "state"),
                           plural(r.quotient.mdp.num_actions(), "action"));
        return 0;
    });
}

int cmd_solve(const std::string& spec_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double tol = tolerance_from_env();
        const auto spec = load_spec(spec_path, tol);
        const auto r = reduce(spec.problem, spec.horizon, tol);
        const auto& q = r.quotient.mdp;
        const auto solution = solve_exact_gamma0(q, tol);

        // Optimal offsets per quotient state, ascending; the smallest one is used for the orders.
        std::vector<std::vector<std::int64_t>> offsets(q.num_states());
        std::vector<Index> chosen(q.num_states());
        out << "quotient optimum\n";
        for (Index s = 0; s < q.num_states(); ++s) {
            for (Index a : solution.actions[s]) offsets[s].push_back(std::stoll(q.action_label(a)));
            std::sort(offsets[s].begin(), offsets[s].end());
            chosen[s] = q.action_index(order_action(offsets[s].front()));
            out << fmt::format("  {}  offset{} {}  value {}\n", q.state_label(s), offsets[s].size() > 1 ? "s" : "",
                               fmt::join(offsets[s], " "), report::g12(solution.values(s)));
        }
        const auto orders = orders_of(r.original, r.pullback(Policy::deterministic(q, chosen)));

        const auto oracle = oracle_bruteforce(spec.problem, spec.horizon, tol);
        std::string mismatch;
        out << "orders\n";
        for (std::int64_t t = 0; t < spec.horizon; ++t) {
            const std::int64_t f = spec.problem.forecasts[t];
            out << fmt::format("  {}  forecast {}  order {}\n", day_state(t), f, orders[t]);
            std::vector<std::int64_t> pulled;
            for (auto o : offsets[q.state_index("[" + day_state(t % spec.problem.cycle_length) + "]")])
                pulled.push_back(f + o);
            if (mismatch.empty() && pulled != oracle[t])
                mismatch = fmt::format("{}: optimal orders {{{}}} from the quotient, {{{}}} by brute force",
                                       day_state(t), fmt::join(pulled, ", "), fmt::join(oracle[t], ", "));
        }
        if (!mismatch.empty()) {
            out << "check: FAIL\n";
            err << "error: " << mismatch << '\n';
            return 2;
        }
        out << "check: PASS\n";
        return 0;
    });
}

int cmd_compare(const std::string& spec_path, const CompareOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double tol = tolerance_from_env();
        const auto spec = load_spec(spec_path, tol);
        BanditConfig config = spec.bandit;
        if (options.steps) config.horizon_steps = *options.steps;
        const auto result = compare_sample_efficiency(spec.problem, spec.horizon, config, options.seeds, tol);
        if (options.csv_path.empty()) {
            report::write_comparison_csv(out, result);
        } else {
            write_file(options.csv_path, [&](std::ostream& f) { report::write_comparison_csv(f, result); });
            out << fmt::format("{} seeds, median steps {} (original) vs {} (quotient), ratio {}\n", options.seeds,
                               report::g12(result.median_original), report::g12(result.median_quotient),
                               report::g12(result.ratio));
        }
        return 0;
    });
}

int cmd_demo(std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto spec = demo_spec();
        report::write_walkthrough(out, reduce(spec, 3, tolerance_from_env()));
        return 0;
    });
}

}  // namespace nvq::cli
