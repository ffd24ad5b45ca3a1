#include <iostream>

#include <CLI11.hpp>

#include "nvq/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Newsvendor MDP reduction via hidden symmetries"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir;
    nvq::cli::CompareOptions compare;

    auto* validate = app.add_subcommand("validate", "Parse a spec and run every structural check");
    validate->add_option("spec", spec_path, "Spec file")->required();

    auto* reduce = app.add_subcommand("reduce", "Build the quotient and write its artifacts");
    reduce->add_option("spec", spec_path, "Spec file")->required();
    reduce->add_option("--out", out_dir, "Output directory")->required();

    auto* solve = app.add_subcommand("solve", "Solve the quotient and pull the orders back");
    solve->add_option("spec", spec_path, "Spec file")->required();

    auto* cmp = app.add_subcommand("compare", "Bandit sample-efficiency experiment");
    cmp->add_option("spec", spec_path, "Spec file")->required();
    cmp->add_option("--seeds", compare.seeds, "Number of seeds")->check(CLI::PositiveNumber);
    cmp->add_option("--steps", compare.steps, "Learner steps per run (overrides the spec)")->check(CLI::PositiveNumber);
    cmp->add_option("--csv", compare.csv_path, "CSV output path (default: stdout)");

    auto* demo = app.add_subcommand("demo", "Print the three-day walk-through");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (*validate) return nvq::cli::cmd_validate(spec_path, std::cout, std::cerr);
    if (*reduce) return nvq::cli::cmd_reduce(spec_path, out_dir, std::cout, std::cerr);
    if (*solve) return nvq::cli::cmd_solve(spec_path, std::cout, std::cerr);
    if (*cmp) return nvq::cli::cmd_compare(spec_path, compare, std::cout, std::cerr);
    if (*demo) return nvq::cli::cmd_demo(std::cout, std::cerr);
    return 1;
}
