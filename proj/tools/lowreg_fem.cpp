#include "lowreg/fields.hpp"
#include "lowreg/mesh.hpp"
#include "lowreg/study.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Low-regularity interpolation and curl-curl convergence studies"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "lowreg-out";
    int threads = 0;
    bool check = false;
    auto* run = app.add_subcommand("run", "run a convergence study from a JSON config");
    run->add_option("--config", config_path, "study configuration (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory for report.csv, report.json and VTK files");
    run->add_option("--threads", threads, "OpenMP threads (overrides the config)")->check(CLI::NonNegativeNumber);
    run->add_flag("--check", check, "exit with status 2 when a configured acceptance threshold is violated");

    auto* fields = app.add_subcommand("list-fields", "list the analytic field catalog");
    auto* domains = app.add_subcommand("list-domains", "list the benchmark domains");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fields) {
            for (const auto& f : lowreg::list_fields())
                std::cout << f.name << "\t" << f.description << "\n";
            return 0;
        }
        if (*domains) {
            for (const auto& d : lowreg::domain_names())
                std::cout << d << "\n";
            return 0;
        }
        lowreg::StudyConfig cfg = lowreg::load_config(config_path);
        if (threads > 0)
            cfg.threads = threads;
        std::filesystem::create_directories(out_dir);
        lowreg::StudyReport report = lowreg::run_study(cfg, out_dir);
        const bool ok = lowreg::evaluate_checks(report);
        lowreg::write_report(report, out_dir);
        std::cout << lowreg::report_csv(report);
        if (report.eoc)
            std::cout << "eoc (last 3 levels): " << *report.eoc << "\n";
        else
            std::cout << "eoc (last 3 levels): exact\n";
        if (check && !ok) {
            for (const auto& f : report.check_failures)
                std::cerr << "check failed: " << f << "\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
