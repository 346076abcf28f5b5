// Command line front end: predict, figure, simulate, validate.
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure, 4 validation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "nhpc/cli/commands.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;
constexpr int kValidationFailure = 4;

struct Options {
    std::string config;
    std::string output;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nhpc::Error("cannot open output file " + path);
    out << text;
    if (!out) throw nhpc::Error("failed writing " + path);
}

std::string render(const nhpc::cli::Table& t, const std::string& format) {
    return format == "json" ? nhpc::cli::to_json(t) : nhpc::cli::to_csv(t);
}

nhpc::cli::RunConfig load(const Options& opt) {
    if (opt.config.empty()) throw nhpc::cli::ConfigError("--config is required for this command");
    auto cfg = nhpc::cli::load_config(opt.config);
    if (opt.seed) {
        if (!cfg.mc) cfg.mc.emplace();
        cfg.mc->seed = *opt.seed;
    }
    return cfg;
}

int threads_of(const Options& opt) {
    if (opt.threads > 0) return opt.threads;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int run(const std::string& command, const Options& opt) {
    using namespace nhpc::cli;
    if (command == "predict") {
        const auto t = cmd_predict(load(opt));
        write_text(opt.output, render(t, opt.format));
        return t.degraded ? kNumericalFailure : 0;
    }
    if (command == "figure") {
        const FigureOptions fo = opt.config.empty() ? FigureOptions{} : figure_options(load(opt));
        const std::filesystem::path dir = opt.output.empty() ? "figure" : opt.output;
        std::filesystem::create_directories(dir);
        for (const auto& panel : cmd_figure(fo)) {
            const auto file = dir / (panel.name + (opt.format == "json" ? ".json" : ".csv"));
            write_text(file.string(), render(panel.table, opt.format));
        }
        return 0;
    }
    if (command == "simulate") {
        write_text(opt.output, render(cmd_simulate(load(opt), threads_of(opt)), opt.format));
        return 0;
    }
    const auto report = cmd_validate(load(opt), threads_of(opt));
    write_text(opt.output, render(report.table, opt.format));
    return report.all_passed ? 0 : kValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional prediction for non-homogeneous Poisson cluster processes"};
    app.require_subcommand(1);
    Options opt;
    const auto add_common = [&opt](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", opt.config, "JSON run configuration");
        if (config_required) c->required();
        sub->add_option("--output", opt.output, "output file (directory for figure); stdout by default");
        sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", opt.seed, "overrides mc.seed");
        sub->add_option("--threads", opt.threads, "worker threads for simulation (default: all cores)")
            ->check(CLI::PositiveNumber);
    };
    add_common(app.add_subcommand("predict", "conditional mean and variance"), true);
    add_common(app.add_subcommand("figure", "the six predictor curves as data files"), false);
    add_common(app.add_subcommand("simulate", "replicate records of the cluster model"), true);
    add_common(app.add_subcommand("validate", "recursion against simulation oracles"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opt);
    } catch (const nhpc::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const nhpc::InvalidScenario& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalFailure;
    }
}
