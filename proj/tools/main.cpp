#include "commands.hpp"

#include "flowrecon/error.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>

namespace {

using namespace flowrecon::cli;

struct Overrides {
    std::string config;
    int scenario = 0;
    std::vector<int> levels;
    std::uint64_t seed = 0;
    std::string out;
    bool rescale = false;
    bool full_precision = false;
    int jobs = 0;
    bool allow_level5 = false;
    std::vector<std::string> inputs;
    std::vector<std::string> results;
};

struct Flags {
    CLI::Option* scenario = nullptr;
    CLI::Option* levels = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* jobs = nullptr;
};

Flags add_common(CLI::App* app, Overrides& o)
{
    Flags f;
    app->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    f.scenario = app->add_option("--scenario", o.scenario, "Matrix scenario (1 or 2)")->check(CLI::IsMember({1, 2}));
    f.levels = app->add_option("--levels", o.levels, "Decomposition levels, e.g. 1,2,3,4")->delimiter(',');
    f.seed = app->add_option("--seed", o.seed, "Synthetic corpus seed");
    f.out = app->add_option("--out", o.out, "Output directory");
    f.jobs = app->add_option("--jobs", o.jobs, "Worker threads for per-day work")->check(CLI::PositiveNumber);
    app->add_flag("--rescale-approximation", o.rescale, "Divide inserted counts by 2^(k/2)");
    app->add_flag("--full-precision", o.full_precision, "Write 17 significant digits instead of 6");
    return f;
}

RunConfig resolve(const Overrides& o, const Flags& f)
{
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (f.scenario->count() > 0) {
        c.scenario = o.scenario;
    }
    if (f.levels->count() > 0) {
        c.levels = o.levels;
    }
    if (f.seed->count() > 0) {
        c.synth.params.seed = o.seed;
    }
    if (f.out->count() > 0) {
        c.out = o.out;
    }
    if (f.jobs->count() > 0) {
        c.jobs = o.jobs;
    }
    c.rescale_approximation = c.rescale_approximation || o.rescale;
    c.full_precision = c.full_precision || o.full_precision;
    c.reconstruct.allow_level5 = c.reconstruct.allow_level5 || o.allow_level5;
    if (!o.inputs.empty()) {
        c.ingest.inputs.assign(o.inputs.begin(), o.inputs.end());
    }
    if (!o.results.empty()) {
        c.report.results.assign(o.results.begin(), o.results.end());
    }
    validate(c);
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Wavelet reconstruction of 5-minute traffic flow from aggregated counts"};
    app.require_subcommand(1);

    using Command = int (*)(const RunConfig&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"synth", "Generate a synthetic commuter corpus", cmd_synth},
        {"ingest", "Validate sensor CSVs into a per-day store with a gap report", cmd_ingest},
        {"matrix", "Build the typical-day Matrix from the day store", cmd_matrix},
        {"reconstruct", "Reconstruct target days at each level and score them", cmd_reconstruct},
        {"report", "Summarize results into tables and plot data", cmd_report},
    };

    Overrides o;
    std::map<CLI::App*, std::pair<Flags, Command>> subs;
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        const Flags f = add_common(sub, o);
        if (name == "ingest") {
            sub->add_option("--input", o.inputs, "Sensor CSV (repeatable)")->check(CLI::ExistingFile);
        }
        if (name == "reconstruct") {
            sub->add_flag("--allow-level5", o.allow_level5, "Permit level 5 (160-minute windows)");
        }
        if (name == "report") {
            sub->add_option("--results", o.results, "Results directory (repeatable)");
        }
        subs.emplace(sub, std::make_pair(f, fn));
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [sub, entry] : subs) {
        if (!sub->parsed()) {
            continue;
        }
        try {
            const RunConfig config = resolve(o, entry.first);
            return entry.second(config, std::cout);
        } catch (const flowrecon::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitError;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitError;
        }
    }
    return kExitError;
}
