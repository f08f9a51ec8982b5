// streamfdr: online FDR decisions over p-value streams.
//
//   streamfdr run --procedure saffron --gamma power:1.6@20 --input arms.csv --state trial.json
//   streamfdr preview --state trial.json
//   streamfdr simulate --replicates 2000 --out power.csv
//   streamfdr casestudy stampede
//   streamfdr calibrate-w0 --out data/stampede_manifest.json

#include "streamfdr/casestudy.hpp"
#include "streamfdr/errors.hpp"
#include "streamfdr/procedures.hpp"
#include "streamfdr/report.hpp"
#include "streamfdr/simlab.hpp"
#include "streamfdr/snapshot.hpp"
#include "streamfdr/stream_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace streamfdr;

namespace {

struct ProcedureFlags {
    std::string procedure;
    double alpha = 0.05;
    std::string w0 = "auto";
    std::optional<double> lambda;
    std::optional<double> eta;
    std::string gamma = "auto";

    void attach(CLI::App& cmd) {
        cmd.add_option("--procedure", procedure, "uncorrected | alpha-spending | gai++ | lord | saffron | addis");
        cmd.add_option("--alpha", alpha, "Target level")->capture_default_str();
        cmd.add_option("--w0", w0, "Initial wealth, or 'auto'")->capture_default_str();
        cmd.add_option("--lambda", lambda, "Candidate threshold (saffron, addis)");
        cmd.add_option("--eta", eta, "Discarding threshold (addis)");
        cmd.add_option("--gamma", gamma, "lord-default | power:<s>[@M] | bounded:<M> | file:<path> | auto")
            ->capture_default_str();
    }

    ProcedureConfig config() const {
        if (procedure.empty()) throw Error(ErrorKind::parameter, "--procedure is required");
        ProcedureConfig c;
        c.name = procedure;
        c.alpha = alpha;
        if (w0 != "auto") {
            try {
                c.w0 = std::stod(w0);
            } catch (const std::exception&) {
                throw Error(ErrorKind::parameter, "cannot parse --w0 '" + w0 + "'");
            }
        }
        c.lambda = lambda;
        c.eta = eta;
        c.gamma = gamma;
        return c;
    }
};

std::vector<PValueRecord> read_input(const std::string& input, const CsvColumns& columns, std::uint64_t first) {
    const bool csv = fs::path(input).extension() == ".csv";
    if (input == "-") return read_stream(std::cin);
    if (csv) return ingest_csv(fs::path(input), columns, first);
    std::ifstream in(input);
    if (!in) throw Error(ErrorKind::io, "cannot open " + input);
    return read_stream(in);
}

void write_output(const std::string& out, const std::function<void(std::ostream&)>& render) {
    if (out.empty() || out == "-") {
        render(std::cout);
    } else {
        emit_to_file(out, render);
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorKind::parameter, "cannot parse list item '" + item + "'");
        }
    }
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online multiple testing with FDR control"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Assign levels and decisions to a p-value stream");
    ProcedureFlags run_flags;
    run_flags.attach(*run);
    std::string input = "-";
    std::string state_path;
    std::string out;
    std::string log_format = "ndjson";
    CsvColumns columns;
    run->add_option("--input", input, "NDJSON stream, CSV file (.csv) or '-' for stdin")->capture_default_str();
    run->add_option("--state", state_path, "Snapshot to resume from and update");
    run->add_option("--out", out, "Decision log path (default stdout)");
    run->add_option("--format", log_format, "ndjson | csv")->check(CLI::IsMember({"ndjson", "csv"}));
    run->add_option("--p-column", columns.p, "CSV p-value column")->capture_default_str();
    run->add_option("--label-column", columns.label, "CSV label column")->capture_default_str();
    run->add_option("--batch-column", columns.batch, "CSV batch column")->capture_default_str();

    // preview
    auto* preview = app.add_subcommand("preview", "Print the level the next hypothesis would receive");
    ProcedureFlags preview_flags;
    preview_flags.attach(*preview);
    std::string preview_state;
    preview->add_option("--state", preview_state, "Snapshot to inspect (otherwise a fresh engine)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiment on Gaussian-means streams");
    ExperimentGrid grid;
    std::string pi1_list;
    std::string roster_list;
    std::string sim_out;
    std::string trajectory_out;
    std::string config_path;
    std::string ordering;
    bool wide = false;
    simulate->add_option("--config", config_path, "JSON experiment document");
    simulate->add_option("--replicates", grid.base.replicates)->capture_default_str();
    simulate->add_option("--seed", grid.base.seed)->capture_default_str();
    simulate->add_option("--horizon", grid.base.horizon, "Stream length T")->capture_default_str();
    simulate->add_option("--alpha", grid.base.alpha)->capture_default_str();
    simulate->add_option("--pi1", pi1_list, "Comma-separated non-null proportions");
    simulate->add_option("--procedures", roster_list, "Comma-separated roster (bh allowed)");
    simulate->add_option("--null-mean", grid.base.null_means.mean)->capture_default_str();
    simulate->add_option("--null-sd", grid.base.null_means.sd)->capture_default_str();
    simulate->add_option("--alt-mean", grid.base.alt_means.mean)->capture_default_str();
    simulate->add_option("--alt-sd", grid.base.alt_means.sd)->capture_default_str();
    simulate->add_option("--epsilon", grid.epsilon, "FDX threshold")->capture_default_str();
    simulate->add_option("--threads", grid.threads, "Worker threads (0: all cores)");
    simulate->add_option("--ordering", ordering, "favourable | adversarial | shuffled");
    simulate->add_option("--out", sim_out, "Result CSV (default stdout)");
    simulate->add_option("--trajectory", trajectory_out, "Also write averaged alpha_t trajectories");
    simulate->add_flag("--wide", wide, "One row per (procedure, pi1)");

    // casestudy
    auto* casestudy = app.add_subcommand("casestudy", "Reproduce a bundled case study");
    std::string study;
    std::string manifest;
    std::string study_out;
    casestudy->add_option("name", study, "stampede")->required()->check(CLI::IsMember({"stampede"}));
    casestudy->add_option("--manifest", manifest, "Calibrated w0 manifest");
    casestudy->add_option("--out", study_out, "Summary path (default stdout)");

    // calibrate-w0
    auto* calibrate = app.add_subcommand("calibrate-w0", "Grid-search w0 against the reference STAMPEDE outcomes");
    double cal_alpha = 0.05;
    std::uint64_t cal_horizon = 20;
    std::string cal_out;
    calibrate->add_option("--alpha", cal_alpha)->capture_default_str();
    calibrate->add_option("--horizon", cal_horizon, "Bound M")->capture_default_str();
    calibrate->add_option("--out", cal_out, "Manifest path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            std::optional<StateLock> lock;
            std::optional<Engine> engine;
            if (!state_path.empty()) {
                lock.emplace(state_path);
                if (fs::exists(state_path)) {
                    engine.emplace(restore_snapshot(read_file(state_path)));
                    if (!run_flags.procedure.empty() && run_flags.procedure != engine->procedure().name()) {
                        throw Error(ErrorKind::integrity, "snapshot holds procedure '" + engine->procedure().name() +
                                                              "', not '" + run_flags.procedure + "'");
                    }
                }
            }
            if (!engine) engine.emplace(make_procedure(run_flags.config()));

            const auto records = read_input(input, columns, engine->t() + 1);
            const auto log = run_stream(*engine, records);
            write_output(out, [&](std::ostream& os) {
                if (log_format == "csv") {
                    write_decision_csv(os, log);
                } else {
                    write_log(os, log);
                }
            });
            if (!state_path.empty()) write_file_atomic(state_path, serialize_snapshot(*engine));
        } else if (*preview) {
            const double level = preview_state.empty() ? Engine(make_procedure(preview_flags.config())).preview()
                                                       : next_level_preview(read_file(preview_state));
            std::cout << format_real(level) << '\n';
        } else if (*simulate) {
            if (!config_path.empty()) {
                const auto doc = nlohmann::json::parse(read_file(config_path));
                auto& b = grid.base;
                b.horizon = doc.value("horizon", b.horizon);
                b.replicates = doc.value("replicates", b.replicates);
                b.seed = doc.value("seed", b.seed);
                b.alpha = doc.value("alpha", b.alpha);
                if (doc.contains("null_means")) b.null_means = {doc["null_means"].at("mean"), doc["null_means"].at("sd")};
                if (doc.contains("alt_means")) b.alt_means = {doc["alt_means"].at("mean"), doc["alt_means"].at("sd")};
                if (doc.contains("pi1")) grid.pi1_values = doc["pi1"].get<std::vector<double>>();
                grid.epsilon = doc.value("epsilon", grid.epsilon);
                if (doc.contains("ordering")) ordering = doc["ordering"].get<std::string>();
                if (doc.contains("procedures")) {
                    for (const auto& p : doc["procedures"]) {
                        ProcedureConfig c;
                        c.name = p.at("name");
                        c.alpha = p.value("alpha", b.alpha);
                        if (p.contains("w0")) c.w0 = p["w0"].get<double>();
                        if (p.contains("lambda")) c.lambda = p["lambda"].get<double>();
                        if (p.contains("eta")) c.eta = p["eta"].get<double>();
                        c.gamma = p.value("gamma", std::string("auto"));
                        grid.roster.push_back(c);
                    }
                }
            }
            if (!pi1_list.empty()) grid.pi1_values = parse_list(pi1_list);
            if (!ordering.empty()) grid.ordering = parse_ordering(ordering);
            if (!roster_list.empty()) {
                grid.roster.clear();
                std::stringstream ss(roster_list);
                std::string name;
                while (std::getline(ss, name, ',')) {
                    ProcedureConfig c;
                    c.name = name;
                    c.alpha = grid.base.alpha;
                    grid.roster.push_back(c);
                }
            }
            if (grid.roster.empty()) grid.roster = default_roster(grid.base.alpha);
            grid.trajectories = !trajectory_out.empty();

            const auto cells = run_experiment(grid);
            write_output(sim_out, [&](std::ostream& os) {
                if (wide) {
                    write_metrics_csv(os, cells);
                } else {
                    write_experiment_csv(os, cells);
                }
            });
            if (!trajectory_out.empty()) {
                emit_to_file(trajectory_out, [&](std::ostream& os) { write_trajectory_csv(os, cells); });
            }
        } else if (*casestudy) {
            const StampedeSettings settings = manifest.empty() ? StampedeSettings{} : load_manifest(manifest);
            const auto rows = run_stampede(settings);
            write_output(study_out, [&](std::ostream& os) { write_summary_text(os, rows); });
        } else if (*calibrate) {
            const auto entries = calibrate_w0(cal_alpha, cal_horizon);
            const auto text = calibration_manifest(entries, cal_alpha, cal_horizon);
            write_output(cal_out, [&](std::ostream& os) { os << text; });
            for (const auto& e : entries) {
                std::cerr << e.procedure << ": w0=" << format_real(e.best_w0) << " alpha_8=" << four_dp(e.best_level)
                          << " (reference " << four_dp(e.reference_level) << ")"
                          << (e.matched_w0 ? "" : " NO EXACT MATCH") << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
