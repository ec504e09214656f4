// Command-line front end: generate workload instances, run experiments,
// aggregate results and benchmark scheduler responsiveness.

#include "qmp/serialize.hpp"
#include "qmp/sim.hpp"
#include "qmp/workload.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunOptions {
    std::string chip = "20x20";
    int code_distance = 31;
    double code_cycle_us = 1.0;
    int batch = 5;
    bool defrag = true;
    qmp::Step defrag_interval = 20000;
    long long ilp_time_limit_ms = 2000;
    bool ilp_rotation = true;
    std::string external_solver;
    std::string latency = "measured";
    qmp::Step relocation_cost_steps = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& opts) {
    cmd->add_option("--chip", opts.chip, "Chip size WxH (default 20x20)");
    cmd->add_option("--code-distance", opts.code_distance, "Code distance d");
    cmd->add_option("--code-cycle-us", opts.code_cycle_us, "Code cycle in microseconds");
    cmd->add_option("--batch", opts.batch, "Batch size B");
    cmd->add_flag("--defrag,!--no-defrag", opts.defrag,
                  "Run interval-triggered defragmentation (default on)");
    cmd->add_option("--defrag-interval", opts.defrag_interval,
                    "Defragmentation interval in logical steps");
    cmd->add_option("--ilp-time-limit-ms", opts.ilp_time_limit_ms,
                    "Search budget per ILP scheduling cycle");
    cmd->add_flag("--ilp-rotation,!--no-ilp-rotation", opts.ilp_rotation,
                  "Let the ILP search choose job orientations");
    cmd->add_option("--external-solver", opts.external_solver,
                    "Command template solving the exported model; "
                    "{lp} and {sol} are replaced with file paths");
    cmd->add_option("--latency", opts.latency,
                    "measured, or synthetic:BASE[,PER_JOB[,PER_RESERVED]] in us");
    cmd->add_option("--relocation-cost-steps", opts.relocation_cost_steps,
                    "Idle steps charged per defragmentation plane");
}

qmp::ProcessorConfig parse_processor(const RunOptions& opts) {
    qmp::ProcessorConfig proc;
    const auto x = opts.chip.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("--chip expects WxH");
    proc.width = std::stoll(opts.chip.substr(0, x));
    proc.height = std::stoll(opts.chip.substr(x + 1));
    if (proc.width < 1 || proc.height < 1) {
        throw CLI::ValidationError("--chip dimensions must be positive");
    }
    proc.code_distance = opts.code_distance;
    proc.code_cycle_us = opts.code_cycle_us;
    return proc;
}

qmp::LatencyModel parse_latency(const std::string& spec) {
    if (spec == "measured") return qmp::LatencyModel::measured();
    const std::string prefix = "synthetic:";
    if (spec.rfind(prefix, 0) != 0) {
        throw CLI::ValidationError("--latency expects measured or synthetic:...");
    }
    double coeff[3] = {0.0, 0.0, 0.0};
    std::stringstream in(spec.substr(prefix.size()));
    std::string field;
    for (int i = 0; i < 3 && std::getline(in, field, ','); ++i) {
        coeff[i] = std::stod(field);
    }
    return qmp::LatencyModel::synthetic(coeff[0], coeff[1], coeff[2]);
}

qmp::SimConfig make_config(const RunOptions& opts, qmp::SchedulerKind kind,
                           std::uint64_t seed) {
    qmp::SimConfig config;
    config.processor = parse_processor(opts);
    config.batch_size = opts.batch;
    config.defrag_enabled = opts.defrag;
    config.defrag_interval = opts.defrag_interval;
    config.scheduler = kind;
    config.latency = parse_latency(opts.latency);
    config.ilp.time_limit = std::chrono::milliseconds(opts.ilp_time_limit_ms);
    config.ilp.allow_rotation = opts.ilp_rotation;
    config.ilp.external_solver = opts.external_solver;
    config.relocation_cost_steps = opts.relocation_cost_steps;
    config.seed = seed;
    return config;
}

qmp::SchedulerKind parse_scheduler(const std::string& name) {
    if (name == "cg") return qmp::SchedulerKind::CornerGreedy;
    if (name == "ilp") return qmp::SchedulerKind::Ilp;
    throw CLI::ValidationError("scheduler must be cg or ilp");
}

int cmd_generate(const std::string& cls, int jobs, int instances,
                 std::uint64_t seed, const std::string& out_dir) {
    const qmp::WorkloadClass c = qmp::workload_class_from(cls);
    fs::create_directories(out_dir);
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t instance_seed = qmp::derive_seed(seed, i);
        qmp::Rng rng(instance_seed);
        qmp::WorkloadFile file;
        file.seed = instance_seed;
        file.job_class = qmp::to_string(c);
        file.requests = qmp::gen_class(c, jobs, rng);

        std::ostringstream name;
        name << "workload_" << file.job_class << "_" << std::setw(3)
             << std::setfill('0') << i << ".json";
        std::ofstream out(fs::path(out_dir) / name.str());
        out << qmp::workload_to_json(file).dump(2) << "\n";
    }
    std::cerr << "wrote " << instances << " instance(s) to " << out_dir << "\n";
    return 0;
}

int cmd_run(const std::string& workload_path, const std::string& scheduler,
            const RunOptions& opts, bool header, const std::string& metrics_out,
            const std::string& ledger_out, const std::string& defrag_log) {
    std::ifstream in(workload_path);
    if (!in) {
        std::cerr << "cannot open workload " << workload_path << "\n";
        return 1;
    }
    qmp::WorkloadFile workload = qmp::workload_from_json(json::parse(in));

    const qmp::SchedulerKind kind = parse_scheduler(scheduler);
    const qmp::SimConfig config = make_config(opts, kind, workload.seed);

    qmp::SimResult result;
    try {
        result = qmp::run(config, workload.requests);
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }

    if (header) std::cout << qmp::csv_header() << "\n";
    std::cout << qmp::csv_row(result.metrics, workload.job_class, workload.seed,
                              scheduler, opts.defrag, workload.requests.size())
              << "\n";

    if (!metrics_out.empty()) {
        std::ofstream out(metrics_out);
        out << qmp::metrics_to_json(result.metrics, workload.job_class, workload.seed,
                                    scheduler, opts.defrag, workload.requests.size())
                   .dump(2)
            << "\n";
    }
    if (!ledger_out.empty()) {
        std::ofstream out(ledger_out);
        out << qmp::ledger_to_json(result.state).dump(2) << "\n";
    }
    if (!defrag_log.empty()) {
        std::ofstream out(defrag_log);
        for (const qmp::DefragEvent& event : result.defrag_events) {
            out << qmp::defrag_event_to_json(event).dump() << "\n";
        }
    }
    return 0;
}

struct CsvRecord {
    std::string job_class;
    std::uint64_t seed = 0;
    std::string scheduler;
    bool defrag = false;
    double speedup = 0.0;
};

std::vector<CsvRecord> read_csv_files(const std::vector<std::string>& paths) {
    std::vector<CsvRecord> records;
    for (const std::string& path : paths) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line.rfind("class,", 0) == 0) continue;
            std::vector<std::string> fields;
            std::stringstream row(line);
            std::string field;
            while (std::getline(row, field, ',')) fields.push_back(field);
            if (fields.size() < 8) continue;
            records.push_back({fields[0], std::stoull(fields[1]), fields[2],
                               fields[3] == "1", std::stod(fields[7])});
        }
    }
    return records;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& csv_out) {
    std::vector<CsvRecord> records;
    try {
        records = read_csv_files(paths);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    if (records.empty()) {
        std::cerr << "no runs found\n";
        return 1;
    }

    // config key = scheduler name, "+d" when defragmented
    auto config_key = [](const CsvRecord& r) {
        return r.scheduler + (r.defrag ? "+d" : "");
    };
    std::map<std::string, std::map<std::string, std::vector<double>>> by_config;
    for (const CsvRecord& r : records) {
        by_config[config_key(r)][r.job_class].push_back(r.speedup);
    }

    auto mean = [](const std::vector<double>& xs) {
        double sum = 0.0;
        for (double x : xs) sum += x;
        return sum / static_cast<double>(xs.size());
    };

    std::ostringstream text;
    std::ostringstream csv;
    csv << "config,class,mean_speedup\n";
    text << "Per-class mean speedup\n";
    for (const auto& [config, classes] : by_config) {
        text << "  " << std::left << std::setw(8) << config;
        double log_sum = 0.0;
        for (const auto& [cls, speedups] : classes) {
            const double m = mean(speedups);
            text << " " << cls << "=" << std::fixed << std::setprecision(3) << m;
            csv << config << ',' << cls << ',' << m << "\n";
            log_sum += std::log(m);
        }
        const double geo = std::exp(log_sum / static_cast<double>(classes.size()));
        text << "  | geometric mean " << std::setprecision(3) << geo << "\n";
        csv << config << ",all," << geo << "\n";
    }

    // Defragmentation improvement, pairing runs by (class, seed, scheduler).
    std::map<std::string, std::map<std::string, std::vector<double>>> improvements;
    std::map<std::string, const CsvRecord*> with, without;
    for (const CsvRecord& r : records) {
        const std::string key =
            r.job_class + "/" + std::to_string(r.seed) + "/" + r.scheduler;
        (r.defrag ? with : without)[key] = &r;
    }
    int skipped = 0;
    for (const auto& [key, record] : with) {
        auto other = without.find(key);
        if (other == without.end()) {
            ++skipped;
            continue;
        }
        const double base = other->second->speedup;
        if (base <= 0) {
            ++skipped;
            continue;
        }
        improvements[record->scheduler][record->job_class].push_back(
            (record->speedup - base) / base * 100.0);
    }
    if (skipped > 0) {
        std::cerr << "warning: " << skipped << " run(s) without a defrag pair\n";
    }
    if (!improvements.empty()) {
        text << "Defrag improvement %, paired by (class, seed)\n";
        for (const auto& [scheduler, classes] : improvements) {
            text << "  " << std::left << std::setw(8) << scheduler;
            for (const auto& [cls, values] : classes) {
                const double m = mean(values);
                text << " " << cls << "=" << std::showpos << std::fixed
                     << std::setprecision(2) << m << std::noshowpos;
                csv << scheduler << "-improve," << cls << ',' << m << "\n";
            }
            text << "\n";
        }
    }

    std::cout << text.str();
    if (!csv_out.empty()) {
        std::ofstream out(csv_out);
        out << csv.str();
    }
    return 0;
}

int cmd_bench(const std::string& cls, int jobs, const std::vector<int>& batch_sizes,
              const std::vector<std::string>& schedulers, const RunOptions& base_opts,
              std::uint64_t seed) {
    const qmp::WorkloadClass c = qmp::workload_class_from(cls);
    std::cout << std::left << std::setw(6) << "type" << std::setw(5) << "B"
              << std::right << std::setw(14) << "mean_us" << std::setw(12) << "min_us"
              << std::setw(14) << "max_us" << std::setw(14) << "stddev_us" << "\n";
    for (const std::string& scheduler : schedulers) {
        for (int b : batch_sizes) {
            qmp::Rng rng(qmp::derive_seed(seed, static_cast<std::uint64_t>(b)));
            std::vector<qmp::JobRequest> requests = qmp::gen_class(c, jobs, rng);

            RunOptions opts = base_opts;
            opts.batch = b;
            opts.latency = "measured";
            const qmp::SimConfig config =
                make_config(opts, parse_scheduler(scheduler), seed);
            const qmp::SimResult result = qmp::run(config, std::move(requests));

            std::cout << std::left << std::setw(6) << scheduler << std::setw(5) << b
                      << std::right << std::fixed << std::setprecision(0)
                      << std::setw(14) << result.metrics.sched_mean_us
                      << std::setw(12) << result.metrics.sched_min_us
                      << std::setw(14) << result.metrics.sched_max_us
                      << std::setw(14) << result.metrics.sched_stddev_us << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online job scheduling experiments for lattice-surgery "
                 "multiprogramming"};
    app.require_subcommand(1);

    // generate
    std::string gen_class_name = "G";
    int gen_jobs = 300;
    int gen_instances = 50;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "workloads";
    CLI::App* generate = app.add_subcommand("generate", "Write workload instances");
    generate->add_option("--class", gen_class_name, "Workload class A..I")->required();
    generate->add_option("--jobs", gen_jobs, "Requests per instance");
    generate->add_option("--instances", gen_instances, "Number of instances");
    generate->add_option("--seed", gen_seed, "Master seed");
    generate->add_option("--out", gen_out, "Output directory");

    // run
    std::string run_workload;
    std::string run_scheduler = "cg";
    RunOptions run_opts;
    bool run_header = true;
    std::string run_metrics_out, run_ledger_out, run_defrag_log;
    CLI::App* run = app.add_subcommand("run", "Simulate one workload file");
    run->add_option("--workload", run_workload, "Workload JSON file")->required();
    run->add_option("--scheduler", run_scheduler, "cg or ilp");
    add_run_options(run, run_opts);
    run->add_flag("--header,!--no-header", run_header, "Print the CSV header");
    run->add_option("--metrics-out", run_metrics_out, "Metrics JSON path");
    run->add_option("--ledger-out", run_ledger_out, "Schedule ledger JSON path");
    run->add_option("--defrag-log", run_defrag_log, "Defrag event JSON-lines path");

    // report
    std::vector<std::string> report_files;
    std::string report_csv_out;
    CLI::App* report = app.add_subcommand("report", "Aggregate run CSVs");
    report->add_option("files", report_files, "CSV files from `run`")->required();
    report->add_option("--csv-out", report_csv_out, "Aggregate CSV path");

    // bench
    std::string bench_class = "G";
    int bench_jobs = 300;
    std::vector<int> bench_batches = {5, 10, 15, 20};
    std::vector<std::string> bench_schedulers = {"cg"};
    std::uint64_t bench_seed = 1;
    RunOptions bench_opts;
    CLI::App* bench = app.add_subcommand("bench", "Measure per-cycle scheduling time");
    bench->add_option("--class", bench_class, "Workload class A..I");
    bench->add_option("--jobs", bench_jobs, "Requests per run");
    bench->add_option("--batch-sizes", bench_batches, "Batch sizes to sweep");
    bench->add_option("--schedulers", bench_schedulers, "Schedulers to sweep");
    bench->add_option("--seed", bench_seed, "Master seed");
    add_run_options(bench, bench_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            return cmd_generate(gen_class_name, gen_jobs, gen_instances, gen_seed,
                                gen_out);
        }
        if (run->parsed()) {
            return cmd_run(run_workload, run_scheduler, run_opts, run_header,
                           run_metrics_out, run_ledger_out, run_defrag_log);
        }
        if (report->parsed()) {
            return cmd_report(report_files, report_csv_out);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_class, bench_jobs, bench_batches, bench_schedulers,
                             bench_opts, bench_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
