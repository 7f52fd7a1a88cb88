// loadgen: fixture generator and load/reconciliation harness.
//
//   loadgen gen --seed 42 --patients 100 --escs 10 --bbox 36.83,42.94,36.89,43.03 --out DIR
//   loadgen run --target 127.0.0.1:8080 --rate 1 --duration 60 --seed 42 --report report.json

#include "succor/error.hpp"
#include "succor/loadgen.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace lg = succor::loadgen;

int main(int argc, char** argv) {
    CLI::App app{"Dispatch service load generator"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "write a deterministic patient/ESC world as table CSVs");
    std::uint64_t gen_seed = 42;
    std::size_t gen_patients = 100, gen_escs = 10;
    std::string gen_bbox, gen_out = "world";
    gen->add_option("--seed", gen_seed);
    gen->add_option("--patients", gen_patients);
    gen->add_option("--escs", gen_escs);
    gen->add_option("--bbox", gen_bbox, "min_lat,min_lon,max_lat,max_lon");
    gen->add_option("--out", gen_out, "output directory");

    auto* run = app.add_subcommand("run", "drive a running service and reconcile its assignment log");
    lg::RunOptions opt;
    std::string target = "127.0.0.1:8080", report_path, run_bbox;
    int ack_ms = 100, complete_ms = 500;
    bool no_setup = false;
    run->add_option("--target", target, "host:port of the service");
    run->add_option("--rate", opt.rate_per_s, "requests per second");
    run->add_option("--duration", opt.duration_s, "seconds");
    run->add_option("--seed", opt.seed);
    run->add_option("--report", report_path, "write the JSON report here");
    run->add_option("--escs", opt.n_escs, "ESCs registered during setup");
    run->add_option("--patients", opt.n_patients, "patients registered during setup (min: one per request)");
    run->add_option("--bbox", run_bbox, "min_lat,min_lon,max_lat,max_lon");
    run->add_option("--ack-ms", ack_ms, "simulated ESC acknowledgment delay");
    run->add_option("--complete-ms", complete_ms, "simulated ESC completion delay");
    run->add_option("--clients", opt.clients, "concurrent virtual clients");
    run->add_option("--ceiling", opt.ceiling_requests, "closed-loop burst size for the ceiling estimate");
    run->add_option("--radius-km", opt.radius_km);
    run->add_flag("--no-setup", no_setup, "assume patients and ESCs are already loaded");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto box = gen_bbox.empty() ? lg::default_box() : lg::BoundingBox::parse(gen_bbox);
            lg::write_world(lg::generate_world(gen_seed, gen_patients, gen_escs, box), gen_out);
            std::cout << "wrote " << gen_out << "/Registration.csv and " << gen_out << "/ESC.csv\n";
            return 0;
        }

        const auto colon = target.rfind(':');
        if (colon == std::string::npos)
            throw succor::Error(succor::ErrorCode::Validation, "--target must be host:port");
        opt.host = target.substr(0, colon);
        opt.port = std::stoi(target.substr(colon + 1));
        if (!run_bbox.empty())
            opt.box = lg::BoundingBox::parse(run_bbox);
        opt.ack_delay = std::chrono::milliseconds(ack_ms);
        opt.complete_delay = std::chrono::milliseconds(complete_ms);
        opt.setup_world = !no_setup;

        const auto report = lg::run_load(opt);
        std::cout << report.summary();
        if (!report_path.empty()) {
            std::ofstream out(report_path);
            out << report.to_json().dump(2) << "\n";
        }
        const bool ok = report.failed == 0 && report.oracle_mismatches == 0 &&
                        (report.submitted == 0 || report.conservation_holds);
        return ok ? 0 : 1;
    } catch (const succor::Error& e) {
        std::cerr << "loadgen: " << succor::to_string(e.code()) << ": " << e.what() << "\n";
        return 2;
    }
}
