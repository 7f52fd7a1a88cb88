// succord: the dispatch service.
//
//   succord [--config FILE] [--port N] [--store memory|file:PATH] ...
//
// Exit codes: 0 clean shutdown, 2 bad configuration, 3 storage failure,
// 4 bind failure.

#include "succor/error.hpp"
#include "succor/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <pthread.h>
#include <thread>

int main(int argc, char** argv) {
    CLI::App app{"Emergency help-request dispatch service"};
    std::string config_path;
    std::optional<int> port;
    std::optional<std::string> host, store, fixtures, hospital_msisdn, hospital_name, transport;
    std::optional<double> radius;
    std::optional<int> poll_timeout;

    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--port", port, "listen port (0 = any free port)");
    app.add_option("--host", host, "listen address");
    app.add_option("--store", store, "storage backend: memory | file:<journal path>");
    app.add_option("--fixtures", fixtures, "directory of table CSVs loaded at startup");
    app.add_option("--hospital-msisdn", hospital_msisdn, "emergency hospital SMS number");
    app.add_option("--hospital-name", hospital_name, "emergency hospital name");
    app.add_option("--sms-transport", transport, "recording | file:<path> | http://host:port/path");
    app.add_option("--radius-km", radius, "earth radius in km");
    app.add_option("--poll-timeout", poll_timeout, "assignment long-poll timeout in seconds");
    CLI11_PARSE(app, argc, argv);

    succor::ServiceConfig cfg;
    try {
        if (!config_path.empty())
            cfg = succor::load_config_file(config_path);
        if (port) cfg.port = *port;
        if (host) cfg.host = *host;
        if (store) cfg.store = *store;
        if (fixtures) cfg.fixtures_dir = *fixtures;
        if (hospital_msisdn) cfg.hospital.msisdn = *hospital_msisdn;
        if (hospital_name) cfg.hospital.name = *hospital_name;
        if (transport) cfg.sms_transport = *transport;
        if (radius) cfg.radius_km = *radius;
        if (poll_timeout) cfg.poll_timeout_s = *poll_timeout;
        cfg.validate();
    } catch (const succor::Error& e) {
        std::cerr << "succord: " << e.what() << "\n";
        return 2;
    }

    // Block termination signals everywhere; one thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        succor::Service service(cfg);
        const int bound = service.bind();
        std::cout << "succord listening on " << cfg.host << ":" << bound << std::endl;

        std::thread waiter([&] {
            int sig = 0;
            sigwait(&signals, &sig);
            service.stop();
        });
        service.run();
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        std::cout << "succord stopped" << std::endl;
    } catch (const succor::Error& e) {
        std::cerr << "succord: " << succor::to_string(e.code()) << ": " << e.what() << "\n";
        switch (e.code()) {
        case succor::ErrorCode::StorageFailure: return 3;
        case succor::ErrorCode::BindFailure: return 4;
        default: return 2;
        }
    }
    return 0;
}
