#include "succor/service.hpp"

#include "succor/error.hpp"
#include "succor/wire.hpp"

#include <httplib.h>

namespace succor {

namespace {

using wire::json;

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

// Runs a handler and maps library errors onto HTTP statuses.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            reply(res, wire::http_status(e.code()), wire::error_body(e));
        } catch (const json::exception& e) {
            reply(res, 400, {{"error", "VALIDATION"}, {"message", e.what()}});
        } catch (const std::exception& e) {
            reply(res, 500, {{"error", "INTERNAL"}, {"message", e.what()}});
        }
    };
}

std::optional<Timestamp> optional_time(const json& body, const char* field) {
    if (!body.contains(field) || body.at(field).is_null())
        return std::nullopt;
    return Timestamp::parse(wire::required_string(body, field));
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {
    config_.validate();
    registry_ = std::make_unique<Registry>(open_backend(config_.store));
    if (config_.fixtures_dir)
        load_fixture_dir(*registry_, *config_.fixtures_dir);

    transport_ = make_transport(config_.sms_transport);
    recording_ = std::dynamic_pointer_cast<RecordingTransport>(transport_);
    notifier_ = std::make_unique<Notifier>(transport_, config_.hospital);
    geocoder_ = std::make_shared<NullGeocoder>();

    dispatcher_ = std::make_unique<Dispatcher>(*registry_, geo::EarthRadius(config_.radius_km));
    dispatcher_->add_listener(
        [this](const Assignment& a, const HelpRequest& r) { on_assignment(a, r); });
    dispatcher_->resync();

    server_ = std::make_unique<httplib::Server>();
    const auto threads = std::size_t(config_.http_threads);
    server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    server_->set_read_timeout(config_.reply_timeout_s, 0);
    server_->set_write_timeout(config_.reply_timeout_s, 0);
    server_->set_keep_alive_max_count(1000);
    // httplib's default also sets SO_REUSEPORT, which would let a second
    // instance share the port instead of failing to bind.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
}

Service::~Service() {
    stop();
}

int Service::bind() {
    if (config_.port == 0) {
        port_ = server_->bind_to_any_port(config_.host);
    } else {
        port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
    }
    if (port_ <= 0)
        fail(ErrorCode::BindFailure,
             "cannot bind " + config_.host + ":" + std::to_string(config_.port));
    return port_;
}

void Service::run() {
    if (port_ <= 0)
        bind();
    server_->listen_after_bind();
}

void Service::start() {
    if (port_ <= 0)
        bind();
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void Service::stop() {
    channel_.shutdown();
    if (server_)
        server_->stop();
    if (thread_.joinable())
        thread_.join();
    fanout_pool_.wait_idle();
}

void Service::set_geocoder(std::shared_ptr<GeocodeProvider> provider) {
    std::lock_guard lock(geocoder_mutex_);
    geocoder_ = provider ? std::move(provider) : std::make_shared<NullGeocoder>();
}

NotificationStats Service::notification_stats() const {
    return {fan_outs_.load(), sms_sent_.load(), sms_failed_.load()};
}

void Service::on_assignment(const Assignment& a, const HelpRequest& req) {
    const auto patient = registry_->find_patient(req.patient_id);
    AssignmentNotice notice;
    notice.key = a.key;
    notice.esc_id = a.esc_id;
    notice.location = req.location;
    notice.distance_km = a.distance.value;
    notice.assigned_at = a.assigned_at;
    if (patient) {
        notice.patient_name = patient->first_name + " " + patient->last_name;
        notice.disease_name = patient->disease_name;
    }
    channel_.publish(std::move(notice));

    if (!patient)
        return;
    std::shared_ptr<GeocodeProvider> geocoder;
    {
        std::lock_guard lock(geocoder_mutex_);
        geocoder = geocoder_;
    }
    const auto timeout = std::chrono::milliseconds(config_.geocode_timeout_ms);
    fanout_pool_.post([this, p = *patient, loc = req.location.point, geocoder, timeout] {
        const auto address = reverse_geocode(geocoder, loc, timeout);
        const auto messages = notifier_->fan_out(p, loc, address);
        ++fan_outs_;
        for (const auto& m : messages)
            ++(m.delivery_status == DeliveryStatus::Sent ? sms_sent_ : sms_failed_);
    });
}

void Service::routes() {
    auto& s = *server_;

    s.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, {{"status", "ok"}});
    });

    // --- patients ---
    s.Post("/patients", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto rec = wire::patient_from_json(wire::parse_body(req.body));
        registry_->register_patient(rec);
        reply(res, 201, wire::to_json(registry_->get_patient(rec.id)));
    }));
    s.Get(R"(/patients/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, wire::to_json(registry_->get_patient(req.matches[1].str())));
    }));
    s.Put(R"(/patients/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto update = wire::patient_update_from_json(wire::parse_body(req.body));
        reply(res, 200, wire::to_json(registry_->update_patient(req.matches[1].str(), update)));
    }));

    // --- help requests ---
    s.Post("/help", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto body = wire::parse_body(req.body);
        const auto id = body.contains("patient_id") ? wire::required_string(body, "patient_id")
                                                    : wire::required_string(body, "id");
        const geo::GeoPoint loc{wire::coordinate(body, "latitude"),
                                wire::coordinate(body, "longitude")};
        const auto request_time = Timestamp::parse(wire::required_string(body, "request_time"));
        reply(res, 200, wire::to_json(dispatcher_->submit_help(id, loc, request_time)));
    }));
    s.Get("/requests", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto filter = parse_status_filter(req.get_param_value("status"));
        json out = json::array();
        for (const auto& v : dispatcher_->list_requests(filter))
            out.push_back(wire::to_json(v));
        reply(res, 200, out);
    }));
    s.Post(R"(/requests/([^/]+)/ack)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto key = RequestKey::parse(req.matches[1].str());
        const auto body = wire::parse_body(req.body);
        const auto state = dispatcher_->esc_ack(key, wire::required_string(body, "esc_id"),
                                                optional_time(body, "received_time2"));
        reply(res, 200, {{"key", key.str()}, {"state", to_string(state)}, {"color", color_of(state)}});
    }));
    s.Post(R"(/requests/([^/]+)/complete)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto key = RequestKey::parse(req.matches[1].str());
        const auto body = wire::parse_body(req.body);
        const auto handled = dispatcher_->esc_complete(key, wire::required_string(body, "esc_id"),
                                                       optional_time(body, "reply_time"));
        reply(res, 200, wire::to_json(handled));
    }));

    // --- ESC fleet ---
    s.Get("/escs", guarded([this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto& e : registry_->list_escs())
            out.push_back(wire::to_json(e));
        reply(res, 200, out);
    }));
    s.Post("/escs", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto rec = wire::esc_from_json(wire::parse_body(req.body));
        const bool created = dispatcher_->upsert_esc(rec);
        reply(res, created ? 201 : 200, wire::to_json(*registry_->find_esc(rec.id)));
    }));
    s.Put(R"(/escs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1].str();
        const auto rec = wire::esc_from_json(wire::parse_body(req.body), &id);
        const bool created = dispatcher_->upsert_esc(rec);
        reply(res, created ? 201 : 200, wire::to_json(*registry_->find_esc(id)));
    }));
    s.Get(R"(/escs/([^/]+)/assignments)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1].str();
        if (!registry_->find_esc(id))
            fail(ErrorCode::UnknownEsc, "unknown ESC: " + id);
        double timeout_s = config_.poll_timeout_s;
        if (req.has_param("timeout")) {
            timeout_s = wire::coordinate(json{{"timeout", req.get_param_value("timeout")}}, "timeout");
            if (timeout_s < 0)
                fail(ErrorCode::Validation, "timeout must be non-negative");
            timeout_s = std::min<double>(timeout_s, config_.poll_timeout_s);
        }
        const auto notices =
            channel_.poll(id, std::chrono::milliseconds(std::int64_t(timeout_s * 1000)));
        json out = json::array();
        for (const auto& n : notices)
            out.push_back(wire::to_json(n));
        reply(res, 200, {{"esc_id", id}, {"assignments", out}});
    }));

    // --- observability ---
    s.Get("/log", guarded([this](const httplib::Request& req, httplib::Response& res) {
        std::uint64_t since = 0;
        if (req.has_param("since"))
            since = std::stoull(req.get_param_value("since"));
        json out = json::array();
        for (const auto& e : dispatcher_->events(since))
            out.push_back(wire::to_json(e));
        reply(res, 200, out);
    }));
    s.Get("/stats", guarded([this](const httplib::Request&, httplib::Response& res) {
        auto j = wire::to_json(dispatcher_->stats());
        const auto n = notification_stats();
        j["sms"] = {{"fan_outs", n.fan_outs}, {"sent", n.sent}, {"failed", n.failed}};
        reply(res, 200, j);
    }));
    s.Get(R"(/tables/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        res.set_content(registry_->export_table(req.matches[1].str()), "text/csv");
    }));
}

}  // namespace succor
