#include "succor/loadgen.hpp"

#include "succor/error.hpp"
#include "succor/registry.hpp"
#include "succor/wire.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace succor::loadgen {

using nlohmann::json;

namespace {

const char* const kFirstNames[] = {"Rose", "Amer",  "Yousif", "Helin", "Ban",  "Karwan",
                                   "Suha", "Qasem", "Didar",  "Asad",  "Ari",  "Ashwaq"};
const char* const kLastNames[] = {"Maher", "Hndi", "Samr",  "Sackop", "Asmat", "Haso",
                                  "Raml",  "Haji", "Fahd",  "Sabri",  "Ahmed", "Roni"};
const char* const kDiseases[] = {"Asthma", "Congenital Heart", "Diabetes Mellitus"};

// Uniform micro-degree in [lo, hi], so the 6-decimal text stays inside the box.
double micro_uniform(std::mt19937_64& rng, double lo, double hi) {
    const auto a = static_cast<long long>(std::ceil(lo * 1e6));
    const auto b = static_cast<long long>(std::floor(hi * 1e6));
    std::uniform_int_distribution<long long> dist(a, b);
    return double(dist(rng)) / 1e6;
}

std::string phone(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> digit(0, 9);
    std::string s = "0750";
    for (int i = 0; i < 7; ++i)
        s.push_back(char('0' + digit(rng)));
    return s;
}

// Brute-force great circle, asin form; kept separate from the service's
// atan2 kernel so the replay check does not share its code path.
double oracle_km(const geo::GeoPoint& a, const geo::GeoPoint& b, double radius_km) {
    constexpr double k = std::numbers::pi / 180.0;
    const double s1 = std::sin((b.lat_deg - a.lat_deg) * k / 2);
    const double s2 = std::sin((b.lon_deg - a.lon_deg) * k / 2);
    const double h = s1 * s1 + std::cos(a.lat_deg * k) * std::cos(b.lat_deg * k) * s2 * s2;
    return 2 * radius_km * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

struct Endpoint {
    std::string host;
    int port;

    httplib::Client client(int read_timeout_s = 10) const {
        httplib::Client c(host, port);
        c.set_connection_timeout(3);
        c.set_read_timeout(read_timeout_s);
        c.set_write_timeout(10);
        c.set_keep_alive(true);
        return c;
    }
};

json get_json(httplib::Client& c, const std::string& path) {
    auto res = c.Get(path);
    if (!res || res->status != 200)
        fail(ErrorCode::TargetUnreachable, "GET " + path + " failed");
    return json::parse(res->body);
}

class Stopwatch {
public:
    using Clock = std::chrono::steady_clock;
    Stopwatch() : start_(Clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - start_).count();
    }
    Clock::time_point start() const { return start_; }

private:
    Clock::time_point start_;
};

// Long-polls one ESC's assignment channel and plays the terminal: ack after
// ack_delay, complete after complete_delay.
void simulate_esc(const Endpoint& ep, const std::string& esc_id, const RunOptions& opt,
                  const std::atomic<bool>& stop) {
    auto c = ep.client(15);
    const std::string poll = "/escs/" + esc_id + "/assignments?timeout=1";
    while (!stop.load()) {
        auto res = c.Get(poll);
        if (!res || res->status != 200) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            continue;
        }
        const auto body = json::parse(res->body, nullptr, false);
        if (body.is_discarded())
            continue;
        for (const auto& n : body.value("assignments", json::array())) {
            const auto key = n.at("key").get<std::string>();
            const json who{{"esc_id", esc_id}};
            std::this_thread::sleep_for(opt.ack_delay);
            c.Post("/requests/" + key + "/ack", who.dump(), "application/json");
            std::this_thread::sleep_for(opt.complete_delay);
            c.Post("/requests/" + key + "/complete", who.dump(), "application/json");
        }
    }
}

template <typename F>
void run_parallel(std::size_t threads, F&& body) {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&body, t] { body(t); });
}

}  // namespace

bool BoundingBox::contains(const geo::GeoPoint& p) const {
    return p.lat_deg >= min_lat && p.lat_deg <= max_lat && p.lon_deg >= min_lon &&
           p.lon_deg <= max_lon;
}

void BoundingBox::validate() const {
    const bool ok = geo::GeoPoint{min_lat, min_lon}.valid() && geo::GeoPoint{max_lat, max_lon}.valid() &&
                    min_lat <= max_lat && min_lon <= max_lon &&
                    std::ceil(min_lat * 1e6) <= std::floor(max_lat * 1e6) &&
                    std::ceil(min_lon * 1e6) <= std::floor(max_lon * 1e6);
    if (!ok)
        fail(ErrorCode::Validation, "invalid bounding box");
}

BoundingBox BoundingBox::parse(const std::string& text) {
    BoundingBox b;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream in(text);
    in >> b.min_lat >> c1 >> b.min_lon >> c2 >> b.max_lat >> c3 >> b.max_lon;
    if (!in || c1 != ',' || c2 != ',' || c3 != ',' || !(in >> std::ws).eof())
        fail(ErrorCode::Validation, "bbox must be min_lat,min_lon,max_lat,max_lon");
    b.validate();
    return b;
}

BoundingBox default_box() {
    return {36.83, 36.89, 42.94, 43.03};
}

World generate_world(std::uint64_t seed, std::size_t n_patients, std::size_t n_escs,
                     const BoundingBox& box) {
    if (n_patients < 1 || n_escs < 1)
        fail(ErrorCode::Validation, "world needs at least one patient and one ESC");
    if (n_escs > 99999)
        fail(ErrorCode::Validation, "at most 99999 ESCs");
    box.validate();

    std::mt19937_64 rng(seed);
    World w;
    w.patients.reserve(n_patients);
    const Date reg = Date::parse("2013-03-01");
    std::uniform_int_distribution<int> year(1940, 2010), month(1, 12), day(1, 28);
    for (std::size_t i = 0; i < n_patients; ++i) {
        PatientRecord p;
        std::ostringstream id;
        id << "9" << std::setw(10) << std::setfill('0') << i;
        p.id = id.str();
        p.first_name = kFirstNames[rng() % std::size(kFirstNames)];
        p.last_name = kLastNames[rng() % std::size(kLastNames)];
        p.emergency_contact1 = phone(rng);
        if (rng() % 8 != 0)
            p.emergency_contact2 = phone(rng);
        p.birth_date = Date(std::chrono::year(year(rng)) / std::chrono::month(unsigned(month(rng))) /
                            std::chrono::day(unsigned(day(rng))));
        if (p.birth_date > reg)
            p.birth_date = reg;
        p.disease_name = kDiseases[rng() % std::size(kDiseases)];
        p.reg_date = reg;
        w.patients.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < n_escs; ++i) {
        std::ostringstream id;
        id << "E" << std::setw(5) << std::setfill('0') << i + 1;
        const double lat = micro_uniform(rng, box.min_lat, box.max_lat);
        const double lon = micro_uniform(rng, box.min_lon, box.max_lon);
        w.escs.push_back({id.str(), Location::from_point({lat, lon}), EscStatus::Free});
    }
    return w;
}

void write_world(const World& world, const std::filesystem::path& dir) {
    Registry reg;
    for (const auto& p : world.patients)
        reg.register_patient(p);
    for (const auto& e : world.escs)
        reg.upsert_esc(e);
    std::filesystem::create_directories(dir);
    for (Table t : {Table::Registration, Table::Esc}) {
        std::ofstream out(dir / (std::string(table_name(t)) + ".csv"), std::ios::binary);
        out << reg.export_table(t);
        if (!out)
            fail(ErrorCode::StorageFailure, "cannot write fixtures to " + dir.string());
    }
}

std::vector<PlannedRequest> plan_submissions(std::uint64_t seed, double rate_per_s,
                                             double duration_s, std::size_t n_patients,
                                             const BoundingBox& box) {
    if (!(rate_per_s > 0) || !(duration_s >= 0))
        fail(ErrorCode::Validation, "rate must be positive and duration non-negative");
    const auto count = static_cast<std::size_t>(std::floor(rate_per_s * duration_s + 1e-9));
    if (count > 0 && n_patients == 0)
        fail(ErrorCode::Validation, "no patients to submit for");
    box.validate();

    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ull);
    const Timestamp base = Timestamp::parse("2024-01-01 00:00:00.000");
    std::vector<PlannedRequest> plan;
    plan.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        PlannedRequest r;
        r.patient_index = i % n_patients;
        r.location = {micro_uniform(rng, box.min_lat, box.max_lat),
                      micro_uniform(rng, box.min_lon, box.max_lon)};
        r.offset = std::chrono::milliseconds(std::llround(1000.0 * double(i) / rate_per_s));
        r.request_time = Timestamp::from_millis(base.millis() + r.offset.count());
        plan.push_back(r);
    }
    return plan;
}

Reconciliation reconcile(const std::vector<DispatchEvent>& events, double radius_km) {
    struct Esc {
        geo::GeoPoint loc;
        bool reserved = false;
    };
    std::map<std::string, Esc> fleet;
    std::map<std::string, std::string> holder;  // request key -> esc
    Reconciliation out;

    for (const auto& e : events) {
        switch (e.kind) {
        case DispatchEvent::Kind::EscState:
            fleet[e.esc_id] = {e.location, e.reserved};
            break;
        case DispatchEvent::Kind::Release: {
            ++out.releases;
            if (auto it = fleet.find(e.esc_id); it != fleet.end())
                it->second.reserved = false;
            break;
        }
        case DispatchEvent::Kind::Assign: {
            ++out.assignments;
            Mismatch m;
            m.seq = e.seq;
            m.key = e.key ? e.key->str() : "";
            m.server_esc = e.esc_id;
            m.server_km = e.distance_km;

            double best = std::numeric_limits<double>::infinity();
            for (const auto& [id, esc] : fleet) {
                if (esc.reserved)
                    continue;
                const double d = oracle_km(e.location, esc.loc, radius_km);
                if (d < best) {  // map order gives the id tie-break
                    best = d;
                    m.oracle_esc = id;
                }
            }
            m.oracle_km = best;

            const auto chosen = fleet.find(e.esc_id);
            if (chosen == fleet.end()) {
                m.reason = "assigned ESC unknown to the fleet";
            } else if (chosen->second.reserved) {
                m.reason = "assigned ESC was already reserved";
            } else {
                const double own = oracle_km(e.location, chosen->second.loc, radius_km);
                const double tol = 1e-9 * std::max(1.0, best);
                if (std::abs(own - e.distance_km) > tol)
                    m.reason = "reported distance disagrees with oracle";
                else if (own > best + tol)
                    m.reason = "a nearer FREE ESC existed";
            }
            if (!m.reason.empty())
                out.mismatches.push_back(m);
            if (chosen != fleet.end())
                chosen->second.reserved = true;
            break;
        }
        }
    }
    return out;
}

double percentile(std::vector<double> values, double pct) {
    if (values.empty())
        return 0.0;
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * double(values.size())));
    return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

json LoadReport::to_json() const {
    json samples = json::array();
    for (const auto& m : mismatch_samples)
        samples.push_back({{"seq", m.seq},
                           {"key", m.key},
                           {"server_esc", m.server_esc},
                           {"oracle_esc", m.oracle_esc},
                           {"server_km", m.server_km},
                           {"oracle_km", m.oracle_km},
                           {"reason", m.reason}});
    return {{"submitted", submitted},
            {"accepted", accepted},
            {"assigned", assigned},
            {"queued", queued},
            {"failed", failed},
            {"throughput_rps", throughput_rps},
            {"latency_ms", {{"p50", latency_p50_ms}, {"p95", latency_p95_ms}, {"p99", latency_p99_ms}}},
            {"oracle_mismatches", oracle_mismatches},
            {"assignments_checked", assignments_checked},
            {"ceiling_rps", ceiling_rps},
            {"ceiling_failed", ceiling_failed},
            {"elapsed_s", elapsed_s},
            {"drained", drained},
            {"server", wire::to_json(server)},
            {"conservation_holds", conservation_holds},
            {"mismatch_samples", samples}};
}

std::string LoadReport::summary() const {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2);
    s << "submitted " << submitted << "  accepted " << accepted << "  failed " << failed
      << "  (assigned " << assigned << ", queued " << queued << ")\n";
    s << "throughput " << throughput_rps << " req/s";
    if (ceiling_rps > 0)
        s << "  ceiling " << ceiling_rps << " req/s (" << ceiling_failed << " failed)";
    s << "\nlatency ms  p50 " << latency_p50_ms << "  p95 " << latency_p95_ms << "  p99 "
      << latency_p99_ms << "\n";
    s << "oracle: " << assignments_checked << " assignments checked, " << oracle_mismatches
      << " mismatches\n";
    s << "server: submitted " << server.submitted << " = live " << server.live << " + queued "
      << server.queued << " + handled " << server.handled << " + rejected " << server.rejected
      << (conservation_holds ? "  [holds]" : "  [VIOLATED]") << (drained ? "" : "  (not drained)")
      << "\n";
    return s.str();
}

LoadReport run_load(const RunOptions& opt) {
    LoadReport report;
    // With no explicit population every planned request gets its own patient.
    const auto plan = plan_submissions(
        opt.seed, opt.rate_per_s, opt.duration_s,
        opt.n_patients > 0 ? opt.n_patients : std::numeric_limits<std::size_t>::max(), opt.box);
    if (plan.empty() && opt.ceiling_requests == 0)
        return report;

    const Endpoint ep{opt.host, opt.port};
    {
        auto c = ep.client(3);
        auto res = c.Get("/health");
        if (!res || res->status != 200)
            fail(ErrorCode::TargetUnreachable,
                 "no service at " + opt.host + ":" + std::to_string(opt.port));
    }

    const std::size_t total = plan.size() + opt.ceiling_requests;
    const std::size_t n_patients = std::max(opt.n_patients, total);
    const World world = generate_world(opt.seed, n_patients, opt.n_escs, opt.box);
    const std::size_t clients = std::max<std::size_t>(1, opt.clients);

    if (opt.setup_world) {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> broken{false};
        run_parallel(std::min(clients, std::size_t(8)), [&](std::size_t) {
            auto c = ep.client();
            for (std::size_t i; (i = next++) < world.patients.size();) {
                auto res = c.Post("/patients", wire::to_json(world.patients[i]).dump(),
                                  "application/json");
                if (!res || (res->status != 201 && res->status != 409))
                    broken = true;
            }
        });
        auto c = ep.client();
        for (const auto& e : world.escs) {
            const json body{{"id", e.id},
                            {"latitude", e.location.lat_text},
                            {"longitude", e.location.lon_text}};
            auto res = c.Post("/escs", body.dump(), "application/json");
            if (!res || res->status >= 300)
                broken = true;
        }
        if (broken)
            fail(ErrorCode::TargetUnreachable, "world setup failed");
    }

    std::vector<std::string> esc_ids;
    {
        auto c = ep.client();
        for (const auto& e : get_json(c, "/escs"))
            esc_ids.push_back(e.at("id").get<std::string>());
    }
    std::atomic<bool> stop_sims{false};
    std::vector<std::jthread> sims;
    for (const auto& id : esc_ids)
        sims.emplace_back([&, id] { simulate_esc(ep, id, opt, stop_sims); });

    struct Tally {
        std::mutex mu;
        std::uint64_t submitted = 0, accepted = 0, failed = 0, assigned = 0, queued = 0;
        std::vector<double> latencies;
    };
    auto submit = [&](Tally& tally, httplib::Client& c, const PlannedRequest& r,
                      std::size_t patient) {
        const json body{{"id", world.patients[patient].id},
                        {"latitude", r.location.lat_deg},
                        {"longitude", r.location.lon_deg},
                        {"request_time", r.request_time.str()}};
        const auto t0 = std::chrono::steady_clock::now();
        auto res = c.Post("/help", body.dump(), "application/json");
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard lock(tally.mu);
        ++tally.submitted;
        if (!res || res->status != 200) {
            ++tally.failed;
            return;
        }
        ++tally.accepted;
        tally.latencies.push_back(ms);
        const auto reply = json::parse(res->body, nullptr, false);
        if (!reply.is_discarded() && reply.value("status", "") == "assigned")
            ++tally.assigned;
        else
            ++tally.queued;
    };

    // Paced phase: request i leaves at start + offset_i.
    const Stopwatch run_clock;
    Tally paced;
    std::atomic<long long> last_reply_ns{0};
    {
        std::atomic<std::size_t> next{0};
        run_parallel(std::min(clients, std::max<std::size_t>(plan.size(), 1)), [&](std::size_t) {
            auto c = ep.client();
            for (std::size_t i; (i = next++) < plan.size();) {
                std::this_thread::sleep_until(run_clock.start() + plan[i].offset);
                submit(paced, c, plan[i], plan[i].patient_index);
                const long long ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                         std::chrono::steady_clock::now() - run_clock.start())
                                         .count();
                long long prev = last_reply_ns.load();
                while (ns > prev && !last_reply_ns.compare_exchange_weak(prev, ns)) {
                }
            }
        });
    }
    report.submitted = paced.submitted;
    report.accepted = paced.accepted;
    report.failed = paced.failed;
    report.assigned = paced.assigned;
    report.queued = paced.queued;
    const double window_s = double(last_reply_ns.load()) / 1e9;
    if (report.accepted > 0 && window_s > 0)
        report.throughput_rps = double(report.accepted) / window_s;
    report.latency_p50_ms = percentile(paced.latencies, 50);
    report.latency_p95_ms = percentile(paced.latencies, 95);
    report.latency_p99_ms = percentile(paced.latencies, 99);

    // Closed-loop burst for the ceiling estimate, reported separately.
    if (opt.ceiling_requests > 0) {
        const auto burst = plan_submissions(opt.seed + 1, 1000.0,
                                            double(opt.ceiling_requests) / 1000.0, n_patients,
                                            opt.box);
        Tally tally;
        std::atomic<std::size_t> next{0};
        const Stopwatch burst_clock;
        run_parallel(clients, [&](std::size_t) {
            auto c = ep.client();
            for (std::size_t i; (i = next++) < burst.size();)
                submit(tally, c, burst[i], plan.size() + i);
        });
        const double s = burst_clock.seconds();
        report.ceiling_rps = s > 0 ? double(tally.accepted) / s : 0.0;
        report.ceiling_failed = tally.failed;
    }

    // Wait for the ESC simulators to work off everything.
    {
        auto c = ep.client();
        const auto deadline = std::chrono::steady_clock::now() + opt.drain_timeout;
        while (std::chrono::steady_clock::now() < deadline) {
            report.server = wire::stats_from_json(get_json(c, "/stats"));
            if (report.server.live == 0 && report.server.queued == 0) {
                report.drained = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
    }
    stop_sims = true;
    sims.clear();
    report.elapsed_s = run_clock.seconds();

    auto c = ep.client(30);
    report.server = wire::stats_from_json(get_json(c, "/stats"));
    const auto& st = report.server;
    report.conservation_holds = st.submitted == st.live + st.queued + st.handled + st.rejected;

    std::vector<DispatchEvent> events;
    for (const auto& e : get_json(c, "/log"))
        events.push_back(wire::event_from_json(e));
    const auto rec = reconcile(events, opt.radius_km);
    report.assignments_checked = rec.assignments;
    report.oracle_mismatches = rec.mismatches.size();
    for (std::size_t i = 0; i < rec.mismatches.size() && i < 10; ++i)
        report.mismatch_samples.push_back(rec.mismatches[i]);
    return report;
}

}  // namespace succor::loadgen
