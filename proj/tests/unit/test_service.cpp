#include "succor/error.hpp"
#include "succor/service.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <filesystem>
#include <future>
#include <random>

using namespace succor;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = SUCCOR_FIXTURE_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("succor-svc-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// Patients and fleet only, so every ESC starts FREE.
struct PeopleAndFleet : TempDir {
    PeopleAndFleet() {
        fs::copy_file(kFixtures / "Registration.csv", path / "Registration.csv");
        fs::copy_file(kFixtures / "ESC.csv", path / "ESC.csv");
    }
};

ServiceConfig config_for(const fs::path& fixtures) {
    ServiceConfig c;
    c.port = 0;
    c.fixtures_dir = fixtures;
    c.poll_timeout_s = 5;
    return c;
}

struct Running {
    Service svc;
    httplib::Client cli;

    explicit Running(ServiceConfig c) : svc(std::move(c)), cli("127.0.0.1", svc.bind()) {
        svc.start();
        cli.set_read_timeout(10, 0);
    }

    std::pair<int, json> get(const std::string& path) {
        auto r = cli.Get(path);
        REQUIRE(r);
        return {r->status, r->body.empty() ? json() : json::parse(r->body)};
    }
    std::pair<int, json> post(const std::string& path, const json& body) {
        auto r = cli.Post(path, body.dump(), "application/json");
        REQUIRE(r);
        return {r->status, json::parse(r->body)};
    }
    std::pair<int, json> put(const std::string& path, const json& body) {
        auto r = cli.Put(path, body.dump(), "application/json");
        REQUIRE(r);
        return {r->status, json::parse(r->body)};
    }
};

const json kRow1Help{{"id", "07504407758"},
                     {"latitude", 36.85126},
                     {"longitude", 42.99551},
                     {"request_time", "2013-03-04 16:33:36.000"}};

}  // namespace

TEST_CASE("health") {
    Running r(config_for(kFixtures));
    const auto [status, body] = r.get("/health");
    CHECK(status == 200);
    CHECK(body["status"] == "ok");
}

TEST_CASE("startup failures") {
    Running first(config_for(kFixtures));
    ServiceConfig c;
    c.port = first.svc.port();
    Service second(c);
    try {
        second.bind();
        FAIL("expected bind failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BindFailure);
    }

    ServiceConfig bad_store;
    bad_store.store = "file:/proc/definitely/not/here/journal.log";
    try {
        Service s(bad_store);
        FAIL("expected storage failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StorageFailure);
    }
}

TEST_CASE("submit help over the wire") {
    PeopleAndFleet dir;
    Running r(config_for(dir.path));
    auto [status, body] = r.post("/help", kRow1Help);
    CHECK(status == 200);
    CHECK(body["status"] == "assigned");
    CHECK(body["esc_id"] == "Amb5");
    CHECK(body["distance_km"].get<double>() == doctest::Approx(0.54313546308110436).epsilon(1e-12));
    CHECK(body["key"] == "07504407758@20130304163336000");

    auto dup = r.post("/help", kRow1Help);
    CHECK(dup.first == 409);
    CHECK(dup.second["error"] == "DUPLICATE");

    auto bad = kRow1Help;
    bad["id"] = "07504401111";
    bad["latitude"] = "abc";
    auto v = r.post("/help", bad);
    CHECK(v.first == 400);
    CHECK(v.second["error"] == "VALIDATION");

    bad["latitude"] = "36.85";
    CHECK(r.post("/help", bad).first == 200);

    auto stranger = kRow1Help;
    stranger["id"] = "999";
    auto u = r.post("/help", stranger);
    CHECK(u.first == 404);
    CHECK(u.second["error"] == "UNKNOWN_PATIENT");

    auto garbage = r.cli.Post("/help", "{not json", "application/json");
    REQUIRE(garbage);
    CHECK(garbage->status == 400);
}

TEST_CASE("assignment channel") {
    PeopleAndFleet dir;
    Running r(config_for(dir.path));

    auto unknown = r.get("/escs/Amb9/assignments?timeout=0");
    CHECK(unknown.first == 404);
    CHECK(unknown.second["error"] == "UNKNOWN_ESC");

    const auto t0 = std::chrono::steady_clock::now();
    auto idle = r.get("/escs/Amb1/assignments?timeout=0.3");
    CHECK(idle.first == 200);
    CHECK(idle.second["assignments"].empty());
    CHECK(std::chrono::steady_clock::now() - t0 >= std::chrono::milliseconds(250));

    auto waiting = std::async(std::launch::async, [port = r.svc.port()] {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(10, 0);
        auto res = c.Get("/escs/Amb5/assignments?timeout=5");
        return res ? json::parse(res->body) : json();
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    CHECK(r.post("/help", kRow1Help).first == 200);
    const auto got = waiting.get();
    REQUIRE(got["assignments"].size() == 1);
    CHECK(got["assignments"][0]["key"] == "07504407758@20130304163336000");
    CHECK(got["assignments"][0]["patient_name"] == "Amer Hndi");

    // Delivered once only.
    CHECK(r.get("/escs/Amb5/assignments?timeout=0").second["assignments"].empty());

    // An assignment made while nobody listens waits for the next poll.
    auto later = kRow1Help;
    later["id"] = "07504401111";
    later["latitude"] = 36.849723;
    later["longitude"] = 43.003630;
    CHECK(r.post("/help", later).second["esc_id"] == "Amb1");
    CHECK(r.get("/escs/Amb1/assignments?timeout=0").second["assignments"].size() == 1);
}

TEST_CASE("lifecycle over the wire") {
    PeopleAndFleet dir;
    Running r(config_for(dir.path));
    const auto key = r.post("/help", kRow1Help).second["key"].get<std::string>();

    auto wrong = r.post("/requests/" + key + "/ack", {{"esc_id", "Amb1"}});
    CHECK(wrong.first == 403);
    CHECK(wrong.second["error"] == "WRONG_TERMINAL");

    auto ack = r.post("/requests/" + key + "/ack", {{"esc_id", "Amb5"}});
    CHECK(ack.first == 200);
    CHECK(ack.second["state"] == "ACKNOWLEDGED");
    CHECK(r.post("/requests/" + key + "/ack", {{"esc_id", "Amb5"}}).second["error"] == "BAD_STATE");

    auto done = r.post("/requests/" + key + "/complete", {{"esc_id", "Amb5"}});
    CHECK(done.first == 200);
    CHECK(done.second["esc_id"] == "Amb5");
    auto again = r.post("/requests/" + key + "/complete", {{"esc_id", "Amb5"}});
    CHECK(again.first == 409);
    CHECK(again.second["error"] == "BAD_STATE");

    const auto handled = r.get("/requests?status=handled").second;
    REQUIRE(handled.size() == 1);
    CHECK(handled[0]["key"] == key);
    CHECK(handled[0]["color"] == "black");
    CHECK(r.get("/requests?status=new").second.empty());
    CHECK(r.get("/requests?status=bogus").first == 400);

    const auto stats = r.get("/stats").second;
    CHECK(stats["submitted"] == 1);
    CHECK(stats["handled"] == 1);

    r.svc.wait_notifications_idle();
    const auto sms = r.svc.recording_transport()->drain();
    CHECK(sms.size() == 3);

    const auto log = r.get("/log").second;
    CHECK(std::any_of(log.begin(), log.end(), [](auto& e) { return e["kind"] == "assign"; }));
    CHECK(std::any_of(log.begin(), log.end(), [](auto& e) { return e["kind"] == "release"; }));
}

TEST_CASE("fixture board") {
    Running r(config_for(kFixtures));
    const auto fresh = r.get("/requests?status=new").second;
    CHECK(fresh.size() == 3);
    for (const auto& v : fresh)
        CHECK(v["color"] == "red");
    const auto handled = r.get("/requests?status=handled").second;
    CHECK(handled.size() == 4);
    for (const auto& v : handled)
        CHECK(v["color"] == "black");
}

TEST_CASE("patients and fleet endpoints") {
    Running r(config_for(kFixtures));
    auto rose = r.get("/patients/07504401111");
    CHECK(rose.first == 200);
    CHECK(rose.second["f_name"] == "Rose");
    CHECK(r.get("/patients/00000000000").first == 404);

    auto up = r.put("/patients/07504401111", {{"disease_name", "Diabetes Mellitus"}});
    CHECK(up.first == 200);
    CHECK(r.get("/patients/07504401111").second["disease_name"] == "Diabetes Mellitus");
    auto missing = r.put("/patients/00000000000", {{"disease_name", "x"}});
    CHECK(missing.first == 404);
    CHECK(missing.second["error"] == "NOT_FOUND");

    const json fresh{{"id", "07500000009"},         {"f_name", "New"},
                     {"l_name", "Person"},          {"emergency_contact1", "07501111111"},
                     {"birth_date", "1990-01-01"},  {"disease_name", "Asthma"},
                     {"reg_date", "2013-03-01"}};
    CHECK(r.post("/patients", fresh).first == 201);
    auto dup = r.post("/patients", fresh);
    CHECK(dup.first == 409);
    CHECK(dup.second["error"] == "DUPLICATE_ID");
    auto empty = fresh;
    empty["id"] = "";
    CHECK(r.post("/patients", empty).second["error"] == "VALIDATION");

    CHECK(r.get("/escs").second.size() == 4);
    CHECK(r.post("/escs", {{"id", "Amb6"}, {"latitude", "36.860000"}, {"longitude", "42.980000"}}).first == 201);
    auto moved = r.put("/escs/Amb6", {{"latitude", 36.87}, {"longitude", 42.99}});
    CHECK(moved.first == 200);
    CHECK(moved.second["status"] == "FREE");
    auto bad = r.post("/escs", {{"id", "Amb7"}, {"latitude", 95}, {"longitude", 0}});
    CHECK(bad.first == 400);
    CHECK(r.get("/escs").second.size() == 5);

    auto csv = r.cli.Get("/tables/ESC");
    REQUIRE(csv);
    CHECK(csv->body.starts_with("ID,Latitude,Longitude\n"));
    CHECK(r.get("/tables/Foo").second["error"] == "UNKNOWN_TABLE");
}

TEST_CASE("slow geocoder does not hold up dispatch") {
    PeopleAndFleet dir;
    Running r(config_for(dir.path));
    struct Slow : GeocodeProvider {
        std::optional<std::string> lookup(const geo::GeoPoint&) override {
            std::this_thread::sleep_for(std::chrono::seconds(3));
            return "late";
        }
    };
    r.svc.set_geocoder(std::make_shared<Slow>());
    const auto t0 = std::chrono::steady_clock::now();
    CHECK(r.post("/help", kRow1Help).second["esc_id"] == "Amb5");
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1));
    r.svc.wait_notifications_idle();
    for (const auto& m : r.svc.recording_transport()->drain())
        CHECK(m.body.find("late") == std::string::npos);
}

TEST_CASE("durable store keeps state across restarts") {
    TempDir dir;
    ServiceConfig c;
    c.port = 0;
    c.store = "file:" + (dir.path / "journal.log").string();
    {
        ServiceConfig first = c;
        first.fixtures_dir = kFixtures;
        Running r(first);
        CHECK(r.put("/patients/07504401111", {{"l_name", "Maher-Fars"}}).first == 200);
    }
    Running r(c);
    CHECK(r.get("/patients/07504401111").second["l_name"] == "Maher-Fars");
    CHECK(r.get("/escs").second.size() == 4);
}
