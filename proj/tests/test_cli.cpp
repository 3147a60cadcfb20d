#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "interlink/cli.hpp"

using interlink::cli::run;

namespace {

struct CliResult {
    int code;
    nlohmann::json doc;
    std::string err;
};

CliResult call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    CliResult r{code, nlohmann::json(), err.str()};
    if (!out.str().empty() && out.str().front() == '{') r.doc = nlohmann::json::parse(out.str());
    return r;
}

nlohmann::json without_timestamp(nlohmann::json j) {
    j.erase("timestamp");
    return j;
}

} // namespace

TEST_CASE("distance command picks the short way around", "[cli]") {
    auto r = call({"distance", "--manifold", "t1", "--x", "0", "--y", "0.7"});
    REQUIRE(r.code == 0);
    CHECK(r.doc["d"] == Approx(0.3).margin(1e-15));
    CHECK(r.doc["config"]["seed"] == 0);
}

TEST_CASE("sphere barcode command yields one bar per degree", "[cli]") {
    auto r = call({"barcode", "--manifold", "s2", "--radius", "1", "--theta", "1.5707963",
                   "--cutoff", "8"});
    REQUIRE(r.code == 0);
    REQUIRE(r.doc["bars"].size() == 3);
    CHECK(r.doc["bars"][0]["degree"] == 0);
    CHECK(r.doc["bars"][1]["degree"] == 1);
    CHECK(r.doc["bars"][2]["degree"] == 2);
    CHECK(r.doc["bars"][2]["right"] == "inf");
    CHECK(r.doc["certified_to"] == 8.0);
    CHECK(r.doc["basis"].size() == 2);
}

TEST_CASE("bounds command emits the cotangent bound instances", "[cli]") {
    auto r = call({"bounds", "--manifold", "t1", "--x", "0", "--y", "0.3", "--a", "1", "--b", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.doc["pb_lower"] == Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK(r.doc["kappa"] == Approx(0.3).epsilon(1e-12));
    CHECK(r.doc["both_orderings"] == true);
    CHECK(r.doc["barcode_certified"] == true);
}

TEST_CASE("verify command confirms the worked example", "[cli]") {
    auto r = call({"verify", "--manifold", "t1", "--x", "0", "--y", "0.3", "--a", "1", "--b", "2",
                   "--ham", "radial:r^2", "--rmax", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.doc["verdict"] == "CONFIRMED");
    CHECK(r.doc["budget"] == Approx(0.1).epsilon(1e-12));
    CHECK(r.doc["chord"]["time"] == Approx(0.075).epsilon(1e-3));
}

TEST_CASE("verify is reproducible bit for bit modulo the timestamp", "[cli]") {
    const std::vector<std::string> args = {"verify", "--manifold", "t1",   "--x",   "0",
                                           "--y",    "0.3",        "--a",  "1",     "--b",
                                           "2",      "--ham",      "radial:r^2", "--seed", "7"};
    auto r1 = call(args);
    auto r2 = call(args);
    REQUIRE(r1.code == 0);
    CHECK(without_timestamp(r1.doc).dump() == without_timestamp(r2.doc).dump());
}

TEST_CASE("chords command writes a trajectory CSV", "[cli]") {
    const std::string path = "/tmp/interlink_test_traj.csv";
    std::remove(path.c_str());
    auto r = call({"chords", "--manifold", "t1", "--x", "0", "--y", "0.3", "--ham", "radial:r",
                   "--tmax", "1", "--rmax", "1", "--traj-out", path});
    REQUIRE(r.code == 0);
    CHECK(r.doc["chord"]["time"] == Approx(0.3).margin(1e-6));
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,q0,p0,H");
}

TEST_CASE("identity-check passes with tight residuals", "[cli]") {
    auto r = call({"identity-check", "--n", "2", "--draws", "25", "--seed", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.doc["pass"] == true);
    CHECK(r.doc["max_pfaffian_residual"].get<double>() < 1e-10);
}

TEST_CASE("argument errors exit with code 2", "[cli]") {
    CHECK(call({"bogus-command"}).code == 2);
    CHECK(call({"distance", "--manifold", "t1", "--x", "0"}).code == 2); // missing --y
    CHECK(call({"bounds", "--manifold", "t1", "--x", "0", "--y", "0.3", "--variant", "nope"}).code ==
          2);
    CHECK(call({"verify", "--manifold", "t1", "--x", "0", "--y", "0.3", "--a", "2", "--b", "1"})
              .code == 2);
}

TEST_CASE("domain errors exit with code 3", "[cli]") {
    auto r = call({"spectrum", "--manifold", "s2", "--radius", "1", "--theta", "3.14159265358979",
                   "--cutoff", "8"});
    CHECK(r.code == 3);
    CHECK(r.err.find("Morse") != std::string::npos);
}

TEST_CASE("inconclusive verification exits with code 4", "[cli]") {
    // search radius too small for the budget: nothing can reach the fiber in time
    auto r = call({"verify", "--manifold", "t1", "--x", "0", "--y", "0.3", "--a", "1", "--b", "2",
                   "--ham", "radial:r^2", "--rmax", "0.01"});
    CHECK(r.code == 4);
    CHECK(r.doc["verdict"] == "INCONCLUSIVE");
    CHECK(r.doc["chord"].is_null());
}

TEST_CASE("pb-estimate command reports the sandwich", "[cli]") {
    auto r = call({"pb-estimate", "--x", "0", "--y", "0.3", "--a", "1", "--b", "2", "--restarts",
                   "1", "--nm-iters", "100", "--coord-rounds", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.doc["lower"] == Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK(r.doc["upper"].get<double>() >= r.doc["lower"].get<double>() - 1e-9);
    CHECK(r.doc["gap_ratio"].get<double>() <= 1.2);
}

TEST_CASE("unknown flags produce usage text and exit 2", "[cli]") {
    std::ostringstream out, err;
    const int code = run({"distance", "--manifold", "t1", "--x", "0", "--y", "0.3",
                          "--frobnicate", "1"},
                         out, err);
    CHECK(code == 2);
    CHECK_FALSE(err.str().empty());
}

TEST_CASE("verify handles the zero-section variant", "[cli]") {
    auto r = call({"verify", "--manifold", "t1", "--x", "0", "--y", "0.3", "--a", "1",
                   "--variant", "zero-section", "--ham", "radial:r^2", "--rmax", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.doc["verdict"] == "CONFIRMED");
    CHECK(r.doc["budget"] == Approx(0.3).epsilon(1e-12));
    CHECK(r.doc["chord"]["time"] == Approx(0.15).epsilon(1e-3));
}

TEST_CASE("verify runs on the two-torus", "[cli]") {
    auto r = call({"verify", "--manifold", "t2", "--metric", "1.1,0.1,0.1,0.9", "--x", "0.1,0.8",
                   "--y", "0.45,0.2", "--a", "0.8", "--b", "1.6", "--ham",
                   "spline:rmax=4;v0=0;w=0.8,1.4,1.0", "--grid-angular", "24"});
    REQUIRE(r.code == 0);
    CHECK(r.doc["verdict"] == "CONFIRMED");
    CHECK(r.doc["chord"]["p0"].size() == 2);
}
