#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "virlab.h"

namespace {

struct Session {
    vl_session* s = vl_session_new();
    ~Session() { vl_session_free(s); }
};

std::string take(char* p) {
    std::string out = p ? p : "";
    vl_free(p);
    return out;
}

}  // namespace

TEST_CASE("session knobs") {
    Session ses;
    REQUIRE(ses.s != nullptr);
    CHECK(vl_session_set(ses.s, "level", "4") == VL_OK);
    CHECK(vl_session_set(ses.s, "tol", "1e-9") == VL_OK);
    CHECK(vl_session_set(ses.s, "volume", "11") == VL_PARSE_ERROR);
    CHECK(std::strstr(vl_last_error(), "volume") != nullptr);
    CHECK(vl_session_set(nullptr, "level", "4") == VL_PARSE_ERROR);
}

TEST_CASE("commands run through the C surface") {
    Session ses;
    char* out = nullptr;
    CHECK(vl_run_command(ses.s, "qpft", "{\"op\":\"qr\",\"h\":\"7/2\"}", &out) == VL_OK);
    std::string reply = take(out);
    CHECK(reply.find("\"q_r\": \"1/6\"") != std::string::npos);
    CHECK(std::string(vl_last_error()).empty());
}

TEST_CASE("failures map to stable status codes") {
    Session ses;
    char* out = nullptr;

    CHECK(vl_run_command(ses.s, "qpft", "{\"op\":\"qr\",\"h\":\"1/2\"}", &out) == VL_DOMAIN_ERROR);
    CHECK(out == nullptr);
    CHECK(std::strstr(vl_last_error(), "pole") != nullptr);

    CHECK(vl_run_command(ses.s, "mobius", "{\"op\":", &out) == VL_PARSE_ERROR);
    CHECK(vl_run_command(ses.s, "orbit", "{}", &out) == VL_PARSE_ERROR);

    const char* wide =
        "{\"op\":\"eval\",\"word\":[[\"annulus\",\"annulus\",\"annulus\","
        "\"annulus\",\"annulus\",\"annulus\"]]}";
    CHECK(vl_run_command(ses.s, "train", wide, &out) == VL_NUMERIC_ERROR);
}

TEST_CASE("conformance runs and flags the recorded deviation") {
    Session ses;
    char* report = nullptr;
    vl_status st = vl_conformance_run(ses.s, &report);
    std::string text = take(report);
    CHECK(st == VL_FLAGGED);
    CHECK(text.find("\"failed\": 0") != std::string::npos);
    CHECK(text.find("\"flagged\": 1") != std::string::npos);
    CHECK(text.find("hsc-bracket-deviation") != std::string::npos);
}
