#include "virlab.h"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "virlab/commands.hpp"
#include "virlab/welding.hpp"

struct vl_session {
    virlab::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

char* copy_out(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

vl_status fail(vl_status code, const char* what) {
    g_last_error = what;
    return code;
}

// One translation of the exception ladder for every entry point.
template <typename Fn>
vl_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const nlohmann::json::exception& e) {
        return fail(VL_PARSE_ERROR, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(VL_PARSE_ERROR, e.what());
    } catch (const virlab::WeldGeometryError& e) {
        return fail(VL_DOMAIN_ERROR, e.what());
    } catch (const std::domain_error& e) {
        return fail(VL_DOMAIN_ERROR, e.what());
    } catch (const virlab::WeldNumericError& e) {
        return fail(VL_NUMERIC_ERROR, e.what());
    } catch (const std::runtime_error& e) {
        return fail(VL_NUMERIC_ERROR, e.what());
    } catch (const std::exception& e) {
        return fail(VL_INTERNAL_ERROR, e.what());
    }
}

}  // namespace

extern "C" {

vl_session* vl_session_new(void) { return new (std::nothrow) vl_session(); }

void vl_session_free(vl_session* s) { delete s; }

vl_status vl_session_set(vl_session* s, const char* key, const char* value) {
    if (!s || !key || !value) return fail(VL_PARSE_ERROR, "null argument");
    return guarded([&]() -> vl_status {
        std::string k = key, v = value;
        if (k == "level")
            s->cfg.level = std::stol(v);
        else if (k == "modes")
            s->cfg.modes = std::stol(v);
        else if (k == "max-iter")
            s->cfg.max_iter = std::stol(v);
        else if (k == "tol")
            s->cfg.tol = std::stod(v);
        else if (k == "seed")
            s->cfg.seed = std::stoull(v);
        else
            throw std::invalid_argument("unknown session key '" + k + "'");
        return VL_OK;
    });
}

vl_status vl_run_command(vl_session* s, const char* command, const char* request_json,
                         char** response_json) {
    if (!s || !command || !response_json) return fail(VL_PARSE_ERROR, "null argument");
    *response_json = nullptr;
    return guarded([&]() -> vl_status {
        std::string out =
            virlab::run_command(command, request_json ? request_json : "", s->cfg);
        *response_json = copy_out(out);
        return *response_json ? VL_OK : fail(VL_INTERNAL_ERROR, "out of memory");
    });
}

vl_status vl_conformance_run(vl_session* s, char** report_json) {
    if (!s || !report_json) return fail(VL_PARSE_ERROR, "null argument");
    *report_json = nullptr;
    return guarded([&]() -> vl_status {
        virlab::ConformanceSummary sum;
        std::string out = virlab::conformance_report(s->cfg, &sum);
        *report_json = copy_out(out);
        if (!*report_json) return fail(VL_INTERNAL_ERROR, "out of memory");
        if (sum.failed > 0)
            return fail(VL_NUMERIC_ERROR,
                        (std::to_string(sum.failed) + " conformance checks failed").c_str());
        return sum.flagged > 0 ? VL_FLAGGED : VL_OK;
    });
}

const char* vl_last_error(void) { return g_last_error.c_str(); }

void vl_free(char* p) { std::free(p); }

}  // extern "C"
