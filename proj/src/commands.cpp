#include "virlab/commands.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "virlab/circle_algebra.hpp"
#include "virlab/qpft.hpp"
#include "virlab/serialize.hpp"
#include "virlab/verma.hpp"

namespace virlab {

namespace {

Rat exact_det(RatMat m) {
    if (m.empty()) return Rat(1);
    const std::size_t n = m.size();
    Rat det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col] == 0) continue;
            Rat f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return det;
}

TrigField field_from(const Json& j) {
    if (j.is_string() && j.get<std::string>() == "h") return h_field();
    if (j.is_object()) {
        if (j.contains("e")) return e_field(j.at("e").get<long>());
        if (j.contains("s")) return s_field(j.at("s").get<long>());
        if (j.contains("c")) return c_field(j.at("c").get<long>());
        if (j.contains("modes")) {
            TrigField u;
            for (const auto& [key, val] : j.at("modes").items())
                u.modes[std::stol(key)] = ratc_from(val);
            return u;
        }
    }
    throw std::invalid_argument(
        "a field wants \"h\", {\"e\":k}, {\"s\":n}, {\"c\":n} or {\"modes\":{..}}");
}

Json field_json(const TrigField& u) {
    Json modes = Json::object();
    for (const auto& [k, z] : u.modes)
        if (!z.is_zero()) modes[std::to_string(k)] = ratc_json(z);
    return Json{{"modes", std::move(modes)}};
}

VirasoroElement element_from(const Json& j) {
    if (j.is_object() && j.contains("field"))
        return VirasoroElement{field_from(j.at("field")),
                               j.contains("central") ? ratc_from(j.at("central")) : RatC{}};
    return VirasoroElement{field_from(j)};
}

Json element_json(const VirasoroElement& x) {
    Json out = field_json(x.field);
    out["central"] = ratc_json(x.central);
    return out;
}

void run_mobius(const std::string& op, const Json& req, Json& out) {
    if (op == "compose") {
        out["map"] = mobius_json(compose(mobius_from(req.at("f")), mobius_from(req.at("g"))));
    } else if (op == "inverse") {
        out["map"] = mobius_json(inverse(mobius_from(req.at("f"))));
    } else if (op == "mantle") {
        MobiusMap f = mobius_from(req.at("f"));
        out["in_mantle"] = in_mantle(f);
        out["strict"] = strictly_in_mantle(f);
    } else if (op == "glue") {
        MobiusMap f = mobius_from(req.at("f")), g = mobius_from(req.at("g"));
        NormalizedDomain nd = normalize_domain(glue(annulus_form(f), annulus_form(g)));
        out["map"] = mobius_json(nd.f);
        out["transport"] = mobius_json(nd.transport);
        out["matches_composition"] = (nd.f == compose(f, g));
    } else {
        throw std::invalid_argument("mobius: unknown op '" + op + "'");
    }
}

void run_algebra(const std::string& op, const Json& req, Json& out) {
    if (op == "bracket") {
        out["field"] = field_json(bracket(field_from(req.at("u")), field_from(req.at("v"))));
    } else if (op == "virasoro") {
        VirasoroElement x = element_from(req.at("u")), y = element_from(req.at("v"));
        out["bracket"] = element_json(virasoro_bracket(x, y));
    } else if (op == "jacobi") {
        VirasoroElement d = jacobi_check(element_from(req.at("u")), element_from(req.at("v")),
                                         element_from(req.at("w")));
        out["zero"] = (d == VirasoroElement{});
        out["defect"] = element_json(d);
    } else if (op == "gf2") {
        CocycleValue v = gf_cocycle2(field_from(req.at("u")), field_from(req.at("v")));
        out["two_pi_units"] = ratc_json(v.two_pi_units);
        out["value"] = Json::array({v.value().real(), v.value().imag()});
    } else if (op == "gf3") {
        CocycleValue v = gf_cocycle3(field_from(req.at("u")), field_from(req.at("v")),
                                     field_from(req.at("w")));
        out["two_pi_units"] = ratc_json(v.two_pi_units);
        out["value"] = Json::array({v.value().real(), v.value().imag()});
    } else {
        throw std::invalid_argument("algebra: unknown op '" + op + "'");
    }
}

void run_verma(const std::string& op, const Json& req, const RunConfig& cfg, Json& out) {
    std::string algebra = req.value("algebra", "vir");
    Rat h = rat_from(req.at("h"));
    long level = req.value("level", cfg.level);
    if (op == "gram") {
        RatMat g;
        if (algebra == "sl2") {
            g = shapovalov_gram(Sl2Verma{h, level}, level);
        } else if (algebra == "vir") {
            g = shapovalov_gram(VirVerma{h, rat_from(req.at("c")), level}, level);
        } else {
            throw std::invalid_argument("verma: algebra wants \"sl2\" or \"vir\"");
        }
        out["level"] = level;
        out["dim"] = g.size();
        out["gram"] = rmat_json(g);
        out["det"] = rat_str(exact_det(g));
    } else if (op == "unitarizable") {
        UnitarityReport r;
        if (algebra == "sl2") {
            r = is_unitarizable(Sl2Verma{h, level}, level);
        } else if (algebra == "vir") {
            r = is_unitarizable(VirVerma{h, rat_from(req.at("c")), level}, level);
        } else {
            throw std::invalid_argument("verma: algebra wants \"sl2\" or \"vir\"");
        }
        out["unitarizable"] = r.unitarizable;
        if (!r.unitarizable) {
            out["level"] = r.level;
            Json w = Json::array();
            for (const Rat& x : r.witness) w.push_back(rat_str(x));
            out["witness"] = std::move(w);
            out["witness_norm"] = rat_str(r.witness_norm);
        }
    } else {
        throw std::invalid_argument("verma: unknown op '" + op + "'");
    }
}

void run_qpft(const std::string& op, const Json& req, const RunConfig& cfg, Json& out) {
    if (op == "build") {
        Rat h = rat_from(req.at("h"));
        long S = req.value("spins", 3L);
        long N = req.value("level", cfg.level);
        BuildReport rep;
        GradedModel m = build_V(h, S, N, &rep);
        out["spins"] = m.S;
        out["level"] = m.N;
        out["q_r"] = rat_str(m.q_r);
        out["central_charge"] =
            Json::array({rat_str(m.measured_central_charge(0)), rat_str(m.measured_central_charge(1))});
        out["equations"] = rep.equations;
        out["verified"] = rep.verified;
        Json alphas = Json::object();
        for (const auto& [key, val] : m.alphas) {
            auto [k, i, j] = key;
            alphas[std::to_string(k) + "," + std::to_string(i) + "," + std::to_string(j)] =
                rat_str(val);
        }
        out["alphas"] = std::move(alphas);
        out["notes"] = rep.notes;
    } else if (op == "primary") {
        PrimarySolution s =
            solve_primary(rat_from(req.at("mu")), rat_from(req.at("h_src")),
                          rat_from(req.at("h_tgt")), req.value("level", cfg.level),
                          req.value("src_cap", -1L), req.value("tgt_cap", -1L));
        out["delta"] = rat_str(s.delta);
        out["dim"] = s.basis.size();
        Json basis = Json::array();
        for (const RatMat& b : s.basis) basis.push_back(rmat_json(b));
        out["basis"] = std::move(basis);
    } else if (op == "trinion") {
        TrinionResult t =
            trinion_intertwiner(rat_from(req.at("h1")), rat_from(req.at("h2")),
                                rat_from(req.at("h3")), req.value("level", cfg.level),
                                req.contains("x") ? rat_from(req.at("x")) : frac(1, 2));
        out["dim"] = t.dim;
        Json basis = Json::array();
        for (const RatMat& b : t.basis) basis.push_back(rmat_json(b));
        out["basis"] = std::move(basis);
    } else if (op == "qr") {
        out["q_r"] = rat_str(q_r_parameter(rat_from(req.at("h"))));
    } else {
        throw std::invalid_argument("qpft: unknown op '" + op + "'");
    }
}

Json diffeo_report(const CircleDiffeo& g) {
    DiffeoCheck c = check_diffeo(g);
    return Json{{"max_radial_error", c.max_radial_error},
                {"min_angular_speed", c.min_angular_speed},
                {"winding", c.winding},
                {"pass", c.pass}};
}

void run_weld(const std::string& op, const Json& req, const RunConfig& cfg, Json& out) {
    WeldingConfig wcfg;
    wcfg.modes = static_cast<int>(cfg.modes);
    wcfg.residual_tol = cfg.tol;
    wcfg.max_iter = static_cast<int>(cfg.max_iter);
    if (op == "mul") {
        MultiplyReport rep;
        NeretinElement prod =
            multiply(neretin_from(req.at("lhs")), neretin_from(req.at("rhs")), wcfg, &rep);
        out["product"] = neretin_json(prod);
        out["residual"] = rep.residual;
        out["splits"] = rep.splits;
        out["phi_modes"] = rep.phi_modes;
    } else if (op == "scaling") {
        out["element"] =
            neretin_json(scaling_element(req.at("t").get<double>(), static_cast<int>(cfg.modes)));
    } else if (op == "mobius") {
        NeretinElement e = mobius_element(mobius_from(req.at("map")), static_cast<int>(cfg.modes));
        out["element"] = neretin_json(e);
    } else if (op == "triple") {
        NeretinElement e = neretin_from(req.at("element"));
        AnnularTriple tr = to_triple(e, wcfg);
        NeretinElement back = from_triple(tr, wcfg);
        out["outgoing"] = coef_json(tr.outgoing.coef);
        out["ingoing"] = coef_json(tr.ingoing.coef);
        double dist = std::max({coeff_distance(e.p, back.p), coeff_distance(e.q, back.q),
                                std::abs(e.t - back.t)});
        out["roundtrip_distance"] = dist;
    } else if (op == "check") {
        NeretinElement e = neretin_from(req.at("element"));
        out["p"] = diffeo_report(e.p);
        out["q"] = diffeo_report(e.q);
        out["t"] = e.t;
    } else {
        throw std::invalid_argument("weld: unknown op '" + op + "'");
    }
}

void run_train(const std::string& op, const Json& req, const RunConfig& cfg, Json& out) {
    if (op == "genus") {
        TrainMorphism m = word_from(req.at("word"));
        out["in"] = m.nin;
        out["out"] = m.nout;
        out["components"] = m.components();
        Json genus = Json::array();
        for (long c = 0; c < m.components(); ++c) genus.push_back(m.genus_of(c));
        out["genus"] = std::move(genus);
        out["total"] = m.genus();
    } else if (op == "eval") {
        FunctorData F = mobius_functor(req.contains("h") ? rat_from(req.at("h")) : Rat(1),
                                       req.value("level", cfg.level));
        TrainEval e = evaluate(F, word_from(req.at("word")));
        out["rows"] = e.op.size();
        out["cols"] = e.op.empty() ? 0 : e.op[0].size();
        out["scale"] = rat_str(e.scale);
        out["op"] = rmat_json(e.op);
    } else if (op == "defect") {
        FunctorData F = mobius_functor(req.contains("h") ? rat_from(req.at("h")) : Rat(1),
                                       req.value("level", cfg.level));
        TrainMorphism f1 = word_from(req.at("lhs")), f2 = word_from(req.at("rhs"));
        TailProfile d = defect(F, f1, f2);
        out["total"] = d.total;
        out["right_tail"] = d.right_tail;
        out["left_tail"] = d.left_tail;
    } else {
        throw std::invalid_argument("train: unknown op '" + op + "'");
    }
}

}  // namespace

std::string run_command(const std::string& command, const std::string& request,
                        const RunConfig& cfg) {
    Json req = request.empty() ? Json::object() : Json::parse(request);
    if (!req.is_object()) throw std::invalid_argument("a request wants a JSON object");
    std::string op = req.value("op", "");
    Json out;
    out["schema"] = "1";
    out["command"] = command;
    out["op"] = op;
    if (command == "mobius")
        run_mobius(op, req, out);
    else if (command == "algebra")
        run_algebra(op, req, out);
    else if (command == "verma")
        run_verma(op, req, cfg, out);
    else if (command == "qpft")
        run_qpft(op, req, cfg, out);
    else if (command == "weld")
        run_weld(op, req, cfg, out);
    else if (command == "train")
        run_train(op, req, cfg, out);
    else
        throw std::invalid_argument("unknown command '" + command + "'");
    return out.dump(2);
}

}  // namespace virlab
