#include "virlab/serialize.hpp"

#include <stdexcept>
#include <string>

namespace virlab {

Rat rat_from(const Json& j) {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_string()) return rat_parse(j.get<std::string>());
    throw std::invalid_argument("a rational wants a string like \"3/4\" or an integer");
}

Json ratc_json(const RatC& z) { return Json::array({rat_str(z.re), rat_str(z.im)}); }

RatC ratc_from(const Json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("a complex rational wants [\"re\",\"im\"]");
    return RatC{rat_from(j[0]), rat_from(j[1])};
}

Json mobius_json(const MobiusMap& f) {
    return Json{{"a", ratc_json(f.a)}, {"b", ratc_json(f.b)}, {"c", ratc_json(f.c)},
                {"d", ratc_json(f.d)}};
}

MobiusMap mobius_from(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("a mobius map wants keys a, b, c, d");
    return MobiusMap::make(ratc_from(j.at("a")), ratc_from(j.at("b")), ratc_from(j.at("c")),
                           ratc_from(j.at("d")));
}

Json rmat_json(const RatMat& m) {
    Json rows = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const Rat& x : row) r.push_back(rat_str(x));
        rows.push_back(std::move(r));
    }
    return rows;
}

RatMat rmat_from(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("a matrix wants an array of rows");
    RatMat m;
    for (const Json& row : j) {
        if (!row.is_array()) throw std::invalid_argument("a matrix row wants an array");
        std::vector<Rat> r;
        for (const Json& x : row) r.push_back(rat_from(x));
        if (!m.empty() && r.size() != m[0].size())
            throw std::invalid_argument("matrix rows differ in length");
        m.push_back(std::move(r));
    }
    return m;
}

Json coef_json(const std::vector<Cpx>& coef) {
    Json out = Json::array();
    for (const Cpx& c : coef) out.push_back(Json::array({c.real(), c.imag()}));
    return out;
}

std::vector<Cpx> coef_from(const Json& j) {
    if (!j.is_array() || j.size() % 2 == 0)
        throw std::invalid_argument("a coefficient list wants odd length 2M+1");
    std::vector<Cpx> coef;
    for (const Json& c : j) {
        if (!c.is_array() || c.size() != 2)
            throw std::invalid_argument("a coefficient wants [re, im]");
        coef.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    return coef;
}

Json neretin_json(const NeretinElement& e) {
    return Json{{"p", coef_json(e.p.coef)},
                {"t", e.t},
                {"q", coef_json(e.q.coef)},
                {"M", e.p.M}};
}

NeretinElement neretin_from(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("an element wants keys p, t, q");
    NeretinElement e;
    e.p.coef = coef_from(j.at("p"));
    e.q.coef = coef_from(j.at("q"));
    e.p.M = static_cast<int>(e.p.coef.size() / 2);
    e.q.M = static_cast<int>(e.q.coef.size() / 2);
    if (j.contains("M") && j.at("M").get<int>() != e.p.M)
        throw std::invalid_argument("field M disagrees with the p coefficient count");
    if (e.q.M != e.p.M) throw std::invalid_argument("p and q want the same mode count");
    e.t = j.at("t").get<double>();
    return e;
}

TrainLetter letter_from(const Json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "trinion") return trinion_letter();
        if (s == "antitrinion") return antitrinion_letter();
        if (s == "annulus") return annulus_letter();
        if (s.rfind("annulus:", 0) == 0) return annulus_letter(s.substr(8));
        throw std::invalid_argument("unknown letter '" + s + "'");
    }
    if (j.is_object() && j.contains("perm"))
        return perm_letter(j.at("perm").get<std::vector<long>>());
    throw std::invalid_argument(
        "a letter wants \"annulus[:a,b,c]\", \"trinion\", \"antitrinion\" or {\"perm\":[..]}");
}

TrainMorphism word_from(const Json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("a word wants a non-empty array of layers");
    TrainMorphism m;
    bool first = true;
    for (const Json& lj : j) {
        TrainLayer layer;
        if (lj.is_array())
            for (const Json& t : lj) layer.push_back(letter_from(t));
        else
            layer.push_back(letter_from(lj));
        TrainMorphism step = layer_morphism(layer);
        m = first ? step : sew(m, step);
        first = false;
    }
    return m;
}

}  // namespace virlab
