#include "virlab/rational.hpp"

namespace virlab {

namespace {

Rat parse_signed_unit(const std::string& s) {
    if (s.empty() || s == "+") return Rat(1);
    if (s == "-") return Rat(-1);
    return rat_parse(s[0] == '+' ? s.substr(1) : s);
}

}  // namespace

RatC ratc_parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty complex rational");
    if (s.back() != 'i') return RatC(rat_parse(s));
    std::string body = s.substr(0, s.size() - 1);
    // Split "re±im": the last sign that is not the leading one separates the parts.
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if (body[k] == '+' || body[k] == '-') { split = k; break; }
    }
    if (split == std::string::npos) return {Rat(0), parse_signed_unit(body)};
    return {rat_parse(body.substr(0, split)), parse_signed_unit(body.substr(split))};
}

std::string ratc_str(const RatC& z) {
    if (z.im == 0) return rat_str(z.re);
    std::string im;
    if (z.im == 1) im = "i";
    else if (z.im == -1) im = "-i";
    else im = rat_str(z.im) + "i";
    if (z.re == 0) return im;
    if (im[0] == '-') return rat_str(z.re) + im;
    return rat_str(z.re) + "+" + im;
}

}  // namespace virlab
