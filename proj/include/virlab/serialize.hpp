#pragma once

#include <json.hpp>

#include "virlab/mobius.hpp"
#include "virlab/train.hpp"
#include "virlab/welding.hpp"

namespace virlab {

// Wire format used by the command layer: exact rationals as strings,
// Gaussian rationals as ["re","im"] pairs, sampled coefficients as
// [re,im] float pairs.  Keys keep their insertion order.
using Json = nlohmann::ordered_json;

Rat rat_from(const Json& j);
Json ratc_json(const RatC& z);
RatC ratc_from(const Json& j);

Json mobius_json(const MobiusMap& f);
MobiusMap mobius_from(const Json& j);

Json rmat_json(const RatMat& m);
RatMat rmat_from(const Json& j);

// Coefficient list of length 2M+1, index k+M for the z^k coefficient.
Json coef_json(const std::vector<Cpx>& coef);
std::vector<Cpx> coef_from(const Json& j);

// {"p": [[re,im],...], "t": t, "q": [[re,im],...], "M": modes}
Json neretin_json(const NeretinElement& e);
NeretinElement neretin_from(const Json& j);

// A word is an array of layers; a layer is a letter or an array of
// parallel letters; a letter is "annulus", "annulus:<a,b,c>", "trinion",
// "antitrinion" or {"perm": [..]}.
TrainLetter letter_from(const Json& j);
TrainMorphism word_from(const Json& j);

}  // namespace virlab
