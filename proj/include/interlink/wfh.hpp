#pragma once

// Filtered Morse complex of the based path space between two points, built
// from the geodesic spectrum: one generator per geodesic, degree = Morse
// index, filtration = length. Its barcode is the wrapped-Floer barcode of the
// corresponding pair of cotangent fibers.
//
// The boundary map is zero for both shipped models, and this is asserted
// rather than assumed: on a flat torus every generator sits in degree 0, and
// on the round sphere there is exactly one generator per degree (so a
// degree-lowering differential with rank-1 homology in each degree vanishes).
// A spectrum violating both patterns is refused: it would require a genuine
// Morse differential.

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "interlink/errors.hpp"
#include "interlink/manifolds.hpp"
#include "interlink/persistence.hpp"

namespace interlink::wfh {

using manifolds::GeodesicRecord;
using persistence::Barcode;
using persistence::FilteredComplex;

namespace detail {

inline std::string generator_id(const GeodesicRecord& rec) {
    std::ostringstream os;
    os << "geo[";
    for (std::size_t i = 0; i < rec.class_tag.size(); ++i) {
        if (i) os << ",";
        os << rec.class_tag[i];
    }
    os << "]";
    return os.str();
}

inline void check_zero_differential_is_forced(const std::vector<GeodesicRecord>& spectrum) {
    bool all_degree_zero = true;
    for (const auto& rec : spectrum) all_degree_zero &= (rec.morse_index == 0);
    if (all_degree_zero) return;
    // otherwise demand exactly one generator per degree 0..max
    std::vector<int> count;
    for (const auto& rec : spectrum) {
        if (rec.morse_index >= static_cast<int>(count.size()))
            count.resize(static_cast<std::size_t>(rec.morse_index) + 1, 0);
        ++count[static_cast<std::size_t>(rec.morse_index)];
    }
    for (int c : count)
        if (c != 1)
            throw domain_error(
                "spectrum does not force a zero differential; this model would need "
                "a genuine Morse differential, which is not implemented");
}

} // namespace detail

// One generator per geodesic, degree = Morse index, filtration = length,
// tagged with where it came from.
struct PathSpaceComplex {
    FilteredComplex complex;
    nlohmann::json provenance; // manifold, x, y, cutoff
};

template <class M>
PathSpaceComplex path_space_complex(const M& manifold, const typename M::Point& x,
                                    const typename M::Point& y, double cutoff) {
    if (!manifold.nonconjugate(x, y))
        throw non_morse_error("conjugate endpoints: the energy functional is not Morse");
    const double d = manifold.distance(x, y);
    PathSpaceComplex out;
    out.provenance["manifold"] = manifold.to_json();
    out.provenance["x"] = x;
    out.provenance["y"] = y;
    out.provenance["cutoff"] = cutoff;
    if (!(cutoff > d)) return out; // empty: no geodesic below the cutoff
    const auto spectrum = manifold.spectrum(x, y, cutoff);
    detail::check_zero_differential_is_forced(spectrum);
    for (const auto& rec : spectrum)
        out.complex.add_generator(detail::generator_id(rec), rec.morse_index, rec.length);
    return out;
}

template <class M>
Barcode wfh_barcode(const M& manifold, const typename M::Point& x, const typename M::Point& y,
                    double cutoff) {
    const FilteredComplex complex = path_space_complex(manifold, x, y, cutoff).complex;
    Barcode barcode = persistence::reduce_barcode(complex);
    if (!complex.generators().empty()) {
        // the minimizing geodesic generates a semi-infinite bar (d, inf) in degree 0
        const double d = manifold.distance(x, y);
        bool found = false;
        for (const auto& bar : barcode.bars)
            found |= (bar.degree == 0 && bar.left == d && bar.right == persistence::kInf);
        if (!found)
            throw std::logic_error("missing (distance, inf) bar in degree 0");
    }
    return barcode;
}

// Report with honest truncation semantics: the computation only sees lengths
// below the cutoff, so semi-infinite bars are certified only up to it.
struct BarcodeReport {
    nlohmann::json manifold;
    nlohmann::json x;
    nlohmann::json y;
    double cutoff = 0;
    double distance = 0;
    Barcode barcode;
    double certified_to = 0;
};

template <class M>
BarcodeReport barcode_report(const M& manifold, const typename M::Point& x,
                             const typename M::Point& y, double cutoff) {
    BarcodeReport rep;
    rep.manifold = manifold.to_json();
    rep.x = x;
    rep.y = y;
    rep.cutoff = cutoff;
    rep.distance = manifold.distance(x, y);
    rep.barcode = wfh_barcode(manifold, x, y, cutoff);
    rep.certified_to = cutoff;
    return rep;
}

inline nlohmann::json to_json(const BarcodeReport& rep) {
    nlohmann::json j;
    j["manifold"] = rep.manifold;
    j["x"] = rep.x;
    j["y"] = rep.y;
    j["cutoff"] = rep.cutoff;
    j["distance"] = rep.distance;
    j["bars"] = persistence::to_json(rep.barcode);
    j["certified_to"] = rep.certified_to;
    return j;
}

} // namespace interlink::wfh
