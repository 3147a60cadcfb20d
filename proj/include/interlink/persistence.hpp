#pragma once

// Persistence-module algebra over Z/2: filtered complexes, barcode extraction by
// column reduction, rank queries and shifts.
//
// Filtration sublevels are strict throughout: the module at parameter t is the
// homology of the subcomplex generated by filtration < t. A generator born at a
// and killed at b therefore contributes the half-open bar (a, b].

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "interlink/errors.hpp"

namespace interlink::persistence {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bar {
    double left = 0;   // finite, strictly below right
    double right = 0;  // may be +inf
    int degree = 0;

    friend bool operator==(const Bar& a, const Bar& b) {
        return a.left == b.left && a.right == b.right && a.degree == b.degree;
    }
};

inline bool canonical_less(const Bar& a, const Bar& b) {
    return std::tie(a.left, a.right, a.degree) < std::tie(b.left, b.right, b.degree);
}

// Multiset of bars in canonical (left, right, degree) order. Multiplicity is
// represented by repetition.
struct Barcode {
    std::vector<Bar> bars;

    static Barcode from_bars(std::vector<Bar> b) {
        std::sort(b.begin(), b.end(), canonical_less);
        return Barcode{std::move(b)};
    }

    friend bool operator==(const Barcode& a, const Barcode& b) { return a.bars == b.bars; }
};

struct Generator {
    std::string id;
    int degree = 0;
    double filtration = 0;
};

// Z/2 chain complex with real filtration values and a degree-lowering boundary.
class FilteredComplex {
  public:
    int add_generator(std::string id, int degree, double filtration) {
        generators_.push_back(Generator{std::move(id), degree, filtration});
        boundary_.emplace_back();
        return static_cast<int>(generators_.size()) - 1;
    }

    // rows: indices of the generators appearing in the boundary of generator j.
    void set_boundary(int j, std::vector<int> rows) {
        std::sort(rows.begin(), rows.end());
        boundary_.at(static_cast<std::size_t>(j)) = std::move(rows);
    }

    std::size_t size() const { return generators_.size(); }
    const Generator& generator(int i) const { return generators_.at(static_cast<std::size_t>(i)); }
    const std::vector<Generator>& generators() const { return generators_; }
    const std::vector<int>& boundary(int j) const { return boundary_.at(static_cast<std::size_t>(j)); }

    // Checks degree lowering, filtration monotonicity and boundary^2 = 0 over Z/2.
    void validate() const {
        const int n = static_cast<int>(generators_.size());
        for (int j = 0; j < n; ++j) {
            for (int i : boundary_[static_cast<std::size_t>(j)]) {
                if (i < 0 || i >= n)
                    throw malformed_complex_error("boundary entry out of range");
                if (generators_[static_cast<std::size_t>(i)].degree !=
                    generators_[static_cast<std::size_t>(j)].degree - 1)
                    throw malformed_complex_error("boundary must lower degree by exactly 1");
                if (generators_[static_cast<std::size_t>(i)].filtration >
                    generators_[static_cast<std::size_t>(j)].filtration)
                    throw malformed_complex_error("boundary must not increase filtration");
            }
        }
        for (int j = 0; j < n; ++j) {
            // boundary of boundary over Z/2
            std::vector<int> acc;
            for (int i : boundary_[static_cast<std::size_t>(j)]) {
                std::vector<int> merged;
                std::set_symmetric_difference(acc.begin(), acc.end(),
                                              boundary_[static_cast<std::size_t>(i)].begin(),
                                              boundary_[static_cast<std::size_t>(i)].end(),
                                              std::back_inserter(merged));
                acc = std::move(merged);
            }
            if (!acc.empty()) throw malformed_complex_error("boundary^2 != 0");
        }
    }

  private:
    std::vector<Generator> generators_;
    std::vector<std::vector<int>> boundary_;
};

namespace detail {

// Symmetric difference of sorted index vectors (Z/2 column addition).
inline void xor_into(std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> merged;
    merged.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(merged));
    a = std::move(merged);
}

} // namespace detail

// Standard persistence column reduction with lowest-one pairing. Columns are
// processed in (filtration, input index) order, so the pairing is deterministic;
// the resulting multiset of bars depends only on the persistence module.
inline Barcode reduce_barcode(const FilteredComplex& complex) {
    complex.validate();
    const int n = static_cast<int>(complex.size());

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return complex.generator(a).filtration < complex.generator(b).filtration;
    });
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;

    // Columns indexed by position, entries are positions, kept sorted ascending.
    std::vector<std::vector<int>> cols(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const int j = order[static_cast<std::size_t>(k)];
        std::vector<int> c;
        c.reserve(complex.boundary(j).size());
        for (int i : complex.boundary(j)) c.push_back(pos[static_cast<std::size_t>(i)]);
        std::sort(c.begin(), c.end());
        cols[static_cast<std::size_t>(k)] = std::move(c);
    }

    std::vector<int> pivot_owner(static_cast<std::size_t>(n), -1);
    std::vector<bool> killed(static_cast<std::size_t>(n), false);
    std::vector<Bar> bars;

    for (int k = 0; k < n; ++k) {
        auto& col = cols[static_cast<std::size_t>(k)];
        while (!col.empty()) {
            const int low = col.back();
            const int owner = pivot_owner[static_cast<std::size_t>(low)];
            if (owner < 0) break;
            detail::xor_into(col, cols[static_cast<std::size_t>(owner)]);
        }
        if (col.empty()) continue;
        const int low = col.back();
        pivot_owner[static_cast<std::size_t>(low)] = k;
        killed[static_cast<std::size_t>(low)] = true;
        const Generator& born = complex.generator(order[static_cast<std::size_t>(low)]);
        const Generator& dies = complex.generator(order[static_cast<std::size_t>(k)]);
        if (born.filtration < dies.filtration)
            bars.push_back(Bar{born.filtration, dies.filtration, born.degree});
        // equal filtrations give the empty interval (a, a] and no bar
    }
    for (int k = 0; k < n; ++k) {
        if (killed[static_cast<std::size_t>(k)]) continue;
        if (!cols[static_cast<std::size_t>(k)].empty()) continue; // pairing column, consumed
        const Generator& g = complex.generator(order[static_cast<std::size_t>(k)]);
        bars.push_back(Bar{g.filtration, kInf, g.degree});
    }
    return Barcode::from_bars(std::move(bars));
}

// Rank of the persistence map between strict sublevels s -> t in one degree:
// the number of bars (a, b] with a < s and t <= b.
inline int rank_map(const Barcode& barcode, double s, double t, int degree) {
    if (s > t) throw argument_error("rank_map requires s <= t");
    int count = 0;
    for (const Bar& bar : barcode.bars)
        if (bar.degree == degree && bar.left < s && t <= bar.right) ++count;
    return count;
}

// Shift of the filtration parameter: each (a, b] becomes (a - c, b - c].
inline Barcode shift_barcode(const Barcode& barcode, double c) {
    std::vector<Bar> bars;
    bars.reserve(barcode.bars.size());
    for (const Bar& bar : barcode.bars)
        bars.push_back(Bar{bar.left - c, bar.right == kInf ? kInf : bar.right - c, bar.degree});
    return Barcode::from_bars(std::move(bars));
}

inline bool has_nonpositive_left_bar(const Barcode& barcode) {
    for (const Bar& bar : barcode.bars)
        if (bar.left <= 0) return true;
    return false;
}

// A bar (mu, nu] with mu > 0 and nu/mu >= C (semi-infinite bars count as ratio
// infinity). Among eligible bars the one with the smallest mu wins; ties break
// toward the larger nu, then the lower degree.
inline std::optional<Bar> find_bar_with_ratio(const Barcode& barcode, double ratio) {
    if (!(ratio > 1.0)) throw argument_error("bar ratio threshold must exceed 1");
    std::optional<Bar> best;
    for (const Bar& bar : barcode.bars) {
        if (!(bar.left > 0)) continue;
        const bool qualifies =
            bar.right == kInf || bar.right >= ratio * bar.left;
        if (!qualifies) continue;
        if (!best || std::tie(bar.left, best->right, bar.degree) <
                         std::tie(best->left, bar.right, best->degree))
            best = bar;
    }
    return best;
}

// Barcode-level certificate for a persistent element: given a bar (a, b], an
// element of V_{a+delta} survives to s and avoids the image from sigma <= a iff
// the rank from a+delta exceeds the rank from sigma.
inline bool witness_rank_gap(const Barcode& barcode, double a, double b, double delta,
                             double s, double sigma, int degree) {
    if (!(delta > 0)) throw argument_error("witness_rank_gap requires delta > 0");
    if (!(a + delta <= s && s <= b)) throw argument_error("witness_rank_gap requires a+delta <= s <= b");
    if (!(sigma <= a)) throw argument_error("witness_rank_gap requires sigma <= a");
    return rank_map(barcode, a + delta, s, degree) > rank_map(barcode, sigma, s, degree);
}

inline nlohmann::json to_json(const Bar& bar) {
    nlohmann::json j;
    j["left"] = bar.left;
    if (bar.right == kInf)
        j["right"] = "inf";
    else
        j["right"] = bar.right;
    j["degree"] = bar.degree;
    return j;
}

inline nlohmann::json to_json(const Barcode& barcode) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Bar& bar : barcode.bars) arr.push_back(to_json(bar));
    return arr;
}

inline Bar bar_from_json(const nlohmann::json& j) {
    Bar bar;
    bar.left = j.at("left").get<double>();
    if (j.at("right").is_string())
        bar.right = kInf;
    else
        bar.right = j.at("right").get<double>();
    bar.degree = j.at("degree").get<int>();
    return bar;
}

inline Barcode barcode_from_json(const nlohmann::json& j) {
    std::vector<Bar> bars;
    for (const auto& item : j) bars.push_back(bar_from_json(item));
    return Barcode::from_bars(std::move(bars));
}

} // namespace interlink::persistence
