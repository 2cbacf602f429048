// Flat quotient manifolds realized through their universal cover R^d:
// deck transformations, orbit enumeration, minimal-image distances and
// fundamental-domain projection for the flat torus T^d, the flat Mobius
// strip M and the flat Klein bottle K (plus plain Euclidean space).
//
// Deck elements are encoded as a flip parity f plus an integer translation t,
// acting on the cover as  x |-> J^f(x) + t  where J negates the second
// coordinate. The groups are:
//   Euclidean : identity only
//   T^d       : f = 0, t in Z^d
//   M         : t = (n, 0), f = n mod 2
//   K         : t = (n, m), f = n mod 2
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "covercs/vec.hpp"

namespace covercs {

enum class ManifoldKind { Euclidean, FlatTorus, MobiusStrip, KleinBottle };

std::string to_string(ManifoldKind kind);

struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::FlatTorus;
    int dimension = 2;

    // Throws std::invalid_argument on unsupported kind/dimension combinations.
    void validate() const;

    // Rank of the deck translation lattice (0 for Euclidean, d for T^d,
    // 1 for M, 2 for K).
    int lattice_rank() const;

    bool has_flip_classes() const {
        return kind == ManifoldKind::MobiusStrip || kind == ManifoldKind::KleinBottle;
    }
};

struct DeckElement {
    int flip = 0;                       // 0: identity on second coordinate, 1: negate it
    std::vector<std::int64_t> translation;

    bool operator==(const DeckElement&) const = default;
};

DeckElement identity_element(const ManifoldSpec& m);

// Group law: (g o h)(x) = g(h(x)).
DeckElement compose(const ManifoldSpec& m, const DeckElement& g, const DeckElement& h);
DeckElement inverse(const ManifoldSpec& m, const DeckElement& g);

bool is_valid_element(const ManifoldSpec& m, const DeckElement& g);

// J^flip(x) + translation. Throws if g is inconsistent with the manifold.
Vec apply_deck(const ManifoldSpec& m, const DeckElement& g, std::span<const double> x);

// Derivative action on tangent vectors: J^flip(v); translations drop out.
Vec pushforward(const ManifoldSpec& m, const DeckElement& g, std::span<const double> v);

struct OrbitImage {
    Vec point;
    DeckElement element;
    double distance = 0.0;
};

// All orbit points g(target) with |g(target) - source| <= radius, sorted by
// distance (ties: flip 0 first, then lexicographically smaller translation).
std::vector<OrbitImage> images_within(const ManifoldSpec& m, std::span<const double> source,
                                      std::span<const double> target, double radius);

struct MinImage {
    double distance = 0.0;
    DeckElement element;
};

// Minimum of |g(y) - x| over the deck orbit, with an achieving element.
// Ties broken flip 0 before flip 1, then lexicographically smallest translation.
MinImage min_image_distance(const ManifoldSpec& m, std::span<const double> x,
                            std::span<const double> y);

// Minimum over one flip class only (parity 0 or 1); M and K have both classes,
// T^d and Euclidean space only parity 0.
MinImage class_min_distance(const ManifoldSpec& m, std::span<const double> x,
                            std::span<const double> y, int parity);

// Covering map and its derivative: returns (p(x), Dp(v)) with p(x) in the
// fundamental domain ([0,1)^d for T^d, [0,1) x R for M, [0,1)^2 for K).
std::pair<Vec, Vec> project_to_fundamental_domain(const ManifoldSpec& m, std::span<const double> x,
                                                  std::span<const double> v);

}  // namespace covercs
