#include "covercs/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covercs {

namespace {

int parity_of(std::int64_t n) { return static_cast<int>(((n % 2) + 2) % 2); }

std::int64_t floor_ll(double x) { return static_cast<std::int64_t>(std::floor(x)); }

double fractional(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;  // guards against rounding at exact integers
    return f;
}

void check_point(const ManifoldSpec& m, std::span<const double> x, const char* what) {
    if (static_cast<int>(x.size()) != m.dimension)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Nearest value of u + s*q over q in Z, ties resolved toward the smaller q.
struct AxisMin {
    double value;
    std::int64_t q;
};

AxisMin axis_min(double u, double s) {
    const std::int64_t q0 = floor_ll(-u / s);
    const double a = u + s * static_cast<double>(q0);
    const double b = u + s * static_cast<double>(q0 + 1);
    if (std::abs(a) <= std::abs(b)) return {a, q0};
    return {b, q0 + 1};
}

bool lex_less(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Per-class minimal image. For parity f the admissible translations are
//   T^d      : f = 0, t in Z^d
//   M        : t = (f + 2q, 0)
//   K        : t = (f + 2q, m)
MinImage class_min(const ManifoldSpec& m, std::span<const double> x, std::span<const double> y,
                   int parity) {
    const int d = m.dimension;
    MinImage out;
    out.element.flip = parity;
    out.element.translation.assign(d, 0);

    switch (m.kind) {
        case ManifoldKind::Euclidean: {
            out.distance = dist(x, y);
            return out;
        }
        case ManifoldKind::FlatTorus: {
            double sq = 0.0;
            for (int j = 0; j < d; ++j) {
                const AxisMin am = axis_min(y[j] - x[j], 1.0);
                sq += am.value * am.value;
                out.element.translation[j] = am.q;
            }
            out.distance = std::sqrt(sq);
            return out;
        }
        case ManifoldKind::MobiusStrip: {
            const double c = (parity ? -y[1] : y[1]) - x[1];
            const AxisMin am = axis_min(y[0] - x[0] + parity, 2.0);
            out.element.translation[0] = parity + 2 * am.q;
            out.element.translation[1] = 0;
            out.distance = std::sqrt(am.value * am.value + c * c);
            return out;
        }
        case ManifoldKind::KleinBottle: {
            const AxisMin a1 = axis_min(y[0] - x[0] + parity, 2.0);
            const AxisMin a2 = axis_min((parity ? -y[1] : y[1]) - x[1], 1.0);
            out.element.translation[0] = parity + 2 * a1.q;
            out.element.translation[1] = a2.q;
            out.distance = std::sqrt(a1.value * a1.value + a2.value * a2.value);
            return out;
        }
    }
    throw std::logic_error("unreachable manifold kind");
}

}  // namespace

std::string to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::Euclidean: return "euclidean";
        case ManifoldKind::FlatTorus: return "flat_torus";
        case ManifoldKind::MobiusStrip: return "mobius_strip";
        case ManifoldKind::KleinBottle: return "klein_bottle";
    }
    return "?";
}

void ManifoldSpec::validate() const {
    if (dimension < 1) throw std::invalid_argument("manifold dimension must be >= 1");
    if (dimension > 8) throw std::invalid_argument("manifold dimension must be <= 8");
    if ((kind == ManifoldKind::MobiusStrip || kind == ManifoldKind::KleinBottle) && dimension != 2)
        throw std::invalid_argument(to_string(kind) + " requires dimension 2");
}

int ManifoldSpec::lattice_rank() const {
    switch (kind) {
        case ManifoldKind::Euclidean: return 0;
        case ManifoldKind::FlatTorus: return dimension;
        case ManifoldKind::MobiusStrip: return 1;
        case ManifoldKind::KleinBottle: return 2;
    }
    return 0;
}

DeckElement identity_element(const ManifoldSpec& m) {
    DeckElement g;
    g.flip = 0;
    g.translation.assign(m.dimension, 0);
    return g;
}

bool is_valid_element(const ManifoldSpec& m, const DeckElement& g) {
    if (static_cast<int>(g.translation.size()) != m.dimension) return false;
    if (g.flip != 0 && g.flip != 1) return false;
    switch (m.kind) {
        case ManifoldKind::Euclidean: {
            if (g.flip != 0) return false;
            for (auto t : g.translation)
                if (t != 0) return false;
            return true;
        }
        case ManifoldKind::FlatTorus: return g.flip == 0;
        case ManifoldKind::MobiusStrip:
            return g.translation[1] == 0 && g.flip == parity_of(g.translation[0]);
        case ManifoldKind::KleinBottle: return g.flip == parity_of(g.translation[0]);
    }
    return false;
}

namespace {
void require_valid(const ManifoldSpec& m, const DeckElement& g) {
    if (!is_valid_element(m, g))
        throw std::invalid_argument("deck element inconsistent with manifold " +
                                    to_string(m.kind));
}
}  // namespace

DeckElement compose(const ManifoldSpec& m, const DeckElement& g, const DeckElement& h) {
    require_valid(m, g);
    require_valid(m, h);
    DeckElement r;
    r.flip = g.flip ^ h.flip;
    r.translation = h.translation;
    if (g.flip && m.dimension >= 2) r.translation[1] = -r.translation[1];
    for (int j = 0; j < m.dimension; ++j) r.translation[j] += g.translation[j];
    return r;
}

DeckElement inverse(const ManifoldSpec& m, const DeckElement& g) {
    require_valid(m, g);
    DeckElement r;
    r.flip = g.flip;
    r.translation = g.translation;
    if (g.flip && m.dimension >= 2) r.translation[1] = -r.translation[1];
    for (auto& t : r.translation) t = -t;
    return r;
}

Vec apply_deck(const ManifoldSpec& m, const DeckElement& g, std::span<const double> x) {
    require_valid(m, g);
    check_point(m, x, "apply_deck");
    Vec y(x.begin(), x.end());
    if (g.flip) y[1] = -y[1];
    for (int j = 0; j < m.dimension; ++j) y[j] += static_cast<double>(g.translation[j]);
    return y;
}

Vec pushforward(const ManifoldSpec& m, const DeckElement& g, std::span<const double> v) {
    require_valid(m, g);
    check_point(m, v, "pushforward");
    Vec w(v.begin(), v.end());
    if (g.flip) w[1] = -w[1];
    return w;
}

std::vector<OrbitImage> images_within(const ManifoldSpec& m, std::span<const double> source,
                                      std::span<const double> target, double radius) {
    check_point(m, source, "images_within");
    check_point(m, target, "images_within");
    if (radius < 0.0) throw std::invalid_argument("images_within: radius must be >= 0");

    std::vector<OrbitImage> out;
    const auto emit = [&](const DeckElement& g) {
        Vec p = apply_deck(m, g, target);
        const double r = dist(p, source);
        if (r <= radius) out.push_back({std::move(p), g, r});
    };

    const int d = m.dimension;
    switch (m.kind) {
        case ManifoldKind::Euclidean: {
            emit(identity_element(m));
            break;
        }
        case ManifoldKind::FlatTorus: {
            // Axis-aligned index box |delta_j + t_j| <= radius, filtered by
            // exact distance below.
            std::vector<std::int64_t> lo(d), hi(d), idx(d);
            for (int j = 0; j < d; ++j) {
                const double delta = target[j] - source[j];
                lo[j] = static_cast<std::int64_t>(std::ceil(-radius - delta));
                hi[j] = static_cast<std::int64_t>(std::floor(radius - delta));
                if (lo[j] > hi[j]) return out;
            }
            idx = lo;
            DeckElement g = identity_element(m);
            while (true) {
                g.translation = idx;
                emit(g);
                int j = d - 1;
                while (j >= 0 && idx[j] == hi[j]) {
                    idx[j] = lo[j];
                    --j;
                }
                if (j < 0) break;
                ++idx[j];
            }
            break;
        }
        case ManifoldKind::MobiusStrip: {
            for (int f = 0; f < 2; ++f) {
                const double c = (f ? -target[1] : target[1]) - source[1];
                if (std::abs(c) > radius) continue;
                const double room = std::sqrt(std::max(0.0, radius * radius - c * c));
                const double delta = target[0] - source[0];
                const auto nlo = static_cast<std::int64_t>(std::ceil(-room - delta));
                const auto nhi = static_cast<std::int64_t>(std::floor(room - delta));
                for (std::int64_t n = nlo; n <= nhi; ++n) {
                    if (parity_of(n) != f) continue;
                    emit(DeckElement{f, {n, 0}});
                }
            }
            break;
        }
        case ManifoldKind::KleinBottle: {
            for (int f = 0; f < 2; ++f) {
                const double d1 = target[0] - source[0];
                const double d2 = (f ? -target[1] : target[1]) - source[1];
                const auto nlo = static_cast<std::int64_t>(std::ceil(-radius - d1));
                const auto nhi = static_cast<std::int64_t>(std::floor(radius - d1));
                for (std::int64_t n = nlo; n <= nhi; ++n) {
                    if (parity_of(n) != f) continue;
                    const double a = d1 + static_cast<double>(n);
                    const double room = std::sqrt(std::max(0.0, radius * radius - a * a));
                    const auto mlo = static_cast<std::int64_t>(std::ceil(-room - d2));
                    const auto mhi = static_cast<std::int64_t>(std::floor(room - d2));
                    for (std::int64_t mm = mlo; mm <= mhi; ++mm) emit(DeckElement{f, {n, mm}});
                }
            }
            break;
        }
    }

    std::sort(out.begin(), out.end(), [](const OrbitImage& a, const OrbitImage& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        if (a.element.flip != b.element.flip) return a.element.flip < b.element.flip;
        return lex_less(a.element.translation, b.element.translation);
    });
    return out;
}

MinImage min_image_distance(const ManifoldSpec& m, std::span<const double> x,
                            std::span<const double> y) {
    check_point(m, x, "min_image_distance");
    check_point(m, y, "min_image_distance");
    MinImage best = class_min(m, x, y, 0);
    if (m.has_flip_classes()) {
        MinImage odd = class_min(m, x, y, 1);
        if (odd.distance < best.distance) best = odd;
    }
    return best;
}

MinImage class_min_distance(const ManifoldSpec& m, std::span<const double> x,
                            std::span<const double> y, int parity) {
    check_point(m, x, "class_min_distance");
    check_point(m, y, "class_min_distance");
    if (parity != 0 && parity != 1) throw std::invalid_argument("parity must be 0 or 1");
    if (parity == 1 && !m.has_flip_classes())
        throw std::invalid_argument("manifold " + to_string(m.kind) + " has no odd class");
    return class_min(m, x, y, parity);
}

std::pair<Vec, Vec> project_to_fundamental_domain(const ManifoldSpec& m, std::span<const double> x,
                                                  std::span<const double> v) {
    check_point(m, x, "project_to_fundamental_domain");
    check_point(m, v, "project_to_fundamental_domain");
    Vec px(x.begin(), x.end());
    Vec pv(v.begin(), v.end());
    switch (m.kind) {
        case ManifoldKind::Euclidean: break;
        case ManifoldKind::FlatTorus: {
            for (auto& c : px) c = fractional(c);
            break;
        }
        case ManifoldKind::MobiusStrip: {
            const bool odd = parity_of(floor_ll(x[0])) == 1;
            px[0] = fractional(x[0]);
            if (odd) {
                px[1] = -x[1];
                pv[1] = -v[1];
            }
            break;
        }
        case ManifoldKind::KleinBottle: {
            const bool odd = parity_of(floor_ll(x[0])) == 1;
            px[0] = fractional(x[0]);
            px[1] = odd ? fractional(-x[1]) : fractional(x[1]);
            if (odd) pv[1] = -v[1];
            break;
        }
    }
    return {std::move(px), std::move(pv)};
}

}  // namespace covercs
