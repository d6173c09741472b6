#pragma once

// JSON form of domains, sets and function recipes. Doubles are written with
// round-trip precision, so a serialized set reproduces the same rasterization.

#include <string>
#include <vector>

#include <json.hpp>

#include "pshlab/error.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/psh_corpus.hpp"

namespace pshlab {

using Json = nlohmann::ordered_json;

/// Error raised while reading a document; carries the JSON path of the field.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(ErrorKind::InvalidConfig, (path.empty() ? std::string("<root>") : path) + ": " + what),
          path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

namespace io {

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

inline double number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline double number(const Json& j, const std::string& key, const std::string& path) {
    return number(field(j, key, path), join(path, key));
}

inline double number_or(const Json& j, const std::string& key, double fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    return number(j.at(key), join(path, key));
}

inline long long integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<long long>();
}

inline long long integer_or(const Json& j, const std::string& key, long long fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    return integer(j.at(key), join(path, key));
}

inline std::string text(const Json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

inline std::string text_or(const Json& j, const std::string& key, const std::string& fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    return text(j.at(key), join(path, key));
}

inline const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    return j;
}

/// [re, im] or a bare real number.
inline Complex point(const Json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(path, "expected a point [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace io

// ---------------------------------------------------------------------------

inline Json to_json(const DomainSpec& d) {
    Json j = std::visit(
        [](const auto& s) -> Json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, domain::Disk>) {
                return {{"kind", "disk"}, {"center", io::to_json(s.center)}, {"radius", s.radius}};
            } else if constexpr (std::is_same_v<T, domain::Polydisk>) {
                Json c = Json::array();
                for (Complex z : s.centers) c.push_back(io::to_json(z));
                return {{"kind", "polydisk"}, {"centers", c}, {"radii", s.radii}};
            } else if constexpr (std::is_same_v<T, domain::Rectangle>) {
                return {{"kind", "rectangle"}, {"lo", io::to_json(s.lo)}, {"hi", io::to_json(s.hi)}};
            } else {
                return {{"kind", "ball"}, {"dimension", s.dimension}, {"radius", s.radius}};
            }
        },
        d.shape);
    if (!d.label.empty()) j["label"] = d.label;
    return j;
}

inline DomainSpec domain_from_json(const Json& j, const std::string& path) {
    const std::string kind = io::text(io::field(j, "kind", path), path + ".kind");
    const std::string label = io::text_or(j, "label", "", path);
    DomainSpec d;
    if (kind == "disk") {
        d = DomainSpec::disk(io::point(io::field(j, "center", path), path + ".center"), io::number(j, "radius", path),
                             label);
    } else if (kind == "polydisk") {
        std::vector<double> radii;
        const auto& r = io::array(io::field(j, "radii", path), path + ".radii");
        for (std::size_t i = 0; i < r.size(); ++i) radii.push_back(io::number(r[i], path + ".radii[" + std::to_string(i) + "]"));
        std::vector<Complex> centers(radii.size(), Complex{});
        if (j.contains("centers")) {
            const auto& c = io::array(j.at("centers"), path + ".centers");
            centers.clear();
            for (std::size_t i = 0; i < c.size(); ++i) centers.push_back(io::point(c[i], path + ".centers[" + std::to_string(i) + "]"));
        }
        d = DomainSpec::polydisk(std::move(centers), std::move(radii), label);
    } else if (kind == "rectangle") {
        d = DomainSpec::rectangle(io::point(io::field(j, "lo", path), path + ".lo"),
                                  io::point(io::field(j, "hi", path), path + ".hi"), label);
    } else if (kind == "ball") {
        d = DomainSpec::ball(static_cast<int>(io::integer(io::field(j, "dimension", path), path + ".dimension")),
                             io::number(j, "radius", path), label);
    } else {
        throw ConfigError(path + ".kind", "unknown domain kind '" + kind + "'");
    }
    try {
        d.validate();
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
    return d;
}

// ---------------------------------------------------------------------------

inline Json to_json(const CompactSetSpec& s) {
    Json j = std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, shape::Disk>) {
                return {{"kind", "disk"}, {"center", io::to_json(v.center)}, {"radius", v.radius}};
            } else if constexpr (std::is_same_v<T, shape::Segment>) {
                return {{"kind", "segment"}, {"a", io::to_json(v.a)}, {"b", io::to_json(v.b)}};
            } else if constexpr (std::is_same_v<T, shape::Annulus>) {
                return {{"kind", "annulus"}, {"center", io::to_json(v.center)}, {"inner", v.inner}, {"outer", v.outer}};
            } else if constexpr (std::is_same_v<T, shape::Cantor>) {
                return {{"kind", "cantor"}, {"a", io::to_json(v.a)}, {"b", io::to_json(v.b)}, {"level", v.level}};
            } else if constexpr (std::is_same_v<T, shape::Raster>) {
                std::vector<int> bits(v.bits.begin(), v.bits.end());
                return {{"kind", "raster"}, {"origin", io::to_json(v.origin)}, {"pixel", v.pixel},
                        {"width", v.width},  {"height", v.height},             {"bits", bits}};
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                Json parts = Json::array();
                for (const auto& p : v.parts) parts.push_back(to_json(p));
                return {{"kind", "union"}, {"parts", parts}};
            } else {
                Json f = Json::array();
                for (const auto& p : v.factors) f.push_back(to_json(p));
                return {{"kind", "product"}, {"factors", f}};
            }
        },
        s.shape);
    if (!s.label.empty()) j["label"] = s.label;
    return j;
}

inline CompactSetSpec set_from_json(const Json& j, const std::string& path) {
    const std::string kind = io::text(io::field(j, "kind", path), path + ".kind");
    const std::string label = io::text_or(j, "label", "", path);
    auto pt = [&](const char* key) { return io::point(io::field(j, key, path), path + "." + key); };
    auto list = [&](const char* key) {
        std::vector<CompactSetSpec> out;
        const auto& a = io::array(io::field(j, key, path), path + "." + key);
        for (std::size_t i = 0; i < a.size(); ++i) {
            out.push_back(set_from_json(a[i], path + "." + key + "[" + std::to_string(i) + "]"));
        }
        return out;
    };
    CompactSetSpec s;
    if (kind == "disk") {
        s = CompactSetSpec::disk(pt("center"), io::number(j, "radius", path), label);
    } else if (kind == "segment") {
        s = CompactSetSpec::segment(pt("a"), pt("b"), label);
    } else if (kind == "annulus") {
        s = CompactSetSpec::annulus(pt("center"), io::number(j, "inner", path), io::number(j, "outer", path), label);
    } else if (kind == "cantor") {
        s = CompactSetSpec::cantor(pt("a"), pt("b"),
                                   static_cast<int>(io::integer(io::field(j, "level", path), path + ".level")), label);
    } else if (kind == "union") {
        s = CompactSetSpec::set_union(list("parts"), label);
    } else if (kind == "product") {
        s = CompactSetSpec::product(list("factors"), label);
    } else if (kind == "raster") {
        shape::Raster r;
        r.origin = pt("origin");
        r.pixel = io::number(j, "pixel", path);
        r.width = static_cast<int>(io::integer(io::field(j, "width", path), path + ".width"));
        r.height = static_cast<int>(io::integer(io::field(j, "height", path), path + ".height"));
        const auto& bits = io::array(io::field(j, "bits", path), path + ".bits");
        for (std::size_t i = 0; i < bits.size(); ++i) {
            r.bits.push_back(io::integer(bits[i], path + ".bits[" + std::to_string(i) + "]") != 0 ? 1 : 0);
        }
        s = CompactSetSpec::raster(std::move(r), label);
    } else {
        throw ConfigError(path + ".kind", "unknown set kind '" + kind + "'");
    }
    try {
        detail::validate_set(s);
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
    return s;
}

// ---------------------------------------------------------------------------

inline Json to_json(const PshFunctionSpec& f) {
    Json j = std::visit(
        [](const auto& r) -> Json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, recipe::LogPoly>) {
                Json roots = Json::array();
                for (Complex z : r.roots) roots.push_back(io::to_json(z));
                return {{"recipe", "scaled-log-poly"}, {"roots", roots}, {"scale", r.scale}};
            } else if constexpr (std::is_same_v<T, recipe::Max>) {
                Json c = Json::array();
                for (const auto& ch : r.children) c.push_back(to_json(ch));
                return {{"recipe", "max-combination"}, {"children", c}};
            } else {
                return {{"recipe", "shifted"}, {"child", to_json(*r.child)}, {"constant", r.constant}};
            }
        },
        f.recipe);
    if (f.multiplier != 1.0) j["multiplier"] = f.multiplier;
    if (f.offset != 0.0) j["offset"] = f.offset;
    if (!f.label.empty()) j["label"] = f.label;
    return j;
}

inline const char* to_string(RootPlacement p) {
    switch (p) {
        case RootPlacement::InsideE: return "inside-E";
        case RootPlacement::InsideA: return "inside-A";
        case RootPlacement::Annular: return "annular";
        case RootPlacement::Mixed: return "mixed";
    }
    return "mixed";
}

inline RootPlacement placement_from_string(const std::string& s, const std::string& path) {
    if (s == "inside-E") return RootPlacement::InsideE;
    if (s == "inside-A") return RootPlacement::InsideA;
    if (s == "annular") return RootPlacement::Annular;
    if (s == "mixed") return RootPlacement::Mixed;
    throw ConfigError(path, "unknown root placement '" + s + "'");
}

}  // namespace pshlab
