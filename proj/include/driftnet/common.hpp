#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace driftnet {

using NodeId = std::uint64_t;
using Step = std::int64_t;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double norm2(const Vec2& v) { return v.x * v.x + v.y * v.y; }

inline double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

// Validation failure that names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& constraint)
        : std::runtime_error(field + ": " + constraint), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
public:
    IoError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline void require(bool ok, const std::string& field, const std::string& constraint) {
    if (!ok) throw ConfigError(field, constraint);
}

} // namespace driftnet
