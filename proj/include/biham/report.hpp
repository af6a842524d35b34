#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace biham {

/// One verified relation: the raw residual norm and the limit it was held to.
struct Residual {
    std::string name;
    double value = 0.0;
    double limit = 0.0;

    [[nodiscard]] bool ok() const { return value <= limit; }
};

/// Ordered list of residuals. A report passes when every entry does.
class CheckReport {
public:
    CheckReport() = default;

    void add(std::string name, double value, double limit) {
        items_.push_back({std::move(name), value, limit});
    }
    void append(const CheckReport& other) {
        items_.insert(items_.end(), other.items_.begin(), other.items_.end());
    }

    [[nodiscard]] bool ok() const {
        for (const auto& r : items_)
            if (!r.ok()) return false;
        return true;
    }
    [[nodiscard]] std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& r : items_)
            if (!r.ok()) out.push_back(r.name);
        return out;
    }
    [[nodiscard]] const Residual* find(const std::string& name) const {
        for (const auto& r : items_)
            if (r.name == name) return &r;
        return nullptr;
    }
    [[nodiscard]] double max_value() const {
        double m = 0.0;
        for (const auto& r : items_) m = r.value > m ? r.value : m;
        return m;
    }
    [[nodiscard]] const std::vector<Residual>& items() const { return items_; }

private:
    std::vector<Residual> items_;
};

/// Result of a check that either produces a validated object or a violation
/// report explaining which relation failed.
template <class T>
struct Checked {
    std::optional<T> value;
    CheckReport report;

    [[nodiscard]] bool ok() const { return value.has_value(); }
    explicit operator bool() const { return ok(); }
};

}  // namespace biham
