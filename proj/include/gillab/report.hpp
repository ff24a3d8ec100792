#pragma once

// Machine-readable check reports. Key order is fixed by insertion so that
// identical runs serialize to identical bytes.

#include "gillab/rational.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace gillab {

using Json = nlohmann::ordered_json;

inline Json jrat(const Rational& q) { return to_string(q); }

inline Json jrats(const std::vector<Rational>& qs)
{
    Json a = Json::array();
    for (const auto& q : qs) a.push_back(to_string(q));
    return a;
}

struct Report {
    std::string name;
    bool passed = true;
    Json detail = Json::object();
    std::vector<std::string> failures;

    void fail(std::string why)
    {
        passed = false;
        if (failures.size() < 20) failures.push_back(std::move(why));
    }

    void require(bool ok, const std::string& why)
    {
        if (!ok) fail(why);
    }

    Json to_json() const
    {
        Json j;
        j["check"] = name;
        j["passed"] = passed;
        if (!failures.empty()) j["failures"] = failures;
        for (const auto& [k, v] : detail.items()) j[k] = v;
        return j;
    }
};

}  // namespace gillab
