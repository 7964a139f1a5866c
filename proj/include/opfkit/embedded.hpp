#pragma once

#include <map>
#include <string>
#include <string_view>

namespace opfkit::embedded {

/// Data files compiled into the library (case files under "cases/",
/// scenario trees under "trees/", rule tables under "rules/").
const std::map<std::string, std::string_view>& files();

}  // namespace opfkit::embedded
