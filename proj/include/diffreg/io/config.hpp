#pragma once

#include <istream>
#include <map>
#include <string>

namespace diffreg {

using KeyValues = std::map<std::string, std::string>;

// Flat key=value text; '#' starts a comment, blank lines are skipped.
KeyValues parse_key_values(std::istream& in);
KeyValues read_config_file(const std::string& path);

}  // namespace diffreg
