#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cavistim::io {

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// "start:stop:count" (linear, endpoints included), "log:start:stop:count"
/// (geometric) or a comma list "a,b,c". Throws GridError on anything else.
std::vector<double> parse_grid(const std::string& text);

}  // namespace cavistim::io
