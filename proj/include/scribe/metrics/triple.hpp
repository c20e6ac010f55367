#pragma once

#include <string>
#include <vector>

namespace scribe {

struct Triple {
    std::string subject;
    std::string predicate;
    std::string object;

    bool operator==(const Triple&) const = default;
};

// Canonical comparison form: fields joined by " | ".
std::string joined(const Triple& t);

using TripleList = std::vector<Triple>;

} // namespace scribe
