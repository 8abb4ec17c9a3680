#pragma once

#include <string>
#include <vector>

#include "equid/json_io.hpp"

namespace equid {

// The shipped test systems (also under data/corpus/), STRONG rule unless the
// name says otherwise. "A" is the sum of prime factors with multiplicity.
std::vector<SystemSpec> corpus();
SystemSpec corpus_entry(const std::string& name);

}  // namespace equid
