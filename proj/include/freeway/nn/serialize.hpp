#pragma once

#include <string>

#include "freeway/nn/network.hpp"

namespace freeway::nn {

// Text parameter format, bit-exact across save/load:
//
//   qnetparams 1
//   arch plain
//   layers 30:128:relu 128:128:relu 128:5:linear
//   W0 128 30 <entries...>
//   b0 128 1 <entries...>
//   ...
//
// Dueling files carry three descriptor lines (trunk/value/advantage) and
// matrix names prefixed with the group. Entries are row-major decimal floats
// printed with 17 significant digits so a 64-bit value round-trips exactly.
std::string serialize_params(const QNetwork& net);

// Parses a complete parameter file. Throws ParamsFormatError naming the
// offending line on any defect; no partial network is ever returned.
QNetwork parse_params(const std::string& text);

void save_params(const QNetwork& net, const std::string& path);
QNetwork load_params(const std::string& path);

// Human-readable architecture descriptor, e.g. "plain 30:128:relu ..." ;
// used in mismatch errors so both shapes are named.
std::string describe_architecture(const QNetwork& net);

}  // namespace freeway::nn
