#pragma once

#include "banditvote/deepset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace banditvote {

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// JSON header describing the architecture plus base64 little-endian f64
// blocks, one per weight matrix and bias vector.
void save_model(const DeepSetModel& model, const std::string& path);
DeepSetModel load_model(const std::string& path);

}  // namespace banditvote
