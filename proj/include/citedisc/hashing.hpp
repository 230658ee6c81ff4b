// Copyright 2026 The citedisc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace citedisc {

// MurmurHash3 x86 32-bit.
std::uint32_t murmur3_32(std::string_view data, std::uint32_t seed = 0);

// FNV-1a 64-bit, used for log and config digests.
std::uint64_t fnv1a_64(std::string_view data);

// fnv1a_64 as 16 lowercase hex digits.
std::string hex_digest(std::string_view data);

}  // namespace citedisc
