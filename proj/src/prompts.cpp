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

#include "citedisc/prompts.hpp"

namespace citedisc {

namespace resources {
// Generated at configure time from resources/prompts/*.txt.
extern const std::string_view relation_extraction_v1;
extern const std::string_view citation_selection_v1;
}  // namespace resources

const PromptTemplate& relation_extraction_template() {
  static const PromptTemplate tpl{"relation_extraction/v1", resources::relation_extraction_v1};
  return tpl;
}

const PromptTemplate& citation_selection_template() {
  static const PromptTemplate tpl{"citation_selection/v1", resources::citation_selection_v1};
  return tpl;
}

std::string fill_template(
    std::string_view text,
    const std::vector<std::pair<std::string_view, std::string_view>>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto key = text.substr(i + 1, close - i - 1);
        bool replaced = false;
        for (const auto& [name, value] : values) {
          if (name == key) {
            out.append(value);
            replaced = true;
            break;
          }
        }
        if (replaced) {
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

}  // namespace citedisc
