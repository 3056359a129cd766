// Copyright 2026 The bcprobe Authors.
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

#ifndef BCPROBE_TEXT_HPP_
#define BCPROBE_TEXT_HPP_

#include <string>
#include <string_view>

namespace bcprobe {

enum class Language { kEn, kJa };

std::string_view LanguageName(Language lang);  // "en" / "ja"
Language ParseLanguage(std::string_view name);  // accepts en/EN/ja/JA

namespace text {

// Code-point level view of UTF-8. Offsets used throughout the library are
// code-point offsets into these strings.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view cps);
std::string Encode(char32_t cp);

bool IsSpace(char32_t c);
// ASCII punctuation plus the Japanese marks 、。・！？
bool IsPunct(char32_t c);
bool IsComma(char32_t c);  // ',' or '、'
bool IsAlnum(char32_t c);  // anything that is neither space nor punctuation
char32_t FoldCase(char32_t c);  // ASCII lowercase; identity elsewhere
std::u32string FoldCase(std::u32string_view s);

// Trims surrounding whitespace and collapses inner whitespace runs to one
// U+0020.
std::string Canonicalize(std::string_view utf8);

}  // namespace text
}  // namespace bcprobe

#endif  // BCPROBE_TEXT_HPP_
