#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace citymap {

enum class TextEncoding { utf8, utf8_bom, latin1 };

std::string_view to_string(TextEncoding encoding);

struct DecodedText {
  std::string utf8;
  TextEncoding encoding = TextEncoding::utf8;
};

/// Converts raw file bytes to UTF-8. A UTF-8 BOM is stripped; input that is
/// not valid UTF-8 is assumed to be Latin-1 and transcoded.
DecodedText decode_text(std::string_view bytes);

bool is_valid_utf8(std::string_view bytes);

std::string_view trim(std::string_view s);
std::string to_upper(std::string_view s);

/// Splits on `sep`, trimming every piece. Empty pieces are kept.
std::vector<std::string> split_trimmed(std::string_view s, char sep);

bool contains_digit(std::string_view s);

}  // namespace citymap
