#include "veracity/util.hpp"

#include <cctype>

#include <openssl/evp.h>

namespace veracity::util {

namespace {

// Folds one two-byte UTF-8 sequence to lowercase. Returns false when the
// sequence is not a cased letter we know about.
bool lower_two_byte(unsigned char b0, unsigned char b1, unsigned char& o0, unsigned char& o1) {
    // Latin-1 Supplement: U+00C0..U+00DE map to +0x20, except U+00D7 (multiplication sign).
    if (b0 == 0xC3 && b1 >= 0x80 && b1 <= 0x9E && b1 != 0x97) {
        o0 = 0xC3;
        o1 = static_cast<unsigned char>(b1 + 0x20);
        return true;
    }
    // Latin Extended-A (U+0100..U+017F): cased pairs alternate. Three runs:
    //   U+0100..U+0137 and U+014A..U+0177: uppercase at even codepoints
    //   U+0139..U+0148 and U+0179..U+017E: uppercase at odd codepoints
    if (b0 == 0xC4 || b0 == 0xC5) {
        unsigned cp = ((b0 & 0x1Fu) << 6) | (b1 & 0x3Fu);
        unsigned lower = cp;
        if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
            if (cp % 2 == 0) lower = cp + 1;
        } else if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
            if (cp % 2 == 1) lower = cp + 1;
        }
        if (lower != cp) {
            o0 = static_cast<unsigned char>(0xC0 | (lower >> 6));
            o1 = static_cast<unsigned char>(0x80 | (lower & 0x3F));
            return true;
        }
    }
    return false;
}

} // namespace

std::string to_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            out.push_back(static_cast<char>(std::tolower(c)));
            ++i;
        } else if ((c & 0xE0) == 0xC0 && i + 1 < text.size()) {
            unsigned char c1 = static_cast<unsigned char>(text[i + 1]);
            unsigned char o0 = c, o1 = c1;
            lower_two_byte(c, c1, o0, o1);
            out.push_back(static_cast<char>(o0));
            out.push_back(static_cast<char>(o1));
            i += 2;
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

std::string trim(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

std::string collapse_ws(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_ws = true; // swallow leading whitespace
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!in_ws) out.push_back(' ');
            in_ws = true;
        } else {
            out.push_back(ch);
            in_ws = false;
        }
    }
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            std::string_view line = text.substr(start, i - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lines.emplace_back(line);
            start = i + 1;
        }
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

} // namespace veracity::util
