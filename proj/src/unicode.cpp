#include "tsk/unicode.hpp"

namespace tsk {

namespace {

constexpr char32_t replacement = 0xFFFD;

// Returns the decoded scalar and advances pos; on error advances by one byte
// past the maximal invalid prefix and returns U+FFFD.
char32_t next_scalar(std::string_view s, std::size_t &pos, bool &ok) {
    const auto lead = static_cast<unsigned char>(s[pos]);
    ok = true;
    if (lead < 0x80) {
        ++pos;
        return lead;
    }

    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
        min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
        min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
        min = 0x10000;
    } else {
        ++pos;
        ok = false;
        return replacement;
    }

    std::size_t i = 1;
    for (; i < len; ++i) {
        if (pos + i >= s.size()) {
            break;
        }
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            break;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    if (i < len) {
        pos += i;
        ok = false;
        return replacement;
    }
    pos += len;
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ok = false;
        return replacement;
    }
    return cp;
}

void append_utf8(std::string &out, char32_t c) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

}  // namespace

DecodeResult decode_utf8(std::string_view bytes) {
    DecodeResult result;
    result.text.reserve(bytes.size());
    std::size_t pos = 0;
    bool ok = true;
    while (pos < bytes.size()) {
        result.text.push_back(next_scalar(bytes, pos, ok));
        if (!ok) {
            ++result.replacements;
        }
    }
    return result;
}

std::string encode_utf8(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t c : text) {
        append_utf8(out, c);
    }
    return out;
}

DecodeResult sanitize_utf8(std::string_view bytes, std::string &out) {
    DecodeResult decoded = decode_utf8(bytes);
    out = encode_utf8(decoded.text);
    return decoded;
}

char32_t to_lower(char32_t c) {
    if (c < 0x80) {
        return (c >= U'A' && c <= U'Z') ? c + 32 : c;
    }
    // Latin-1 Supplement, minus the multiplication sign
    if ((c >= 0xC0 && c <= 0xDE) && c != 0xD7) {
        return c + 32;
    }
    // Latin Extended-A: mostly even/odd pairs
    if (c == 0x130) {
        return U'i';
    }
    if (c >= 0x100 && c <= 0x137) {
        return c | 1;
    }
    if (c >= 0x139 && c <= 0x148) {
        return (c & 1) ? c + 1 : c;
    }
    if (c >= 0x14A && c <= 0x177) {
        return c | 1;
    }
    if (c == 0x178) {
        return 0xFF;
    }
    if (c >= 0x179 && c <= 0x17E) {
        return (c & 1) ? c + 1 : c;
    }
    // Greek
    if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) {
        return c + 32;
    }
    if (c == 0x386) {
        return 0x3AC;
    }
    if (c >= 0x388 && c <= 0x38A) {
        return c + 37;
    }
    if (c == 0x38C) {
        return 0x3CC;
    }
    if (c == 0x38E || c == 0x38F) {
        return c + 63;
    }
    // Cyrillic
    if (c >= 0x400 && c <= 0x40F) {
        return c + 80;
    }
    if (c >= 0x410 && c <= 0x42F) {
        return c + 32;
    }
    if (c >= 0x460 && c <= 0x4FF && c != 0x482 && !(c >= 0x483 && c <= 0x489) && c != 0x4C0) {
        if (c >= 0x4C1 && c <= 0x4CE) {
            return (c & 1) ? c + 1 : c;
        }
        return c | 1;
    }
    return c;
}

std::u32string to_lower(std::u32string_view text) {
    std::u32string out(text);
    for (char32_t &c : out) {
        c = to_lower(c);
    }
    return out;
}

}  // namespace tsk
