#include "dawkit/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace dawkit {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

struct Reader {
    std::span<const uint8_t> bytes;
    size_t pos = 0;

    size_t remaining() const { return bytes.size() - pos; }

    void need(size_t n, const char* what) {
        if (remaining() < n)
            throw Error(ErrorCode::MissingChunk, std::string("truncated ") + what);
    }

    uint32_t u32(const char* what) {
        need(4, what);
        uint32_t v = static_cast<uint32_t>(bytes[pos]) | (static_cast<uint32_t>(bytes[pos + 1]) << 8) |
                     (static_cast<uint32_t>(bytes[pos + 2]) << 16) |
                     (static_cast<uint32_t>(bytes[pos + 3]) << 24);
        pos += 4;
        return v;
    }

    uint16_t u16(const char* what) {
        need(2, what);
        uint16_t v = static_cast<uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return v;
    }

    std::span<const uint8_t> raw(size_t n, const char* what) {
        need(n, what);
        auto out = bytes.subspan(pos, n);
        pos += n;
        return out;
    }

    bool tag(const char* t) {
        if (remaining() < 4)
            return false;
        bool ok = std::memcmp(bytes.data() + pos, t, 4) == 0;
        pos += 4;
        return ok;
    }
};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
}

void put_tag(std::vector<uint8_t>& out, const char* t) {
    out.insert(out.end(), t, t + 4);
}

int16_t saturate16(float x) {
    const double scaled = std::llround(static_cast<double>(x) * 32768.0);
    return static_cast<int16_t>(std::clamp<double>(scaled, -32768.0, 32767.0));
}

int32_t saturate24(float x) {
    const double scaled = std::llround(static_cast<double>(x) * 8388608.0);
    return static_cast<int32_t>(std::clamp<double>(scaled, -8388608.0, 8388607.0));
}

} // namespace

WavFile read_wav(std::span<const uint8_t> bytes) {
    Reader r{bytes};
    if (!r.tag("RIFF"))
        throw Error(ErrorCode::NotRiff, "file does not start with RIFF");
    r.u32("RIFF size");
    if (!r.tag("WAVE"))
        throw Error(ErrorCode::NotRiff, "RIFF form type is not WAVE");

    bool have_fmt = false;
    uint16_t format_code = 0;
    uint16_t channels = 0;
    uint32_t sample_rate = 0;
    uint16_t bits = 0;
    std::span<const uint8_t> data;
    bool have_data = false;

    while (r.remaining() >= 8) {
        char id[5] = {};
        std::memcpy(id, bytes.data() + r.pos, 4);
        r.pos += 4;
        uint32_t size = r.u32("chunk size");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16)
                throw Error(ErrorCode::MissingChunk, "fmt chunk too small");
            Reader f{r.raw(size, "fmt chunk")};
            format_code = f.u16("format");
            channels = f.u16("channels");
            sample_rate = f.u32("sample rate");
            f.u32("byte rate");
            f.u16("block align");
            bits = f.u16("bits per sample");
            if (format_code == kFormatExtensible) {
                // cbSize, valid bits, channel mask, then the SubFormat GUID
                // whose first two bytes are the real format code.
                f.u16("cbSize");
                f.u16("valid bits");
                f.u32("channel mask");
                format_code = f.u16("subformat");
            }
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = r.raw(std::min<size_t>(size, r.remaining()), "data chunk");
            if (data.size() < size)
                throw Error(ErrorCode::MissingChunk, "data chunk truncated");
            have_data = true;
        } else {
            // unknown chunk: skip, chunks are word-aligned
            size_t skip = std::min<size_t>(size + (size & 1), r.remaining());
            r.pos += skip;
            continue;
        }
        if (size & 1)
            r.pos += std::min<size_t>(1, r.remaining());
    }

    if (!have_fmt)
        throw Error(ErrorCode::MissingChunk, "no fmt chunk");
    if (!have_data)
        throw Error(ErrorCode::MissingChunk, "no data chunk");
    if (channels < 1 || channels > 2)
        throw Error(ErrorCode::UnsupportedEncoding,
                    "unsupported channel count " + std::to_string(channels));
    if (sample_rate == 0)
        throw Error(ErrorCode::MissingChunk, "sample rate is zero");

    WavEncoding encoding;
    if (format_code == kFormatPcm && bits == 16)
        encoding = WavEncoding::Pcm16;
    else if (format_code == kFormatPcm && bits == 24)
        encoding = WavEncoding::Pcm24;
    else if (format_code == kFormatFloat && bits == 32)
        encoding = WavEncoding::Float32;
    else
        throw Error(ErrorCode::UnsupportedEncoding,
                    "format " + std::to_string(format_code) + " / " + std::to_string(bits) + " bit");

    const size_t bytes_per_sample = bits / 8;
    const size_t frame_bytes = bytes_per_sample * channels;
    const int64_t frames = frame_bytes ? static_cast<int64_t>(data.size() / frame_bytes) : 0;

    WavFile out;
    out.format = {encoding, channels, static_cast<double>(sample_rate)};
    out.buffer = AudioBuffer(channels, frames, static_cast<double>(sample_rate));

    for (int64_t n = 0; n < frames; ++n) {
        for (int c = 0; c < channels; ++c) {
            const uint8_t* p = data.data() + static_cast<size_t>(n) * frame_bytes +
                               static_cast<size_t>(c) * bytes_per_sample;
            float v = 0.0f;
            switch (encoding) {
                case WavEncoding::Pcm16: {
                    int16_t s = static_cast<int16_t>(p[0] | (p[1] << 8));
                    v = static_cast<float>(s) / 32768.0f;
                    break;
                }
                case WavEncoding::Pcm24: {
                    int32_t s = static_cast<int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
                    if (s & 0x800000)
                        s |= ~0xFFFFFF;  // sign extend
                    v = static_cast<float>(s) / 8388608.0f;
                    break;
                }
                case WavEncoding::Float32: {
                    uint32_t u = static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
                                 (static_cast<uint32_t>(p[2]) << 16) |
                                 (static_cast<uint32_t>(p[3]) << 24);
                    std::memcpy(&v, &u, 4);
                    break;
                }
            }
            out.buffer.channel(c)[n] = v;
        }
    }
    return out;
}

WavFile read_wav_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return read_wav(bytes);
}

std::vector<uint8_t> write_wav(const AudioBuffer& buffer, WavEncoding encoding) {
    const int channels = buffer.channels();
    const int64_t frames = buffer.frames();
    uint16_t bits = 0, format = 0;
    switch (encoding) {
        case WavEncoding::Pcm16: bits = 16; format = kFormatPcm; break;
        case WavEncoding::Pcm24: bits = 24; format = kFormatPcm; break;
        case WavEncoding::Float32: bits = 32; format = kFormatFloat; break;
    }
    const uint32_t bytes_per_sample = bits / 8u;
    const uint32_t frame_bytes = bytes_per_sample * static_cast<uint32_t>(channels);
    const uint32_t data_size = static_cast<uint32_t>(frames) * frame_bytes;
    const uint32_t sr = static_cast<uint32_t>(std::llround(buffer.sample_rate()));

    const bool needs_fact = format != kFormatPcm;
    const uint32_t riff_size = 4 + (8 + 16) + (needs_fact ? 12 : 0) + (8 + data_size);

    std::vector<uint8_t> out;
    out.reserve(riff_size + 8);
    put_tag(out, "RIFF");
    put_u32(out, riff_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, format);
    put_u16(out, static_cast<uint16_t>(channels));
    put_u32(out, sr);
    put_u32(out, sr * frame_bytes);
    put_u16(out, static_cast<uint16_t>(frame_bytes));
    put_u16(out, bits);
    if (needs_fact) {
        put_tag(out, "fact");
        put_u32(out, 4);
        put_u32(out, static_cast<uint32_t>(frames));
    }
    put_tag(out, "data");
    put_u32(out, data_size);

    for (int64_t n = 0; n < frames; ++n) {
        for (int c = 0; c < channels; ++c) {
            const float v = buffer.channel(c)[n];
            switch (encoding) {
                case WavEncoding::Pcm16: {
                    const int16_t s = saturate16(v);
                    out.push_back(static_cast<uint8_t>(s & 0xFF));
                    out.push_back(static_cast<uint8_t>((s >> 8) & 0xFF));
                    break;
                }
                case WavEncoding::Pcm24: {
                    const int32_t s = saturate24(v);
                    out.push_back(static_cast<uint8_t>(s & 0xFF));
                    out.push_back(static_cast<uint8_t>((s >> 8) & 0xFF));
                    out.push_back(static_cast<uint8_t>((s >> 16) & 0xFF));
                    break;
                }
                case WavEncoding::Float32: {
                    uint32_t u;
                    std::memcpy(&u, &v, 4);
                    put_u32(out, u);
                    break;
                }
            }
        }
    }
    return out;
}

void write_wav_file(const std::string& path, const AudioBuffer& buffer, WavEncoding encoding) {
    const auto bytes = write_wav(buffer, encoding);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(ErrorCode::IoError, "short write to " + path);
}

} // namespace dawkit
