#include "ptrack/audio_io.hpp"

#include "ptrack/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

static_assert(std::endian::native == std::endian::little, "audio I/O assumes a little-endian host");

namespace ptrack {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
void put(std::vector<char>& buf, T value)
{
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

void put_tag(std::vector<char>& buf, const char* tag) { buf.insert(buf.end(), tag, tag + 4); }

template <typename T>
T get(const std::vector<char>& buf, std::size_t offset)
{
    if (offset + sizeof(T) > buf.size())
        throw InvalidInput("truncated WAV file");
    T value;
    std::memcpy(&value, buf.data() + offset, sizeof(T));
    return value;
}

std::vector<char> slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<char>& bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("cannot write " + path.string());
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out)
        throw InvalidInput("write failed for " + path.string());
}

} // namespace

void write_wav(const std::filesystem::path& path, const SignalBuffer& signal, WavFormat format)
{
    if (signal.fs <= 0 || signal.fs != std::round(signal.fs))
        throw InvalidInput("WAV needs a positive integer sample rate");
    const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
    const std::uint16_t block = bits / 8;
    const auto n = std::uint32_t(signal.size());
    const std::uint32_t data_bytes = n * block;
    const auto rate = std::uint32_t(signal.fs);

    std::vector<char> buf;
    buf.reserve(44 + data_bytes);
    put_tag(buf, "RIFF");
    put<std::uint32_t>(buf, 36 + data_bytes);
    put_tag(buf, "WAVE");
    put_tag(buf, "fmt ");
    put<std::uint32_t>(buf, 16);
    put<std::uint16_t>(buf, format == WavFormat::pcm16 ? kFormatPcm : kFormatFloat);
    put<std::uint16_t>(buf, 1);
    put<std::uint32_t>(buf, rate);
    put<std::uint32_t>(buf, rate * block);
    put<std::uint16_t>(buf, block);
    put<std::uint16_t>(buf, bits);
    put_tag(buf, "data");
    put<std::uint32_t>(buf, data_bytes);
    for (Eigen::Index i = 0; i < signal.size(); ++i) {
        const double v = signal.samples[i];
        if (format == WavFormat::pcm16)
            put<std::int16_t>(buf, std::int16_t(std::lround(std::clamp(v, -1.0, 1.0) * 32767.0)));
        else
            put<float>(buf, float(v));
    }
    dump(path, buf);
}

SignalBuffer read_wav(const std::filesystem::path& path)
{
    const std::vector<char> buf = slurp(path);
    if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
        std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw InvalidInput(path.string() + " is not a RIFF/WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    std::size_t offset = 12;
    while (offset + 8 <= buf.size()) {
        const std::string tag(buf.data() + offset, 4);
        const auto size = get<std::uint32_t>(buf, offset + 4);
        const std::size_t body = offset + 8;
        if (body + size > buf.size())
            throw InvalidInput("truncated chunk '" + tag + "' in " + path.string());
        if (tag == "fmt ") {
            format = get<std::uint16_t>(buf, body);
            channels = get<std::uint16_t>(buf, body + 2);
            rate = get<std::uint32_t>(buf, body + 4);
            bits = get<std::uint16_t>(buf, body + 14);
            if (format == kFormatExtensible && size >= 26)
                format = get<std::uint16_t>(buf, body + 24);
            have_fmt = true;
        } else if (tag == "data") {
            if (!have_fmt)
                throw InvalidInput("data chunk before fmt chunk in " + path.string());
            if (channels != 1)
                throw InvalidInput("only mono WAV files are supported");
            SignalBuffer out;
            out.fs = rate;
            if (format == kFormatPcm && bits == 16) {
                out.samples.resize(size / 2);
                for (Eigen::Index i = 0; i < out.samples.size(); ++i)
                    out.samples[i] = get<std::int16_t>(buf, body + 2 * std::size_t(i)) / 32767.0;
            } else if (format == kFormatFloat && bits == 32) {
                out.samples.resize(size / 4);
                for (Eigen::Index i = 0; i < out.samples.size(); ++i)
                    out.samples[i] = get<float>(buf, body + 4 * std::size_t(i));
            } else {
                throw InvalidInput("unsupported WAV encoding (need 16-bit PCM or 32-bit float)");
            }
            return out;
        }
        offset = body + size + (size & 1);
    }
    throw InvalidInput("no data chunk in " + path.string());
}

void write_raw_f64(const std::filesystem::path& path, const SignalBuffer& signal)
{
    std::vector<char> bytes(std::size_t(signal.size()) * sizeof(double));
    std::memcpy(bytes.data(), signal.samples.data(), bytes.size());
    dump(path, bytes);
    const nlohmann::json header = {{"fs", signal.fs}, {"n_samples", signal.size()}};
    std::ofstream side(path.string() + ".json");
    if (!side)
        throw InvalidInput("cannot write sidecar for " + path.string());
    side << header.dump(2) << '\n';
}

SignalBuffer read_raw_f64(const std::filesystem::path& path)
{
    std::ifstream side(path.string() + ".json");
    if (!side)
        throw InvalidInput("missing sidecar " + path.string() + ".json");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(side);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("bad sidecar header: ") + e.what());
    }
    const std::vector<char> bytes = slurp(path);
    const auto n = header.at("n_samples").get<Eigen::Index>();
    if (bytes.size() != std::size_t(n) * sizeof(double))
        throw InvalidInput("raw file size does not match sidecar n_samples");
    SignalBuffer out;
    out.fs = header.at("fs").get<double>();
    out.samples.resize(n);
    std::memcpy(out.samples.data(), bytes.data(), bytes.size());
    return out;
}

} // namespace ptrack
