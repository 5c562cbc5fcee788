#include "xrt/volume_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace xrt {

namespace {

std::uint32_t to_little(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
    return v;
}

}  // namespace

void write_volume(const std::string& stem, const VolumeGrid& vol, const VolumeMetadata& meta) {
    std::vector<std::uint32_t> words(vol.size());
    const auto samples = vol.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        words[i] = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(samples[i])));
    }
    {
        std::ofstream raw(stem + ".raw", std::ios::binary | std::ios::trunc);
        if (!raw) throw std::runtime_error("cannot write '" + stem + ".raw'");
        raw.write(reinterpret_cast<const char*>(words.data()),
                  static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
        if (!raw) throw std::runtime_error("short write to '" + stem + ".raw'");
    }

    const auto& d = vol.dims();
    nlohmann::ordered_json j;
    j["format"] = "float32-le";
    j["order"] = "x-fastest";
    j["dims"] = {d[0], d[1], d[2]};
    j["spacing"] = {vol.spacing().x, vol.spacing().y, vol.spacing().z};
    j["origin"] = {vol.origin().x, vol.origin().y, vol.origin().z};
    j["branch"] = to_string(meta.branch);
    j["normalization"] = meta.normalization;
    j["quadrature_count"] = meta.quadrature_count;
    j["diff_step"] = meta.diff_step;
    std::ofstream side(stem + ".json", std::ios::trunc);
    if (!side) throw std::runtime_error("cannot write '" + stem + ".json'");
    side << j.dump(2) << '\n';
}

VolumeGrid read_volume(const std::string& stem, VolumeMetadata* meta) {
    std::ifstream side(stem + ".json");
    if (!side) throw std::runtime_error("cannot open '" + stem + ".json'");
    const auto j = nlohmann::json::parse(side);
    if (j.at("format") != "float32-le") throw std::runtime_error("unsupported volume format");
    const std::array<std::size_t, 3> dims{j.at("dims")[0], j.at("dims")[1], j.at("dims")[2]};
    const Vec3 spacing{j.at("spacing")[0], j.at("spacing")[1], j.at("spacing")[2]};
    const Vec3 origin{j.at("origin")[0], j.at("origin")[1], j.at("origin")[2]};
    if (meta) {
        meta->branch = parse_branch(j.at("branch"));
        meta->normalization = j.at("normalization");
        meta->quadrature_count = j.at("quadrature_count");
        meta->diff_step = j.at("diff_step");
    }

    const std::size_t count = dims[0] * dims[1] * dims[2];
    std::vector<std::uint32_t> words(count);
    std::ifstream raw(stem + ".raw", std::ios::binary);
    if (!raw) throw std::runtime_error("cannot open '" + stem + ".raw'");
    raw.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
    if (raw.gcount() != static_cast<std::streamsize>(count * sizeof(std::uint32_t))) {
        throw std::runtime_error("'" + stem + ".raw' is shorter than its metadata claims");
    }
    std::vector<double> samples(count);
    for (std::size_t i = 0; i < count; ++i) samples[i] = std::bit_cast<float>(to_little(words[i]));
    return VolumeGrid(origin, spacing, dims, std::move(samples));
}

}  // namespace xrt
