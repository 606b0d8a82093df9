// SPDX-License-Identifier: Apache-2.0
#include "pilotcov/covariance_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace pilotcov {
namespace {

static_assert(std::endian::native == std::endian::little, "covariance files assume a little-endian host");

constexpr std::array<char, 4> kMagic{'P', 'C', 'O', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw IoError(path, "truncated covariance file");
    return value;
}

}  // namespace

void write_covariance_set(const std::string& path, const std::vector<CovarianceRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(records.size()));
    for (const auto& rec : records) {
        const auto& r = rec.covariance.entries;
        put<std::uint32_t>(out, static_cast<std::uint32_t>(r.rows()));
        put<double>(out, rec.covariance.scale);
        std::uint8_t kind = 0;
        double p0 = 0;
        double p1 = 0;
        if (const auto* d = std::get_if<PointAoa<double>>(&rec.density.variant())) {
            p0 = d->angle;
        } else if (const auto* u = std::get_if<UniformAoa<double>>(&rec.density.variant())) {
            kind = 1;
            p0 = u->mean;
            p1 = u->half_width;
        } else {
            const auto& g = std::get<GaussianAoa<double>>(rec.density.variant());
            kind = 2;
            p0 = g.mean;
            p1 = g.stddev;
        }
        put<std::uint8_t>(out, kind);
        put<double>(out, p0);
        put<double>(out, p1);
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
            for (Eigen::Index j = 0; j < r.cols(); ++j) {
                put<float>(out, static_cast<float>(r(i, j).real()));
                put<float>(out, static_cast<float>(r(i, j).imag()));
            }
        }
    }
    if (!out) throw IoError(path, "write failed");
}

std::vector<CovarianceRecord> read_covariance_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError(path, "not a covariance file");
    if (get<std::uint32_t>(in, path) != kVersion) throw IoError(path, "unsupported covariance file version");
    const auto count = get<std::uint32_t>(in, path);
    std::vector<CovarianceRecord> records;
    records.reserve(count);
    for (std::uint32_t n = 0; n < count; ++n) {
        const auto m = static_cast<Eigen::Index>(get<std::uint32_t>(in, path));
        const auto scale = get<double>(in, path);
        const auto kind = get<std::uint8_t>(in, path);
        const auto p0 = get<double>(in, path);
        const auto p1 = get<double>(in, path);
        CMatrixXd r(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const float re = get<float>(in, path);
                const float im = get<float>(in, path);
                r(i, j) = {re, im};
            }
        }
        AoaDensity<double> density = AoaDensity<double>::point(p0);
        switch (kind) {
            case 0: break;
            case 1: density = AoaDensity<double>::uniform(p0, p1); break;
            case 2: density = AoaDensity<double>::gaussian(p0, p1); break;
            default: throw IoError(path, "unknown density kind " + std::to_string(kind));
        }
        records.push_back({{std::move(r), scale}, density});
    }
    return records;
}

}  // namespace pilotcov
