// SPDX-License-Identifier: Apache-2.0
//
// Binary covariance-set file.
//
//   file   := magic "PCOV" | u32 version (=1) | u32 count | record * count
//   record := u32 M | f64 delta_sq | u8 kind (0 point, 1 uniform, 2 gaussian)
//             | f64 param0 | f64 param1 | (f32 re, f32 im) * M*M, row-major
//
// param0 is the angle (point) or the mean; param1 is 0, the half width or the
// standard deviation. Angles are radians. All fields little-endian.
#pragma once

#include <string>
#include <vector>

#include "pilotcov/covariance.hpp"

namespace pilotcov {

struct CovarianceRecord {
    CovarianceMatrix<double> covariance;
    AoaDensity<double> density;
};

void write_covariance_set(const std::string& path, const std::vector<CovarianceRecord>& records);
std::vector<CovarianceRecord> read_covariance_set(const std::string& path);

}  // namespace pilotcov
