#pragma once

#include <iosfwd>
#include <string>

#include "scca/exact.hpp"

namespace scca {

/// Instance file: {n, m, s1, s2, label, A, B, C, population?}, matrices as
/// arrays of rows. Numbers are written in shortest round-trip form.
std::string instance_to_json(const CovarianceInstance& inst, int indent = -1);
CovarianceInstance instance_from_json(const std::string& text);

void save_instance(const CovarianceInstance& inst, const std::string& path);
CovarianceInstance load_instance(const std::string& path);

/// Certificate summary: value, bound, gap, status, supports, loadings,
/// counters, method, reduction, rank-one residual and big-M constants.
std::string certificate_to_json(const Certificate& cert, int indent = 2);

void save_certificate(const Certificate& cert, const std::string& path);

} // namespace scca
