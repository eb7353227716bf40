// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

namespace mimosim {

/// sup_x |ECDF(x) - cdf(x)| for a one-sample Kolmogorov-Smirnov test.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf)
{
    if (samples.empty()) {
        throw DomainError("ks_statistic: no samples");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

/// sup_x |ECDF_a(x) - ECDF_b(x)|
inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) {
        throw DomainError("ks_two_sample: both samples must be nonempty");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) {
            ++i;
        }
        while (j < b.size() && b[j] <= x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Fraction of samples <= x; samples must be sorted ascending.
inline double ecdf_at(const std::vector<double>& sorted, double x)
{
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

struct EcdfStep {
    double value = 0.0;
    double probability = 0.0;
};

/// One step per distinct value; the last step reaches exactly 1.
inline std::vector<EcdfStep> ecdf(std::vector<double> values)
{
    if (values.empty()) {
        throw DomainError("ecdf: no values");
    }
    std::sort(values.begin(), values.end());
    std::vector<EcdfStep> out;
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i + 1 < values.size() && values[i + 1] == values[i]) {
            continue;
        }
        out.push_back({values[i], i + 1 == values.size() ? 1.0 : static_cast<double>(i + 1) / n});
    }
    return out;
}

inline void write_ecdf_csv(std::ostream& os, const std::vector<EcdfStep>& steps, const char* value_column = "value")
{
    os.precision(std::numeric_limits<double>::max_digits10);
    os << value_column << ",probability\n";
    for (const auto& s : steps) {
        os << s.value << ',' << s.probability << '\n';
    }
}

}  // namespace mimosim
