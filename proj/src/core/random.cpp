#include "weaver/core/random.hpp"

#include <cstdio>

#include "weaver/core/errors.hpp"

namespace weaver {

std::string digest_hex(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

std::size_t Rng::categorical(std::span<const double> weights) {
    if (weights.empty()) throw InvalidArgument("categorical draw over no weights");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidArgument("negative sampling weight");
        total += w;
    }
    double u = uniform();
    if (total <= 0.0) return static_cast<std::size_t>(u * static_cast<double>(weights.size())) % weights.size();
    double target = u * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    // Rounding left target == total; return the last positive weight.
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return 0;
}

}  // namespace weaver
