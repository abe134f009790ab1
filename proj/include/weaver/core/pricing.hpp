#pragma once

#include <map>
#include <string>
#include <string_view>

#include "weaver/core/money.hpp"
#include "weaver/core/types.hpp"

namespace weaver {

struct ModelPrice {
    Money input_per_1k;
    Money output_per_1k;
};

/// Token prices per model, in dollars per 1K tokens.
///
/// Prices are restricted to six fractional digits so that any integer token
/// count prices to an exact nano-dollar amount.
class PriceSheet {
public:
    PriceSheet() = default;

    // Token prices used for the budget experiments (AWS Bedrock list prices).
    static PriceSheet bedrock_defaults();

    void set(std::string model, ModelPrice price);
    bool contains(std::string_view model) const;
    const ModelPrice& at(std::string_view model) const;
    const std::map<std::string, ModelPrice, std::less<>>& models() const { return prices_; }

    // Every price multiplied by k (k > 0).
    PriceSheet scaled(std::int64_t k) const;

private:
    std::map<std::string, ModelPrice, std::less<>> prices_;
};

CostRecord price_cost(const TokenUsage& usage, std::string_view model, const PriceSheet& sheet);

}  // namespace weaver
