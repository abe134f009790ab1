#include "weaver/core/pricing.hpp"

#include "weaver/core/errors.hpp"

namespace weaver {

namespace {
__extension__ typedef __int128 wide_int;
}  // namespace

PriceSheet PriceSheet::bedrock_defaults() {
    PriceSheet sheet;
    sheet.set("claude-3-5-haiku-latest", {Money::parse("0.0008"), Money::parse("0.004")});
    sheet.set("claude-3-7-sonnet-latest", {Money::parse("0.003"), Money::parse("0.015")});
    sheet.set("qwen3-32b", {Money::parse("0.0007"), Money::parse("0.0028")});
    return sheet;
}

void PriceSheet::set(std::string model, ModelPrice price) {
    if (model.empty()) throw InvalidArgument("price sheet: empty model name");
    for (Money p : {price.input_per_1k, price.output_per_1k}) {
        if (p.is_negative()) throw InvalidArgument("price sheet: negative price for " + model);
        if (p.fractional_digits() > 6)
            throw InvalidArgument("price sheet: " + model + " price " + p.str() +
                                  " has more than six fractional digits");
    }
    prices_[std::move(model)] = price;
}

bool PriceSheet::contains(std::string_view model) const { return prices_.find(model) != prices_.end(); }

const ModelPrice& PriceSheet::at(std::string_view model) const {
    auto it = prices_.find(model);
    if (it == prices_.end()) throw UnknownModel("no price for model '" + std::string(model) + "'");
    return it->second;
}

PriceSheet PriceSheet::scaled(std::int64_t k) const {
    if (k <= 0) throw InvalidArgument("price scale must be positive");
    PriceSheet out;
    for (const auto& [model, p] : prices_) out.set(model, {p.input_per_1k * k, p.output_per_1k * k});
    return out;
}

CostRecord price_cost(const TokenUsage& usage, std::string_view model, const PriceSheet& sheet) {
    if (usage.input_tokens < 0 || usage.output_tokens < 0) throw InvalidArgument("negative token usage");
    const ModelPrice& price = sheet.at(model);
    // price has <= 6 fractional digits, i.e. its nano value is a multiple of
    // 1000, so tokens * price / 1000 is an integer number of nanos.
    wide_int nanos = static_cast<wide_int>(usage.input_tokens) * price.input_per_1k.nanos() +
                     static_cast<wide_int>(usage.output_tokens) * price.output_per_1k.nanos();
    return CostRecord{usage, std::string(model), Money::from_nanos(static_cast<std::int64_t>(nanos / 1000))};
}

}  // namespace weaver
